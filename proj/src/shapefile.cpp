#include "ipcfuse/shapefile.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "ipcfuse/errors.hpp"

namespace ipcfuse::ingest {

namespace {

using geom::Coord;
using geom::MultiPolygon;
using geom::Polygon;
using geom::Ring;

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  size_t size() const { return data_.size(); }
  size_t pos() const { return pos_; }
  void seek(size_t p) { pos_ = p; }

  uint32_t be_u32() { return (u8() << 24) | (u8() << 16) | (u8() << 8) | u8(); }
  int32_t be_i32() { return static_cast<int32_t>(be_u32()); }
  uint32_t le_u32() {
    uint32_t b0 = u8(), b1 = u8(), b2 = u8(), b3 = u8();
    return b0 | (b1 << 8) | (b2 << 16) | (b3 << 24);
  }
  int32_t le_i32() { return static_cast<int32_t>(le_u32()); }
  uint16_t le_u16() {
    uint16_t b0 = u8(), b1 = u8();
    return static_cast<uint16_t>(b0 | (b1 << 8));
  }
  double le_f64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(u8()) << (8 * i);
    return std::bit_cast<double>(v);
  }
  std::span<const uint8_t> bytes(size_t n) {
    need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  void skip(size_t n) { need(n), pos_ += n; }

 private:
  uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  void need(size_t n) const {
    if (pos_ + n > data_.size()) throw TruncatedFile("unexpected end of file");
  }

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

bool supported_shape_type(int t) { return t == 0 || t == 5 || t == 15; }

// Shapefile ring convention: outer rings clockwise, holes counter-clockwise.
double shoelace(const std::vector<Coord>& c) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < c.size(); ++i)
    acc += c[i].lon * c[i + 1].lat - c[i + 1].lon * c[i].lat;
  return 0.5 * acc;
}

bool point_in_ring(const std::vector<Coord>& ring, const Coord& q) {
  bool inside = false;
  for (size_t i = 0; i + 1 < ring.size(); ++i) {
    const Coord& a = ring[i];
    const Coord& b = ring[i + 1];
    if ((a.lat > q.lat) != (b.lat > q.lat)) {
      const double x = a.lon + (q.lat - a.lat) / (b.lat - a.lat) * (b.lon - a.lon);
      if (q.lon < x) inside = !inside;
    }
  }
  return inside;
}

MultiPolygon assemble_rings(std::vector<std::vector<Coord>> rings) {
  MultiPolygon geometry;
  std::vector<std::vector<Coord>> holes;
  std::vector<double> outer_areas;
  for (auto& r : rings) {
    if (r.size() < 4) continue;  // degenerate part
    const double a = shoelace(r);
    if (a <= 0) {
      // clockwise in file = outer ring
      Polygon p;
      p.outer.coords = std::move(r);
      geometry.parts.push_back(std::move(p));
      outer_areas.push_back(-a);
    } else {
      holes.push_back(std::move(r));
    }
  }
  if (geometry.parts.empty() && !holes.empty()) {
    // nonconforming orientation: treat every ring as an outer boundary
    for (auto& r : holes) {
      Polygon p;
      p.outer.coords = std::move(r);
      geometry.parts.push_back(std::move(p));
      outer_areas.push_back(shoelace(p.outer.coords));
    }
    holes.clear();
  }
  for (auto& h : holes) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(geometry.parts.size()); ++i) {
      if (!point_in_ring(geometry.parts[i].outer.coords, h.front())) continue;
      if (best < 0 || outer_areas[i] < outer_areas[best]) best = i;
    }
    if (best >= 0) {
      Ring ring;
      ring.coords = std::move(h);
      geometry.parts[best].holes.push_back(std::move(ring));
    }
    // holes outside every outer ring are dropped
  }
  geom::normalize_orientation(geometry);
  return geometry;
}

MultiPolygon parse_polygon_record(ByteReader& r, int shape_type) {
  r.skip(32);  // record bbox
  const int32_t num_parts = r.le_i32();
  const int32_t num_points = r.le_i32();
  if (num_parts < 0 || num_points < 0) throw TruncatedFile("negative part/point count");
  std::vector<int32_t> part_start(num_parts);
  for (auto& v : part_start) v = r.le_i32();
  std::vector<Coord> pts(num_points);
  for (auto& p : pts) {
    p.lon = r.le_f64();
    p.lat = r.le_f64();
  }
  if (shape_type == 15) {
    // PolygonZ: Z range + values; M block is optional and skipped by the
    // record-length bound in the caller.
    r.skip(16 + static_cast<size_t>(num_points) * 8);
  }

  std::vector<std::vector<Coord>> rings;
  for (int32_t i = 0; i < num_parts; ++i) {
    const int32_t begin = part_start[i];
    const int32_t end = (i + 1 < num_parts) ? part_start[i + 1] : num_points;
    if (begin < 0 || end > num_points || begin >= end) throw TruncatedFile("bad part offsets");
    std::vector<Coord> ring(pts.begin() + begin, pts.begin() + end);
    if (!(ring.front() == ring.back())) ring.push_back(ring.front());  // repair closure
    rings.push_back(std::move(ring));
  }
  return assemble_rings(std::move(rings));
}

std::vector<MultiPolygon> parse_shp(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 100) throw TruncatedFile("main header shorter than 100 bytes");
  if (r.be_i32() != 9994) throw NotAShapefile("bad file code");
  r.seek(24);
  const int64_t file_words = r.be_i32();
  const size_t declared = static_cast<size_t>(file_words) * 2;
  if (declared < 100) throw TruncatedFile("declared length shorter than the header");
  if (declared > bytes.size()) throw TruncatedFile("file shorter than declared length");
  if (r.le_i32() != 1000) throw NotAShapefile("unsupported version");
  const int header_type = r.le_i32();
  if (!supported_shape_type(header_type))
    throw UnsupportedShapeType("shape type " + std::to_string(header_type));
  r.seek(100);

  std::vector<MultiPolygon> out;
  while (r.pos() < declared) {
    if (r.pos() + 8 > declared) throw TruncatedFile("dangling record header");
    r.be_i32();  // record number
    const int64_t content_words = r.be_i32();
    if (content_words < 2) throw TruncatedFile("record content too short");
    const size_t content_len = static_cast<size_t>(content_words) * 2;
    if (r.pos() + content_len > declared) throw TruncatedFile("record exceeds file length");
    const size_t content_end = r.pos() + content_len;
    const int shape_type = r.le_i32();
    if (shape_type == 0) {
      out.emplace_back();  // null shape: empty geometry
    } else if (shape_type == header_type) {
      out.push_back(parse_polygon_record(r, shape_type));
    } else {
      throw UnsupportedShapeType("record shape type " + std::to_string(shape_type));
    }
    if (r.pos() > content_end) throw TruncatedFile("record payload overruns declared length");
    r.seek(content_end);
  }
  return out;
}

std::string latin1_to_utf8(std::span<const uint8_t> bytes) {
  std::string out;
  out.reserve(bytes.size());
  for (uint8_t b : bytes) {
    if (b < 0x80) {
      out += static_cast<char>(b);
    } else {
      out += static_cast<char>(0xC0 | (b >> 6));
      out += static_cast<char>(0x80 | (b & 0x3F));
    }
  }
  return out;
}

std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return c != ' ' && c != '\0'; };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

struct DbfField {
  std::string name;
  char type = 'C';
  int length = 0;
  int decimals = 0;
};

std::vector<std::vector<std::pair<std::string, AttrValue>>> parse_dbf(
    std::span<const uint8_t> bytes, const ShapefileOptions& options) {
  if (bytes.size() < 33) throw TruncatedFile("dbf header shorter than 33 bytes");
  ByteReader r(bytes);
  r.skip(4);  // version byte + last-update date
  const uint32_t record_count = r.le_u32();
  const uint16_t header_size = r.le_u16();
  const uint16_t record_size = r.le_u16();
  if (header_size < 33 || header_size > bytes.size()) throw TruncatedFile("bad dbf header size");

  std::vector<DbfField> fields;
  r.seek(32);
  while (true) {
    if (r.pos() >= bytes.size()) throw TruncatedFile("unterminated dbf field descriptors");
    if (bytes[r.pos()] == 0x0D) break;
    if (r.pos() + 32 > header_size) throw TruncatedFile("field descriptors overrun header");
    auto raw = r.bytes(32);
    DbfField f;
    size_t name_len = 0;
    while (name_len < 11 && raw[name_len] != 0) ++name_len;
    f.name.assign(reinterpret_cast<const char*>(raw.data()), name_len);
    f.type = static_cast<char>(raw[11]);
    f.length = raw[16];
    f.decimals = raw[17];
    fields.push_back(std::move(f));
  }

  size_t expected_record = 1;
  for (const auto& f : fields) expected_record += static_cast<size_t>(f.length);
  if (record_size != expected_record)
    throw TruncatedFile("dbf record size disagrees with field widths");

  std::vector<std::vector<std::pair<std::string, AttrValue>>> rows;
  rows.reserve(record_count);
  size_t off = header_size;
  for (uint32_t i = 0; i < record_count; ++i) {
    if (off + record_size > bytes.size()) throw TruncatedFile("dbf records truncated");
    ByteReader rec(bytes.subspan(off, record_size));
    rec.skip(1);  // deletion flag; shapefile tables do not use deletion
    std::vector<std::pair<std::string, AttrValue>> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      auto raw = rec.bytes(static_cast<size_t>(f.length));
      std::string text =
          options.dbf_utf8
              ? trim(std::string(reinterpret_cast<const char*>(raw.data()), raw.size()))
              : trim(latin1_to_utf8(raw));
      if (f.type == 'N' || f.type == 'F') {
        if (text.empty()) {
          row.emplace_back(f.name, AttrValue(int64_t{0}));
        } else if (f.decimals == 0 && text.find_first_of(".eE") == std::string::npos) {
          try {
            row.emplace_back(f.name, AttrValue(static_cast<int64_t>(std::stoll(text))));
          } catch (...) {
            row.emplace_back(f.name, AttrValue(text));
          }
        } else {
          try {
            row.emplace_back(f.name, AttrValue(std::stod(text)));
          } catch (...) {
            row.emplace_back(f.name, AttrValue(text));
          }
        }
      } else {
        row.emplace_back(f.name, AttrValue(std::move(text)));
      }
    }
    rows.push_back(std::move(row));
    off += record_size;
  }
  return rows;
}

}  // namespace

std::string attr_to_string(const AttrValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* i = std::get_if<int64_t>(&v)) return std::to_string(*i);
  const double d = std::get<double>(v);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", d);
  return buf;
}

const AttrValue* Feature::attr(std::string_view name) const {
  auto eq = [](std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(a[i])) !=
          std::tolower(static_cast<unsigned char>(b[i])))
        return false;
    }
    return true;
  };
  for (const auto& [k, v] : attributes) {
    if (eq(k, name)) return &v;
  }
  return nullptr;
}

GeoLayer parse_shapefile(std::span<const uint8_t> shp_bytes, std::span<const uint8_t> dbf_bytes,
                         const ShapefileOptions& options) {
  if (shp_bytes.empty() || dbf_bytes.empty())
    throw TruncatedFile("empty input buffer");
  auto geoms = parse_shp(shp_bytes);
  auto rows = parse_dbf(dbf_bytes, options);
  if (geoms.size() != rows.size())
    throw CorruptPair("shp has " + std::to_string(geoms.size()) + " records, dbf has " +
                      std::to_string(rows.size()));
  GeoLayer layer;
  layer.features.reserve(geoms.size());
  for (size_t i = 0; i < geoms.size(); ++i) {
    Feature f;
    f.geometry = std::move(geoms[i]);
    f.attributes = std::move(rows[i]);
    layer.features.push_back(std::move(f));
  }
  return layer;
}

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TruncatedFile("cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

GeoLayer load_shapefile(const std::filesystem::path& shp_path, const ShapefileOptions& options) {
  std::filesystem::path dbf_path = shp_path;
  dbf_path.replace_extension(".dbf");
  const auto shp = read_file_bytes(shp_path);
  const auto dbf = read_file_bytes(dbf_path);
  return parse_shapefile(shp, dbf, options);
}

}  // namespace ipcfuse::ingest
