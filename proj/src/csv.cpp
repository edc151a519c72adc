#include "ipcfuse/csv.hpp"

#include <istream>
#include <ostream>

#include "ipcfuse/errors.hpp"

namespace ipcfuse::csv {

bool Reader::next_row(std::vector<std::string>& out) {
  out.clear();
  int c = in_.get();
  if (c == EOF) return false;
  ++row_;
  std::string field;
  bool in_quotes = false;
  while (true) {
    if (in_quotes) {
      if (c == EOF) throw RowError(row_, "unterminated quoted field");
      if (c == '"') {
        const int d = in_.get();
        if (d == '"') {
          field += '"';
        } else {
          in_quotes = false;
          c = d;
          continue;  // reprocess d unquoted
        }
      } else {
        field += static_cast<char>(c);
      }
    } else {
      if (c == ',') {
        out.push_back(std::move(field));
        field.clear();
      } else if (c == '\r') {
        const int d = in_.get();
        if (d == '\n' || d == EOF) {
          out.push_back(std::move(field));
          return true;
        }
        field += '\r';
        c = d;
        continue;
      } else if (c == '\n' || c == EOF) {
        out.push_back(std::move(field));
        return true;
      } else if (c == '"' && field.empty()) {
        in_quotes = true;
      } else {
        field += static_cast<char>(c);
      }
    }
    c = in_.get();
  }
}

std::string escape_field(const std::string& f) {
  const bool needs = f.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape_field(fields[i]);
  }
  out << '\n';
}

}  // namespace ipcfuse::csv
