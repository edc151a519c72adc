#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ipcfuse::csv {

/// Incremental RFC 4180 row reader: comma delimiter, double-quote quoting,
/// doubled quotes as escapes, LF or CRLF line ends, embedded newlines inside
/// quoted fields.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next row into `out`. Returns false at end of input.
  bool next_row(std::vector<std::string>& out);

  /// 1-based number of the last row returned.
  size_t row_number() const { return row_; }

 private:
  std::istream& in_;
  size_t row_ = 0;
};

void write_row(std::ostream& out, std::span<const std::string> fields);
std::string escape_field(const std::string& f);

}  // namespace ipcfuse::csv
