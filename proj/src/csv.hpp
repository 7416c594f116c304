#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace leadwarn::csv {

// Minimal RFC-4180 reader: quoted fields, embedded commas/quotes/newlines,
// CRLF tolerant. Rows keep their field count as found in the file.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_file(const std::string& path);
Table read_stream(std::istream& in);

std::string escape_field(const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace leadwarn::csv
