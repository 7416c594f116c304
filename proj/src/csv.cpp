#include "csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "errors.hpp"

namespace leadwarn::csv {

namespace {

// Parses one record starting at the current stream position. Returns false on
// EOF with no data consumed.
bool read_record(std::istream& in, std::vector<std::string>& out) {
  out.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      out.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (!any) return false;
  if (!field.empty() && field.back() == '\r') field.pop_back();
  out.push_back(std::move(field));
  return true;
}

}  // namespace

Table read_stream(std::istream& in) {
  Table t;
  std::vector<std::string> rec;
  if (!read_record(in, t.header)) return t;
  while (read_record(in, rec)) {
    // skip fully blank lines
    if (rec.size() == 1 && rec[0].empty()) continue;
    t.rows.push_back(rec);
  }
  return t;
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot open file: " + path);
  return read_stream(in);
}

std::string escape_field(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape_field(fields[i]);
  }
  out << '\n';
}

}  // namespace leadwarn::csv
