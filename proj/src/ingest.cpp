#include "ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "errors.hpp"

namespace leadwarn::ingest {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

// Howard Hinnant's civil-date algorithms (public domain), exact for the
// whole int64 range we care about.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

bool parse_int_strict(const std::string& s, std::int64_t& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc{} && res.ptr == e;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_fixed_int(const std::string& s, std::size_t pos, std::size_t len,
                     int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

std::optional<double> parse_double(const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  const char* b = s.c_str();
  char* end = nullptr;
  double v = std::strtod(b, &end);
  if (end != b + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::optional<std::int64_t> parse_timestamp(const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty()) return std::nullopt;

  std::int64_t epoch = 0;
  if (parse_int_strict(s, epoch)) return epoch;

  // ISO-8601: YYYY-MM-DD[ T]hh:mm:ss[.frac][Z|+hh:mm|-hh:mm]
  int year, month, day;
  if (!parse_fixed_int(s, 0, 4, year) || s.size() < 10 || s[4] != '-' ||
      s[7] != '-' || !parse_fixed_int(s, 5, 2, month) ||
      !parse_fixed_int(s, 8, 2, day))
    return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;

  int hh = 0, mm = 0, ss = 0;
  std::size_t pos = 10;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
    ++pos;
    if (!parse_fixed_int(s, pos, 2, hh) || pos + 2 >= s.size() ||
        s[pos + 2] != ':' || !parse_fixed_int(s, pos + 3, 2, mm))
      return std::nullopt;
    pos += 5;
    if (pos < s.size() && s[pos] == ':') {
      if (!parse_fixed_int(s, pos + 1, 2, ss)) return std::nullopt;
      pos += 3;
    }
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
        ++pos;
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  }

  std::int64_t offset = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      // UTC marker
    } else if ((s[pos] == '+' || s[pos] == '-') && pos + 6 == s.size() &&
               s[pos + 3] == ':') {
      int oh, om;
      if (!parse_fixed_int(s, pos + 1, 2, oh) ||
          !parse_fixed_int(s, pos + 4, 2, om))
        return std::nullopt;
      offset = (s[pos] == '+' ? 1 : -1) * (oh * 3600ll + om * 60ll);
    } else {
      return std::nullopt;
    }
  }

  return days_from_civil(year, month, day) * kSecondsPerDay + hh * 3600ll +
         mm * 60ll + ss - offset;
}

CalendarFields derive_calendar_fields(std::int64_t unix_seconds) {
  CalendarFields f;
  f.unix_seconds = unix_seconds;
  std::int64_t days = floor_div(unix_seconds, kSecondsPerDay);
  std::int64_t secs = unix_seconds - days * kSecondsPerDay;
  civil_from_days(days, f.year, f.month, f.day);
  // 1970-01-01 is a Thursday; Monday = 0.
  f.dayofweek = static_cast<int>(((days % 7) + 7 + 3) % 7);
  f.hour = static_cast<int>(secs / 3600);
  return f;
}

namespace {

LoadResult parse_table(const csv::Table& table, const std::string& source_id,
                       const ColumnSchema& schema) {
  auto col_index = [&](const std::string& name) -> std::size_t {
    auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end())
      throw Error(ErrorCode::missing_column, "column not found: " + name);
    return static_cast<std::size_t>(it - table.header.begin());
  };

  const std::size_t c_date = col_index(schema.date);
  const std::size_t c_recv = col_index(schema.recv_addr);
  const std::size_t c_cp = col_index(schema.counterparty_addr);
  const std::size_t c_hash = col_index(schema.tx_hash);
  const std::size_t c_btc = col_index(schema.btc_value);
  const std::size_t c_usd = col_index(schema.usd_value);
  const std::size_t c_label = col_index(schema.label);
  const std::size_t max_col =
      std::max({c_date, c_recv, c_cp, c_hash, c_btc, c_usd, c_label});

  LoadResult out;
  out.log.source_id = source_id;
  out.summary.rows_total = table.rows.size();
  bool saw_malformed_numeric = false;

  for (const auto& row : table.rows) {
    if (row.size() <= max_col) {
      ++out.summary.rows_dropped;
      continue;
    }
    auto ts = parse_timestamp(row[c_date]);
    if (!ts) {
      ++out.summary.rows_dropped;
      continue;
    }
    auto btc = parse_double(row[c_btc]);
    auto usd = parse_double(row[c_usd]);
    auto label = parse_double(row[c_label]);
    bool label_ok = label && (*label == 0.0 || *label == 1.0);
    if (!btc || !usd || !label_ok || *btc < 0.0 || *usd < 0.0) {
      saw_malformed_numeric = true;
      ++out.summary.rows_dropped;
      continue;
    }
    TransactionRecord r;
    r.timestamp = *ts;
    r.recv_addr = row[c_recv];
    r.counterparty_addr = row[c_cp];
    r.tx_hash = row[c_hash];
    r.btc_value = *btc;
    r.usd_value = *usd;
    r.label = static_cast<int>(*label);
    out.log.records.push_back(std::move(r));
  }

  out.summary.rows_kept = out.log.records.size();
  if (out.log.records.empty()) {
    if (saw_malformed_numeric && out.summary.rows_total > 0)
      throw Error(ErrorCode::malformed_numeric,
                  "all data rows rejected for malformed numeric fields");
    throw Error(ErrorCode::empty_after_filtering,
                "no valid rows after filtering in " + source_id);
  }

  std::stable_sort(out.log.records.begin(), out.log.records.end(),
                   [](const TransactionRecord& a, const TransactionRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  return out;
}

}  // namespace

LoadResult parse_transactions(const std::string& path,
                              const ColumnSchema& schema) {
  return parse_table(csv::read_file(path), path, schema);
}

LoadResult parse_transactions_text(const std::string& csv_text,
                                   const std::string& source_id,
                                   const ColumnSchema& schema) {
  std::istringstream in(csv_text);
  return parse_table(csv::read_stream(in), source_id, schema);
}

std::string serialize_transactions(const TransactionLog& log,
                                   const ColumnSchema& schema) {
  std::ostringstream out;
  csv::write_row(out, {schema.date, schema.recv_addr, schema.counterparty_addr,
                       schema.tx_hash, schema.btc_value, schema.usd_value,
                       schema.label});
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : log.records) {
    csv::write_row(out, {std::to_string(r.timestamp), r.recv_addr,
                         r.counterparty_addr, r.tx_hash, fmt(r.btc_value),
                         fmt(r.usd_value), std::to_string(r.label)});
  }
  return out.str();
}

void write_transactions(const TransactionLog& log, const std::string& path,
                        const ColumnSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_failure, "cannot write file: " + path);
  out << serialize_transactions(log, schema);
}

}  // namespace leadwarn::ingest
