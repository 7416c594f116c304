#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace leadwarn::ingest {

// One raw labeled transaction. Timestamps are UTC integer seconds; raw
// amounts must be nonnegative and label is 0 (normal) or 1 (abnormal).
struct TransactionRecord {
  std::int64_t timestamp = 0;
  std::string recv_addr;
  std::string counterparty_addr;
  std::string tx_hash;
  double btc_value = 0.0;
  double usd_value = 0.0;
  int label = 0;
};

// Chronologically ordered record stream. Immutable after construction;
// records are sorted non-decreasing by timestamp with stable ties.
struct TransactionLog {
  std::vector<TransactionRecord> records;
  std::string source_id;
};

struct LoadSummary {
  std::size_t rows_total = 0;
  std::size_t rows_kept = 0;
  std::size_t rows_dropped = 0;
};

struct LoadResult {
  TransactionLog log;
  LoadSummary summary;
};

// Column-name map. Defaults match the expected CSV header.
struct ColumnSchema {
  std::string date = "Date";
  std::string recv_addr = "Receiving Address";
  std::string counterparty_addr = "Counterparty Address";
  std::string tx_hash = "Transaction Hash";
  std::string btc_value = "Value";
  std::string usd_value = "USD Value";
  std::string label = "Label";
};

struct CalendarFields {
  int year = 0;
  int month = 0;       // 1..12
  int day = 0;         // 1..31
  int dayofweek = 0;   // Monday = 0 .. Sunday = 6
  int hour = 0;        // 0..23
  std::int64_t unix_seconds = 0;
};

// Parses a CSV file into a sorted TransactionLog. Rows with missing or
// unparseable timestamps, malformed numerics, negative amounts, or labels
// outside {0,1} are dropped and counted in the summary.
// Throws MissingColumn / EmptyAfterFiltering / MalformedNumeric.
LoadResult parse_transactions(const std::string& path,
                              const ColumnSchema& schema = {});

// Same parser over an in-memory CSV body (used by tests and synth output).
LoadResult parse_transactions_text(const std::string& csv_text,
                                   const std::string& source_id,
                                   const ColumnSchema& schema = {});

// UTC civil-time decomposition of an epoch timestamp.
CalendarFields derive_calendar_fields(std::int64_t unix_seconds);

// Timestamp parser used for the Date column: plain integers are epoch
// seconds, otherwise ISO-8601 (date or date+time, optional Z / +hh:mm
// offset, fractional seconds truncated). Empty or malformed -> nullopt.
std::optional<std::int64_t> parse_timestamp(const std::string& text);

// Writes a log back out using the default schema columns; parse of the
// output reproduces the log exactly.
std::string serialize_transactions(const TransactionLog& log,
                                   const ColumnSchema& schema = {});
void write_transactions(const TransactionLog& log, const std::string& path,
                        const ColumnSchema& schema = {});

}  // namespace leadwarn::ingest
