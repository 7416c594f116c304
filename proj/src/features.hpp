#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ingest.hpp"

namespace leadwarn::features {

// Engineered per-transaction feature vector. Every rolling / cumulative
// statistic is causal: it uses only the current and earlier rows, and the
// trailing slices include the current row. Undefined ratios and divisions
// by zero map to 0, so no field is ever NaN or infinite.
struct FeatureRow {
  std::int64_t timestamp = 0;
  double delta_t = 0.0;        // seconds since previous record, 0 for first
  double usd_change = 0.0;     // fractional change vs previous usd_value
  double usd_roll_mean = 0.0;  // trailing 5-row mean of usd_value
  double usd_roll_std = 0.0;   // trailing 5-row population std
  double recv_freq = 0.0;      // occurrences of recv addr up to and incl. row
  double send_freq = 0.0;      // occurrences of counterparty addr, inclusive
  double log_usd = 0.0;        // ln(1 + usd_value)
  double usd_rel_day = 0.0;    // usd / trailing same-UTC-day mean
  double usd_dev_addr = 0.0;   // usd - trailing per-recv-address mean
  double value_zscore = 0.0;   // (usd - addr mean) / addr std, 0 if std == 0
  int year = 0, month = 0, day = 0, dayofweek = 0, hour = 0;
  int recv_code = 0;           // label code, shared address code space
  int cp_code = 0;
  int label = 0;
  double usd_value = 0.0;      // carried raw amount (PV series, graph edges)
};

// Fixed export order of the numeric features fed to the model. Model weight
// shapes are bound to this order.
inline constexpr std::array<const char*, 17> kNumericFeatureNames = {
    "delta_t",      "usd_change", "usd_roll_mean", "usd_roll_std",
    "recv_freq",    "send_freq",  "log_usd",       "usd_rel_day",
    "usd_dev_addr", "value_zscore", "year",        "month",
    "day",          "dayofweek",  "hour",          "recv_code",
    "cp_code"};
inline constexpr int kNumericFeatureDim =
    static_cast<int>(kNumericFeatureNames.size());

std::array<double, kNumericFeatureDim> numeric_features(const FeatureRow& r);

struct FeatureTable {
  std::vector<FeatureRow> rows;
  int feature_dim = kNumericFeatureDim;
  std::map<std::string, int> address_codes;  // shared recv/counterparty space
};

// Integer label codes assigned by first appearance starting at 0. A persisted
// map can be reloaded; unseen strings extend it with max(code)+1.
class LabelEncoder {
 public:
  LabelEncoder() = default;
  explicit LabelEncoder(std::map<std::string, int> existing);

  int encode(const std::string& value);
  std::vector<int> encode_all(const std::vector<std::string>& values);

  const std::map<std::string, int>& mapping() const { return map_; }

 private:
  std::map<std::string, int> map_;
  int next_code_ = 0;
};

// Trailing window mean/std over series[max(0, i-window+1) .. i]; std is the
// population std and 0 for single-element slices.
void trailing_stats(const std::vector<double>& series, std::size_t window,
                    std::vector<double>& means, std::vector<double>& stds);

// One FeatureRow per record of a sorted, non-empty log. Throws EmptyLog.
FeatureTable engineer_features(const ingest::TransactionLog& log,
                               std::size_t roll_window = 5);

// Inspection export: one column per feature plus timestamp/label, header row.
std::string feature_table_csv(const FeatureTable& table);

}  // namespace leadwarn::features
