#include "features.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"
#include "errors.hpp"

namespace leadwarn::features {

namespace {

double safe_ratio(double num, double den) {
  if (den == 0.0) return 0.0;
  double v = num / den;
  return std::isfinite(v) ? v : 0.0;
}

struct RunningMoments {
  double count = 0.0, sum = 0.0, sumsq = 0.0;

  void add(double x) {
    count += 1.0;
    sum += x;
    sumsq += x * x;
  }
  double mean() const { return count > 0 ? sum / count : 0.0; }
  double pop_std() const {
    if (count <= 0) return 0.0;
    double m = mean();
    double var = sumsq / count - m * m;
    return var > 0.0 ? std::sqrt(var) : 0.0;
  }
};

}  // namespace

LabelEncoder::LabelEncoder(std::map<std::string, int> existing)
    : map_(std::move(existing)) {
  for (const auto& [k, v] : map_) next_code_ = std::max(next_code_, v + 1);
}

int LabelEncoder::encode(const std::string& value) {
  auto it = map_.find(value);
  if (it != map_.end()) return it->second;
  int code = next_code_++;
  map_.emplace(value, code);
  return code;
}

std::vector<int> LabelEncoder::encode_all(
    const std::vector<std::string>& values) {
  std::vector<int> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(encode(v));
  return out;
}

void trailing_stats(const std::vector<double>& series, std::size_t window,
                    std::vector<double>& means, std::vector<double>& stds) {
  if (window < 1)
    throw Error(ErrorCode::invalid_argument, "trailing_stats window must be >= 1");
  const std::size_t n = series.size();
  means.assign(n, 0.0);
  stds.assign(n, 0.0);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += series[i];
    sumsq += series[i] * series[i];
    if (i >= window) {
      sum -= series[i - window];
      sumsq -= series[i - window] * series[i - window];
    }
    const double cnt = static_cast<double>(std::min(i + 1, window));
    const double m = sum / cnt;
    double var = sumsq / cnt - m * m;
    means[i] = m;
    stds[i] = var > 0.0 ? std::sqrt(var) : 0.0;
  }
}

FeatureTable engineer_features(const ingest::TransactionLog& log,
                               std::size_t roll_window) {
  if (log.records.empty())
    throw Error(ErrorCode::empty_log, "cannot engineer features of an empty log");

  const std::size_t n = log.records.size();
  FeatureTable table;
  table.rows.resize(n);

  std::vector<double> usd(n);
  for (std::size_t i = 0; i < n; ++i) usd[i] = log.records[i].usd_value;
  std::vector<double> roll_mean, roll_std;
  trailing_stats(usd, roll_window, roll_mean, roll_std);

  // One shared code space for both address columns so per-window graphs can
  // union receiving and counterparty nodes consistently.
  LabelEncoder addr_codes;
  std::unordered_map<std::string, double> recv_counts, send_counts;
  std::unordered_map<int, RunningMoments> addr_moments;  // keyed by recv code

  // trailing same-UTC-day accumulator; records are sorted so days only advance
  std::int64_t cur_day_key = INT64_MIN;
  RunningMoments day_moments;

  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = log.records[i];
    FeatureRow& row = table.rows[i];
    row.timestamp = rec.timestamp;
    row.label = rec.label;
    row.usd_value = rec.usd_value;

    if (i > 0) {
      row.delta_t = static_cast<double>(rec.timestamp - log.records[i - 1].timestamp);
      double prev = usd[i - 1];
      row.usd_change = safe_ratio(usd[i] - prev, prev);
    }

    row.usd_roll_mean = roll_mean[i];
    row.usd_roll_std = roll_std[i];
    row.recv_freq = (recv_counts[rec.recv_addr] += 1.0);
    row.send_freq = (send_counts[rec.counterparty_addr] += 1.0);
    row.log_usd = std::log1p(rec.usd_value);

    auto cal = ingest::derive_calendar_fields(rec.timestamp);
    row.year = cal.year;
    row.month = cal.month;
    row.day = cal.day;
    row.dayofweek = cal.dayofweek;
    row.hour = cal.hour;

    std::int64_t day_key = (static_cast<std::int64_t>(cal.year) << 9) |
                           (cal.month << 5) | cal.day;
    if (day_key != cur_day_key) {
      cur_day_key = day_key;
      day_moments = RunningMoments{};
    }
    day_moments.add(rec.usd_value);
    row.usd_rel_day = safe_ratio(rec.usd_value, day_moments.mean());

    row.recv_code = addr_codes.encode(rec.recv_addr);
    row.cp_code = addr_codes.encode(rec.counterparty_addr);

    RunningMoments& am = addr_moments[row.recv_code];
    am.add(rec.usd_value);
    row.usd_dev_addr = rec.usd_value - am.mean();
    row.value_zscore = safe_ratio(row.usd_dev_addr, am.pop_std());
  }

  table.address_codes = addr_codes.mapping();
  return table;
}

std::array<double, kNumericFeatureDim> numeric_features(const FeatureRow& r) {
  return {r.delta_t,
          r.usd_change,
          r.usd_roll_mean,
          r.usd_roll_std,
          r.recv_freq,
          r.send_freq,
          r.log_usd,
          r.usd_rel_day,
          r.usd_dev_addr,
          r.value_zscore,
          static_cast<double>(r.year),
          static_cast<double>(r.month),
          static_cast<double>(r.day),
          static_cast<double>(r.dayofweek),
          static_cast<double>(r.hour),
          static_cast<double>(r.recv_code),
          static_cast<double>(r.cp_code)};
}

std::string feature_table_csv(const FeatureTable& table) {
  std::ostringstream out;
  std::vector<std::string> header = {"timestamp"};
  for (const char* name : kNumericFeatureNames) header.push_back(name);
  header.push_back("label");
  csv::write_row(out, header);
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : table.rows) {
    std::vector<std::string> cells = {std::to_string(r.timestamp)};
    for (double v : numeric_features(r)) cells.push_back(fmt(v));
    cells.push_back(std::to_string(r.label));
    csv::write_row(out, cells);
  }
  return out.str();
}

}  // namespace leadwarn::features
