#include "windowing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace leadwarn::windowing {

std::vector<Frame> frame_windows(const features::FeatureTable& table,
                                 std::size_t L) {
  if (L == 0) throw Error(ErrorCode::invalid_argument, "window length must be positive");
  const std::size_t n = table.rows.size();
  if (n < L)
    throw Error(ErrorCode::too_few_rows,
                "need at least " + std::to_string(L) + " rows, got " +
                    std::to_string(n));
  const std::size_t T = n / L;
  std::vector<Frame> frames;
  frames.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    Frame f;
    f.start = t * L;
    f.len = L;
    f.start_ts = table.rows[f.start].timestamp;
    int any = 0;
    for (std::size_t i = f.start; i < f.start + L; ++i)
      any |= table.rows[i].label;
    f.any_anomaly = any;
    frames.push_back(f);
  }
  return frames;
}

std::vector<LabeledWindow> align_labels(const std::vector<Frame>& frames,
                                        std::size_t h,
                                        std::int64_t frame_duration_s) {
  if (h == 0) throw Error(ErrorCode::invalid_argument, "horizon must be positive");
  if (h >= frames.size())
    throw Error(ErrorCode::horizon_exceeds_frames,
                "horizon " + std::to_string(h) + " leaves no labeled frames (" +
                    std::to_string(frames.size()) + " total)");
  std::vector<LabeledWindow> out;
  out.reserve(frames.size() - h);
  for (std::size_t t = 0; t + h < frames.size(); ++t) {
    LabeledWindow w;
    w.t = t;
    w.start = frames[t].start;
    w.len = frames[t].len;
    w.target = frames[t + h].any_anomaly;
    w.t_event = frames[t + h].start_ts;
    w.t_alert = w.t_event - static_cast<std::int64_t>(h) * frame_duration_s;
    out.push_back(w);
  }
  return out;
}

double median_row_gap_seconds(const features::FeatureTable& table,
                              std::size_t prefix_rows) {
  std::size_t n = table.rows.size();
  if (prefix_rows > 0) n = std::min(n, prefix_rows);
  if (n < 2)
    throw Error(ErrorCode::too_few_rows, "need at least 2 rows for a gap");
  std::vector<std::int64_t> gaps;
  gaps.reserve(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    gaps.push_back(table.rows[i].timestamp - table.rows[i - 1].timestamp);
  std::sort(gaps.begin(), gaps.end());
  const std::size_t m = gaps.size();
  if (m % 2 == 1) return static_cast<double>(gaps[m / 2]);
  return 0.5 * (static_cast<double>(gaps[m / 2 - 1]) +
                static_cast<double>(gaps[m / 2]));
}

std::size_t minutes_to_rows(double w_minutes, double median_gap_s) {
  if (!(median_gap_s > 0.0))
    throw Error(ErrorCode::invalid_argument, "median gap must be positive");
  const double rows = 60.0 * w_minutes / median_gap_s;
  const auto r = static_cast<std::int64_t>(std::llround(rows));
  return static_cast<std::size_t>(std::max<std::int64_t>(1, r));
}

std::size_t minutes_to_frames(double h_minutes, std::size_t rows_per_window,
                              double median_gap_s) {
  if (rows_per_window == 0)
    throw Error(ErrorCode::invalid_argument, "rows_per_window must be positive");
  const double frame_seconds =
      static_cast<double>(rows_per_window) * median_gap_s;
  if (!(frame_seconds > 0.0))
    throw Error(ErrorCode::invalid_argument, "median gap must be positive");
  const double frames = 60.0 * h_minutes / frame_seconds;
  const auto f = static_cast<std::int64_t>(std::llround(frames));
  return static_cast<std::size_t>(std::max<std::int64_t>(1, f));
}

WhSearchResult search_window_horizon(
    const std::vector<int>& candidates_w, const std::vector<int>& candidates_h,
    const std::function<WhMetrics(const WindowSpec&)>& eval) {
  if (candidates_w.empty() || candidates_h.empty())
    throw Error(ErrorCode::empty_candidates,
                "window and horizon candidate lists must be non-empty");
  WhSearchResult result;
  bool have_best = false;
  WhMetrics best_metrics;
  for (int w : candidates_w) {
    for (int h : candidates_h) {
      WindowSpec spec{w, h};
      WhMetrics m = eval(spec);
      result.rows.push_back({spec, m});
      bool better = false;
      if (!have_best) {
        better = true;
      } else if (m.pr_auc > best_metrics.pr_auc) {
        better = true;
      } else if (m.pr_auc == best_metrics.pr_auc) {
        if (h > result.best.h_minutes)
          better = true;
        else if (h == result.best.h_minutes && w < result.best.w_minutes)
          better = true;
      }
      if (better) {
        result.best = spec;
        best_metrics = m;
        have_best = true;
      }
    }
  }
  return result;
}

std::string wh_search_csv(const WhSearchResult& result) {
  std::ostringstream os;
  os << "window,horizon,accuracy,recall,precision,f1,roc_auc,pr_auc\n";
  char buf[64];
  for (const auto& row : result.rows) {
    os << row.spec.w_minutes << ',' << row.spec.h_minutes;
    const double vals[] = {row.metrics.accuracy, row.metrics.recall,
                           row.metrics.precision, row.metrics.f1,
                           row.metrics.roc_auc, row.metrics.pr_auc};
    for (double v : vals) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      os << ',' << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace leadwarn::windowing
