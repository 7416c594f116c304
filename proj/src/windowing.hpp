#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "features.hpp"

namespace leadwarn::windowing {

// One contiguous frame of L rows. any_anomaly is the OR of row labels.
struct Frame {
  std::size_t start = 0;
  std::size_t len = 0;
  int any_anomaly = 0;
  std::int64_t start_ts = 0;
};

// A frame paired with its horizon-aligned target. t_event is the start
// timestamp of frame t+h; t_alert = t_event - h * frame_duration exactly.
struct LabeledWindow {
  std::size_t t = 0;  // window ordinal
  std::size_t start = 0;
  std::size_t len = 0;
  int target = 0;  // anomaly indicator of frame t+h
  std::int64_t t_event = 0;
  std::int64_t t_alert = 0;
};

// Splits the first T*L rows (T = floor(N/L)) into contiguous, non-overlapping
// frames; trailing remainder rows are discarded. Throws TooFewRows if N < L.
std::vector<Frame> frame_windows(const features::FeatureTable& table,
                                 std::size_t L);

// Aligns targets h frames ahead: frame t gets frame t+h's anomaly indicator,
// the last h frames are dropped. frame_duration_s only feeds the
// t_alert/t_event bookkeeping. Throws HorizonExceedsFrames if h >= #frames.
std::vector<LabeledWindow> align_labels(const std::vector<Frame>& frames,
                                        std::size_t h,
                                        std::int64_t frame_duration_s);

// Median inter-row gap in seconds over the first prefix_rows rows (0 = all).
// Used to realize minute-valued window/horizon settings as row counts.
double median_row_gap_seconds(const features::FeatureTable& table,
                              std::size_t prefix_rows = 0);

std::size_t minutes_to_rows(double w_minutes, double median_gap_s);
std::size_t minutes_to_frames(double h_minutes, std::size_t rows_per_window,
                              double median_gap_s);

struct WindowSpec {
  int w_minutes = 30;
  int h_minutes = 5;
};

// Table-style metric row used by the window-horizon search CSV.
struct WhMetrics {
  double accuracy = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.0;
  double pr_auc = 0.0;
};

struct WhSearchRow {
  WindowSpec spec;
  WhMetrics metrics;
};

struct WhSearchResult {
  WindowSpec best;
  std::vector<WhSearchRow> rows;  // full grid, enumeration order
};

// Evaluates every (w, h) candidate pair and returns the PR-AUC argmax.
// Ties prefer the larger horizon, then the smaller window (more lead time).
WhSearchResult search_window_horizon(
    const std::vector<int>& candidates_w, const std::vector<int>& candidates_h,
    const std::function<WhMetrics(const WindowSpec&)>& eval);

// CSV with the exact column set: window,horizon,accuracy,recall,precision,
// f1,roc_auc,pr_auc.
std::string wh_search_csv(const WhSearchResult& result);

}  // namespace leadwarn::windowing
