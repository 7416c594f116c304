#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "features.hpp"

namespace leadwarn::pv {

// Peak-Valley detector hyperparameters. neg_ratio controls how many
// non-event windows are retained per event window during resampling.
struct PVConfig {
  std::size_t n = 30;       // rolling window size, rows
  double z_th = 2.0;        // z-score threshold
  std::size_t k_max = 500;  // maximum retained events
  double neg_ratio = 1.0;

  void validate() const;
};

// Detected event indices. peaks and valleys are disjoint, sorted, and
// together hold at most k_max indices; zscores carries z at each event.
struct PVEvents {
  std::vector<std::size_t> peaks;
  std::vector<std::size_t> valleys;
  std::map<std::size_t, double> zscores;

  std::size_t total() const { return peaks.size() + valleys.size(); }
  std::vector<std::size_t> all_sorted() const;
};

// Trailing-n z-score events on a raw series: for i >= n-1,
// z_i = (x_i - mean(x[i-n+1..i])) / pop_std(same slice), 0 when std is 0.
// z >= z_th -> peak candidate, z <= -z_th -> valley candidate; if candidates
// exceed k_max the largest |z| win, ties to the smaller index.
// Throws SeriesTooShort when len(series) < n.
PVEvents detect_peaks_valleys(const std::vector<double>& series,
                              const PVConfig& cfg);

// Training-window construction: one window of length L centered at each
// event (start = i - L/2, clamped into [0, n_rows-L]), plus
// ceil(neg_ratio * #events) grid-aligned windows containing no event,
// drawn uniformly with the given seed. Returns deduplicated window start
// indices sorted ascending. Throws NoEvents on an empty event set.
std::vector<std::size_t> resample_pv(const features::FeatureTable& table,
                                     const PVEvents& events, std::size_t L,
                                     double neg_ratio, std::uint64_t rng_seed);

// Same construction bounded to the first n_rows rows (the training split).
std::vector<std::size_t> resample_pv_rows(std::size_t n_rows,
                                          const PVEvents& events,
                                          std::size_t L, double neg_ratio,
                                          std::uint64_t rng_seed);

struct PVGrid {
  std::vector<std::size_t> n = {10, 30, 60};
  std::vector<double> z_th = {1.5, 2.0, 2.5, 3.0};
  std::vector<std::size_t> k_max = {100, 500, 1000};
};

struct PVSearchEntry {
  PVConfig config;
  double score = 0.0;
};

struct PVSearchResult {
  PVConfig best;
  double best_score = 0.0;
  std::vector<PVSearchEntry> log;  // every evaluated (theta, score) pair
};

// Exhaustive argmax of the evaluator over the grid's Cartesian product.
// Ties break lexicographically by (smaller n, smaller z_th, smaller k_max),
// so the result is invariant under grid enumeration order.
PVSearchResult search_pv_config(
    const PVGrid& grid, const std::function<double(const PVConfig&)>& eval,
    double neg_ratio = 1.0);

}  // namespace leadwarn::pv
