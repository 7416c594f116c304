#include "pv_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "errors.hpp"

namespace leadwarn::pv {

void PVConfig::validate() const {
  if (n < 2) throw Error(ErrorCode::invalid_config, "pv n must be >= 2");
  if (!(z_th > 0.0))
    throw Error(ErrorCode::invalid_config, "pv z_th must be > 0");
  if (k_max < 1) throw Error(ErrorCode::invalid_config, "pv k_max must be >= 1");
  if (!(neg_ratio > 0.0))
    throw Error(ErrorCode::invalid_config, "pv neg_ratio must be > 0");
}

std::vector<std::size_t> PVEvents::all_sorted() const {
  std::vector<std::size_t> all;
  all.reserve(total());
  all.insert(all.end(), peaks.begin(), peaks.end());
  all.insert(all.end(), valleys.begin(), valleys.end());
  std::sort(all.begin(), all.end());
  return all;
}

PVEvents detect_peaks_valleys(const std::vector<double>& series,
                              const PVConfig& cfg) {
  cfg.validate();
  if (series.size() < cfg.n)
    throw Error(ErrorCode::series_too_short,
                "series length " + std::to_string(series.size()) +
                    " < rolling window " + std::to_string(cfg.n));

  struct Candidate {
    std::size_t index;
    double z;
  };
  std::vector<Candidate> candidates;

  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    sum += series[i];
    sumsq += series[i] * series[i];
    if (i >= cfg.n) {
      sum -= series[i - cfg.n];
      sumsq -= series[i - cfg.n] * series[i - cfg.n];
    }
    if (i + 1 < cfg.n) continue;
    const double cnt = static_cast<double>(cfg.n);
    const double mean = sum / cnt;
    double var = sumsq / cnt - mean * mean;
    const double sd = var > 0.0 ? std::sqrt(var) : 0.0;
    const double z = sd > 0.0 ? (series[i] - mean) / sd : 0.0;
    if (z >= cfg.z_th || z <= -cfg.z_th) candidates.push_back({i, z});
  }

  if (candidates.size() > cfg.k_max) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                       if (std::fabs(a.z) != std::fabs(b.z))
                         return std::fabs(a.z) > std::fabs(b.z);
                       return a.index < b.index;
                     });
    candidates.resize(cfg.k_max);
  }

  PVEvents events;
  for (const Candidate& c : candidates) {
    if (c.z > 0)
      events.peaks.push_back(c.index);
    else
      events.valleys.push_back(c.index);
    events.zscores[c.index] = c.z;
  }
  std::sort(events.peaks.begin(), events.peaks.end());
  std::sort(events.valleys.begin(), events.valleys.end());
  return events;
}

std::vector<std::size_t> resample_pv_rows(std::size_t n_rows,
                                          const PVEvents& events,
                                          std::size_t L, double neg_ratio,
                                          std::uint64_t rng_seed) {
  if (L < 1) throw Error(ErrorCode::invalid_argument, "window length must be >= 1");
  if (events.total() == 0)
    throw Error(ErrorCode::no_events, "no peak/valley events to resample");
  if (n_rows < L)
    throw Error(ErrorCode::too_few_rows,
                "fewer rows than one window length");

  const std::size_t max_start = n_rows - L;
  auto all_events = events.all_sorted();
  for (std::size_t i : all_events)
    if (i >= n_rows)
      throw Error(ErrorCode::invalid_argument, "event index out of bounds");

  std::set<std::size_t> selected;
  for (std::size_t i : all_events) {
    std::size_t half = L / 2;
    std::size_t start = i > half ? i - half : 0;
    start = std::min(start, max_start);
    selected.insert(start);
  }

  // grid-aligned windows free of any event index
  std::vector<std::size_t> grid_negatives;
  std::size_t ev_pos = 0;
  for (std::size_t s = 0; s + L <= n_rows; s += L) {
    while (ev_pos < all_events.size() && all_events[ev_pos] < s) ++ev_pos;
    bool has_event = ev_pos < all_events.size() && all_events[ev_pos] < s + L;
    if (!has_event) grid_negatives.push_back(s);
  }

  std::size_t want =
      static_cast<std::size_t>(std::ceil(neg_ratio * static_cast<double>(events.total())));
  std::mt19937_64 rng(rng_seed);
  std::shuffle(grid_negatives.begin(), grid_negatives.end(), rng);
  for (std::size_t k = 0; k < grid_negatives.size() && k < want; ++k)
    selected.insert(grid_negatives[k]);

  return {selected.begin(), selected.end()};
}

std::vector<std::size_t> resample_pv(const features::FeatureTable& table,
                                     const PVEvents& events, std::size_t L,
                                     double neg_ratio, std::uint64_t rng_seed) {
  return resample_pv_rows(table.rows.size(), events, L, neg_ratio, rng_seed);
}

PVSearchResult search_pv_config(
    const PVGrid& grid, const std::function<double(const PVConfig&)>& eval,
    double neg_ratio) {
  if (grid.n.empty() || grid.z_th.empty() || grid.k_max.empty())
    throw Error(ErrorCode::empty_grid, "pv grid has an empty candidate set");

  PVSearchResult result;
  bool have_best = false;
  auto lex_less = [](const PVConfig& a, const PVConfig& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.z_th != b.z_th) return a.z_th < b.z_th;
    return a.k_max < b.k_max;
  };

  for (std::size_t n : grid.n)
    for (double z : grid.z_th)
      for (std::size_t k : grid.k_max) {
        PVConfig cfg{n, z, k, neg_ratio};
        cfg.validate();
        double score = eval(cfg);
        result.log.push_back({cfg, score});
        bool better = !have_best || score > result.best_score ||
                      (score == result.best_score && lex_less(cfg, result.best));
        if (better) {
          result.best = cfg;
          result.best_score = score;
          have_best = true;
        }
      }
  return result;
}

}  // namespace leadwarn::pv
