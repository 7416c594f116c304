#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "pv_sampling.hpp"
#include "test_util.hpp"

using namespace leadwarn;

namespace {

struct OracleEvent {
  std::size_t index;
  double z;
};

// Direct restatement of the detector contract: trailing-n z-score with
// population std, peaks at z >= z_th, valleys at z <= -z_th, k_max kept by
// largest |z| with ties to the smaller index.
std::vector<OracleEvent> oracle_events(const std::vector<double>& x,
                                       const pv::PVConfig& cfg) {
  std::vector<OracleEvent> cands;
  for (std::size_t i = cfg.n - 1; i < x.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = i + 1 - cfg.n; j <= i; ++j) sum += x[j];
    const double mean = sum / static_cast<double>(cfg.n);
    double sq = 0.0;
    for (std::size_t j = i + 1 - cfg.n; j <= i; ++j)
      sq += (x[j] - mean) * (x[j] - mean);
    const double sd = std::sqrt(sq / static_cast<double>(cfg.n));
    const double z = sd == 0.0 ? 0.0 : (x[i] - mean) / sd;
    if (z >= cfg.z_th || z <= -cfg.z_th) cands.push_back({i, z});
  }
  if (cands.size() > cfg.k_max) {
    std::stable_sort(cands.begin(), cands.end(),
                     [](const OracleEvent& a, const OracleEvent& b) {
                       if (std::fabs(a.z) != std::fabs(b.z))
                         return std::fabs(a.z) > std::fabs(b.z);
                       return a.index < b.index;
                     });
    cands.resize(cfg.k_max);
    std::sort(cands.begin(), cands.end(),
              [](const OracleEvent& a, const OracleEvent& b) {
                return a.index < b.index;
              });
  }
  return cands;
}

bool matches_oracle(const std::vector<double>& x, const pv::PVConfig& cfg) {
  auto got = pv::detect_peaks_valleys(x, cfg);
  auto want = oracle_events(x, cfg);
  auto all = got.all_sorted();
  if (all.size() != want.size()) return false;
  for (std::size_t k = 0; k < want.size(); ++k) {
    if (all[k] != want[k].index) return false;
    auto it = got.zscores.find(want[k].index);
    if (it == got.zscores.end()) return false;
    if (std::fabs(it->second - want[k].z) > 1e-12) return false;
    const bool is_peak = std::binary_search(got.peaks.begin(),
                                            got.peaks.end(), want[k].index);
    if (is_peak != (want[k].z > 0.0)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("detector equals the brute-force oracle on random series") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> len_draw(50, 2000);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  std::vector<std::size_t> ns = {10, 30, 60};
  std::vector<double> zs = {1.5, 2.0, 2.5};
  std::vector<std::size_t> ks = {5, 50, 100000};
  for (int trial = 0; trial < 60; ++trial) {
    pv::PVConfig cfg;
    cfg.n = ns[trial % ns.size()];
    cfg.z_th = zs[(trial / 3) % zs.size()];
    cfg.k_max = ks[(trial / 9) % ks.size()];
    std::vector<double> x(len_draw(rng));
    for (auto& v : x) v = val(rng);
    // Flat stretches exercise the zero-std branch.
    if (trial % 4 == 0)
      std::fill(x.begin() + x.size() / 3, x.begin() + x.size() / 2, 1.5);
    CAPTURE(trial);
    CHECK(matches_oracle(x, cfg));
  }
}

TEST_CASE("peaks and valleys carry the documented signs") {
  std::vector<double> x(100, 10.0);
  x[50] = 100.0;   // spike
  x[80] = -100.0;  // crash
  pv::PVConfig cfg;
  cfg.n = 10;
  cfg.z_th = 2.0;
  auto ev = pv::detect_peaks_valleys(x, cfg);
  CHECK(std::count(ev.peaks.begin(), ev.peaks.end(), 50) == 1);
  CHECK(std::count(ev.valleys.begin(), ev.valleys.end(), 80) == 1);
  CHECK(ev.zscores.at(50) > 0.0);
  CHECK(ev.zscores.at(80) < 0.0);
}

TEST_CASE("constant series produces no events") {
  std::vector<double> x(200, 3.0);
  pv::PVConfig cfg;
  auto ev = pv::detect_peaks_valleys(x, cfg);
  CHECK(ev.total() == 0);
}

TEST_CASE("k_max keeps the largest magnitudes, ties to smaller index") {
  // Two identical spikes and one larger one; k_max 2 must keep the larger
  // spike plus the earlier of the tied pair.
  std::vector<double> x(300, 0.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  for (auto& v : x) v = noise(rng);
  x[100] = 50.0;
  x[200] = 50.0;
  x[250] = 80.0;
  pv::PVConfig cfg;
  cfg.n = 30;
  cfg.z_th = 2.0;
  cfg.k_max = 2;
  auto got = pv::detect_peaks_valleys(x, cfg);
  auto want = oracle_events(x, cfg);
  REQUIRE(got.total() == want.size());
  auto all = got.all_sorted();
  for (std::size_t k = 0; k < want.size(); ++k) CHECK(all[k] == want[k].index);
  CHECK(std::count(all.begin(), all.end(), 250) == 1);
}

TEST_CASE("short series is an error") {
  std::vector<double> x(10, 1.0);
  pv::PVConfig cfg;
  cfg.n = 30;
  auto code =
      testing::thrown_code([&] { pv::detect_peaks_valleys(x, cfg); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::series_too_short);
}

TEST_CASE("resampled windows are deduplicated, clamped, and sorted") {
  pv::PVEvents ev;
  ev.peaks = {2, 3, 995};
  ev.valleys = {500};
  for (auto i : ev.all_sorted()) ev.zscores[i] = 3.0;
  const std::size_t L = 20;
  auto starts = pv::resample_pv_rows(1000, ev, L, 1.0, 7);
  REQUIRE(!starts.empty());
  CHECK(std::is_sorted(starts.begin(), starts.end()));
  CHECK(std::adjacent_find(starts.begin(), starts.end()) == starts.end());
  for (auto s : starts) CHECK(s + L <= 1000);
  // Event-centered starts: clamped i - L/2.
  CHECK(std::count(starts.begin(), starts.end(), 0) == 1);    // i=2 clamps to 0
  CHECK(std::count(starts.begin(), starts.end(), 490) == 1);  // i=500
  CHECK(std::count(starts.begin(), starts.end(), 980) == 1);  // i=995 clamps
}

TEST_CASE("negative windows contain no event and honor neg_ratio") {
  pv::PVEvents ev;
  ev.peaks = {100, 300};
  ev.zscores[100] = 3.0;
  ev.zscores[300] = 3.0;
  const std::size_t L = 10;
  auto starts = pv::resample_pv_rows(1000, ev, L, 1.0, 9);
  std::set<std::size_t> event_starts = {95, 295};
  std::size_t negatives = 0;
  for (auto s : starts) {
    if (event_starts.count(s)) continue;
    ++negatives;
    CHECK(s % L == 0);  // grid aligned
    for (auto i : ev.all_sorted()) CHECK(!(i >= s && i < s + L));
  }
  CHECK(negatives == 2);  // ceil(1.0 * 2)

  auto more = pv::resample_pv_rows(1000, ev, L, 3.0, 9);
  CHECK(more.size() == 2 + 6);
}

TEST_CASE("resampling is deterministic in the seed") {
  pv::PVEvents ev;
  ev.peaks = {50, 150, 250};
  for (auto i : ev.all_sorted()) ev.zscores[i] = 4.0;
  auto a = pv::resample_pv_rows(2000, ev, 30, 2.0, 42);
  auto b = pv::resample_pv_rows(2000, ev, 30, 2.0, 42);
  auto c = pv::resample_pv_rows(2000, ev, 30, 2.0, 43);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("empty event set cannot be resampled") {
  pv::PVEvents ev;
  auto code = testing::thrown_code(
      [&] { pv::resample_pv_rows(1000, ev, 10, 1.0, 0); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::no_events);
}

TEST_CASE("grid search returns the injected argmax") {
  pv::PVGrid grid;
  grid.n = {10, 30};
  grid.z_th = {1.5, 2.0};
  grid.k_max = {100, 500};
  auto eval = [](const pv::PVConfig& c) {
    return c.n == 30 && c.z_th == 1.5 && c.k_max == 500 ? 0.9 : 0.1;
  };
  auto r = pv::search_pv_config(grid, eval);
  CHECK(r.best.n == 30);
  CHECK(r.best.z_th == 1.5);
  CHECK(r.best.k_max == 500);
  CHECK(r.best_score == doctest::Approx(0.9));
  CHECK(r.log.size() == 8);
}

TEST_CASE("search tie-break is invariant under grid permutation") {
  pv::PVGrid grid;
  grid.n = {10, 30, 60};
  grid.z_th = {1.5, 2.0};
  grid.k_max = {100, 500};
  auto eval = [](const pv::PVConfig& c) {
    // Two-way tie at the top.
    if (c.n == 30 && c.z_th == 2.0 && c.k_max == 100) return 0.8;
    if (c.n == 60 && c.z_th == 1.5 && c.k_max == 500) return 0.8;
    return 0.2;
  };
  auto r1 = pv::search_pv_config(grid, eval);

  pv::PVGrid shuffled;
  shuffled.n = {60, 10, 30};
  shuffled.z_th = {2.0, 1.5};
  shuffled.k_max = {500, 100};
  auto r2 = pv::search_pv_config(shuffled, eval);

  // Lexicographic (n, z_th, k_max): (30, 2.0, 100) beats (60, 1.5, 500).
  CHECK(r1.best.n == 30);
  CHECK(r1.best.z_th == 2.0);
  CHECK(r1.best.k_max == 100);
  CHECK(r2.best.n == r1.best.n);
  CHECK(r2.best.z_th == r1.best.z_th);
  CHECK(r2.best.k_max == r1.best.k_max);
}

TEST_CASE("search logs every grid point") {
  pv::PVGrid grid;
  grid.n = {10, 30};
  grid.z_th = {2.0};
  grid.k_max = {100};
  auto r = pv::search_pv_config(grid, [](const pv::PVConfig&) { return 0.5; });
  CHECK(r.log.size() == 2);
  std::set<std::size_t> seen;
  for (const auto& e : r.log) seen.insert(e.config.n);
  CHECK(seen == std::set<std::size_t>{10, 30});
}

TEST_CASE("empty grid is an error") {
  pv::PVGrid grid;
  grid.n = {};
  auto code = testing::thrown_code([&] {
    pv::search_pv_config(grid, [](const pv::PVConfig&) { return 0.0; });
  });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::empty_grid);
}
