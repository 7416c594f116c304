#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "train_eval.hpp"

using namespace leadwarn;

namespace {

// Per-threshold brute force: at every distinct score s, predict positive on
// score >= s by rescanning the whole array, then sum precision * delta-recall
// in descending threshold order.
double pr_auc_oracle(const std::vector<double>& scores,
                     const std::vector<int>& labels) {
  std::set<double, std::greater<double>> thresholds(scores.begin(),
                                                    scores.end());
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += y == 1;
  double ap = 0.0, recall_prev = 0.0;
  for (double th : thresholds) {
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= th) {
        if (labels[i] == 1)
          ++tp;
        else
          ++fp;
      }
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
  }
  return ap;
}

// All positive-negative pairs, ties worth one half.
double roc_auc_oracle(const std::vector<double>& scores,
                      const std::vector<int>& labels) {
  double u = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    ++n_pos;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] == 1) continue;
      if (scores[i] > scores[j])
        u += 1.0;
      else if (scores[i] == scores[j])
        u += 0.5;
    }
  }
  for (int y : labels) n_neg += y != 1;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace

TEST_CASE("aucs equal brute force on random score sets") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> size_draw(2, 100);
  std::uniform_real_distribution<double> score_draw(0.0, 1.0);
  std::bernoulli_distribution label_draw(0.3);
  std::uniform_int_distribution<int> quant(1, 8);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = size_draw(rng);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    // Quantized scores force tie groups.
    const double q = static_cast<double>(quant(rng));
    for (int i = 0; i < n; ++i) {
      scores[i] = std::round(score_draw(rng) * q) / q;
      labels[i] = label_draw(rng) ? 1 : 0;
    }
    std::size_t n_pos = 0;
    for (int y : labels) n_pos += y;
    if (n_pos == 0 || n_pos == static_cast<std::size_t>(n)) continue;
    ++checked;
    CAPTURE(trial);
    CHECK(std::fabs(train_eval::pr_auc(scores, labels) -
                    pr_auc_oracle(scores, labels)) < 1e-12);
    CHECK(std::fabs(train_eval::roc_auc(scores, labels) -
                    roc_auc_oracle(scores, labels)) < 1e-12);
  }
  CHECK(checked > 200);
}

TEST_CASE("hand-checked tie group") {
  std::vector<double> s = {0.9, 0.8, 0.8, 0.1};
  std::vector<int> y = {1, 0, 1, 0};
  CHECK(train_eval::pr_auc(s, y) == doctest::Approx(0.5 + 1.0 / 3.0));
  CHECK(train_eval::roc_auc(s, y) == doctest::Approx(3.5 / 4.0));
}

TEST_CASE("constant scorer collapses pr_auc to prevalence exactly") {
  for (std::size_t n_pos : {1u, 7u, 50u}) {
    const std::size_t n = 100;
    std::vector<double> s(n, 0.42);
    std::vector<int> y(n, 0);
    for (std::size_t i = 0; i < n_pos; ++i) y[i * 2] = 1;
    const double prevalence =
        static_cast<double>(n_pos) / static_cast<double>(n);
    CHECK(train_eval::pr_auc(s, y) == prevalence);  // exact, not approximate
    CHECK(train_eval::roc_auc(s, y) == doctest::Approx(0.5));
  }
}

TEST_CASE("perfect and inverted rankings") {
  std::vector<double> s = {0.9, 0.8, 0.2, 0.1};
  std::vector<int> perfect = {1, 1, 0, 0};
  CHECK(train_eval::pr_auc(s, perfect) == doctest::Approx(1.0));
  CHECK(train_eval::roc_auc(s, perfect) == doctest::Approx(1.0));
  std::vector<int> inverted = {0, 0, 0, 1};
  CHECK(train_eval::roc_auc(s, inverted) == doctest::Approx(0.0));
  CHECK(train_eval::pr_auc(s, inverted) == doctest::Approx(0.25));
}

TEST_CASE("degenerate label sets") {
  std::vector<double> s = {0.1, 0.9};
  auto code = testing::thrown_code([&] { train_eval::pr_auc(s, {0, 0}); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::no_positives);
  CHECK(train_eval::pr_auc(s, {1, 1}) == 1.0);
  for (auto labels : {std::vector<int>{0, 0}, std::vector<int>{1, 1}}) {
    code = testing::thrown_code([&] { train_eval::roc_auc(s, labels); });
    REQUIRE(code.has_value());
    CHECK(*code == ErrorCode::one_class_only);
  }
  code = testing::thrown_code([&] { train_eval::pr_auc(s, {0}); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::shape_mismatch);
}

TEST_CASE("threshold metrics from a confusion count") {
  std::vector<double> s = {0.9, 0.6, 0.5, 0.4, 0.2, 0.1};
  std::vector<int> y = {1, 0, 1, 1, 0, 0};
  // Predictions at 0.5 (>= rule): rows 0,1,2 positive.
  auto m = train_eval::threshold_metrics(s, y);
  CHECK(m.tp == 2);
  CHECK(m.fp == 1);
  CHECK(m.fn == 1);
  CHECK(m.tn == 2);
  CHECK(m.accuracy == doctest::Approx(4.0 / 6.0));
  CHECK(m.precision == doctest::Approx(2.0 / 3.0));
  CHECK(m.recall == doctest::Approx(2.0 / 3.0));
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(!m.degenerate);

  // The boundary score itself predicts positive.
  auto mb = train_eval::threshold_metrics({0.5}, {1}, 0.5);
  CHECK(mb.tp == 1);
}

TEST_CASE("threshold metrics flag degenerate denominators") {
  auto none_pred = train_eval::threshold_metrics({0.1, 0.2}, {1, 0}, 0.9);
  CHECK(none_pred.degenerate);
  CHECK(none_pred.precision == 0.0);
  auto no_pos = train_eval::threshold_metrics({0.9, 0.2}, {0, 0}, 0.5);
  CHECK(no_pos.degenerate);
  CHECK(no_pos.recall == 0.0);
}

TEST_CASE("evaluate_scores degrades politely on one-class splits") {
  auto none = train_eval::evaluate_scores({0.3, 0.7}, {0, 0});
  CHECK(none.pr_auc == 0.0);
  CHECK(none.roc_auc == 0.5);
  CHECK(none.n_pos == 0);
  CHECK(!none.warnings.empty());
  auto all = train_eval::evaluate_scores({0.3, 0.7}, {1, 1});
  CHECK(all.pr_auc == 1.0);
  CHECK(all.roc_auc == 0.5);
  CHECK(!all.warnings.empty());

  std::vector<double> s = {0.9, 0.8, 0.2, 0.1};
  std::vector<int> y = {1, 0, 1, 0};
  auto r = train_eval::evaluate_scores(s, y);
  CHECK(r.pr_auc == doctest::Approx(train_eval::pr_auc(s, y)));
  CHECK(r.roc_auc == doctest::Approx(train_eval::roc_auc(s, y)));
  CHECK(r.n_pos == 2);
  CHECK(r.n_neg == 2);
  CHECK(r.warnings.empty());
}

TEST_CASE("metrics json carries every field") {
  auto r = train_eval::evaluate_scores({0.9, 0.1}, {1, 0});
  auto j = train_eval::metrics_json(r);
  for (const char* key : {"accuracy", "precision", "recall", "f1", "roc_auc",
                          "pr_auc", "threshold", "n_pos", "n_neg",
                          "degenerate", "warnings"})
    CHECK(j.contains(key));
  CHECK(j["pr_auc"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("curves have the documented endpoints and monotone recall") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> s(50);
  std::vector<int> y(50);
  for (int i = 0; i < 50; ++i) {
    s[i] = std::round(d(rng) * 4.0) / 4.0;
    y[i] = i % 3 == 0 ? 1 : 0;
  }
  auto pr = train_eval::pr_curve(s, y);
  REQUIRE(!pr.empty());
  CHECK(pr.front().first == 0.0);
  CHECK(pr.front().second == 1.0);
  CHECK(pr.back().first == doctest::Approx(1.0));
  for (std::size_t k = 1; k < pr.size(); ++k)
    CHECK(pr[k].first >= pr[k - 1].first);

  auto roc = train_eval::roc_curve(s, y);
  REQUIRE(roc.size() >= 2);
  CHECK(roc.front() == std::pair<double, double>{0.0, 0.0});
  CHECK(roc.back().first == doctest::Approx(1.0));
  CHECK(roc.back().second == doctest::Approx(1.0));
  for (std::size_t k = 1; k < roc.size(); ++k) {
    CHECK(roc[k].first >= roc[k - 1].first);
    CHECK(roc[k].second >= roc[k - 1].second);
  }
}
