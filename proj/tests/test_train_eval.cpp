#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "train_eval.hpp"

using namespace leadwarn;

namespace {

// Small feature table with two anomalous stretches; rows carry only the
// fields the graph/model path reads.
features::FeatureTable tiny_table() {
  features::FeatureTable t;
  std::mt19937_64 rng(77);
  std::lognormal_distribution<double> usd(3.0, 1.0);
  std::uniform_int_distribution<int> code(0, 4);
  for (int i = 0; i < 400; ++i) {
    features::FeatureRow r;
    r.timestamp = 1700000000 + 60 * i;
    const bool hot = (i >= 200 && i < 240) || (i >= 300 && i < 320);
    r.label = hot ? 1 : 0;
    r.usd_value = usd(rng) * (hot ? 6.0 : 1.0);
    r.log_usd = std::log1p(r.usd_value);
    r.delta_t = i == 0 ? 0.0 : 60.0;
    r.recv_code = code(rng);
    r.cp_code = code(rng);
    r.usd_roll_mean = r.usd_value;
    r.value_zscore = hot ? 2.5 : 0.0;
    r.year = 2023;
    r.month = 11;
    r.hour = (i / 60) % 24;
    t.rows.push_back(r);
  }
  return t;
}

train_eval::DataBundle tiny_bundle() {
  auto table = tiny_table();
  auto frames = windowing::frame_windows(table, 10);
  auto wins = windowing::align_labels(frames, 1, 600);
  auto split = train_eval::chronological_split(wins.size());
  train_eval::DataBundle b;
  for (std::size_t k = split.train_begin; k < split.train_end; ++k)
    b.train_plain.push_back(model::make_example(table, wins[k]));
  b.train_pv = b.train_plain;
  for (std::size_t k = split.val_begin; k < split.val_end; ++k)
    b.val.push_back(model::make_example(table, wins[k]));
  for (std::size_t k = split.test_begin; k < split.test_end; ++k)
    b.test.push_back(model::make_example(table, wins[k]));
  return b;
}

model::ModelConfig tiny_config() {
  model::ModelConfig cfg;
  cfg.L = 10;
  cfg.h = 1;
  cfg.gcn_dims = {8};
  cfg.lstm_hidden = 8;
  cfg.mlp_hidden = {8};
  cfg.chunk_len = 8;
  cfg.seed = 1;
  return cfg;
}

}  // namespace

TEST_CASE("chronological split boundaries") {
  auto s = train_eval::chronological_split(100);
  CHECK(s.train_begin == 0);
  CHECK(s.train_end == 60);
  CHECK(s.val_begin == 60);
  CHECK(s.val_end == 80);
  CHECK(s.test_begin == 80);
  CHECK(s.test_end == 100);

  auto tiny = train_eval::chronological_split(5);
  CHECK(tiny.train_end == 3);
  CHECK(tiny.val_end == 4);
  CHECK(tiny.test_end == 5);

  train_eval::SplitFractions f{0.5, 0.25, 0.25};
  auto custom = train_eval::chronological_split(8, f);
  CHECK(custom.train_end == 4);
  CHECK(custom.val_end == 6);
  CHECK(custom.test_end == 8);
}

TEST_CASE("split rejects bad inputs") {
  auto code =
      testing::thrown_code([] { train_eval::chronological_split(4); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::too_few_windows);

  train_eval::SplitFractions zero{0.0, 0.5, 0.5};
  code = testing::thrown_code(
      [&] { train_eval::chronological_split(100, zero); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::degenerate_split);

  train_eval::SplitFractions off{0.5, 0.2, 0.2};
  code = testing::thrown_code(
      [&] { train_eval::chronological_split(100, off); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::invalid_config);
}

TEST_CASE("early stopping on the pinned trace") {
  const std::vector<double> trace = {0.5, 0.6, 0.55, 0.54, 0.53};
  auto r = train_eval::early_stopped_loop(
      10, 2, [&](std::size_t e) { return trace[e - 1]; });
  CHECK(r.best_epoch == 2);
  CHECK(r.best_score == doctest::Approx(0.6));
  CHECK(r.epochs_run == 4);  // two straight non-improvements after epoch 2
  CHECK(r.stopped_early);
  CHECK(r.trace == std::vector<double>{0.5, 0.6, 0.55, 0.54});
}

TEST_CASE("improvement must be strict") {
  auto r = train_eval::early_stopped_loop(
      10, 2, [](std::size_t) { return 0.5; });
  CHECK(r.best_epoch == 1);
  CHECK(r.epochs_run == 3);
  CHECK(r.stopped_early);
}

TEST_CASE("loop runs to max_epochs when scores keep improving") {
  std::vector<std::size_t> seen;
  auto r = train_eval::early_stopped_loop(6, 2, [&](std::size_t e) {
    seen.push_back(e);
    return static_cast<double>(e);
  });
  CHECK(r.epochs_run == 6);
  CHECK(!r.stopped_early);
  CHECK(r.best_epoch == 6);
  CHECK(seen == std::vector<std::size_t>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("loop argument validation") {
  auto run = [](std::size_t) { return 0.0; };
  auto code = testing::thrown_code(
      [&] { train_eval::early_stopped_loop(0, 2, run); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::invalid_argument);
  code = testing::thrown_code(
      [&] { train_eval::early_stopped_loop(5, 0, run); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::invalid_argument);
}

TEST_CASE("training runs, logs epochs, and is deterministic") {
  auto bundle = tiny_bundle();
  auto cfg = tiny_config();
  auto variant = model::make_variant("full");
  train_eval::TrainOptions opt;
  opt.max_epochs = 4;
  opt.patience = 3;

  auto r1 = train_eval::train(cfg, variant, bundle, opt);
  CHECK(!r1.log.empty());
  CHECK(r1.log.size() <= 4);
  CHECK(r1.best_epoch >= 1);
  CHECK(r1.best_val_pr_auc >= 0.0);
  CHECK(r1.best_val_pr_auc <= 1.0);
  for (const auto& e : r1.log) CHECK(std::isfinite(e.train_loss));
  CHECK(!r1.best_checkpoint.is_null());

  auto r2 = train_eval::train(cfg, variant, bundle, opt);
  CHECK(r1.best_val_pr_auc == r2.best_val_pr_auc);
  CHECK(r1.best_checkpoint.dump() == r2.best_checkpoint.dump());
  REQUIRE(r1.log.size() == r2.log.size());
  for (std::size_t k = 0; k < r1.log.size(); ++k) {
    CHECK(r1.log[k].train_loss == r2.log[k].train_loss);
    CHECK(r1.log[k].val_pr_auc == r2.log[k].val_pr_auc);
  }
}

TEST_CASE("training rejects empty splits") {
  train_eval::DataBundle empty;
  auto code = testing::thrown_code([&] {
    train_eval::train(tiny_config(), model::make_variant("full"), empty);
  });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::empty_sequence);
}

TEST_CASE("ablation harness covers the variant-seed grid") {
  auto bundle = tiny_bundle();
  auto cfg = tiny_config();
  train_eval::TrainOptions opt;
  opt.max_epochs = 2;
  opt.patience = 2;
  const std::vector<std::uint64_t> seeds = {0, 1};
  const std::vector<std::string> variants = {"full", "baseline"};

  auto t = train_eval::run_ablation(cfg, bundle, seeds, variants, 1, opt);
  REQUIRE(t.runs.size() == 4);
  CHECK(t.runs[0].variant == "full");
  CHECK(t.runs[0].seed == 0);
  CHECK(t.runs[1].variant == "full");
  CHECK(t.runs[1].seed == 1);
  CHECK(t.runs[2].variant == "baseline");
  CHECK(t.runs[3].seed == 1);

  REQUIRE(t.rows.size() == 2);
  const auto& full_row = t.rows[0];
  CHECK(full_row.variant == "full");
  REQUIRE(full_row.per_seed_pr_auc.size() == 2);
  const double mean =
      0.5 * (full_row.per_seed_pr_auc[0] + full_row.per_seed_pr_auc[1]);
  CHECK(full_row.mean_pr_auc == doctest::Approx(mean));
  const double dev = full_row.per_seed_pr_auc[0] - mean;
  CHECK(full_row.std_pr_auc == doctest::Approx(std::fabs(dev)));
  CHECK(full_row.delta_vs_full == doctest::Approx(0.0));
  CHECK(t.rows[1].delta_vs_full ==
        doctest::Approx(t.rows[1].mean_pr_auc - full_row.mean_pr_auc));
  for (const auto& run : t.runs) {
    CHECK(run.test_metrics.pr_auc >= 0.0);
    CHECK(run.test_metrics.pr_auc <= 1.0);
  }

  // Deterministic across repeat invocations.
  auto t2 = train_eval::run_ablation(cfg, bundle, seeds, variants, 1, opt);
  for (std::size_t k = 0; k < t.runs.size(); ++k)
    CHECK(t.runs[k].test_metrics.pr_auc == t2.runs[k].test_metrics.pr_auc);
}

TEST_CASE("ablation argument validation") {
  auto bundle = tiny_bundle();
  auto cfg = tiny_config();
  auto code = testing::thrown_code([&] {
    train_eval::run_ablation(cfg, bundle, {0}, {"full"}, 1);
  });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::invalid_argument);
  code = testing::thrown_code([&] {
    train_eval::run_ablation(cfg, bundle, {0, 1}, {}, 1);
  });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::invalid_argument);
}
