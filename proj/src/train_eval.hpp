#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "model.hpp"

namespace leadwarn::train_eval {

struct SplitFractions {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

// Contiguous [begin, end) index ranges in chronological order.
struct SplitIndices {
  std::size_t train_begin = 0, train_end = 0;
  std::size_t val_begin = 0, val_end = 0;
  std::size_t test_begin = 0, test_end = 0;
};

SplitIndices chronological_split(std::size_t n_windows,
                                 const SplitFractions& fractions = {});

// ---- Metrics -------------------------------------------------------------

// Step-wise average precision over descending score groups.
double pr_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Mann-Whitney U / (n_pos * n_neg), ties counting one half.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct ThresholdMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // some denominator was zero
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

ThresholdMetrics threshold_metrics(const std::vector<double>& scores,
                                   const std::vector<int>& labels,
                                   double threshold = 0.5);

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  double threshold = 0.5;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  bool degenerate = false;
  std::vector<std::string> warnings;
};

// Lenient wrapper used by training/reporting: one-class inputs degrade to
// defined values plus a warning instead of throwing.
MetricsReport evaluate_scores(const std::vector<double>& scores,
                              const std::vector<int>& labels,
                              double threshold = 0.5);

nlohmann::json metrics_json(const MetricsReport& m);

// Staircase points for CSV export: (recall, precision) / (fpr, tpr).
std::vector<std::pair<double, double>> pr_curve(const std::vector<double>& scores,
                                                const std::vector<int>& labels);
std::vector<std::pair<double, double>> roc_curve(const std::vector<double>& scores,
                                                 const std::vector<int>& labels);

// ---- Training loop -------------------------------------------------------

struct EarlyStopResult {
  std::size_t best_epoch = 0;  // 1-based
  double best_score = 0.0;
  std::size_t epochs_run = 0;
  bool stopped_early = false;
  std::vector<double> trace;
};

// Runs run_epoch(epoch) for epoch = 1..max_epochs, tracking the best score
// under strict improvement; stops once `patience` consecutive epochs fail to
// improve on the best.
EarlyStopResult early_stopped_loop(std::size_t max_epochs, std::size_t patience,
                                   const std::function<double(std::size_t)>& run_epoch);

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_pr_auc = 0.0;
};

struct TrainOptions {
  std::size_t patience = 7;
  std::size_t max_epochs = 100;
};

struct DataBundle {
  std::vector<model::WindowExample> train_plain;  // chronological windows
  std::vector<model::WindowExample> train_pv;     // PV-resampled windows
  std::vector<model::WindowExample> val;
  std::vector<model::WindowExample> test;

  const std::vector<model::WindowExample>& train_for(
      const model::VariantSpec& variant) const {
    return variant.use_pv ? train_pv : train_plain;
  }
};

struct TrainResult {
  nlohmann::json best_checkpoint;  // parameters at the best validation epoch
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  double best_val_pr_auc = 0.0;
  bool stopped_early = false;
};

TrainResult train(const model::ModelConfig& cfg,
                  const model::VariantSpec& variant, const DataBundle& data,
                  const TrainOptions& options = {});

// ---- Ablation harness ------------------------------------------------------

struct AblationRun {
  std::string variant;
  std::uint64_t seed = 0;
  MetricsReport test_metrics;
};

struct AblationRow {
  std::string variant;
  std::vector<double> per_seed_pr_auc;
  double mean_pr_auc = 0.0;
  double std_pr_auc = 0.0;
  double delta_vs_full = 0.0;
};

struct AblationTable {
  std::vector<AblationRun> runs;  // variant-major, seed-minor order
  std::vector<AblationRow> rows;
};

// Trains and evaluates every (variant, seed) pair on identical splits.
// n_threads caps worker parallelism (0 = hardware concurrency); each job is
// internally single-threaded and deterministic.
AblationTable run_ablation(const model::ModelConfig& base_cfg,
                           const DataBundle& data,
                           const std::vector<std::uint64_t>& seeds,
                           const std::vector<std::string>& variants,
                           std::size_t n_threads = 0,
                           const TrainOptions& options = {});

}  // namespace leadwarn::train_eval
