#include "train_eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "errors.hpp"

namespace leadwarn::train_eval {

SplitIndices chronological_split(std::size_t n_windows,
                                 const SplitFractions& fractions) {
  if (!(fractions.train > 0.0) || !(fractions.val > 0.0) ||
      !(fractions.test > 0.0))
    throw Error(ErrorCode::degenerate_split,
                "all split fractions must be positive");
  const double sum = fractions.train + fractions.val + fractions.test;
  if (std::fabs(sum - 1.0) > 1e-9)
    throw Error(ErrorCode::invalid_config, "split fractions must sum to 1");
  if (n_windows < 5)
    throw Error(ErrorCode::too_few_windows,
                "need at least 5 windows, got " + std::to_string(n_windows));
  const auto nd = static_cast<double>(n_windows);
  const auto n_train = static_cast<std::size_t>(std::floor(nd * fractions.train));
  const auto n_trainval = static_cast<std::size_t>(
      std::floor(nd * (fractions.train + fractions.val)));
  SplitIndices s;
  s.train_begin = 0;
  s.train_end = n_train;
  s.val_begin = n_train;
  s.val_end = n_trainval;
  s.test_begin = n_trainval;
  s.test_end = n_windows;
  if (s.train_end == s.train_begin || s.val_end == s.val_begin ||
      s.test_end == s.test_begin)
    throw Error(ErrorCode::degenerate_split, "a split came out empty");
  return s;
}

namespace {

struct ScoreGroup {
  double score;
  std::size_t pos;
  std::size_t neg;
};

// Equal-score groups in descending score order.
std::vector<ScoreGroup> score_groups(const std::vector<double>& scores,
                                     const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw Error(ErrorCode::shape_mismatch,
                "scores and labels lengths differ");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  std::vector<ScoreGroup> groups;
  for (std::size_t k = 0; k < idx.size();) {
    ScoreGroup g{scores[idx[k]], 0, 0};
    while (k < idx.size() && scores[idx[k]] == g.score) {
      if (labels[idx[k]] == 1)
        ++g.pos;
      else
        ++g.neg;
      ++k;
    }
    groups.push_back(g);
  }
  return groups;
}

double population_std(const std::vector<double>& xs, double mean) {
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace

double pr_auc(const std::vector<double>& scores,
              const std::vector<int>& labels) {
  const auto groups = score_groups(scores, labels);
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& g : groups) {
    n_pos += g.pos;
    n_neg += g.neg;
  }
  if (n_pos == 0)
    throw Error(ErrorCode::no_positives, "pr_auc needs at least one positive");
  if (n_neg == 0) return 1.0;  // all-positive convention; caller warns
  double ap = 0.0;
  double recall_prev = 0.0;
  std::size_t tp = 0, fp = 0;
  for (const auto& g : groups) {
    tp += g.pos;
    fp += g.neg;
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
  }
  return ap;
}

double roc_auc(const std::vector<double>& scores,
               const std::vector<int>& labels) {
  const auto groups = score_groups(scores, labels);
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& g : groups) {
    n_pos += g.pos;
    n_neg += g.neg;
  }
  if (n_pos == 0 || n_neg == 0)
    throw Error(ErrorCode::one_class_only,
                "roc_auc needs both classes present");
  // Ascending order: count negative scores strictly below each positive.
  double u = 0.0;
  std::size_t neg_below = 0;
  for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
    u += static_cast<double>(it->pos) * static_cast<double>(neg_below);
    u += 0.5 * static_cast<double>(it->pos) * static_cast<double>(it->neg);
    neg_below += it->neg;
  }
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

ThresholdMetrics threshold_metrics(const std::vector<double>& scores,
                                   const std::vector<int>& labels,
                                   double threshold) {
  if (scores.size() != labels.size())
    throw Error(ErrorCode::shape_mismatch, "scores and labels lengths differ");
  ThresholdMetrics m;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    const bool truth = labels[i] == 1;
    if (pred && truth)
      ++m.tp;
    else if (pred && !truth)
      ++m.fp;
    else if (!pred && truth)
      ++m.fn;
    else
      ++m.tn;
  }
  const std::size_t n = scores.size();
  m.accuracy = n == 0 ? 0.0
                      : static_cast<double>(m.tp + m.tn) /
                            static_cast<double>(n);
  if (m.tp + m.fp > 0)
    m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  else
    m.degenerate = true;
  if (m.tp + m.fn > 0)
    m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  else
    m.degenerate = true;
  if (m.precision + m.recall > 0.0)
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  else
    m.degenerate = true;
  return m;
}

MetricsReport evaluate_scores(const std::vector<double>& scores,
                              const std::vector<int>& labels,
                              double threshold) {
  MetricsReport r;
  r.threshold = threshold;
  for (int y : labels)
    if (y == 1)
      ++r.n_pos;
    else
      ++r.n_neg;
  const auto t = threshold_metrics(scores, labels, threshold);
  r.accuracy = t.accuracy;
  r.precision = t.precision;
  r.recall = t.recall;
  r.f1 = t.f1;
  r.degenerate = t.degenerate;
  if (r.n_pos == 0) {
    r.pr_auc = 0.0;
    r.roc_auc = 0.5;
    r.warnings.push_back("no positives in split; pr_auc=0, roc_auc=0.5");
  } else if (r.n_neg == 0) {
    r.pr_auc = 1.0;
    r.roc_auc = 0.5;
    r.warnings.push_back("no negatives in split; pr_auc=1, roc_auc=0.5");
  } else {
    r.pr_auc = pr_auc(scores, labels);
    r.roc_auc = roc_auc(scores, labels);
  }
  return r;
}

nlohmann::json metrics_json(const MetricsReport& m) {
  nlohmann::json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["roc_auc"] = m.roc_auc;
  j["pr_auc"] = m.pr_auc;
  j["threshold"] = m.threshold;
  j["n_pos"] = m.n_pos;
  j["n_neg"] = m.n_neg;
  j["degenerate"] = m.degenerate;
  j["warnings"] = m.warnings;
  return j;
}

std::vector<std::pair<double, double>> pr_curve(
    const std::vector<double>& scores, const std::vector<int>& labels) {
  const auto groups = score_groups(scores, labels);
  std::size_t n_pos = 0;
  for (const auto& g : groups) n_pos += g.pos;
  if (n_pos == 0)
    throw Error(ErrorCode::no_positives, "pr_curve needs at least one positive");
  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(0.0, 1.0);
  std::size_t tp = 0, fp = 0;
  for (const auto& g : groups) {
    tp += g.pos;
    fp += g.neg;
    pts.emplace_back(static_cast<double>(tp) / static_cast<double>(n_pos),
                     static_cast<double>(tp) / static_cast<double>(tp + fp));
  }
  return pts;
}

std::vector<std::pair<double, double>> roc_curve(
    const std::vector<double>& scores, const std::vector<int>& labels) {
  const auto groups = score_groups(scores, labels);
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& g : groups) {
    n_pos += g.pos;
    n_neg += g.neg;
  }
  if (n_pos == 0 || n_neg == 0)
    throw Error(ErrorCode::one_class_only, "roc_curve needs both classes");
  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(0.0, 0.0);
  std::size_t tp = 0, fp = 0;
  for (const auto& g : groups) {
    tp += g.pos;
    fp += g.neg;
    pts.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                     static_cast<double>(tp) / static_cast<double>(n_pos));
  }
  return pts;
}

EarlyStopResult early_stopped_loop(
    std::size_t max_epochs, std::size_t patience,
    const std::function<double(std::size_t)>& run_epoch) {
  if (max_epochs == 0)
    throw Error(ErrorCode::invalid_argument, "max_epochs must be positive");
  if (patience == 0)
    throw Error(ErrorCode::invalid_argument, "patience must be positive");
  EarlyStopResult r;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= max_epochs; ++epoch) {
    const double score = run_epoch(epoch);
    r.trace.push_back(score);
    r.epochs_run = epoch;
    if (score > best) {
      best = score;
      r.best_epoch = epoch;
      r.best_score = score;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (since_best >= patience) {
      r.stopped_early = true;
      break;
    }
  }
  return r;
}

TrainResult train(const model::ModelConfig& cfg,
                  const model::VariantSpec& variant, const DataBundle& data,
                  const TrainOptions& options) {
  const auto& train_seq = data.train_for(variant);
  if (train_seq.empty() || data.val.empty())
    throw Error(ErrorCode::empty_sequence, "train and val splits must be non-empty");

  model::HypvLeadModel m(cfg, variant);
  // Input statistics come from the chronological training windows for every
  // variant; PV resampling changes which windows are trained on, not the
  // feature scale, and this keeps train/eval inputs on one footing.
  m.set_standardizer(model::Standardizer::fit(
      data.train_plain.empty() ? train_seq : data.train_plain));
  nn::AdamState opt(cfg.optimizer);

  std::vector<int> val_labels;
  val_labels.reserve(data.val.size());
  for (const auto& ex : data.val) val_labels.push_back(ex.target);

  TrainResult result;
  double best_seen = -std::numeric_limits<double>::infinity();
  const auto stop = early_stopped_loop(
      options.max_epochs, options.patience, [&](std::size_t epoch) {
        const double loss = m.train_epoch(train_seq, opt);
        const auto val_scores = m.score_sequence(data.val);
        const auto val_metrics = evaluate_scores(val_scores, val_labels);
        result.log.push_back({epoch, loss, val_metrics.pr_auc});
        if (val_metrics.pr_auc > best_seen) {
          best_seen = val_metrics.pr_auc;
          result.best_checkpoint = m.to_json();
        }
        return val_metrics.pr_auc;
      });
  result.best_epoch = stop.best_epoch;
  result.best_val_pr_auc = stop.best_score;
  result.stopped_early = stop.stopped_early;
  return result;
}

AblationTable run_ablation(const model::ModelConfig& base_cfg,
                           const DataBundle& data,
                           const std::vector<std::uint64_t>& seeds,
                           const std::vector<std::string>& variants,
                           std::size_t n_threads, const TrainOptions& options) {
  if (seeds.size() < 2)
    throw Error(ErrorCode::invalid_argument, "need at least 2 seeds");
  if (variants.empty())
    throw Error(ErrorCode::invalid_argument, "need at least one variant");

  struct Job {
    std::size_t index;
    std::string variant;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& v : variants)
    for (auto s : seeds) jobs.push_back({jobs.size(), v, s});

  std::vector<AblationRun> runs(jobs.size());
  std::vector<int> test_labels;
  test_labels.reserve(data.test.size());
  for (const auto& ex : data.test) test_labels.push_back(ex.target);

  auto run_job = [&](const Job& job) {
    model::VariantSpec variant = model::make_variant(job.variant);
    model::ModelConfig cfg = base_cfg;
    cfg.seed = job.seed;
    TrainResult tr = train(cfg, variant, data, options);
    model::HypvLeadModel best =
        model::HypvLeadModel::from_json(tr.best_checkpoint);
    const auto scores = best.score_sequence(data.test);
    runs[job.index].variant = job.variant;
    runs[job.index].seed = job.seed;
    runs[job.index].test_metrics = evaluate_scores(scores, test_labels);
  };

  std::size_t workers = n_threads == 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : n_threads;
  workers = std::min(workers, jobs.size());
  if (workers <= 1) {
    for (const auto& job : jobs) run_job(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t k = next.fetch_add(1);
          if (k >= jobs.size()) return;
          try {
            run_job(jobs[k]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  AblationTable table;
  table.runs = std::move(runs);

  double full_mean = 0.0;
  std::vector<AblationRow> rows;
  for (const auto& v : variants) {
    AblationRow row;
    row.variant = v;
    for (const auto& run : table.runs)
      if (run.variant == v) row.per_seed_pr_auc.push_back(run.test_metrics.pr_auc);
    const double n = static_cast<double>(row.per_seed_pr_auc.size());
    row.mean_pr_auc =
        std::accumulate(row.per_seed_pr_auc.begin(), row.per_seed_pr_auc.end(),
                        0.0) /
        n;
    row.std_pr_auc = population_std(row.per_seed_pr_auc, row.mean_pr_auc);
    rows.push_back(std::move(row));
  }
  for (const auto& row : rows)
    if (row.variant == "full") full_mean = row.mean_pr_auc;
  for (auto& row : rows) row.delta_vs_full = row.mean_pr_auc - full_mean;
  table.rows = std::move(rows);
  return table;
}

}  // namespace leadwarn::train_eval
