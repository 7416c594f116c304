#include "pipeline.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "baseline.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "synth.hpp"

namespace leadwarn::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::io_failure, "cannot write '" + path.string() + "'");
  out << content;
  if (!out)
    throw Error(ErrorCode::io_failure, "short write to '" + path.string() + "'");
}

fs::path out_dir(const config::RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::exists(dir))
    throw Error(ErrorCode::io_failure,
                "cannot create output dir '" + dir.string() + "'");
  return dir;
}

void write_resolved_config(const config::RunConfig& cfg) {
  json j;
  j["config"] = config::resolved_json(cfg);
  j["hash"] = config::config_hash(cfg);
  write_text(out_dir(cfg) / "resolved_config.json", j.dump(2) + "\n");
}

Eigen::MatrixXd stack_rows(const std::vector<Eigen::VectorXd>& rows) {
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = rows[i];
  return m;
}

std::string variant_label(const std::string& name) {
  if (name == "baseline") return "GCN-LSTM (Baseline)";
  if (name == "no_pv") return "w/o PV (Hyp + GCN-LSTM)";
  if (name == "no_hyp") return "w/o Hyperbolic (PV + GCN-LSTM)";
  if (name == "pv_only") return "PV only (Euclid + GCN-LSTM)";
  if (name == "structure_only") return "Structure-only (PV + Hyp + GCN)";
  if (name == "temporal_only") return "Temporal-only (PV + Hyp + LSTM)";
  if (name == "full") return "Full HyPV-LEAD";
  return name;
}

// Shared preprocessing up to the labeled-window split; no examples yet.
struct BaseData {
  ingest::LoadSummary load_summary;
  features::FeatureTable table;
  std::vector<windowing::Frame> frames;
  std::vector<windowing::LabeledWindow> windows;
  train_eval::SplitIndices split;
  double median_gap_s = 0.0;
  std::int64_t frame_duration_s = 0;
  std::size_t train_row_end = 0;
};

BaseData prepare_base(const config::RunConfig& cfg) {
  BaseData d;
  auto load =
      ingest::parse_transactions(resolve_data_csv(cfg), cfg.ingest.columns);
  d.load_summary = load.summary;
  d.table = features::engineer_features(load.log);

  const std::size_t L = cfg.model.L;
  const std::size_t h = cfg.model.h;
  d.frames = windowing::frame_windows(d.table, L);
  if (h >= d.frames.size())
    throw Error(ErrorCode::horizon_exceeds_frames,
                "horizon " + std::to_string(h) + " leaves no labeled frames (" +
                    std::to_string(d.frames.size()) + " total)");
  const std::size_t n_labeled = d.frames.size() - h;
  d.split = train_eval::chronological_split(n_labeled, cfg.train.split);
  d.train_row_end = d.split.train_end * L;
  d.median_gap_s = windowing::median_row_gap_seconds(d.table, d.train_row_end);
  d.frame_duration_s =
      std::max<std::int64_t>(1, std::llround(d.median_gap_s)) *
      static_cast<std::int64_t>(L);
  d.windows = windowing::align_labels(d.frames, h, d.frame_duration_s);
  return d;
}

std::vector<double> training_series(const BaseData& d) {
  std::vector<double> series;
  series.reserve(d.train_row_end);
  for (std::size_t i = 0; i < d.train_row_end; ++i)
    series.push_back(d.table.rows[i].usd_value);
  return series;
}

// PV training pairs: each resampled start becomes an observation window and
// its target attaches h frames ahead, exactly as for chronological windows.
// Pairs whose target range [s + h*L, s + (h+1)*L) leaves the training rows
// are dropped.
std::vector<model::WindowExample> pv_train_examples(
    const config::RunConfig& cfg, const BaseData& d,
    const pv::PVConfig& pv_cfg) {
  const std::size_t L = cfg.model.L;
  const std::size_t h = cfg.model.h;
  const auto series = training_series(d);
  const auto events = pv::detect_peaks_valleys(series, pv_cfg);
  if (events.total() == 0)
    throw Error(ErrorCode::no_events,
                "PV detected no events on the training rows");
  auto starts = pv::resample_pv_rows(d.train_row_end, events, L,
                                     pv_cfg.neg_ratio, cfg.model.seed);
  std::vector<model::WindowExample> out;
  for (std::size_t s : starts) {
    if (s + (h + 1) * L > d.train_row_end) continue;
    const std::size_t target_begin = s + h * L;
    int target = 0;
    for (std::size_t i = target_begin; i < target_begin + L; ++i)
      target |= d.table.rows[i].label;
    const std::int64_t t_event = d.table.rows[target_begin].timestamp;
    const std::int64_t t_alert =
        t_event - static_cast<std::int64_t>(h) * d.frame_duration_s;
    out.push_back(
        model::make_example(d.table, s, L, target, t_event, t_alert, s));
  }
  return out;
}

train_eval::DataBundle build_bundle(const config::RunConfig& cfg,
                                    const BaseData& d) {
  train_eval::DataBundle b;
  for (std::size_t t = 0; t < d.windows.size(); ++t) {
    auto ex = model::make_example(d.table, d.windows[t]);
    if (t < d.split.train_end)
      b.train_plain.push_back(std::move(ex));
    else if (t < d.split.val_end)
      b.val.push_back(std::move(ex));
    else
      b.test.push_back(std::move(ex));
  }
  b.train_pv = pv_train_examples(cfg, d, cfg.model.pv);
  return b;
}

}  // namespace

std::string resolve_data_csv(const config::RunConfig& cfg) {
  if (!cfg.ingest.csv_path.empty()) return cfg.ingest.csv_path;
  return (fs::path(cfg.output_dir) / "synth.csv").string();
}

PreparedData prepare(const config::RunConfig& cfg) {
  BaseData base = prepare_base(cfg);
  PreparedData d;
  d.bundle = build_bundle(cfg, base);
  d.load_summary = base.load_summary;
  d.frames = std::move(base.frames);
  d.windows = std::move(base.windows);
  d.split = base.split;
  d.median_gap_s = base.median_gap_s;
  d.frame_duration_s = base.frame_duration_s;
  d.train_row_end = base.train_row_end;
  d.table = std::move(base.table);
  return d;
}

Eigen::VectorXd window_mean_features(const features::FeatureTable& table,
                                     std::size_t start, std::size_t len) {
  if (len == 0 || start + len > table.rows.size())
    throw Error(ErrorCode::empty_window, "window out of range");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(features::kNumericFeatureDim);
  for (std::size_t i = start; i < start + len; ++i) {
    const auto f = features::numeric_features(table.rows[i]);
    for (int k = 0; k < features::kNumericFeatureDim; ++k) acc(k) += f[k];
  }
  return acc / static_cast<double>(len);
}

void cmd_synth(const config::RunConfig& cfg) {
  const auto log = synth::generate_stream(cfg.synth);
  write_text(out_dir(cfg) / "synth.csv", ingest::serialize_transactions(log));
  write_resolved_config(cfg);
}

void cmd_ingest(const config::RunConfig& cfg) {
  auto load =
      ingest::parse_transactions(resolve_data_csv(cfg), cfg.ingest.columns);
  write_text(out_dir(cfg) / "transactions.csv",
             ingest::serialize_transactions(load.log));
  json summary;
  summary["rows_total"] = load.summary.rows_total;
  summary["rows_kept"] = load.summary.rows_kept;
  summary["rows_dropped"] = load.summary.rows_dropped;
  write_text(out_dir(cfg) / "load_summary.json", summary.dump(2) + "\n");
  write_resolved_config(cfg);
}

void cmd_features(const config::RunConfig& cfg) {
  auto load =
      ingest::parse_transactions(resolve_data_csv(cfg), cfg.ingest.columns);
  const auto table = features::engineer_features(load.log);
  write_text(out_dir(cfg) / "features.csv", features::feature_table_csv(table));
  json codes;
  for (const auto& [addr, code] : table.address_codes) codes[addr] = code;
  write_text(out_dir(cfg) / "address_codes.json", codes.dump(2) + "\n");
  write_resolved_config(cfg);
}

void cmd_pv_search(const config::RunConfig& cfg) {
  const BaseData d = prepare_base(cfg);
  const std::size_t L = cfg.model.L;
  const std::size_t h = cfg.model.h;
  const auto series = training_series(d);

  std::vector<Eigen::VectorXd> val_feats;
  std::vector<int> val_labels;
  for (std::size_t t = d.split.val_begin; t < d.split.val_end; ++t) {
    val_feats.push_back(
        window_mean_features(d.table, d.windows[t].start, d.windows[t].len));
    val_labels.push_back(d.windows[t].target);
  }

  auto eval = [&](const pv::PVConfig& theta) -> double {
    pv::PVEvents events;
    try {
      events = pv::detect_peaks_valleys(series, theta);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::series_too_short) return 0.0;
      throw;
    }
    if (events.total() == 0) return 0.0;
    std::vector<std::size_t> starts;
    try {
      starts = pv::resample_pv_rows(d.train_row_end, events, L,
                                    theta.neg_ratio, cfg.model.seed);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::no_events ||
          e.code() == ErrorCode::too_few_rows)
        return 0.0;
      throw;
    }
    std::vector<Eigen::VectorXd> xs;
    std::vector<int> ys;
    for (std::size_t s : starts) {
      if (s + (h + 1) * L > d.train_row_end) continue;
      int target = 0;
      for (std::size_t i = s + h * L; i < s + (h + 1) * L; ++i)
        target |= d.table.rows[i].label;
      xs.push_back(window_mean_features(d.table, s, L));
      ys.push_back(target);
    }
    if (xs.empty()) return 0.0;
    const auto scorer = baseline::LogisticScorer::fit(stack_rows(xs), ys);
    std::vector<double> scores;
    scores.reserve(val_feats.size());
    for (const auto& f : val_feats) scores.push_back(scorer.score(f));
    return train_eval::threshold_metrics(scores, val_labels).f1;
  };

  const auto result = search_pv_config(cfg.pv_grid, eval, cfg.pv_neg_ratio);

  std::ostringstream csv;
  csv << "n,z_th,k_max,f1\n";
  for (const auto& entry : result.log)
    csv << entry.config.n << ',' << fmt17(entry.config.z_th) << ','
        << entry.config.k_max << ',' << fmt17(entry.score) << '\n';
  write_text(out_dir(cfg) / "pv_search.csv", csv.str());

  json best;
  best["n"] = result.best.n;
  best["z_th"] = result.best.z_th;
  best["k_max"] = result.best.k_max;
  best["neg_ratio"] = result.best.neg_ratio;
  best["f1"] = result.best_score;
  write_text(out_dir(cfg) / "pv_best.json", best.dump(2) + "\n");
  write_resolved_config(cfg);
}

void cmd_wh_search(const config::RunConfig& cfg) {
  const BaseData d = prepare_base(cfg);
  const double gap = windowing::median_row_gap_seconds(d.table, 0);

  auto eval =
      [&](const windowing::WindowSpec& spec) -> windowing::WhMetrics {
    windowing::WhMetrics zero;
    const std::size_t L = windowing::minutes_to_rows(spec.w_minutes, gap);
    std::vector<windowing::Frame> frames;
    try {
      frames = windowing::frame_windows(d.table, L);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::too_few_rows) return zero;
      throw;
    }
    const std::size_t h = windowing::minutes_to_frames(spec.h_minutes, L, gap);
    if (h >= frames.size()) return zero;
    const std::size_t n_labeled = frames.size() - h;
    train_eval::SplitIndices split;
    try {
      split = train_eval::chronological_split(n_labeled, cfg.train.split);
    } catch (const Error&) {
      return zero;
    }
    const std::int64_t frame_duration =
        std::max<std::int64_t>(1, std::llround(gap)) *
        static_cast<std::int64_t>(L);
    const auto windows = windowing::align_labels(frames, h, frame_duration);

    std::vector<Eigen::VectorXd> xs, vx;
    std::vector<int> ys, vy;
    for (std::size_t t = 0; t < split.train_end; ++t) {
      xs.push_back(window_mean_features(d.table, windows[t].start, windows[t].len));
      ys.push_back(windows[t].target);
    }
    for (std::size_t t = split.val_begin; t < split.val_end; ++t) {
      vx.push_back(window_mean_features(d.table, windows[t].start, windows[t].len));
      vy.push_back(windows[t].target);
    }
    const auto scorer = baseline::LogisticScorer::fit(stack_rows(xs), ys);
    std::vector<double> scores;
    scores.reserve(vx.size());
    for (const auto& f : vx) scores.push_back(scorer.score(f));
    const auto m = train_eval::evaluate_scores(scores, vy);
    windowing::WhMetrics out;
    out.accuracy = m.accuracy;
    out.recall = m.recall;
    out.precision = m.precision;
    out.f1 = m.f1;
    out.roc_auc = m.roc_auc;
    out.pr_auc = m.pr_auc;
    return out;
  };

  const auto result = windowing::search_window_horizon(
      cfg.window_grid.w_minutes, cfg.window_grid.h_minutes, eval);
  write_text(out_dir(cfg) / "wh_search.csv", windowing::wh_search_csv(result));

  json best;
  best["window_minutes"] = result.best.w_minutes;
  best["horizon_minutes"] = result.best.h_minutes;
  for (const auto& row : result.rows)
    if (row.spec.w_minutes == result.best.w_minutes &&
        row.spec.h_minutes == result.best.h_minutes)
      best["pr_auc"] = row.metrics.pr_auc;
  write_text(out_dir(cfg) / "wh_best.json", best.dump(2) + "\n");
  write_resolved_config(cfg);
}

void cmd_train(const config::RunConfig& cfg, const std::string& variant) {
  const auto spec = model::make_variant(variant);
  const PreparedData d = prepare(cfg);
  train_eval::TrainOptions opts{cfg.train.patience, cfg.train.max_epochs};
  const auto result = train_eval::train(cfg.model, spec, d.bundle, opts);

  json checkpoint = result.best_checkpoint;
  checkpoint["config_hash"] = config::config_hash(cfg);
  write_text(out_dir(cfg) / ("checkpoint_" + variant + ".json"),
             checkpoint.dump(2) + "\n");

  std::ostringstream log_csv;
  log_csv << "epoch,train_loss,val_pr_auc\n";
  for (const auto& e : result.log)
    log_csv << e.epoch << ',' << fmt17(e.train_loss) << ','
            << fmt17(e.val_pr_auc) << '\n';
  write_text(out_dir(cfg) / ("train_log_" + variant + ".csv"), log_csv.str());
  write_resolved_config(cfg);
}

namespace {

void write_curves(const config::RunConfig& cfg, const std::string& variant,
                  const std::vector<double>& scores,
                  const std::vector<int>& labels) {
  bool has_pos = false, has_neg = false;
  for (int y : labels) (y == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) return;
  std::ostringstream pr;
  pr << "recall,precision\n";
  for (const auto& [r, p] : train_eval::pr_curve(scores, labels))
    pr << fmt17(r) << ',' << fmt17(p) << '\n';
  write_text(out_dir(cfg) / ("pr_curve_" + variant + ".csv"), pr.str());
  std::ostringstream roc;
  roc << "fpr,tpr\n";
  for (const auto& [f, t] : train_eval::roc_curve(scores, labels))
    roc << fmt17(f) << ',' << fmt17(t) << '\n';
  write_text(out_dir(cfg) / ("roc_curve_" + variant + ".csv"), roc.str());
}

}  // namespace

void cmd_evaluate(const config::RunConfig& cfg, const std::string& variant) {
  model::make_variant(variant);  // validate the name before heavy work
  const PreparedData d = prepare(cfg);
  const fs::path ckpt_path =
      out_dir(cfg) / ("checkpoint_" + variant + ".json");
  std::ifstream in(ckpt_path);
  if (!in)
    throw Error(ErrorCode::io_failure,
                "missing checkpoint '" + ckpt_path.string() +
                    "'; run train first");
  json ckpt;
  try {
    in >> ckpt;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io_failure,
                "unreadable checkpoint '" + ckpt_path.string() + "': " + e.what());
  }
  auto m = model::HypvLeadModel::from_json(ckpt);

  const auto scores = m.score_sequence(d.bundle.test);
  std::vector<int> labels;
  labels.reserve(d.bundle.test.size());
  for (const auto& ex : d.bundle.test) labels.push_back(ex.target);
  const auto metrics = train_eval::evaluate_scores(scores, labels);

  json mj;
  mj["variant"] = variant;
  mj["config_hash"] = config::config_hash(cfg);
  mj["metrics"] = train_eval::metrics_json(metrics);
  write_text(out_dir(cfg) / ("metrics_" + variant + ".json"),
             mj.dump(2) + "\n");

  std::ostringstream sc;
  sc << "frame_index,t_alert,t_event,score,target\n";
  for (std::size_t i = 0; i < d.bundle.test.size(); ++i) {
    const auto& ex = d.bundle.test[i];
    sc << ex.frame_index << ',' << ex.t_alert << ',' << ex.t_event << ','
       << fmt17(scores[i]) << ',' << ex.target << '\n';
  }
  write_text(out_dir(cfg) / ("scores_" + variant + ".csv"), sc.str());
  write_curves(cfg, variant, scores, labels);
  write_resolved_config(cfg);
}

void cmd_ablate(const config::RunConfig& cfg) {
  const PreparedData d = prepare(cfg);
  train_eval::TrainOptions opts{cfg.train.patience, cfg.train.max_epochs};
  const auto table =
      train_eval::run_ablation(cfg.model, d.bundle, cfg.train.seeds,
                               model::variant_names(), thread_cap_from_env(),
                               opts);

  json aj;
  aj["config_hash"] = config::config_hash(cfg);
  json runs = json::array();
  for (const auto& run : table.runs)
    runs.push_back({{"variant", run.variant},
                    {"seed", run.seed},
                    {"metrics", train_eval::metrics_json(run.test_metrics)}});
  aj["runs"] = std::move(runs);
  json rows = json::array();
  for (const auto& row : table.rows)
    rows.push_back({{"variant", row.variant},
                    {"label", variant_label(row.variant)},
                    {"per_seed_pr_auc", row.per_seed_pr_auc},
                    {"mean_pr_auc", row.mean_pr_auc},
                    {"std_pr_auc", row.std_pr_auc},
                    {"delta_vs_full", row.delta_vs_full}});
  aj["rows"] = std::move(rows);
  write_text(out_dir(cfg) / "ablation.json", aj.dump(2) + "\n");

  std::ostringstream md;
  md << "| Model Setting | PR-AUC | Δ vs Full |\n";
  md << "|---|---|---|\n";
  for (const auto& row : table.rows) {
    char delta[32];
    std::snprintf(delta, sizeof(delta), "%+.4f", row.delta_vs_full);
    md << "| " << variant_label(row.variant) << " | " << fmt4(row.mean_pr_auc)
       << " ± " << fmt4(row.std_pr_auc) << " | " << delta << " |\n";
  }
  write_text(out_dir(cfg) / "ablation.md", md.str());
  write_resolved_config(cfg);
}

void cmd_report(const config::RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  std::ostringstream md;
  md << "# Run report\n\n";
  md << "Config hash: `" << config::config_hash(cfg) << "`\n\n";

  const fs::path wh_path = dir / "wh_search.csv";
  if (fs::exists(wh_path)) {
    const auto table = csv::read_file(wh_path.string());
    md << "## Window-horizon search\n\n";
    md << "| Window (min) | Horizon (min) | Accuracy | Recall | Precision "
          "| F1 | ROC-AUC | PR-AUC |\n";
    md << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& row : table.rows) {
      if (row.size() < 8) continue;
      md << "| " << row[0] << " | " << row[1];
      for (std::size_t k = 2; k < 8; ++k) md << " | " << fmt4(std::stod(row[k]));
      md << " |\n";
    }
    md << '\n';
  }

  bool any_metrics = false;
  std::ostringstream table2;
  table2 << "## Model performance\n\n";
  table2 << "| Model | Accuracy | Precision | Recall | F1 | ROC-AUC | "
            "PR-AUC |\n";
  table2 << "|---|---|---|---|---|---|---|\n";
  for (const auto& name : model::variant_names()) {
    const fs::path mp = dir / ("metrics_" + name + ".json");
    if (!fs::exists(mp)) continue;
    std::ifstream in(mp);
    json mj;
    try {
      in >> mj;
    } catch (const json::exception&) {
      continue;
    }
    const auto& m = mj.at("metrics");
    table2 << "| " << variant_label(name) << " | "
           << fmt4(m.at("accuracy").get<double>()) << " | "
           << fmt4(m.at("precision").get<double>()) << " | "
           << fmt4(m.at("recall").get<double>()) << " | "
           << fmt4(m.at("f1").get<double>()) << " | "
           << fmt4(m.at("roc_auc").get<double>()) << " | "
           << fmt4(m.at("pr_auc").get<double>()) << " |\n";
    any_metrics = true;
  }
  if (any_metrics) md << table2.str() << '\n';

  const fs::path ap = dir / "ablation.json";
  if (fs::exists(ap)) {
    std::ifstream in(ap);
    json aj;
    try {
      in >> aj;
      md << "## Ablation\n\n";
      md << "| Model Setting | PR-AUC | Δ vs Full |\n";
      md << "|---|---|---|\n";
      for (const auto& row : aj.at("rows")) {
        char delta[32];
        std::snprintf(delta, sizeof(delta), "%+.4f",
                      row.at("delta_vs_full").get<double>());
        md << "| " << row.at("label").get<std::string>() << " | "
           << fmt4(row.at("mean_pr_auc").get<double>()) << " ± "
           << fmt4(row.at("std_pr_auc").get<double>()) << " | " << delta
           << " |\n";
      }
      md << '\n';
    } catch (const json::exception&) {
      // partial artifacts are skipped, not fatal
    }
  }

  // Refresh curve CSVs from any exported score files.
  for (const auto& name : model::variant_names()) {
    const fs::path sp = dir / ("scores_" + name + ".csv");
    if (!fs::exists(sp)) continue;
    const auto table = csv::read_file(sp.string());
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& row : table.rows) {
      if (row.size() < 5) continue;
      scores.push_back(std::stod(row[3]));
      labels.push_back(std::stoi(row[4]));
    }
    if (!scores.empty()) write_curves(cfg, name, scores, labels);
  }

  write_text(dir / "report.md", md.str());
  write_resolved_config(cfg);
}

std::size_t thread_cap_from_env() {
  const char* env = std::getenv("LEADWARN_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw Error(ErrorCode::invalid_config,
                "LEADWARN_THREADS must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

}  // namespace leadwarn::pipeline
