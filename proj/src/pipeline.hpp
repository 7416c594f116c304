#pragma once

#include <string>
#include <vector>

#include "run_config.hpp"
#include "train_eval.hpp"
#include "windowing.hpp"

namespace leadwarn::pipeline {

// Everything the modeling stages need, derived once from the raw CSV.
struct PreparedData {
  ingest::LoadSummary load_summary;
  features::FeatureTable table;
  std::vector<windowing::Frame> frames;
  std::vector<windowing::LabeledWindow> windows;  // horizon-aligned
  train_eval::SplitIndices split;                 // over `windows`
  double median_gap_s = 0.0;
  std::int64_t frame_duration_s = 0;
  std::size_t train_row_end = 0;  // rows visible to training-time fitting
  train_eval::DataBundle bundle;
};

// Raw CSV path: explicit ingest.csv_path, else output_dir/synth.csv.
std::string resolve_data_csv(const config::RunConfig& cfg);

PreparedData prepare(const config::RunConfig& cfg);

// Window-mean of the engineered numeric features, the aggregate
// representation used by the reference classifier in both searches.
Eigen::VectorXd window_mean_features(const features::FeatureTable& table,
                                     std::size_t start, std::size_t len);

// Subcommand bodies; they throw Error on failure and write artifacts plus
// resolved_config.json under cfg.output_dir.
void cmd_synth(const config::RunConfig& cfg);
void cmd_ingest(const config::RunConfig& cfg);
void cmd_features(const config::RunConfig& cfg);
void cmd_pv_search(const config::RunConfig& cfg);
void cmd_wh_search(const config::RunConfig& cfg);
void cmd_train(const config::RunConfig& cfg, const std::string& variant);
void cmd_evaluate(const config::RunConfig& cfg, const std::string& variant);
void cmd_ablate(const config::RunConfig& cfg);
void cmd_report(const config::RunConfig& cfg);

// LEADWARN_THREADS (0 or unset = auto). Throws on a malformed value.
std::size_t thread_cap_from_env();

}  // namespace leadwarn::pipeline
