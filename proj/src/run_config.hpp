#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ingest.hpp"
#include "json.hpp"
#include "model.hpp"
#include "pv_sampling.hpp"
#include "synth.hpp"
#include "train_eval.hpp"

namespace leadwarn::config {

struct IngestSection {
  std::string csv_path;  // empty: fall back to output_dir/synth.csv
  ingest::ColumnSchema columns;
};

struct WindowGrid {
  std::vector<int> w_minutes = {5, 10, 30};
  std::vector<int> h_minutes = {5, 10};
};

struct TrainSection {
  std::size_t patience = 7;
  std::size_t max_epochs = 100;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  train_eval::SplitFractions split;
};

// Full run configuration. Every field has a default; a config file only
// overrides what it names. Unknown keys anywhere are rejected.
struct RunConfig {
  std::string output_dir = "out";
  IngestSection ingest;
  pv::PVGrid pv_grid;
  double pv_neg_ratio = 1.0;
  WindowGrid window_grid;
  model::ModelConfig model;
  TrainSection train;
  synth::SynthConfig synth;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// The fully resolved document (defaults applied), key-sorted.
nlohmann::json resolved_json(const RunConfig& cfg);

// FNV-1a 64-bit over the resolved dump, as fixed-width hex.
std::string config_hash(const RunConfig& cfg);

}  // namespace leadwarn::config
