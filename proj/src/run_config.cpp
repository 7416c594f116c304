#include "run_config.hpp"

#include <fstream>
#include <set>

#include "errors.hpp"

namespace leadwarn::config {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& path) {
  if (!j.is_object())
    throw Error(ErrorCode::invalid_config, path + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw Error(ErrorCode::invalid_config,
                  "unknown config key '" + path + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void parse_ingest(const json& j, IngestSection& out) {
  check_keys(j, {"csv_path", "columns"}, "ingest.");
  read(j, "csv_path", out.csv_path);
  if (j.contains("columns")) {
    const auto& c = j.at("columns");
    check_keys(c,
               {"date", "recv_addr", "counterparty_addr", "tx_hash",
                "btc_value", "usd_value", "label"},
               "ingest.columns.");
    read(c, "date", out.columns.date);
    read(c, "recv_addr", out.columns.recv_addr);
    read(c, "counterparty_addr", out.columns.counterparty_addr);
    read(c, "tx_hash", out.columns.tx_hash);
    read(c, "btc_value", out.columns.btc_value);
    read(c, "usd_value", out.columns.usd_value);
    read(c, "label", out.columns.label);
  }
}

void parse_model(const json& j, model::ModelConfig& out) {
  check_keys(j,
             {"L", "h", "curvature_c", "gcn_dims", "lstm_hidden", "mlp_hidden",
              "seed", "chunk_len", "input_clip", "optimizer", "pv"},
             "model.");
  read(j, "L", out.L);
  read(j, "h", out.h);
  read(j, "curvature_c", out.curvature_c);
  if (j.contains("gcn_dims"))
    out.gcn_dims = j.at("gcn_dims").get<std::vector<Eigen::Index>>();
  read(j, "lstm_hidden", out.lstm_hidden);
  if (j.contains("mlp_hidden"))
    out.mlp_hidden = j.at("mlp_hidden").get<std::vector<Eigen::Index>>();
  read(j, "seed", out.seed);
  read(j, "chunk_len", out.chunk_len);
  read(j, "input_clip", out.input_clip);
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    check_keys(o, {"learning_rate", "beta1", "beta2", "eps"},
               "model.optimizer.");
    read(o, "learning_rate", out.optimizer.learning_rate);
    read(o, "beta1", out.optimizer.beta1);
    read(o, "beta2", out.optimizer.beta2);
    read(o, "eps", out.optimizer.eps);
  }
  if (j.contains("pv")) {
    const auto& p = j.at("pv");
    check_keys(p, {"n", "z_th", "k_max", "neg_ratio"}, "model.pv.");
    read(p, "n", out.pv.n);
    read(p, "z_th", out.pv.z_th);
    read(p, "k_max", out.pv.k_max);
    read(p, "neg_ratio", out.pv.neg_ratio);
  }
}

void parse_synth(const json& j, synth::SynthConfig& out) {
  check_keys(j,
             {"n_rows", "n_addresses", "anomaly_prevalence",
              "burst_length_mean", "burst_length_spread", "hub_fraction",
              "seed", "amount_log_mean",
              "amount_log_std", "arrival_rate", "precursor_rate_elevation",
              "precursor_rows", "precursor_amplitude",
              "burst_gap_compression", "zipf_addresses",
              "zipf_exponent"},
             "synth.");
  read(j, "n_rows", out.n_rows);
  read(j, "n_addresses", out.n_addresses);
  read(j, "anomaly_prevalence", out.anomaly_prevalence);
  read(j, "burst_length_mean", out.burst_length_mean);
  read(j, "burst_length_spread", out.burst_length_spread);
  read(j, "hub_fraction", out.hub_fraction);
  read(j, "seed", out.seed);
  read(j, "amount_log_mean", out.amount_log_mean);
  read(j, "amount_log_std", out.amount_log_std);
  read(j, "arrival_rate", out.arrival_rate);
  read(j, "precursor_rate_elevation", out.precursor_rate_elevation);
  read(j, "precursor_rows", out.precursor_rows);
  read(j, "precursor_amplitude", out.precursor_amplitude);
  read(j, "burst_gap_compression", out.burst_gap_compression);
  read(j, "zipf_addresses", out.zipf_addresses);
  read(j, "zipf_exponent", out.zipf_exponent);
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  RunConfig cfg;
  check_keys(j,
             {"output_dir", "ingest", "pv_grid", "pv_neg_ratio", "window_grid",
              "model", "train", "synth"},
             "");
  read(j, "output_dir", cfg.output_dir);
  if (j.contains("ingest")) parse_ingest(j.at("ingest"), cfg.ingest);
  if (j.contains("pv_grid")) {
    const auto& g = j.at("pv_grid");
    check_keys(g, {"n", "z_th", "k_max"}, "pv_grid.");
    if (g.contains("n")) cfg.pv_grid.n = g.at("n").get<std::vector<std::size_t>>();
    if (g.contains("z_th"))
      cfg.pv_grid.z_th = g.at("z_th").get<std::vector<double>>();
    if (g.contains("k_max"))
      cfg.pv_grid.k_max = g.at("k_max").get<std::vector<std::size_t>>();
  }
  read(j, "pv_neg_ratio", cfg.pv_neg_ratio);
  if (j.contains("window_grid")) {
    const auto& g = j.at("window_grid");
    check_keys(g, {"w_minutes", "h_minutes"}, "window_grid.");
    if (g.contains("w_minutes"))
      cfg.window_grid.w_minutes = g.at("w_minutes").get<std::vector<int>>();
    if (g.contains("h_minutes"))
      cfg.window_grid.h_minutes = g.at("h_minutes").get<std::vector<int>>();
  }
  if (j.contains("model")) parse_model(j.at("model"), cfg.model);
  if (j.contains("train")) {
    const auto& t = j.at("train");
    check_keys(t, {"patience", "max_epochs", "seeds", "split"}, "train.");
    read(t, "patience", cfg.train.patience);
    read(t, "max_epochs", cfg.train.max_epochs);
    if (t.contains("seeds"))
      cfg.train.seeds = t.at("seeds").get<std::vector<std::uint64_t>>();
    if (t.contains("split")) {
      const auto& s = t.at("split");
      check_keys(s, {"train", "val", "test"}, "train.split.");
      read(s, "train", cfg.train.split.train);
      read(s, "val", cfg.train.split.val);
      read(s, "test", cfg.train.split.test);
    }
  }
  if (j.contains("synth")) parse_synth(j.at("synth"), cfg.synth);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::io_failure, "cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config,
                "config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::json resolved_json(const RunConfig& cfg) {
  json j;
  j["output_dir"] = cfg.output_dir;
  j["ingest"] = {{"csv_path", cfg.ingest.csv_path},
                 {"columns",
                  {{"date", cfg.ingest.columns.date},
                   {"recv_addr", cfg.ingest.columns.recv_addr},
                   {"counterparty_addr", cfg.ingest.columns.counterparty_addr},
                   {"tx_hash", cfg.ingest.columns.tx_hash},
                   {"btc_value", cfg.ingest.columns.btc_value},
                   {"usd_value", cfg.ingest.columns.usd_value},
                   {"label", cfg.ingest.columns.label}}}};
  j["pv_grid"] = {{"n", cfg.pv_grid.n},
                  {"z_th", cfg.pv_grid.z_th},
                  {"k_max", cfg.pv_grid.k_max}};
  j["pv_neg_ratio"] = cfg.pv_neg_ratio;
  j["window_grid"] = {{"w_minutes", cfg.window_grid.w_minutes},
                      {"h_minutes", cfg.window_grid.h_minutes}};
  j["model"] = {{"L", cfg.model.L},
                {"h", cfg.model.h},
                {"curvature_c", cfg.model.curvature_c},
                {"gcn_dims", cfg.model.gcn_dims},
                {"lstm_hidden", cfg.model.lstm_hidden},
                {"mlp_hidden", cfg.model.mlp_hidden},
                {"seed", cfg.model.seed},
                {"chunk_len", cfg.model.chunk_len},
                {"input_clip", cfg.model.input_clip},
                {"optimizer",
                 {{"learning_rate", cfg.model.optimizer.learning_rate},
                  {"beta1", cfg.model.optimizer.beta1},
                  {"beta2", cfg.model.optimizer.beta2},
                  {"eps", cfg.model.optimizer.eps}}},
                {"pv",
                 {{"n", cfg.model.pv.n},
                  {"z_th", cfg.model.pv.z_th},
                  {"k_max", cfg.model.pv.k_max},
                  {"neg_ratio", cfg.model.pv.neg_ratio}}}};
  j["train"] = {{"patience", cfg.train.patience},
                {"max_epochs", cfg.train.max_epochs},
                {"seeds", cfg.train.seeds},
                {"split",
                 {{"train", cfg.train.split.train},
                  {"val", cfg.train.split.val},
                  {"test", cfg.train.split.test}}}};
  j["synth"] = {{"n_rows", cfg.synth.n_rows},
                {"n_addresses", cfg.synth.n_addresses},
                {"anomaly_prevalence", cfg.synth.anomaly_prevalence},
                {"burst_length_mean", cfg.synth.burst_length_mean},
                {"burst_length_spread", cfg.synth.burst_length_spread},
                {"hub_fraction", cfg.synth.hub_fraction},
                {"seed", cfg.synth.seed},
                {"amount_log_mean", cfg.synth.amount_log_mean},
                {"amount_log_std", cfg.synth.amount_log_std},
                {"arrival_rate", cfg.synth.arrival_rate},
                {"precursor_rate_elevation", cfg.synth.precursor_rate_elevation},
                {"precursor_rows", cfg.synth.precursor_rows},
                {"precursor_amplitude", cfg.synth.precursor_amplitude},
                {"burst_gap_compression", cfg.synth.burst_gap_compression},
                {"zipf_addresses", cfg.synth.zipf_addresses},
                {"zipf_exponent", cfg.synth.zipf_exponent}};
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string dump = resolved_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace leadwarn::config
