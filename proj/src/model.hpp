#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graph_builder.hpp"
#include "json.hpp"
#include "nn_core.hpp"
#include "pv_sampling.hpp"
#include "windowing.hpp"

namespace leadwarn::model {

// Component switches behind the seven named ablation settings.
struct VariantSpec {
  std::string name = "full";
  bool use_pv = true;
  bool use_hyperbolic = true;
  bool use_gcn = true;
  bool use_lstm = true;
};

// Named variants in report order. pv_only shares no_hyp's flags; the two
// differ only in run labeling.
const std::vector<std::string>& variant_names();
VariantSpec make_variant(const std::string& name);

struct ModelConfig {
  std::size_t L = 30;           // rows per window
  std::size_t h = 5;            // horizon in frames
  double curvature_c = 1.0;
  std::vector<Eigen::Index> gcn_dims = {32, 32};
  Eigen::Index lstm_hidden = 64;
  std::vector<Eigen::Index> mlp_hidden = {32};
  std::uint64_t seed = 0;
  std::size_t chunk_len = 16;   // truncated-backprop sequence length
  double input_clip = 3.0;      // tangent norm cap before the ball map
  nn::AdamConfig optimizer{.learning_rate = 0.01};
  pv::PVConfig pv;              // consulted only when use_pv is on

  void validate() const;
};

// Node inputs concatenate graph statistics with the window mean of the
// engineered per-row features over each node's incident rows.
inline constexpr int kNodeInputDim =
    graph::kNodeFeatureDim + features::kNumericFeatureDim;

struct WindowExample {
  graph::GraphSnapshot snap;
  Eigen::MatrixXd node_inputs;  // |V| x kNodeInputDim
  int target = 0;
  std::int64_t t_event = 0;
  std::int64_t t_alert = 0;
  std::size_t frame_index = 0;
};

WindowExample make_example(const features::FeatureTable& table,
                           std::size_t start, std::size_t len, int target,
                           std::int64_t t_event, std::int64_t t_alert,
                           std::size_t frame_index);
WindowExample make_example(const features::FeatureTable& table,
                           const windowing::LabeledWindow& window);

// Per-column affine normalizer fitted on training node rows. fit() scales
// the per-column std by sqrt(dim) so a typical standardized row has norm
// near 1, keeping inputs well inside the tangent norm clip.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  static Standardizer fit(const std::vector<WindowExample>& examples);
  static Standardizer identity(Eigen::Index dim);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

// GCN -> LSTM -> MLP scorer with optional Poincare-ball feature mapping.
class HypvLeadModel {
 public:
  HypvLeadModel(const ModelConfig& cfg, const VariantSpec& variant);

  const ModelConfig& config() const { return cfg_; }
  const VariantSpec& variant() const { return variant_; }
  const Standardizer& standardizer() const { return standardizer_; }
  void set_standardizer(Standardizer s) { standardizer_ = std::move(s); }

  // Registry in fixed order; names double as the checkpoint keys.
  std::vector<nn::ParamTensor*> parameters();
  std::vector<const nn::ParamTensor*> parameters() const;

  // Chunked inference: LSTM state resets every chunk_len windows.
  std::vector<double> score_sequence(const std::vector<WindowExample>& seq) const;

  // One pass over the sequence in chronological chunk order; one optimizer
  // update per chunk. Returns the mean per-window BCE loss.
  double train_epoch(const std::vector<WindowExample>& seq,
                     nn::AdamState& opt);

  // Forward + backward over one chunk without an update; used by gradient
  // checks. Returns the mean loss over the chunk.
  double chunk_loss_and_grads(const std::vector<WindowExample>& seq,
                              std::size_t begin, std::size_t end);
  double chunk_loss(const std::vector<WindowExample>& seq, std::size_t begin,
                    std::size_t end) const;

  nlohmann::json to_json() const;
  static HypvLeadModel from_json(const nlohmann::json& j);

 private:
  struct WindowForward;  // per-window caches, defined in the .cpp

  Eigen::VectorXd pooled_embedding(const WindowExample& ex,
                                   WindowForward* fwd) const;
  void pooled_backward(const WindowExample& ex, const WindowForward& fwd,
                       const Eigen::VectorXd& d_pool);

  ModelConfig cfg_;
  VariantSpec variant_;
  Standardizer standardizer_;

  nn::ParamTensor hyp_scale_;            // 1x1, present when hyperbolic on
  std::vector<nn::ParamTensor> gcn_w_;
  std::vector<nn::ParamTensor> gcn_b_;
  nn::LstmParams lstm_;
  nn::MlpParams mlp_;
};

}  // namespace leadwarn::model
