#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "errors.hpp"
#include "hyperbolic.hpp"

namespace leadwarn::model {

namespace hyp = leadwarn::hyperbolic;

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names = {
      "baseline",       "no_pv",         "no_hyp", "pv_only",
      "structure_only", "temporal_only", "full"};
  return names;
}

VariantSpec make_variant(const std::string& name) {
  VariantSpec v;
  v.name = name;
  if (name == "baseline") {
    v.use_pv = false;
    v.use_hyperbolic = false;
    v.use_gcn = true;
    v.use_lstm = true;
  } else if (name == "no_pv") {
    v.use_pv = false;
    v.use_hyperbolic = true;
    v.use_gcn = true;
    v.use_lstm = true;
  } else if (name == "no_hyp" || name == "pv_only") {
    v.use_pv = true;
    v.use_hyperbolic = false;
    v.use_gcn = true;
    v.use_lstm = true;
  } else if (name == "structure_only") {
    v.use_pv = true;
    v.use_hyperbolic = true;
    v.use_gcn = true;
    v.use_lstm = false;
  } else if (name == "temporal_only") {
    v.use_pv = true;
    v.use_hyperbolic = true;
    v.use_gcn = false;
    v.use_lstm = true;
  } else if (name == "full") {
    v.use_pv = true;
    v.use_hyperbolic = true;
    v.use_gcn = true;
    v.use_lstm = true;
  } else {
    throw Error(ErrorCode::unknown_variant, "unknown variant '" + name + "'");
  }
  return v;
}

void ModelConfig::validate() const {
  if (L == 0) throw Error(ErrorCode::invalid_config, "L must be positive");
  if (h == 0) throw Error(ErrorCode::invalid_config, "h must be positive");
  if (!(curvature_c > 0.0))
    throw Error(ErrorCode::invalid_config, "curvature_c must be positive");
  if (gcn_dims.empty())
    throw Error(ErrorCode::invalid_config, "gcn_dims must be non-empty");
  for (auto d : gcn_dims)
    if (d <= 0)
      throw Error(ErrorCode::invalid_config, "gcn dims must be positive");
  if (lstm_hidden <= 0)
    throw Error(ErrorCode::invalid_config, "lstm_hidden must be positive");
  for (auto d : mlp_hidden)
    if (d <= 0)
      throw Error(ErrorCode::invalid_config, "mlp dims must be positive");
  if (chunk_len == 0)
    throw Error(ErrorCode::invalid_config, "chunk_len must be positive");
  if (!(input_clip > 0.0))
    throw Error(ErrorCode::invalid_config, "input_clip must be positive");
  if (!(optimizer.learning_rate > 0.0))
    throw Error(ErrorCode::invalid_config, "learning_rate must be positive");
}

WindowExample make_example(const features::FeatureTable& table,
                           std::size_t start, std::size_t len, int target,
                           std::int64_t t_event, std::int64_t t_alert,
                           std::size_t frame_index) {
  WindowExample ex;
  ex.snap = graph::build_snapshot(table, start, len);
  ex.target = target;
  ex.t_event = t_event;
  ex.t_alert = t_alert;
  ex.frame_index = frame_index;

  const auto n_nodes = static_cast<Eigen::Index>(ex.snap.num_nodes());
  std::map<int, Eigen::Index> code_to_idx;
  for (Eigen::Index i = 0; i < n_nodes; ++i)
    code_to_idx[ex.snap.node_ids[static_cast<std::size_t>(i)]] = i;

  Eigen::MatrixXd sums =
      Eigen::MatrixXd::Zero(n_nodes, features::kNumericFeatureDim);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_nodes);
  for (std::size_t r = start; r < start + len; ++r) {
    const auto& row = table.rows[r];
    const auto feats = features::numeric_features(row);
    Eigen::Map<const Eigen::RowVectorXd> fv(feats.data(),
                                            features::kNumericFeatureDim);
    const Eigen::Index ri = code_to_idx.at(row.recv_code);
    sums.row(ri) += fv;
    counts(ri) += 1.0;
    if (row.cp_code != row.recv_code) {
      const Eigen::Index ci = code_to_idx.at(row.cp_code);
      sums.row(ci) += fv;
      counts(ci) += 1.0;
    }
  }
  ex.node_inputs.resize(n_nodes, kNodeInputDim);
  ex.node_inputs.leftCols(graph::kNodeFeatureDim) = ex.snap.node_feats;
  for (Eigen::Index i = 0; i < n_nodes; ++i) {
    const double cnt = std::max(counts(i), 1.0);
    ex.node_inputs.row(i).rightCols(features::kNumericFeatureDim) =
        sums.row(i) / cnt;
  }
  return ex;
}

WindowExample make_example(const features::FeatureTable& table,
                           const windowing::LabeledWindow& window) {
  return make_example(table, window.start, window.len, window.target,
                      window.t_event, window.t_alert, window.t);
}

Standardizer Standardizer::fit(const std::vector<WindowExample>& examples) {
  if (examples.empty())
    throw Error(ErrorCode::empty_sequence, "cannot fit standardizer on nothing");
  const Eigen::Index dim = examples.front().node_inputs.cols();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(dim);
  double n = 0.0;
  for (const auto& ex : examples) {
    sum += ex.node_inputs.colwise().sum().transpose();
    sumsq += ex.node_inputs.array().square().matrix().colwise().sum().transpose();
    n += static_cast<double>(ex.node_inputs.rows());
  }
  Standardizer s;
  s.mean = sum / n;
  Eigen::VectorXd var = sumsq / n - s.mean.cwiseProduct(s.mean);
  s.std = var.cwiseMax(0.0).cwiseSqrt();
  for (Eigen::Index i = 0; i < dim; ++i)
    if (!(s.std(i) > 0.0) || !std::isfinite(s.std(i))) s.std(i) = 1.0;
  // Fold a 1/sqrt(dim) factor into std so a typical standardized row has
  // norm near 1 rather than sqrt(dim); otherwise every row would sit on the
  // norm clip and the ball embeddings would start saturated at the boundary.
  s.std *= std::sqrt(static_cast<double>(dim));
  return s;
}

Standardizer Standardizer::identity(Eigen::Index dim) {
  Standardizer s;
  s.mean = Eigen::VectorXd::Zero(dim);
  s.std = Eigen::VectorXd::Ones(dim);
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size())
    throw Error(ErrorCode::shape_mismatch,
                "standardizer dim " + std::to_string(mean.size()) +
                    " vs input " + std::to_string(x.cols()));
  Eigen::MatrixXd out = x;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= std.transpose().array();
  return out;
}

struct HypvLeadModel::WindowForward {
  Eigen::MatrixXd x_std;
  Eigen::MatrixXd u;          // scale * x_std, before the norm clip
  Eigen::MatrixXd u_clipped;
  Eigen::MatrixXd ball_in;    // exp-mapped inputs
  std::vector<Eigen::MatrixXd> tangents;  // GCN layer inputs
  std::vector<nn::GcnCache> gcn_caches;
  std::vector<Eigen::MatrixXd> gcn_outs;
  std::vector<Eigen::MatrixXd> balls;     // ball coords entering each log map
  Eigen::MatrixXd pool_in;
};

namespace {

Eigen::MatrixXd clip_rows(const Eigen::MatrixXd& u, double cap) {
  Eigen::MatrixXd out = u;
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    const double norm = u.row(r).norm();
    if (norm > cap) out.row(r) *= cap / norm;
  }
  return out;
}

Eigen::MatrixXd clip_rows_vjp(const Eigen::MatrixXd& u, double cap,
                              const Eigen::MatrixXd& g) {
  Eigen::MatrixXd out = g;
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    const double norm = u.row(r).norm();
    if (norm > cap) {
      const Eigen::RowVectorXd unit = u.row(r) / norm;
      const double along = unit.dot(g.row(r));
      out.row(r) = (cap / norm) * (g.row(r) - along * unit);
    }
  }
  return out;
}

}  // namespace

HypvLeadModel::HypvLeadModel(const ModelConfig& cfg, const VariantSpec& variant)
    : cfg_(cfg), variant_(variant) {
  cfg_.validate();
  if (!variant_.use_gcn && !variant_.use_lstm)
    throw Error(ErrorCode::invalid_config,
                "at least one of gcn/lstm must stay enabled");
  standardizer_ = Standardizer::identity(kNodeInputDim);

  std::mt19937_64 rng(cfg_.seed);
  if (variant_.use_hyperbolic) {
    hyp_scale_ = nn::ParamTensor("hyp.scale", 1, 1);
    hyp_scale_.value(0, 0) = 1.0;
  }
  Eigen::Index dim = kNodeInputDim;
  if (variant_.use_gcn) {
    for (std::size_t l = 0; l < cfg_.gcn_dims.size(); ++l) {
      nn::ParamTensor w("gcn." + std::to_string(l) + ".W", dim,
                        cfg_.gcn_dims[l]);
      nn::xavier_uniform(w.value, dim, cfg_.gcn_dims[l], rng);
      gcn_w_.push_back(std::move(w));
      gcn_b_.emplace_back("gcn." + std::to_string(l) + ".b", cfg_.gcn_dims[l],
                          1);
      dim = cfg_.gcn_dims[l];
    }
  }
  const Eigen::Index pooled_dim = dim;
  Eigen::Index head_dim = pooled_dim;
  if (variant_.use_lstm) {
    lstm_ = nn::make_lstm_params(pooled_dim, cfg_.lstm_hidden, rng);
    head_dim = cfg_.lstm_hidden;
  }
  mlp_ = nn::make_mlp_params(head_dim, cfg_.mlp_hidden, rng);
}

std::vector<nn::ParamTensor*> HypvLeadModel::parameters() {
  std::vector<nn::ParamTensor*> out;
  if (variant_.use_hyperbolic) out.push_back(&hyp_scale_);
  for (std::size_t l = 0; l < gcn_w_.size(); ++l) {
    out.push_back(&gcn_w_[l]);
    out.push_back(&gcn_b_[l]);
  }
  if (variant_.use_lstm) {
    out.push_back(&lstm_.w_x);
    out.push_back(&lstm_.w_h);
    out.push_back(&lstm_.b);
  }
  for (std::size_t l = 0; l < mlp_.weights.size(); ++l) {
    out.push_back(&mlp_.weights[l]);
    out.push_back(&mlp_.biases[l]);
  }
  return out;
}

std::vector<const nn::ParamTensor*> HypvLeadModel::parameters() const {
  auto mut = const_cast<HypvLeadModel*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

Eigen::VectorXd HypvLeadModel::pooled_embedding(const WindowExample& ex,
                                                WindowForward* fwd) const {
  WindowForward local;
  WindowForward& f = fwd ? *fwd : local;
  f.x_std = standardizer_.apply(ex.node_inputs);
  const double c = cfg_.curvature_c;

  Eigen::MatrixXd carrier;
  if (variant_.use_hyperbolic) {
    f.u = hyp_scale_.value(0, 0) * f.x_std;
    f.u_clipped = clip_rows(f.u, cfg_.input_clip);
    f.ball_in = hyp::exp_map_0_rows(f.u_clipped, c);
    carrier = f.ball_in;
  } else {
    carrier = f.x_std;
  }

  if (variant_.use_gcn) {
    f.tangents.clear();
    f.gcn_caches.assign(gcn_w_.size(), {});
    f.gcn_outs.clear();
    f.balls.clear();
    for (std::size_t l = 0; l < gcn_w_.size(); ++l) {
      Eigen::MatrixXd tangent;
      if (variant_.use_hyperbolic) {
        f.balls.push_back(carrier);
        tangent = hyp::log_map_0_rows(carrier, c);
      } else {
        tangent = carrier;
      }
      f.tangents.push_back(tangent);
      Eigen::MatrixXd h = nn::gcn_forward(tangent, ex.snap.adjacency_norm,
                                          gcn_w_[l], gcn_b_[l],
                                          &f.gcn_caches[l]);
      f.gcn_outs.push_back(h);
      carrier = variant_.use_hyperbolic ? hyp::exp_map_0_rows(h, c) : h;
    }
    f.pool_in = carrier;
  } else if (variant_.use_hyperbolic) {
    f.pool_in = hyp::log_map_0_rows(carrier, c);
  } else {
    f.pool_in = carrier;
  }
  return nn::mean_pool(f.pool_in);
}

void HypvLeadModel::pooled_backward(const WindowExample& ex,
                                    const WindowForward& f,
                                    const Eigen::VectorXd& d_pool) {
  const double c = cfg_.curvature_c;
  Eigen::MatrixXd d_carrier = nn::mean_pool_vjp(f.pool_in.rows(), d_pool);

  if (variant_.use_gcn) {
    for (std::size_t l = gcn_w_.size(); l-- > 0;) {
      Eigen::MatrixXd d_h =
          variant_.use_hyperbolic
              ? hyp::exp_map_0_rows_vjp(f.gcn_outs[l], c, d_carrier)
              : d_carrier;
      Eigen::MatrixXd d_tangent = nn::gcn_backward(
          d_h, ex.snap.adjacency_norm, gcn_w_[l], gcn_b_[l], f.gcn_caches[l]);
      d_carrier = variant_.use_hyperbolic
                      ? hyp::log_map_0_rows_vjp(f.balls[l], c, d_tangent)
                      : d_tangent;
    }
  } else if (variant_.use_hyperbolic) {
    d_carrier = hyp::log_map_0_rows_vjp(f.ball_in, c, d_carrier);
  }

  if (variant_.use_hyperbolic) {
    Eigen::MatrixXd d_uc = hyp::exp_map_0_rows_vjp(f.u_clipped, c, d_carrier);
    Eigen::MatrixXd d_u = clip_rows_vjp(f.u, cfg_.input_clip, d_uc);
    hyp_scale_.grad(0, 0) += (f.x_std.array() * d_u.array()).sum();
  }
}

std::vector<double> HypvLeadModel::score_sequence(
    const std::vector<WindowExample>& seq) const {
  if (seq.empty())
    throw Error(ErrorCode::empty_sequence, "no windows to score");
  std::vector<double> scores;
  scores.reserve(seq.size());
  for (std::size_t begin = 0; begin < seq.size(); begin += cfg_.chunk_len) {
    const std::size_t end = std::min(seq.size(), begin + cfg_.chunk_len);
    nn::LstmState state;
    if (variant_.use_lstm) {
      state.h = Eigen::VectorXd::Zero(cfg_.lstm_hidden);
      state.c = Eigen::VectorXd::Zero(cfg_.lstm_hidden);
    }
    for (std::size_t t = begin; t < end; ++t) {
      Eigen::VectorXd pooled = pooled_embedding(seq[t], nullptr);
      Eigen::VectorXd feat;
      if (variant_.use_lstm) {
        state = nn::lstm_step(pooled, state, lstm_, nullptr);
        feat = state.h;
      } else {
        feat = pooled;
      }
      scores.push_back(nn::mlp_head(feat, mlp_));
    }
  }
  return scores;
}

double HypvLeadModel::chunk_loss(const std::vector<WindowExample>& seq,
                                 std::size_t begin, std::size_t end) const {
  if (begin >= end || end > seq.size())
    throw Error(ErrorCode::empty_sequence, "empty chunk");
  nn::LstmState state;
  if (variant_.use_lstm) {
    state.h = Eigen::VectorXd::Zero(cfg_.lstm_hidden);
    state.c = Eigen::VectorXd::Zero(cfg_.lstm_hidden);
  }
  double loss = 0.0;
  for (std::size_t t = begin; t < end; ++t) {
    Eigen::VectorXd pooled = pooled_embedding(seq[t], nullptr);
    Eigen::VectorXd feat;
    if (variant_.use_lstm) {
      state = nn::lstm_step(pooled, state, lstm_, nullptr);
      feat = state.h;
    } else {
      feat = pooled;
    }
    const double logit = nn::mlp_logit(feat, mlp_, nullptr);
    loss += nn::bce_logit_loss(logit, seq[t].target).loss;
  }
  return loss / static_cast<double>(end - begin);
}

double HypvLeadModel::chunk_loss_and_grads(
    const std::vector<WindowExample>& seq, std::size_t begin,
    std::size_t end) {
  if (begin >= end || end > seq.size())
    throw Error(ErrorCode::empty_sequence, "empty chunk");
  const std::size_t n = end - begin;
  std::vector<WindowForward> fwd(n);
  std::vector<nn::LstmCache> lstm_caches(variant_.use_lstm ? n : 0);
  std::vector<nn::MlpCache> mlp_caches(n);
  std::vector<double> logits(n);

  nn::LstmState state;
  if (variant_.use_lstm) {
    state.h = Eigen::VectorXd::Zero(cfg_.lstm_hidden);
    state.c = Eigen::VectorXd::Zero(cfg_.lstm_hidden);
  }
  double loss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& ex = seq[begin + k];
    Eigen::VectorXd pooled = pooled_embedding(ex, &fwd[k]);
    Eigen::VectorXd feat;
    if (variant_.use_lstm) {
      state = nn::lstm_step(pooled, state, lstm_, &lstm_caches[k]);
      feat = state.h;
    } else {
      feat = pooled;
    }
    logits[k] = nn::mlp_logit(feat, mlp_, &mlp_caches[k]);
    loss += nn::bce_logit_loss(logits[k], ex.target).loss;
  }
  loss /= static_cast<double>(n);

  Eigen::VectorXd dh_next, dc_next;
  if (variant_.use_lstm) {
    dh_next = Eigen::VectorXd::Zero(cfg_.lstm_hidden);
    dc_next = Eigen::VectorXd::Zero(cfg_.lstm_hidden);
  }
  for (std::size_t k = n; k-- > 0;) {
    const auto& ex = seq[begin + k];
    const double d_logit =
        nn::bce_logit_loss(logits[k], ex.target).d_logit /
        static_cast<double>(n);
    Eigen::VectorXd d_feat = nn::mlp_backward(d_logit, mlp_, mlp_caches[k]);
    Eigen::VectorXd d_pool;
    if (variant_.use_lstm) {
      Eigen::VectorXd dh = d_feat + dh_next;
      nn::LstmStepGrads grads =
          nn::lstm_backward(dh, dc_next, lstm_, lstm_caches[k]);
      d_pool = std::move(grads.dx);
      dh_next = std::move(grads.dh_prev);
      dc_next = std::move(grads.dc_prev);
    } else {
      d_pool = d_feat;
    }
    pooled_backward(ex, fwd[k], d_pool);
  }
  return loss;
}

double HypvLeadModel::train_epoch(const std::vector<WindowExample>& seq,
                                  nn::AdamState& opt) {
  if (seq.empty())
    throw Error(ErrorCode::empty_sequence, "no training windows");
  auto params = parameters();
  double total = 0.0;
  for (std::size_t begin = 0; begin < seq.size(); begin += cfg_.chunk_len) {
    const std::size_t end = std::min(seq.size(), begin + cfg_.chunk_len);
    for (auto* p : params) p->zero_grad();
    const double loss = chunk_loss_and_grads(seq, begin, end);
    nn::adam_step(params, opt);
    total += loss * static_cast<double>(end - begin);
  }
  return total / static_cast<double>(seq.size());
}

nlohmann::json HypvLeadModel::to_json() const {
  nlohmann::json j;
  j["variant"] = variant_.name;
  j["flags"] = {{"use_pv", variant_.use_pv},
                {"use_hyperbolic", variant_.use_hyperbolic},
                {"use_gcn", variant_.use_gcn},
                {"use_lstm", variant_.use_lstm}};
  j["config"] = {{"L", cfg_.L},
                 {"h", cfg_.h},
                 {"curvature_c", cfg_.curvature_c},
                 {"gcn_dims", cfg_.gcn_dims},
                 {"lstm_hidden", cfg_.lstm_hidden},
                 {"mlp_hidden", cfg_.mlp_hidden},
                 {"seed", cfg_.seed},
                 {"chunk_len", cfg_.chunk_len},
                 {"input_clip", cfg_.input_clip},
                 {"optimizer",
                  {{"learning_rate", cfg_.optimizer.learning_rate},
                   {"beta1", cfg_.optimizer.beta1},
                   {"beta2", cfg_.optimizer.beta2},
                   {"eps", cfg_.optimizer.eps}}},
                 {"pv",
                  {{"n", cfg_.pv.n},
                   {"z_th", cfg_.pv.z_th},
                   {"k_max", cfg_.pv.k_max},
                   {"neg_ratio", cfg_.pv.neg_ratio}}}};
  j["standardizer"] = {
      {"mean", std::vector<double>(standardizer_.mean.data(),
                                   standardizer_.mean.data() +
                                       standardizer_.mean.size())},
      {"std", std::vector<double>(standardizer_.std.data(),
                                  standardizer_.std.data() +
                                      standardizer_.std.size())}};
  nlohmann::json params = nlohmann::json::array();
  for (const auto* p : parameters()) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(p->value.size()));
    for (Eigen::Index r = 0; r < p->value.rows(); ++r)
      for (Eigen::Index c = 0; c < p->value.cols(); ++c)
        values.push_back(p->value(r, c));
    params.push_back({{"name", p->name},
                      {"shape", {p->value.rows(), p->value.cols()}},
                      {"values", std::move(values)}});
  }
  j["params"] = std::move(params);
  return j;
}

HypvLeadModel HypvLeadModel::from_json(const nlohmann::json& j) {
  VariantSpec variant = make_variant(j.at("variant").get<std::string>());
  const auto& flags = j.at("flags");
  variant.use_pv = flags.at("use_pv").get<bool>();
  variant.use_hyperbolic = flags.at("use_hyperbolic").get<bool>();
  variant.use_gcn = flags.at("use_gcn").get<bool>();
  variant.use_lstm = flags.at("use_lstm").get<bool>();

  const auto& c = j.at("config");
  ModelConfig cfg;
  cfg.L = c.at("L").get<std::size_t>();
  cfg.h = c.at("h").get<std::size_t>();
  cfg.curvature_c = c.at("curvature_c").get<double>();
  cfg.gcn_dims.clear();
  for (const auto& d : c.at("gcn_dims")) cfg.gcn_dims.push_back(d.get<Eigen::Index>());
  cfg.lstm_hidden = c.at("lstm_hidden").get<Eigen::Index>();
  cfg.mlp_hidden.clear();
  for (const auto& d : c.at("mlp_hidden")) cfg.mlp_hidden.push_back(d.get<Eigen::Index>());
  cfg.seed = c.at("seed").get<std::uint64_t>();
  cfg.chunk_len = c.at("chunk_len").get<std::size_t>();
  cfg.input_clip = c.at("input_clip").get<double>();
  const auto& opt = c.at("optimizer");
  cfg.optimizer.learning_rate = opt.at("learning_rate").get<double>();
  cfg.optimizer.beta1 = opt.at("beta1").get<double>();
  cfg.optimizer.beta2 = opt.at("beta2").get<double>();
  cfg.optimizer.eps = opt.at("eps").get<double>();
  const auto& pvj = c.at("pv");
  cfg.pv.n = pvj.at("n").get<std::size_t>();
  cfg.pv.z_th = pvj.at("z_th").get<double>();
  cfg.pv.k_max = pvj.at("k_max").get<std::size_t>();
  cfg.pv.neg_ratio = pvj.at("neg_ratio").get<double>();

  HypvLeadModel model(cfg, variant);
  const auto& st = j.at("standardizer");
  Standardizer s;
  const auto mean = st.at("mean").get<std::vector<double>>();
  const auto sd = st.at("std").get<std::vector<double>>();
  s.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                             static_cast<Eigen::Index>(mean.size()));
  s.std = Eigen::Map<const Eigen::VectorXd>(sd.data(),
                                            static_cast<Eigen::Index>(sd.size()));
  model.set_standardizer(std::move(s));

  std::map<std::string, nn::ParamTensor*> by_name;
  for (auto* p : model.parameters()) by_name[p->name] = p;
  std::size_t loaded = 0;
  for (const auto& pj : j.at("params")) {
    const auto name = pj.at("name").get<std::string>();
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw Error(ErrorCode::invalid_config,
                  "checkpoint parameter '" + name + "' not in model");
    const auto shape = pj.at("shape").get<std::vector<Eigen::Index>>();
    auto& value = it->second->value;
    if (shape.size() != 2 || shape[0] != value.rows() || shape[1] != value.cols())
      throw Error(ErrorCode::shape_mismatch,
                  "checkpoint shape mismatch for '" + name + "'");
    const auto values = pj.at("values").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != value.size())
      throw Error(ErrorCode::shape_mismatch,
                  "checkpoint value count mismatch for '" + name + "'");
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < value.rows(); ++r)
      for (Eigen::Index cc = 0; cc < value.cols(); ++cc) value(r, cc) = values[k++];
    ++loaded;
  }
  if (loaded != model.parameters().size())
    throw Error(ErrorCode::invalid_config,
                "checkpoint is missing model parameters");
  return model;
}

}  // namespace leadwarn::model
