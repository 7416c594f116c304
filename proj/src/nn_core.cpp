#include "nn_core.hpp"

#include <cmath>

#include "errors.hpp"

namespace leadwarn::nn {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::shape_mismatch, what);
}

}  // namespace

void xavier_uniform(Eigen::MatrixXd& m, Eigen::Index fan_in,
                    Eigen::Index fan_out, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-a, a);
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
}

Eigen::MatrixXd gcn_forward(const Eigen::MatrixXd& h,
                            const Eigen::MatrixXd& a_norm,
                            const ParamTensor& w, const ParamTensor& b,
                            GcnCache* cache) {
  require(a_norm.rows() == a_norm.cols() && a_norm.rows() == h.rows(),
          "adjacency and node matrix disagree on |V|");
  require(w.value.rows() == h.cols(), "gcn weight rows must equal input dim");
  require(b.value.rows() == w.value.cols() && b.value.cols() == 1,
          "gcn bias must be d_out x 1");
  Eigen::MatrixXd agg = a_norm * h;
  Eigen::MatrixXd pre = agg * w.value;
  pre.rowwise() += b.value.col(0).transpose();
  Eigen::MatrixXd out = pre.cwiseMax(0.0);
  if (cache) {
    cache->h_in = h;
    cache->agg = std::move(agg);
    cache->pre = std::move(pre);
  }
  return out;
}

Eigen::MatrixXd gcn_backward(const Eigen::MatrixXd& d_out,
                             const Eigen::MatrixXd& a_norm, ParamTensor& w,
                             ParamTensor& b, const GcnCache& cache) {
  require(d_out.rows() == cache.pre.rows() && d_out.cols() == cache.pre.cols(),
          "gcn cotangent shape mismatch");
  Eigen::MatrixXd d_pre =
      ((cache.pre.array() > 0.0).cast<double>() * d_out.array()).matrix();
  w.grad.noalias() += cache.agg.transpose() * d_pre;
  b.grad.col(0) += d_pre.colwise().sum().transpose();
  Eigen::MatrixXd d_agg = d_pre * w.value.transpose();
  return a_norm.transpose() * d_agg;
}

Eigen::VectorXd mean_pool(const Eigen::MatrixXd& h) {
  if (h.rows() == 0)
    throw Error(ErrorCode::empty_matrix, "mean_pool needs at least one node");
  return h.colwise().mean().transpose();
}

Eigen::MatrixXd mean_pool_vjp(Eigen::Index n_nodes, const Eigen::VectorXd& g) {
  if (n_nodes == 0)
    throw Error(ErrorCode::empty_matrix, "mean_pool needs at least one node");
  const double inv = 1.0 / static_cast<double>(n_nodes);
  return Eigen::MatrixXd::Ones(n_nodes, 1) * (g.transpose() * inv);
}

LstmParams make_lstm_params(Eigen::Index input_dim, Eigen::Index hidden_dim,
                            std::mt19937_64& rng) {
  LstmParams p;
  p.w_x = ParamTensor("lstm.w_x", 4 * hidden_dim, input_dim);
  p.w_h = ParamTensor("lstm.w_h", 4 * hidden_dim, hidden_dim);
  p.b = ParamTensor("lstm.b", 4 * hidden_dim, 1);
  xavier_uniform(p.w_x.value, input_dim, hidden_dim, rng);
  xavier_uniform(p.w_h.value, hidden_dim, hidden_dim, rng);
  // Forget gate opens by default so early training can carry state.
  p.b.value.block(hidden_dim, 0, hidden_dim, 1).setOnes();
  return p;
}

LstmState lstm_step(const Eigen::VectorXd& x, const LstmState& prev,
                    const LstmParams& params, LstmCache* cache) {
  const Eigen::Index hd = params.w_h.value.cols();
  require(params.w_x.value.cols() == x.size(), "lstm input dim mismatch");
  require(prev.h.size() == hd && prev.c.size() == hd,
          "lstm state dim mismatch");
  Eigen::VectorXd z = params.w_x.value * x + params.w_h.value * prev.h +
                      params.b.value.col(0);
  auto seg = [&](Eigen::Index k) { return z.segment(k * hd, hd); };
  Eigen::VectorXd i = seg(0).unaryExpr([](double v) { return sigmoid(v); });
  Eigen::VectorXd f = seg(1).unaryExpr([](double v) { return sigmoid(v); });
  Eigen::VectorXd g = seg(2).array().tanh();
  Eigen::VectorXd o = seg(3).unaryExpr([](double v) { return sigmoid(v); });
  LstmState next;
  next.c = f.cwiseProduct(prev.c) + i.cwiseProduct(g);
  Eigen::VectorXd tanh_c = next.c.array().tanh();
  next.h = o.cwiseProduct(tanh_c);
  if (cache) {
    cache->x = x;
    cache->h_prev = prev.h;
    cache->c_prev = prev.c;
    cache->i = std::move(i);
    cache->f = std::move(f);
    cache->g = std::move(g);
    cache->o = std::move(o);
    cache->c = next.c;
    cache->tanh_c = std::move(tanh_c);
  }
  return next;
}

LstmStepGrads lstm_backward(const Eigen::VectorXd& dh,
                            const Eigen::VectorXd& dc_in, LstmParams& params,
                            const LstmCache& cache) {
  const Eigen::Index hd = params.w_h.value.cols();
  require(dh.size() == hd && dc_in.size() == hd,
          "lstm cotangent dim mismatch");
  Eigen::VectorXd d_o = dh.cwiseProduct(cache.tanh_c);
  Eigen::VectorXd dc =
      dc_in + dh.cwiseProduct(cache.o)
                  .cwiseProduct((1.0 - cache.tanh_c.array().square()).matrix());
  Eigen::VectorXd d_f = dc.cwiseProduct(cache.c_prev);
  Eigen::VectorXd d_i = dc.cwiseProduct(cache.g);
  Eigen::VectorXd d_g = dc.cwiseProduct(cache.i);

  Eigen::VectorXd dz(4 * hd);
  dz.segment(0, hd) =
      d_i.array() * cache.i.array() * (1.0 - cache.i.array());
  dz.segment(hd, hd) =
      d_f.array() * cache.f.array() * (1.0 - cache.f.array());
  dz.segment(2 * hd, hd) = d_g.array() * (1.0 - cache.g.array().square());
  dz.segment(3 * hd, hd) =
      d_o.array() * cache.o.array() * (1.0 - cache.o.array());

  params.w_x.grad.noalias() += dz * cache.x.transpose();
  params.w_h.grad.noalias() += dz * cache.h_prev.transpose();
  params.b.grad.col(0) += dz;

  LstmStepGrads out;
  out.dx = params.w_x.value.transpose() * dz;
  out.dh_prev = params.w_h.value.transpose() * dz;
  out.dc_prev = dc.cwiseProduct(cache.f);
  return out;
}

MlpParams make_mlp_params(Eigen::Index input_dim,
                          const std::vector<Eigen::Index>& hidden_dims,
                          std::mt19937_64& rng) {
  MlpParams p;
  Eigen::Index in = input_dim;
  for (std::size_t l = 0; l < hidden_dims.size(); ++l) {
    ParamTensor w("mlp." + std::to_string(l) + ".W", hidden_dims[l], in);
    xavier_uniform(w.value, in, hidden_dims[l], rng);
    p.weights.push_back(std::move(w));
    p.biases.emplace_back("mlp." + std::to_string(l) + ".b", hidden_dims[l], 1);
    in = hidden_dims[l];
  }
  ParamTensor w_out("mlp.out.W", 1, in);
  xavier_uniform(w_out.value, in, 1, rng);
  p.weights.push_back(std::move(w_out));
  p.biases.emplace_back("mlp.out.b", 1, 1);
  return p;
}

double mlp_logit(const Eigen::VectorXd& x, const MlpParams& params,
                 MlpCache* cache) {
  require(!params.weights.empty(), "mlp has no layers");
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Eigen::VectorXd cur = x;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    require(params.weights[l].value.cols() == cur.size(),
            "mlp layer " + std::to_string(l) + " input dim mismatch");
    Eigen::VectorXd pre =
        params.weights[l].value * cur + params.biases[l].value.col(0);
    if (cache) {
      cache->inputs.push_back(cur);
      cache->pre.push_back(pre);
    }
    if (l + 1 < params.weights.size())
      cur = pre.cwiseMax(0.0);
    else
      cur = pre;
  }
  return cur(0);
}

double mlp_head(const Eigen::VectorXd& x, const MlpParams& params,
                MlpCache* cache) {
  return sigmoid(mlp_logit(x, params, cache));
}

Eigen::VectorXd mlp_backward(double d_logit, MlpParams& params,
                             const MlpCache& cache) {
  require(cache.inputs.size() == params.weights.size(),
          "mlp cache does not match parameters");
  Eigen::VectorXd d_cur(1);
  d_cur(0) = d_logit;
  for (std::size_t li = params.weights.size(); li-- > 0;) {
    Eigen::VectorXd d_pre = d_cur;
    if (li + 1 < params.weights.size())
      d_pre = d_cur.cwiseProduct(
          (cache.pre[li].array() > 0.0).cast<double>().matrix());
    params.weights[li].grad.noalias() +=
        d_pre * cache.inputs[li].transpose();
    params.biases[li].grad.col(0) += d_pre;
    d_cur = params.weights[li].value.transpose() * d_pre;
  }
  return d_cur;
}

BceResult bce_loss(double y_hat, int y) {
  const double lo = 1e-7;
  const double p = std::min(std::max(y_hat, lo), 1.0 - lo);
  BceResult r;
  r.loss = -(y * std::log(p) + (1 - y) * std::log(1.0 - p));
  r.d_yhat = (p - y) / (p * (1.0 - p));
  return r;
}

BceLogitResult bce_logit_loss(double logit, int y) {
  BceLogitResult r;
  r.loss = std::max(logit, 0.0) - logit * y +
           std::log1p(std::exp(-std::fabs(logit)));
  r.d_logit = sigmoid(logit) - y;
  return r;
}

void adam_step(std::vector<ParamTensor*>& params, AdamState& state) {
  if (state.m.empty()) {
    for (const auto* p : params) {
      state.m.emplace_back(
          Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
      state.v.emplace_back(
          Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
    }
  }
  require(state.m.size() == params.size(),
          "optimizer state does not match parameter list");
  for (const auto* p : params)
    if (!p->grad.allFinite())
      throw Error(ErrorCode::non_finite_gradient,
                  "non-finite gradient in " + p->name);
  state.step += 1;
  const auto& cfg = state.config;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = *params[k];
    state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * p.grad;
    state.v[k] =
        cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * p.grad.cwiseProduct(p.grad);
    Eigen::ArrayXXd m_hat = state.m[k].array() / bc1;
    Eigen::ArrayXXd v_hat = state.v[k].array() / bc2;
    p.value.array() -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.eps);
  }
}

double grad_check(std::vector<ParamTensor*> params,
                  const std::function<double()>& loss_fn,
                  const std::function<void()>& grad_fn, double step) {
  for (auto* p : params) p->zero_grad();
  grad_fn();
  std::vector<Eigen::MatrixXd> analytic;
  analytic.reserve(params.size());
  for (const auto* p : params) analytic.push_back(p->grad);

  double max_rel = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& val = params[k]->value;
    for (Eigen::Index c = 0; c < val.cols(); ++c) {
      for (Eigen::Index r = 0; r < val.rows(); ++r) {
        const double saved = val(r, c);
        val(r, c) = saved + step;
        const double plus = loss_fn();
        val(r, c) = saved - step;
        const double minus = loss_fn();
        val(r, c) = saved;
        const double numeric = (plus - minus) / (2.0 * step);
        const double ga = analytic[k](r, c);
        const double rel = std::fabs(ga - numeric) /
                           std::max(1e-8, std::fabs(ga) + std::fabs(numeric));
        max_rel = std::max(max_rel, rel);
      }
    }
  }
  return max_rel;
}

}  // namespace leadwarn::nn
