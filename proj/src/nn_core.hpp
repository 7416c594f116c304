#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace leadwarn::nn {

// Named trainable tensor; vectors are stored as n x 1.
struct ParamTensor {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;

  ParamTensor() = default;
  ParamTensor(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)),
        value(Eigen::MatrixXd::Zero(rows, cols)),
        grad(Eigen::MatrixXd::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
};

// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
void xavier_uniform(Eigen::MatrixXd& m, Eigen::Index fan_in,
                    Eigen::Index fan_out, std::mt19937_64& rng);

// ---- GCN layer: ReLU(Anorm * H * W + b) -------------------------------

struct GcnCache {
  Eigen::MatrixXd h_in;       // H
  Eigen::MatrixXd agg;        // Anorm * H
  Eigen::MatrixXd pre;        // Anorm * H * W + b
};

Eigen::MatrixXd gcn_forward(const Eigen::MatrixXd& h,
                            const Eigen::MatrixXd& a_norm,
                            const ParamTensor& w, const ParamTensor& b,
                            GcnCache* cache);

// Accumulates into w.grad / b.grad; returns dL/dH.
Eigen::MatrixXd gcn_backward(const Eigen::MatrixXd& d_out,
                             const Eigen::MatrixXd& a_norm, ParamTensor& w,
                             ParamTensor& b, const GcnCache& cache);

// ---- Mean pooling over the node axis ----------------------------------

Eigen::VectorXd mean_pool(const Eigen::MatrixXd& h);
Eigen::MatrixXd mean_pool_vjp(Eigen::Index n_nodes, const Eigen::VectorXd& g);

// ---- LSTM cell ---------------------------------------------------------

// Packed gate order along rows: input, forget, candidate, output.
struct LstmParams {
  ParamTensor w_x;  // 4H x D
  ParamTensor w_h;  // 4H x H
  ParamTensor b;    // 4H x 1
};

struct LstmCache {
  Eigen::VectorXd x, h_prev, c_prev;
  Eigen::VectorXd i, f, g, o, c, tanh_c;
};

struct LstmState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

LstmParams make_lstm_params(Eigen::Index input_dim, Eigen::Index hidden_dim,
                            std::mt19937_64& rng);

LstmState lstm_step(const Eigen::VectorXd& x, const LstmState& prev,
                    const LstmParams& params, LstmCache* cache);

struct LstmStepGrads {
  Eigen::VectorXd dx;
  Eigen::VectorXd dh_prev;
  Eigen::VectorXd dc_prev;
};

// dh/dc are the cotangents flowing into h_t / c_t. Parameter grads accumulate.
LstmStepGrads lstm_backward(const Eigen::VectorXd& dh,
                            const Eigen::VectorXd& dc, LstmParams& params,
                            const LstmCache& cache);

// ---- MLP head ----------------------------------------------------------

struct MlpParams {
  std::vector<ParamTensor> weights;  // layer l: out x in
  std::vector<ParamTensor> biases;   // layer l: out x 1
};

struct MlpCache {
  std::vector<Eigen::VectorXd> inputs;  // input to each layer
  std::vector<Eigen::VectorXd> pre;     // pre-activation per layer
};

// hidden_dims ReLU layers followed by a single-logit output layer.
MlpParams make_mlp_params(Eigen::Index input_dim,
                          const std::vector<Eigen::Index>& hidden_dims,
                          std::mt19937_64& rng);

double mlp_logit(const Eigen::VectorXd& x, const MlpParams& params,
                 MlpCache* cache);

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Probability head over the logit.
double mlp_head(const Eigen::VectorXd& x, const MlpParams& params,
                MlpCache* cache = nullptr);

// d_logit is dL/dlogit; returns dL/dx. Parameter grads accumulate.
Eigen::VectorXd mlp_backward(double d_logit, MlpParams& params,
                             const MlpCache& cache);

// ---- Losses ------------------------------------------------------------

// Probability-space BCE with input clipped to [1e-7, 1 - 1e-7].
struct BceResult {
  double loss;
  double d_yhat;
};
BceResult bce_loss(double y_hat, int y);

// Numerically fused logit form; d_logit = sigmoid(z) - y.
struct BceLogitResult {
  double loss;
  double d_logit;
};
BceLogitResult bce_logit_loss(double logit, int y);

// ---- Optimizer ---------------------------------------------------------

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::MatrixXd> v;
  long long step = 0;

  explicit AdamState(AdamConfig cfg = {}) : config(cfg) {}
};

// One update over the registered parameter list. Buffers are lazily sized on
// first call; the list's order and shapes must stay stable afterwards.
// Throws NonFiniteGradient if any gradient entry is not finite.
void adam_step(std::vector<ParamTensor*>& params, AdamState& state);

// ---- Gradient checking ---------------------------------------------------

// Central differences per coordinate. grad_fn must populate .grad for the
// current values; loss_fn must evaluate the same scalar loss.
double grad_check(std::vector<ParamTensor*> params,
                  const std::function<double()>& loss_fn,
                  const std::function<void()>& grad_fn, double step = 1e-5);

}  // namespace leadwarn::nn
