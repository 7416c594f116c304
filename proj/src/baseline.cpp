#include "baseline.hpp"

#include <cmath>

#include "errors.hpp"

namespace leadwarn::baseline {

namespace {
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

LogisticScorer LogisticScorer::fit(const Eigen::MatrixXd& X,
                                   const std::vector<int>& y, int iterations,
                                   double learning_rate) {
  const Eigen::Index n = X.rows(), d = X.cols();
  if (n == 0 || static_cast<Eigen::Index>(y.size()) != n)
    throw Error(ErrorCode::shape_mismatch, "scorer inputs do not line up");

  LogisticScorer s;
  s.feat_mean = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - s.feat_mean.transpose();
  s.feat_std = (centered.array().square().colwise().mean()).sqrt();
  for (Eigen::Index j = 0; j < d; ++j)
    if (s.feat_std(j) <= 0.0) s.feat_std(j) = 1.0;
  Eigen::MatrixXd Z = centered.array().rowwise() / s.feat_std.transpose().array();

  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) target(i) = y[i] ? 1.0 : 0.0;

  s.weights = Eigen::VectorXd::Zero(d);
  s.bias = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd p = (Z * s.weights).array() + s.bias;
    p = p.unaryExpr([](double z) { return sigmoid(z); });
    Eigen::VectorXd err = p - target;
    s.weights -= learning_rate * (Z.transpose() * err) / static_cast<double>(n);
    s.bias -= learning_rate * err.mean();
  }
  return s;
}

double LogisticScorer::score(const Eigen::VectorXd& x) const {
  Eigen::VectorXd z = (x - feat_mean).array() / feat_std.array();
  return sigmoid(weights.dot(z) + bias);
}

std::vector<double> LogisticScorer::score_all(const Eigen::MatrixXd& X) const {
  std::vector<double> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = score(X.row(i));
  return out;
}

}  // namespace leadwarn::baseline
