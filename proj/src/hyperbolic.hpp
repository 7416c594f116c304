#pragma once

#include <Eigen/Dense>

namespace leadwarn::hyperbolic {

inline constexpr double kBoundaryEps = 1e-5;

// Point in the Poincare ball of curvature -c (c > 0): c * ||coords||^2 < 1.
struct BallPoint {
  Eigen::VectorXd coords;
  double c = 1.0;
};

// Rescales v to norm (1 - eps)/sqrt(c) when it lies on or outside the ball.
BallPoint project_to_ball(const Eigen::VectorXd& v, double c,
                          double eps = kBoundaryEps);

// Mobius addition x (+) y. Throws CurvatureMismatch / DimensionMismatch.
BallPoint mobius_add(const BallPoint& x, const BallPoint& y);

// exp_0(v) = tanh(sqrt(c) ||v||) v / (sqrt(c) ||v||), exp_0(0) = 0.
BallPoint exp_map_0(const Eigen::VectorXd& v, double c);

// Exact inverse of exp_map_0.
Eigen::VectorXd log_map_0(const BallPoint& x);

// d_c(x, y) = (2/sqrt(c)) artanh(sqrt(c) ||(-x) (+) y||).
double ball_distance(const BallPoint& x, const BallPoint& y);

// Vector-Jacobian products for the origin maps, used by backprop. g is the
// cotangent arriving at the op's output; the return value is the cotangent
// for its input.
Eigen::VectorXd exp_map_0_vjp(const Eigen::VectorXd& v, double c,
                              const Eigen::VectorXd& g);
Eigen::VectorXd log_map_0_vjp(const Eigen::VectorXd& x, double c,
                              const Eigen::VectorXd& g);

// Row-wise conveniences over node matrices.
Eigen::MatrixXd exp_map_0_rows(const Eigen::MatrixXd& v, double c);
Eigen::MatrixXd log_map_0_rows(const Eigen::MatrixXd& x, double c);
Eigen::MatrixXd exp_map_0_rows_vjp(const Eigen::MatrixXd& v, double c,
                                   const Eigen::MatrixXd& g);
Eigen::MatrixXd log_map_0_rows_vjp(const Eigen::MatrixXd& x, double c,
                                   const Eigen::MatrixXd& g);

}  // namespace leadwarn::hyperbolic
