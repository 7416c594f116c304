#include "hyperbolic.hpp"

#include <cmath>

#include "errors.hpp"

namespace leadwarn::hyperbolic {

namespace {

constexpr double kSeriesCutoff = 1e-3;

void check_pair(const BallPoint& x, const BallPoint& y) {
  if (x.c != y.c)
    throw Error(ErrorCode::curvature_mismatch,
                "curvatures " + std::to_string(x.c) + " and " +
                    std::to_string(y.c) + " differ");
  if (x.coords.size() != y.coords.size())
    throw Error(ErrorCode::dimension_mismatch,
                "dimensions " + std::to_string(x.coords.size()) + " and " +
                    std::to_string(y.coords.size()) + " differ");
}

// Keeps every op's output strictly inside the safety margin.
Eigen::VectorXd clamp_to_ball(Eigen::VectorXd v, double c, double eps) {
  const double limit = (1.0 - eps) / std::sqrt(c);
  const double norm = v.norm();
  if (norm > limit) v *= limit / norm;
  return v;
}

// tanh(u)/u with a series branch near zero.
double tanh_ratio(double u) {
  if (u < kSeriesCutoff) {
    const double u2 = u * u;
    return 1.0 - u2 / 3.0 + 2.0 * u2 * u2 / 15.0;
  }
  return std::tanh(u) / u;
}

// artanh(w)/w with a series branch near zero.
double artanh_ratio(double w) {
  if (w < kSeriesCutoff) {
    const double w2 = w * w;
    return 1.0 + w2 / 3.0 + w2 * w2 / 5.0;
  }
  return std::atanh(w) / w;
}

}  // namespace

BallPoint project_to_ball(const Eigen::VectorXd& v, double c, double eps) {
  if (!(c > 0.0))
    throw Error(ErrorCode::invalid_argument, "curvature must be positive");
  if (!(eps > 0.0) || eps > 1e-3)
    throw Error(ErrorCode::invalid_argument, "eps must lie in (0, 1e-3]");
  BallPoint p{v, c};
  const double sq = c * v.squaredNorm();
  if (sq >= 1.0) {
    const double target = (1.0 - eps) / std::sqrt(c);
    p.coords *= target / v.norm();
  }
  return p;
}

BallPoint mobius_add(const BallPoint& x, const BallPoint& y) {
  check_pair(x, y);
  const double c = x.c;
  const double xy = x.coords.dot(y.coords);
  const double x2 = x.coords.squaredNorm();
  const double y2 = y.coords.squaredNorm();
  const double denom = 1.0 + 2.0 * c * xy + c * c * x2 * y2;
  Eigen::VectorXd num =
      (1.0 + 2.0 * c * xy + c * y2) * x.coords + (1.0 - c * x2) * y.coords;
  return BallPoint{clamp_to_ball(num / denom, c, kBoundaryEps), c};
}

BallPoint exp_map_0(const Eigen::VectorXd& v, double c) {
  if (!(c > 0.0))
    throw Error(ErrorCode::invalid_argument, "curvature must be positive");
  const double s = std::sqrt(c);
  const double r = v.norm();
  Eigen::VectorXd out = tanh_ratio(s * r) * v;
  return BallPoint{clamp_to_ball(std::move(out), c, kBoundaryEps), c};
}

Eigen::VectorXd log_map_0(const BallPoint& x) {
  const double s = std::sqrt(x.c);
  const double rho = x.coords.norm();
  return artanh_ratio(s * rho) * x.coords;
}

double ball_distance(const BallPoint& x, const BallPoint& y) {
  check_pair(x, y);
  BallPoint neg_x{-x.coords, x.c};
  const double s = std::sqrt(x.c);
  const double norm = mobius_add(neg_x, y).coords.norm();
  return 2.0 / s * std::atanh(s * norm);
}

Eigen::VectorXd exp_map_0_vjp(const Eigen::VectorXd& v, double c,
                              const Eigen::VectorXd& g) {
  const double s = std::sqrt(c);
  const double r = v.norm();
  const double u = s * r;
  const double f = tanh_ratio(u);
  // f'(r)/r, with the same series switch as the primal.
  double fp_over_r;
  if (u < kSeriesCutoff) {
    fp_over_r = s * s * (-2.0 / 3.0 + 8.0 * u * u / 15.0);
  } else {
    const double t = std::tanh(u);
    const double sech2 = 1.0 - t * t;
    fp_over_r = s * s * (sech2 * u - t) / (u * u * u);
  }
  return f * g + fp_over_r * v.dot(g) * v;
}

Eigen::VectorXd log_map_0_vjp(const Eigen::VectorXd& x, double c,
                              const Eigen::VectorXd& g) {
  const double s = std::sqrt(c);
  const double rho = x.norm();
  const double w = s * rho;
  const double f = artanh_ratio(w);
  double fp_over_rho;
  if (w < kSeriesCutoff) {
    fp_over_rho = s * s * (2.0 / 3.0 + 4.0 * w * w / 5.0);
  } else {
    fp_over_rho = s * s * (w / (1.0 - w * w) - std::atanh(w)) / (w * w * w);
  }
  return f * g + fp_over_rho * x.dot(g) * x;
}

Eigen::MatrixXd exp_map_0_rows(const Eigen::MatrixXd& v, double c) {
  Eigen::MatrixXd out(v.rows(), v.cols());
  for (Eigen::Index r = 0; r < v.rows(); ++r)
    out.row(r) = exp_map_0(v.row(r).transpose(), c).coords.transpose();
  return out;
}

Eigen::MatrixXd log_map_0_rows(const Eigen::MatrixXd& x, double c) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    BallPoint p{x.row(r).transpose(), c};
    out.row(r) = log_map_0(p).transpose();
  }
  return out;
}

Eigen::MatrixXd exp_map_0_rows_vjp(const Eigen::MatrixXd& v, double c,
                                   const Eigen::MatrixXd& g) {
  Eigen::MatrixXd out(v.rows(), v.cols());
  for (Eigen::Index r = 0; r < v.rows(); ++r)
    out.row(r) =
        exp_map_0_vjp(v.row(r).transpose(), c, g.row(r).transpose()).transpose();
  return out;
}

Eigen::MatrixXd log_map_0_rows_vjp(const Eigen::MatrixXd& x, double c,
                                   const Eigen::MatrixXd& g) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    out.row(r) =
        log_map_0_vjp(x.row(r).transpose(), c, g.row(r).transpose()).transpose();
  return out;
}

}  // namespace leadwarn::hyperbolic
