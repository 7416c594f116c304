#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "doctest.h"
#include "hyperbolic.hpp"
#include "test_util.hpp"

using namespace leadwarn;
using hyperbolic::BallPoint;

namespace {

Eigen::VectorXd random_vec(std::mt19937_64& rng, int dim, double max_norm) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.01, max_norm);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = g(rng);
  const double n = v.norm();
  if (n > 0) v *= scale(rng) / n;
  return v;
}

// Independent closed form: d_c(x, y) =
// arccosh(1 + 2c||x-y||^2 / ((1-c||x||^2)(1-c||y||^2))) / sqrt(c).
double distance_oracle(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       double c) {
  const double num = 2.0 * c * (x - y).squaredNorm();
  const double den =
      (1.0 - c * x.squaredNorm()) * (1.0 - c * y.squaredNorm());
  return std::acosh(1.0 + num / den) / std::sqrt(c);
}

}  // namespace

TEST_CASE("exp and log invert each other") {
  std::mt19937_64 rng(31);
  for (double c : {0.5, 1.0, 2.0}) {
    for (int trial = 0; trial < 100; ++trial) {
      const int dim = 1 + trial % 8;
      auto v = random_vec(rng, dim, 3.0);
      auto x = hyperbolic::exp_map_0(v, c);
      CHECK(c * x.coords.squaredNorm() < 1.0);
      CHECK((hyperbolic::log_map_0(x) - v).norm() < 1e-9);

      auto y = random_vec(rng, dim, 0.9 / std::sqrt(c));
      BallPoint p{y, c};
      auto back = hyperbolic::exp_map_0(hyperbolic::log_map_0(p), c);
      CHECK((back.coords - y).norm() < 1e-9);
    }
  }
}

TEST_CASE("round trip through the series branch") {
  std::mt19937_64 rng(32);
  for (double norm : {1e-12, 1e-8, 1e-4, 9e-4}) {
    auto v = random_vec(rng, 4, 1.0);
    v *= norm / v.norm();
    auto x = hyperbolic::exp_map_0(v, 1.0);
    CHECK((hyperbolic::log_map_0(x) - v).norm() <= 1e-15 + 1e-9 * norm);
  }
}

TEST_CASE("maps are continuous across the series cutoff") {
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(3);
  dir[0] = 1.0;
  const double lo = 1e-3 * (1.0 - 1e-6);
  const double hi = 1e-3 * (1.0 + 1e-6);
  auto a = hyperbolic::exp_map_0(lo * dir, 1.0).coords;
  auto b = hyperbolic::exp_map_0(hi * dir, 1.0).coords;
  CHECK((a - b).norm() < 1e-8);
  auto la = hyperbolic::log_map_0(BallPoint{lo * dir, 1.0});
  auto lb = hyperbolic::log_map_0(BallPoint{hi * dir, 1.0});
  CHECK((la - lb).norm() < 1e-8);
}

TEST_CASE("mobius addition identities") {
  std::mt19937_64 rng(33);
  for (double c : {0.5, 1.0, 2.0}) {
    for (int trial = 0; trial < 50; ++trial) {
      const int dim = 2 + trial % 5;
      BallPoint x{random_vec(rng, dim, 0.9 / std::sqrt(c)), c};
      BallPoint y{random_vec(rng, dim, 0.9 / std::sqrt(c)), c};
      BallPoint zero{Eigen::VectorXd::Zero(dim), c};
      CHECK((hyperbolic::mobius_add(zero, y).coords - y.coords).norm() < 1e-9);
      CHECK((hyperbolic::mobius_add(x, zero).coords - x.coords).norm() < 1e-9);
      BallPoint neg{-x.coords, c};
      CHECK(hyperbolic::mobius_add(neg, x).coords.norm() < 1e-9);
      CHECK(c * hyperbolic::mobius_add(x, y).coords.squaredNorm() < 1.0);
    }
  }
}

TEST_CASE("vanishing curvature recovers euclidean behavior") {
  std::mt19937_64 rng(34);
  const double c = 1e-8;
  for (int trial = 0; trial < 20; ++trial) {
    BallPoint x{random_vec(rng, 4, 2.0), c};
    BallPoint y{random_vec(rng, 4, 2.0), c};
    CHECK((hyperbolic::mobius_add(x, y).coords - (x.coords + y.coords))
              .norm() < 1e-5);
    auto v = random_vec(rng, 4, 2.0);
    CHECK((hyperbolic::exp_map_0(v, c).coords - v).norm() < 1e-5);
    CHECK((hyperbolic::log_map_0(x) - x.coords).norm() < 1e-5);
  }
}

TEST_CASE("distance from the origin matches ln(3) landmark") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  x[1] = 0.5;
  BallPoint origin{Eigen::VectorXd::Zero(3), 1.0};
  const double d = hyperbolic::ball_distance(origin, BallPoint{x, 1.0});
  CHECK(std::fabs(d - 1.098612) < 1e-6);
  CHECK(d == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("distance equals the arccosh closed form") {
  std::mt19937_64 rng(35);
  for (double c : {0.5, 1.0, 2.0}) {
    for (int trial = 0; trial < 50; ++trial) {
      const int dim = 2 + trial % 4;
      auto xv = random_vec(rng, dim, 0.85 / std::sqrt(c));
      auto yv = random_vec(rng, dim, 0.85 / std::sqrt(c));
      if ((xv - yv).norm() < 1e-3) continue;
      BallPoint x{xv, c}, y{yv, c};
      const double d = hyperbolic::ball_distance(x, y);
      CHECK(d == doctest::Approx(distance_oracle(xv, yv, c)).epsilon(1e-9));
      CHECK(hyperbolic::ball_distance(y, x) == doctest::Approx(d));
      CHECK(hyperbolic::ball_distance(x, x) < 1e-12);
      CHECK(d >= 0.0);
    }
  }
}

TEST_CASE("projection leaves interior points untouched") {
  Eigen::VectorXd v(2);
  v << 0.3, -0.4;  // norm 0.5
  auto p = hyperbolic::project_to_ball(v, 1.0);
  CHECK(p.coords == v);
  CHECK(p.c == 1.0);
}

TEST_CASE("projection rescales boundary and exterior points") {
  for (double norm : {1.0, 1.5, 100.0}) {
    Eigen::VectorXd v(3);
    v << norm, 0.0, 0.0;
    for (double c : {1.0, 4.0}) {
      if (c * norm * norm < 1.0) continue;
      auto p = hyperbolic::project_to_ball(v, c);
      CHECK(p.coords.norm() ==
            doctest::Approx((1.0 - hyperbolic::kBoundaryEps) / std::sqrt(c)));
      CHECK(p.coords[1] == 0.0);
      CHECK(p.coords[0] > 0.0);
    }
  }
}

TEST_CASE("invalid projection arguments are rejected") {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(2);
  const std::vector<std::pair<double, double>> bads = {
      {0.0, 1e-5}, {-1.0, 1e-5}, {1.0, 0.0}, {1.0, 5e-3}};
  for (auto bad : bads) {
    auto code = testing::thrown_code(
        [&] { hyperbolic::project_to_ball(v, bad.first, bad.second); });
    REQUIRE(code.has_value());
    CHECK(*code == ErrorCode::invalid_argument);
  }
}

TEST_CASE("mismatched operands are rejected") {
  BallPoint a{Eigen::VectorXd::Zero(3), 1.0};
  BallPoint b{Eigen::VectorXd::Zero(3), 2.0};
  BallPoint d{Eigen::VectorXd::Zero(4), 1.0};
  auto code = testing::thrown_code([&] { hyperbolic::mobius_add(a, b); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::curvature_mismatch);
  code = testing::thrown_code([&] { hyperbolic::ball_distance(a, d); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::dimension_mismatch);
}

TEST_CASE("vjps agree with central finite differences") {
  std::mt19937_64 rng(36);
  const double h = 1e-6;
  for (double c : {0.5, 1.0, 2.0}) {
    for (int trial = 0; trial < 20; ++trial) {
      const int dim = 2 + trial % 3;
      auto v = random_vec(rng, dim, 1.5);
      auto g = random_vec(rng, dim, 1.0);

      auto analytic = hyperbolic::exp_map_0_vjp(v, c, g);
      for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
        e[i] = h;
        const double plus = hyperbolic::exp_map_0(v + e, c).coords.dot(g);
        const double minus = hyperbolic::exp_map_0(v - e, c).coords.dot(g);
        const double numeric = (plus - minus) / (2.0 * h);
        CHECK(std::fabs(analytic[i] - numeric) <
              1e-6 * std::max(1.0, std::fabs(numeric)));
      }

      auto x = random_vec(rng, dim, 0.8 / std::sqrt(c));
      auto lg = hyperbolic::log_map_0_vjp(x, c, g);
      for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
        e[i] = h;
        const double plus =
            hyperbolic::log_map_0(BallPoint{x + e, c}).dot(g);
        const double minus =
            hyperbolic::log_map_0(BallPoint{x - e, c}).dot(g);
        const double numeric = (plus - minus) / (2.0 * h);
        CHECK(std::fabs(lg[i] - numeric) <
              1e-6 * std::max(1.0, std::fabs(numeric)));
      }
    }
  }
}

TEST_CASE("vjps stay finite and correct near the origin") {
  Eigen::VectorXd v(3);
  v << 1e-9, -2e-9, 5e-10;
  Eigen::VectorXd g(3);
  g << 0.3, -0.7, 0.2;
  auto ev = hyperbolic::exp_map_0_vjp(v, 1.0, g);
  auto lv = hyperbolic::log_map_0_vjp(v, 1.0, g);
  CHECK(ev.allFinite());
  CHECK(lv.allFinite());
  // Both maps reduce to the identity at the origin.
  CHECK((ev - g).norm() < 1e-12);
  CHECK((lv - g).norm() < 1e-12);
}

TEST_CASE("row-wise wrappers match per-row calls") {
  std::mt19937_64 rng(37);
  Eigen::MatrixXd v(5, 4);
  Eigen::MatrixXd g(5, 4);
  std::normal_distribution<double> n(0.0, 0.4);
  for (Eigen::Index r = 0; r < 5; ++r)
    for (Eigen::Index c = 0; c < 4; ++c) {
      v(r, c) = n(rng);
      g(r, c) = n(rng);
    }
  const double c = 1.3;
  auto ev = hyperbolic::exp_map_0_rows(v, c);
  auto lv = hyperbolic::log_map_0_rows(ev, c);
  auto evj = hyperbolic::exp_map_0_rows_vjp(v, c, g);
  auto lvj = hyperbolic::log_map_0_rows_vjp(ev, c, g);
  for (Eigen::Index r = 0; r < 5; ++r) {
    Eigen::VectorXd row = v.row(r).transpose();
    auto x = hyperbolic::exp_map_0(row, c);
    CHECK((ev.row(r).transpose() - x.coords).norm() == doctest::Approx(0.0));
    CHECK((lv.row(r).transpose() - hyperbolic::log_map_0(x)).norm() ==
          doctest::Approx(0.0));
    CHECK((evj.row(r).transpose() -
           hyperbolic::exp_map_0_vjp(row, c, g.row(r).transpose()))
              .norm() == doctest::Approx(0.0));
    CHECK((lvj.row(r).transpose() -
           hyperbolic::log_map_0_vjp(x.coords, c, g.row(r).transpose()))
              .norm() == doctest::Approx(0.0));
  }
}
