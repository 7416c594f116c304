#pragma once

#include <Eigen/Dense>
#include <vector>

namespace leadwarn::baseline {

// Deterministic, dependency-free logistic scorer used as the reference
// classifier by the PV and window-horizon searches. Inputs are standardized
// with the training mean/std, weights start at zero, and training is plain
// full-batch gradient descent, so the fit is reproducible without any seed.
struct LogisticScorer {
  Eigen::VectorXd weights;
  double bias = 0.0;
  Eigen::VectorXd feat_mean;
  Eigen::VectorXd feat_std;

  static LogisticScorer fit(const Eigen::MatrixXd& X,
                            const std::vector<int>& y, int iterations = 300,
                            double learning_rate = 0.5);

  double score(const Eigen::VectorXd& x) const;
  std::vector<double> score_all(const Eigen::MatrixXd& X) const;
};

}  // namespace leadwarn::baseline
