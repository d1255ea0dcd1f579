#pragma once

#include <Eigen/Dense>

#include <vector>

#include "framepool/core.hpp"

namespace framepool {

struct SvmConfig {
  double C = 1.0;
  // Stopping tolerance on the duality gap: the solver halts once its primal
  // objective is certified within `tolerance` of the optimum.
  double tolerance = 1e-6;
  // Budget in sweep-equivalents (one pass = n pair updates).
  int max_passes = 1000;
  // Optional per-component standardization of the inputs; the returned
  // model is always expressed in raw coordinates. When enabled, the ridge
  // penalty applies to the standardized-space weights.
  bool standardize = false;
};

struct SvmStats {
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double duality_gap = 0.0;  // primal - dual at the returned model
  int passes = 0;
};

/// Trains a hinge-loss linear classifier
///
///   min_{w,b}  C * sum_i max(0, 1 - y_i (w . x_i + b)) + 0.5 |w|^2
///
/// by SMO-style pair updates on the dual with the bias equality constraint,
/// so b is exactly the unregularized minimizer. Pair selection is the
/// maximal-violating-pair rule with first-index tie-breaking: deterministic
/// for a fixed sample order, no shuffling.
///
/// `samples` holds one sample per row; `labels` are +1/-1, both present.
HyperplaneModel train_svm(const Eigen::MatrixXd& samples,
                          const std::vector<int>& labels,
                          const SvmConfig& config = {},
                          SvmStats* stats = nullptr);

}  // namespace framepool
