#pragma once

#include <Eigen/Dense>

#include "framepool/core.hpp"

namespace framepool {

/// The pooling-weight subproblem written as a linear program over
/// alpha = [theta (T), eps (n)] >= 0:
///
///   minimize    cost . alpha                 (cost = [0..0, 1..1])
///   subject to  equality . alpha = 1         (equality = [1..1, 0..0])
///               rows_i . alpha >= rhs_i      (rows_i = [y_i w^T X_i, e_i],
///                                             rhs_i  = 1 - y_i b)
///
/// Each eps_i upper-bounds sample i's hinge loss, so the optimum equals
/// the minimal hinge sum over the simplex.
struct ThetaLpProblem {
  Eigen::Index T = 0;
  Eigen::Index n = 0;
  Eigen::VectorXd cost;      // length T + n
  Eigen::VectorXd equality;  // length T + n, right-hand side 1
  Eigen::MatrixXd rows;      // n x (T + n)
  Eigen::VectorXd rhs;       // length n
};

ThetaLpProblem build_theta_lp(const LabeledDataset& dataset,
                              const HyperplaneModel& model);

struct ThetaLpSolution {
  PoolingWeights theta;
  Eigen::VectorXd epsilons;
  double optimal_cost = 0.0;
  int pivots = 0;
};

/// Solves the program with a dense two-phase primal simplex: Dantzig
/// pricing while the objective makes progress, falling back to Bland's
/// anti-cycling rule under degeneracy (so cycling stays impossible).
/// Deterministic; the returned theta is one optimal vertex (optimal faces
/// are common, so compare costs, not theta).
ThetaLpSolution solve_theta_lp(const ThetaLpProblem& problem);

struct BruteForceResult {
  PoolingWeights theta;
  double cost = 0.0;
};

/// Exhaustive minimum of the hinge sum over the simplex lattice with the
/// given step. Test oracle only; guarded to T <= 4 and step >= 0.01.
BruteForceResult brute_force_theta(const LabeledDataset& dataset,
                                   const HyperplaneModel& model,
                                   double grid_step);

}  // namespace framepool
