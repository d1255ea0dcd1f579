#include "framepool/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace framepool {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasibilityTol = 1e-7;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

// Dense tableau simplex on the standard form
//   min c.x  s.t.  A x = b, x >= 0, b >= 0,
// with one artificial variable per row as the phase-1 crash basis.
// Entering variable: most negative reduced cost (lowest index on ties)
// while the objective makes progress; after a streak of degenerate pivots
// the selection switches to Bland's rule — lowest-index negative reduced
// cost — until a strict decrease occurs, which rules out cycling. Leaving
// variable: minimum ratio, ties broken by lowest basic variable index.
// Fully deterministic.
class TableauSimplex {
 public:
  TableauSimplex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                 const Eigen::VectorXd& c)
      : rows_(A.rows()), vars_(A.cols()), cost_(c), a_orig_(A), b_orig_(b) {
    tableau_.resize(rows_, vars_ + rows_ + 1);
    tableau_.leftCols(vars_) = A;
    tableau_.middleCols(vars_, rows_).setIdentity();
    tableau_.col(vars_ + rows_) = b;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (tableau_(i, vars_ + rows_) < 0.0) tableau_.row(i) = -tableau_.row(i);
    }
    basis_.resize(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) basis_[i] = vars_ + i;
    max_pivots_ = 200 * static_cast<int>(rows_ + vars_) + 1000;
  }

  void solve() {
    run_phase(phase1_costs(), /*allow_artificials=*/true);
    if (objective_value(phase1_costs()) > kFeasibilityTol) {
      throw SolverError("LP phase 1 ended infeasible (residual " +
                        std::to_string(objective_value(phase1_costs())) +
                        " after " + std::to_string(pivots_) + " pivots)");
    }
    drop_artificial_basics();
    Eigen::VectorXd full_cost = Eigen::VectorXd::Zero(vars_ + rows_);
    full_cost.head(vars_) = cost_;
    run_phase(full_cost, /*allow_artificials=*/false);
    restore_feasibility(full_cost);
  }

  // The pivot sequence fixes which variables are basic; their values are
  // recomputed from the original columns in one factorization so that
  // roundoff accumulated across many (possibly degenerate) pivots does not
  // leak into the returned solution.
  Eigen::VectorXd solution() const {
    const Eigen::VectorXd basic_values = refined_basic_values();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(vars_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[i] < vars_) x[basis_[i]] = basic_values[i];
    }
    return x;
  }

  int pivots() const { return pivots_; }

 private:
  Eigen::VectorXd phase1_costs() const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(vars_ + rows_);
    c.tail(rows_).setOnes();
    return c;
  }

  double objective_value(const Eigen::VectorXd& ext_cost) const {
    double v = 0.0;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      v += ext_cost[basis_[i]] * tableau_(i, vars_ + rows_);
    }
    return v;
  }

  Eigen::RowVectorXd reduced_costs(const Eigen::VectorXd& ext_cost) const {
    Eigen::RowVectorXd cb(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) cb[i] = ext_cost[basis_[i]];
    return ext_cost.transpose() -
           cb * tableau_.leftCols(vars_ + rows_);
  }

  void run_phase(const Eigen::VectorXd& ext_cost, bool allow_artificials) {
    const Eigen::Index limit = allow_artificials ? vars_ + rows_ : vars_;
    bool bland = false;
    int degenerate_streak = 0;
    double last_objective = objective_value(ext_cost);
    while (true) {
      const Eigen::RowVectorXd reduced = reduced_costs(ext_cost);
      Eigen::Index entering = -1;
      if (bland) {
        for (Eigen::Index j = 0; j < limit; ++j) {
          if (reduced[j] < -kPivotTol) {
            entering = j;
            break;
          }
        }
      } else {
        double best = -kPivotTol;
        for (Eigen::Index j = 0; j < limit; ++j) {
          if (reduced[j] < best) {
            best = reduced[j];
            entering = j;
          }
        }
      }
      if (entering < 0) return;

      Eigen::Index leaving_row = -1;
      double best_ratio = 0.0;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double a = tableau_(i, entering);
        if (a > kPivotTol) {
          const double ratio = tableau_(i, vars_ + rows_) / a;
          if (leaving_row < 0 || ratio < best_ratio - kPivotTol ||
              (std::abs(ratio - best_ratio) <= kPivotTol &&
               basis_[i] < basis_[leaving_row])) {
            leaving_row = i;
            best_ratio = ratio;
          }
        }
      }
      if (leaving_row < 0) {
        throw SolverError("LP is unbounded along variable " +
                          std::to_string(entering) + " after " +
                          std::to_string(pivots_) + " pivots");
      }
      pivot(leaving_row, entering);
      const double objective = objective_value(ext_cost);
      if (objective <
          last_objective - 1e-12 * std::max(1.0, std::abs(last_objective))) {
        degenerate_streak = 0;
        bland = false;
      } else if (++degenerate_streak >= 50) {
        bland = true;
      }
      last_objective = objective;
      if (pivots_ > max_pivots_) {
        throw SolverError("LP exceeded the pivot budget (" +
                          std::to_string(max_pivots_) + ") in a " +
                          std::to_string(rows_) + "x" +
                          std::to_string(vars_) + " problem");
      }
    }
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    tableau_.row(row) /= tableau_(row, col);
    tableau_(row, col) = 1.0;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (i == row) continue;
      const double factor = tableau_(i, col);
      if (factor != 0.0) {
        tableau_.row(i) -= factor * tableau_.row(row);
        tableau_(i, col) = 0.0;
      }
    }
    // Degenerate pivots on near-tolerance elements amplify roundoff; snap
    // the basic values they leave marginally below zero back onto the
    // feasible boundary so the drift cannot accumulate across pivots.
    for (Eigen::Index i = 0; i < rows_; ++i) {
      double& rhs = tableau_(i, vars_ + rows_);
      if (rhs < 0.0 && rhs > -1e-9) rhs = 0.0;
    }
    basis_[row] = col;
    ++pivots_;
  }

  // Exact basic solution of the current basis, from a fresh factorization
  // of the original columns with iterative refinement — independent of any
  // roundoff the tableau accumulated across pivots.
  Eigen::VectorXd refined_basic_values() const {
    Eigen::MatrixXd basis_cols(rows_, rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index v = basis_[i];
      if (v < vars_) {
        basis_cols.col(i) = a_orig_.col(v);
      } else {
        basis_cols.col(i) = Eigen::VectorXd::Unit(rows_, v - vars_);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_cols);
    if (!lu.isInvertible()) {
      // Degenerate fallback: use the tableau's right-hand side as-is.
      return tableau_.col(vars_ + rows_);
    }
    Eigen::VectorXd basic_values = lu.solve(b_orig_);
    for (int r = 0; r < 2; ++r) {
      const Eigen::VectorXd residual = b_orig_ - basis_cols * basic_values;
      basic_values += lu.solve(residual);
    }
    return basic_values;
  }

  // Phase-2 termination can leave a degenerate basis whose exact solution
  // puts a few basic variables marginally below zero: the ratio tests that
  // chose it ran on drifted tableau numbers. Each dual-simplex pivot here
  // drives out the most negative basic variable while the entering choice
  // keeps reduced costs nonnegative, so optimality is preserved and the
  // cost rises only by the infeasibility mass being removed.
  void restore_feasibility(const Eigen::VectorXd& ext_cost) {
    for (int round = 0; round < 50; ++round) {
      const Eigen::VectorXd basic = refined_basic_values();
      Eigen::Index row = -1;
      double most_negative = -1e-12;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        if (basic[i] < most_negative) {
          most_negative = basic[i];
          row = i;
        }
      }
      if (row < 0) return;
      // Sync the tableau's right-hand side with the refined values so the
      // pivot operates on the best available numbers.
      tableau_.col(vars_ + rows_) = basic;

      const Eigen::RowVectorXd reduced = reduced_costs(ext_cost);
      Eigen::Index entering = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < vars_; ++j) {
        const double a = tableau_(row, j);
        if (a < -kPivotTol) {
          const double ratio = std::max(reduced[j], 0.0) / (-a);
          if (ratio < best_ratio - 1e-15) {
            best_ratio = ratio;
            entering = j;
          }
        }
      }
      if (entering < 0) return;  // nothing can absorb it; leave as-is
      pivot(row, entering);
    }
  }

  // After phase 1, pivot lingering artificial basics onto real columns;
  // rows with no usable entry are redundant constraints and get zeroed.
  void drop_artificial_basics() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[i] < vars_) continue;
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < vars_; ++j) {
        if (std::abs(tableau_(i, j)) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        tableau_.row(i).setZero();
      }
    }
  }

  Eigen::Index rows_;
  Eigen::Index vars_;
  Eigen::VectorXd cost_;
  Eigen::MatrixXd a_orig_;
  Eigen::VectorXd b_orig_;
  Eigen::MatrixXd tableau_;  // rows x (vars + artificials + rhs)
  std::vector<Eigen::Index> basis_;
  int pivots_ = 0;
  int max_pivots_ = 0;
};

}  // namespace

ThetaLpProblem build_theta_lp(const LabeledDataset& dataset,
                              const HyperplaneModel& model) {
  validate_dataset(dataset, /*for_training=*/false);
  const Eigen::Index T = dataset.column_count();
  const Eigen::Index n = static_cast<Eigen::Index>(dataset.size());
  if (model.w.size() != dataset.feature_dim()) {
    throw ValidationError("hyperplane has dimension " +
                          std::to_string(model.w.size()) +
                          ", dataset has m = " +
                          std::to_string(dataset.feature_dim()));
  }

  ThetaLpProblem p;
  p.T = T;
  p.n = n;
  p.cost = Eigen::VectorXd::Zero(T + n);
  p.cost.tail(n).setOnes();
  p.equality = Eigen::VectorXd::Zero(T + n);
  p.equality.head(T).setOnes();
  p.rows = Eigen::MatrixXd::Zero(n, T + n);
  p.rhs.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& item = dataset.items[i];
    const double y = item.label;
    p.rows.row(i).head(T) = y * (model.w.transpose() * item.features.X);
    p.rows(i, T + i) = 1.0;
    p.rhs[i] = 1.0 - y * model.b;
  }
  return p;
}

ThetaLpSolution solve_theta_lp(const ThetaLpProblem& problem) {
  const Eigen::Index T = problem.T;
  const Eigen::Index n = problem.n;
  if (T < 1 || n < 1 || problem.cost.size() != T + n ||
      problem.equality.size() != T + n || problem.rows.rows() != n ||
      problem.rows.cols() != T + n || problem.rhs.size() != n) {
    throw ValidationError("malformed theta LP problem");
  }

  // Standard form: append one surplus column per inequality row.
  const Eigen::Index vars = T + n + n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(1 + n, vars);
  Eigen::VectorXd b(1 + n);
  A.row(0).head(T + n) = problem.equality.transpose();
  b[0] = 1.0;
  A.block(1, 0, n, T + n) = problem.rows;
  for (Eigen::Index i = 0; i < n; ++i) {
    A(1 + i, T + n + i) = -1.0;
    b[1 + i] = problem.rhs[i];
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(vars);
  c.head(T + n) = problem.cost;

  // Row equilibration. Scaling an equation changes neither the feasible set
  // nor the pivot choices (reduced costs and ratio tests are invariant under
  // row scaling), but it keeps tableau magnitudes near 1 so that degenerate
  // pivots on large-margin rows do not amplify roundoff into the vertex.
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double r = std::max(A.row(i).cwiseAbs().maxCoeff(), std::abs(b[i]));
    if (r > 0.0) {
      A.row(i) /= r;
      b[i] /= r;
    }
  }

  TableauSimplex simplex(A, b, c);
  simplex.solve();
  const Eigen::VectorXd x = simplex.solution();

  ThetaLpSolution sol;
  sol.pivots = simplex.pivots();
  sol.epsilons = x.segment(T, n);
  sol.optimal_cost = c.dot(x);

  Eigen::VectorXd theta = x.head(T);
  const double min_coeff = theta.minCoeff();
  // Degenerate vertices routinely carry basic values marginally below zero;
  // only magnitudes past the feasibility scale indicate a solver failure.
  if (min_coeff < -kFeasibilityTol) {
    throw SolverError("LP returned theta with component " + sci(min_coeff));
  }
  const double raw_sum = theta.sum();
  if (std::abs(raw_sum - 1.0) > 1e-9) {
    throw SolverError("LP returned theta with sum 1 " +
                      std::string(raw_sum > 1.0 ? "+" : "-") + " " +
                      sci(std::abs(raw_sum - 1.0)));
  }
  theta = theta.cwiseMax(0.0);
  theta /= theta.sum();
  sol.theta.theta = theta;
  return sol;
}

BruteForceResult brute_force_theta(const LabeledDataset& dataset,
                                   const HyperplaneModel& model,
                                   double grid_step) {
  validate_dataset(dataset, /*for_training=*/false);
  const Eigen::Index T = dataset.column_count();
  if (T > 4) {
    throw ConfigError("brute-force oracle is guarded to T <= 4, got T = " +
                      std::to_string(T));
  }
  if (grid_step < 0.01) {
    throw ConfigError("brute-force oracle needs grid_step >= 0.01");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(dataset.size());
  const int K = static_cast<int>(std::lround(1.0 / grid_step));

  // Margin coefficients: hinge_i(theta) = max(0, rhs_i - a_i . theta).
  Eigen::MatrixXd a(n, T);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& item = dataset.items[i];
    const double y = item.label;
    a.row(i) = y * (model.w.transpose() * item.features.X);
    rhs[i] = 1.0 - y * model.b;
  }

  BruteForceResult best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<int> counts(T, 0);
  Eigen::VectorXd theta(T);

  // Enumerates all compositions of K into T parts, lexicographically.
  auto evaluate = [&]() {
    for (Eigen::Index k = 0; k < T; ++k) {
      theta[k] = static_cast<double>(counts[k]) / static_cast<double>(K);
    }
    const Eigen::VectorXd margins = rhs - a * theta;
    const double cost = margins.cwiseMax(0.0).sum();
    if (cost < best.cost) {
      best.cost = cost;
      best.theta.theta = theta;
    }
  };

  std::function<void(Eigen::Index, int)> rec = [&](Eigen::Index pos,
                                                   int remaining) {
    if (pos == T - 1) {
      counts[pos] = remaining;
      evaluate();
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      counts[pos] = v;
      rec(pos + 1, remaining - v);
    }
  };
  rec(0, K);
  return best;
}

}  // namespace framepool
