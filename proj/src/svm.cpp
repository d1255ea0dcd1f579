#include "framepool/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace framepool {

namespace {

void validate_inputs(const Eigen::MatrixXd& samples,
                     const std::vector<int>& labels,
                     const SvmConfig& config) {
  const Eigen::Index n = samples.rows();
  if (n < 2) {
    throw ValidationError("SVM training needs at least 2 samples, got " +
                          std::to_string(n));
  }
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw ValidationError("label count " + std::to_string(labels.size()) +
                          " does not match sample count " +
                          std::to_string(n));
  }
  if (!samples.allFinite()) {
    throw ValidationError("SVM features contain non-finite values");
  }
  int n_pos = 0;
  int n_neg = 0;
  for (int y : labels) {
    if (y == 1) {
      ++n_pos;
    } else if (y == -1) {
      ++n_neg;
    } else {
      throw ValidationError("SVM labels must be +1 or -1, got " +
                            std::to_string(y));
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw ValidationError(
        "single-class SVM input (all labels " +
        std::string(n_pos > 0 ? "+1" : "-1") +
        "); skip this event or fix the labels");
  }
  if (config.C <= 0.0 || config.tolerance <= 0.0 || config.max_passes < 1) {
    throw ConfigError("SVM config values must be positive");
  }
}

// Exact minimizer of b -> C * sum_i hinge(1 - y_i (s_i + b)) at fixed scores
// s_i = w . x_i. The objective is convex piecewise linear in b; its
// subgradient starts at -C * n_pos and jumps by +C at each breakpoint
// (b = 1 - s_i for positives, b = -1 - s_i for negatives), so it is zero on
// the interval between the n_pos-th and (n_pos+1)-th smallest breakpoints.
// Returns that interval's midpoint: a deterministic choice that keeps b away
// from hinge kinks whenever the optimum is non-unique.
double optimal_bias(const Eigen::VectorXd& scores,
                    const std::vector<int>& labels) {
  const Eigen::Index n = scores.size();
  std::vector<double> breaks(static_cast<std::size_t>(n));
  Eigen::Index n_pos = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[i] == 1) {
      breaks[static_cast<std::size_t>(i)] = 1.0 - scores[i];
      ++n_pos;
    } else {
      breaks[static_cast<std::size_t>(i)] = -1.0 - scores[i];
    }
  }
  std::sort(breaks.begin(), breaks.end());
  // Both classes are present, so 1 <= n_pos <= n - 1 and both indices exist.
  return 0.5 * (breaks[static_cast<std::size_t>(n_pos - 1)] +
                breaks[static_cast<std::size_t>(n_pos)]);
}

double primal_at(const Eigen::VectorXd& scores, const std::vector<int>& labels,
                 double b, double C, const Eigen::VectorXd& w) {
  double hinge_sum = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    hinge_sum += hinge(1.0 - labels[i] * (scores[i] + b));
  }
  return C * hinge_sum + 0.5 * w.squaredNorm();
}

// Sequential minimal optimization on the hinge-SVM dual with the bias
// equality constraint:
//   min_a 0.5 a^T Q a - e^T a,  0 <= a_i <= C,  sum_i y_i a_i = 0,
//   Q_ij = y_i y_j x_i . x_j,
// so the recovered (w, b) minimizes C * sum hinge + 0.5 ||w||^2 with an
// unregularized bias. Pair selection is the maximal-violating-pair rule with
// first-index tie-breaking — fully deterministic, no shuffling. One pass is
// n pair updates; at every pass boundary the iterate is refreshed from alpha
// and the solver stops once the duality gap between the primal at the
// exactly recentered bias and the dual objective falls below eps.
int run_smo(const Eigen::MatrixXd& x, const std::vector<int>& labels, double C,
            double eps, int max_passes, Eigen::VectorXd& w,
            Eigen::VectorXd& alpha, double& b_out) {
  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();

  alpha.setZero(n);
  w.setZero(m);
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(n);

  auto refresh_from_alpha = [&]() {
    Eigen::VectorXd ay(n);
    for (Eigen::Index i = 0; i < n; ++i) ay[i] = alpha[i] * labels[i];
    w.noalias() = x.transpose() * ay;
    scores.noalias() = x * w;
  };

  long long pairs = 0;
  while (true) {
    if (pairs % n == 0) {
      refresh_from_alpha();
      const double b = optimal_bias(scores, labels);
      const double primal = primal_at(scores, labels, b, C, w);
      const double dual = alpha.sum() - 0.5 * w.squaredNorm();
      if (primal - dual <= eps) break;
      if (pairs / n >= max_passes) break;
    }

    // Violation values v_t = y_t - s_t: the dual gradient is
    // g_t = y_t s_t - 1, and -y_t g_t = y_t - s_t. KKT optimality is
    // max_{I_up} v <= min_{I_low} v.
    Eigen::Index best_i = -1;
    Eigen::Index best_j = -1;
    double v_up = -std::numeric_limits<double>::infinity();
    double v_low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = labels[t] - scores[t];
      const bool in_up =
          labels[t] == 1 ? alpha[t] < C : alpha[t] > 0.0;
      const bool in_low =
          labels[t] == 1 ? alpha[t] > 0.0 : alpha[t] < C;
      if (in_up && v > v_up) {
        v_up = v;
        best_i = t;
      }
      if (in_low && v < v_low) {
        v_low = v;
        best_j = t;
      }
    }
    if (best_i < 0 || best_j < 0 || v_up - v_low <= 1e-12) break;

    const Eigen::Index i = best_i;
    const Eigen::Index j = best_j;
    // Feasible direction d_alpha_i = y_i * t, d_alpha_j = -y_j * t keeps the
    // equality constraint; the dual restricted to it is
    //   -t (v_i - v_j) + 0.5 t^2 ||x_i - x_j||^2.
    double tau = (x.row(i) - x.row(j)).squaredNorm();
    if (tau < 1e-12) tau = 1e-12;
    double step = (v_up - v_low) / tau;
    const double yi = labels[i];
    const double yj = labels[j];
    const double cap_i = yi > 0 ? C - alpha[i] : alpha[i];
    const double cap_j = yj > 0 ? alpha[j] : C - alpha[j];
    step = std::min(step, std::min(cap_i, cap_j));

    alpha[i] = std::min(std::max(alpha[i] + yi * step, 0.0), C);
    alpha[j] = std::min(std::max(alpha[j] - yj * step, 0.0), C);
    const Eigen::VectorXd delta =
        step * (x.row(i) - x.row(j)).transpose();
    w += delta;
    scores.noalias() += x * delta;
    ++pairs;
  }

  refresh_from_alpha();
  b_out = optimal_bias(scores, labels);
  return static_cast<int>((pairs + n - 1) / n);
}

}  // namespace

HyperplaneModel train_svm(const Eigen::MatrixXd& samples,
                          const std::vector<int>& labels,
                          const SvmConfig& config, SvmStats* stats) {
  validate_inputs(samples, labels, config);
  const Eigen::Index n = samples.rows();
  const Eigen::Index m = samples.cols();

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(m);
  Eigen::MatrixXd x(n, m);
  if (config.standardize) {
    mean = samples.colwise().mean();
    for (Eigen::Index j = 0; j < m; ++j) {
      const double var =
          (samples.col(j).array() - mean[j]).square().sum() /
          static_cast<double>(n);
      const double sd = std::sqrt(var);
      scale[j] = sd > 0.0 ? sd : 1.0;
    }
    x = (samples.rowwise() - mean.transpose()).array().rowwise() /
        scale.transpose().array();
  } else {
    x = samples;
  }

  Eigen::VectorXd w;
  Eigen::VectorXd alpha;
  double b = 0.0;
  const int passes = run_smo(x, labels, config.C, config.tolerance,
                             config.max_passes, w, alpha, b);

  auto primal_objective = [&](const Eigen::VectorXd& v, double bias) {
    double hinge_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      hinge_sum += hinge(1.0 - labels[i] * (x.row(i).dot(v) + bias));
    }
    return config.C * hinge_sum + 0.5 * v.squaredNorm();
  };

  // A run that exhausted max_passes far from optimality can hold a dual
  // iterate whose primal objective is worse than the trivial zero model's
  // C * n; never return something the zero model beats.
  if (primal_objective(w, b) > config.C * static_cast<double>(n)) {
    w.setZero();
    alpha.setZero();
    b = 0.0;
  }

  if (stats != nullptr) {
    stats->primal_objective = primal_objective(w, b);
    stats->dual_objective = alpha.sum() - 0.5 * w.squaredNorm();
    stats->duality_gap = stats->primal_objective - stats->dual_objective;
    stats->passes = passes;
  }

  HyperplaneModel model;
  if (config.standardize) {
    // Undo x' = (x - mean) / scale so the model applies to raw features.
    model.w = w.cwiseQuotient(scale);
    model.b = b - model.w.dot(mean);
  } else {
    model.w = w;
    model.b = b;
  }
  return model;
}

}  // namespace framepool
