#include "framepool/trainer.hpp"

#include <limits>
#include <string>

#include "framepool/lp.hpp"
#include "framepool/pooling.hpp"
#include "framepool/rng.hpp"

namespace framepool {

namespace {

void validate_config(const TrainerConfig& config) {
  if (config.T < 2) {
    throw ConfigError("trainer needs T >= 2, got T = " +
                      std::to_string(config.T));
  }
  if (config.N < 1) {
    throw ConfigError("trainer needs N >= 1, got N = " +
                      std::to_string(config.N));
  }
  if (config.C <= 0.0) {
    throw ConfigError("trainer needs C > 0, got C = " +
                      std::to_string(config.C));
  }
  if (config.early_stop_tol < 0.0) {
    throw ConfigError("early_stop_tol must be non-negative");
  }
}

// Pool every video with the current weights; rows become SVM samples.
Eigen::MatrixXd pooled_samples(const LabeledDataset& dataset,
                               const PoolingWeights& theta) {
  const Eigen::Index n = static_cast<Eigen::Index>(dataset.size());
  Eigen::MatrixXd samples(n, dataset.feature_dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    samples.row(i) = pool(dataset.items[i].features, theta).transpose();
  }
  return samples;
}

}  // namespace

PoolingWeights init_theta(Eigen::Index T, std::uint64_t seed) {
  if (T < 2) {
    throw ConfigError("init_theta needs T >= 2, got T = " + std::to_string(T));
  }
  Rng rng(seed);
  PoolingWeights weights;
  weights.theta.resize(T);
  for (Eigen::Index k = 0; k < T; ++k) weights.theta[k] = rng.uniform01();
  weights.theta /= weights.theta.sum();
  return weights;
}

TrainedModel train_event(const LabeledDataset& dataset,
                         const TrainerConfig& config) {
  validate_config(config);
  validate_dataset(dataset, /*for_training=*/true);
  if (dataset.column_count() != config.T) {
    throw ConfigError("dataset has T = " +
                      std::to_string(dataset.column_count()) +
                      " resampled frames, config expects T = " +
                      std::to_string(config.T));
  }

  std::vector<int> labels;
  labels.reserve(dataset.size());
  for (const auto& item : dataset.items) labels.push_back(item.label);

  SvmConfig svm_config = config.svm;
  svm_config.C = config.C;

  TrainedModel out;
  out.event_id = dataset.event_id;
  PoolingWeights theta = init_theta(config.T, config.seed);

  double prev_round_objective = std::numeric_limits<double>::infinity();
  bool stop_after_svm = false;

  for (int k = 1; k <= config.N; ++k) {
    HyperplaneModel model;
    try {
      model = train_svm(pooled_samples(dataset, theta), labels, svm_config);
    } catch (const SolverError& e) {
      throw SolverError("iteration " + std::to_string(k) +
                        " SVM step: " + e.what());
    }
    const double objective_svm =
        joint_objective(dataset, model, theta, config.C);

    TraceEntry entry;
    entry.iteration = k - 1;
    entry.theta = theta;
    entry.objective_svm = objective_svm;

    if (k == config.N || stop_after_svm) {
      out.trace.push_back(std::move(entry));
      out.model = model;
      out.theta = theta;
      out.objective = objective_svm;
      break;
    }

    ThetaLpSolution lp;
    try {
      lp = solve_theta_lp(build_theta_lp(dataset, model));
    } catch (const SolverError& e) {
      throw SolverError("iteration " + std::to_string(k) +
                        " LP step: " + e.what());
    }
    const double objective_lp =
        joint_objective(dataset, model, lp.theta, config.C);
    entry.objective_lp = objective_lp;
    out.trace.push_back(std::move(entry));
    theta = lp.theta;

    // A full round barely moved the objective: fit one last SVM so the
    // returned hyperplane matches the returned weights, then stop.
    if (config.early_stop_tol > 0.0 &&
        prev_round_objective - objective_lp < config.early_stop_tol) {
      stop_after_svm = true;
    }
    prev_round_objective = objective_lp;
  }
  return out;
}

}  // namespace framepool
