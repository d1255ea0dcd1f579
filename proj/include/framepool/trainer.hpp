#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "framepool/core.hpp"
#include "framepool/svm.hpp"

namespace framepool {

// Knobs for the alternating optimization. T is the resampled length the
// dataset must already have; N counts full rounds (each round fits the
// SVM against the current weights, and all but the last re-solves the
// weights against the new hyperplane).
struct TrainerConfig {
  Eigen::Index T = 20;
  int N = 100;
  double C = 1.0;
  std::uint64_t seed = 0;
  double early_stop_tol = 1e-7;
  SvmConfig svm;
};

// One alternation round as recorded in the trace. objective_svm is the
// joint objective right after the SVM step; objective_lp is the value
// after the weight step, absent on the final round (which ends with the
// SVM fit so the returned hyperplane matches the returned weights).
struct TraceEntry {
  int iteration = 0;
  PoolingWeights theta;  // weights the round started from
  double objective_svm = 0.0;
  std::optional<double> objective_lp;
};

struct TrainedModel {
  std::string event_id;
  HyperplaneModel model;
  PoolingWeights theta;
  double objective = 0.0;
  std::vector<TraceEntry> trace;
};

// Random starting point on the simplex: T uniform draws, normalized.
PoolingWeights init_theta(Eigen::Index T, std::uint64_t seed);

// Alternating minimization of the joint objective (Algorithm: start from
// random theta; repeat SVM step then LP step; stop after N rounds or when
// a full round improves the objective by less than early_stop_tol).
TrainedModel train_event(const LabeledDataset& dataset,
                         const TrainerConfig& config = {});

}  // namespace framepool
