#pragma once

#include <Eigen/Dense>

#include <string>

#include "framepool/core.hpp"

namespace framepool {

enum class PoolingKind { kAverage, kMax, kMedian, kMin };

PoolingKind pooling_kind_from_string(const std::string& name);
std::string to_string(PoolingKind kind);

/// X . theta — collapses the T resample columns into one m-vector.
Eigen::VectorXd pool(const Eigen::Ref<const Eigen::MatrixXd>& X,
                     const Eigen::Ref<const Eigen::VectorXd>& theta);

/// Same, with the video id in any dimension-mismatch message.
Eigen::VectorXd pool(const ResampledFeatureMatrix& X,
                     const PoolingWeights& weights);

/// Fixed weight vectors that reproduce the classic pooling strategies on
/// sorted columns: uniform (average), e_1 (max), e_T (min), and the middle
/// indicator at ceil((T+1)/2) (median; even T uses the higher middle).
PoolingWeights baseline_weights(PoolingKind kind, int T);

/// Ranking score w^T X theta + b.
double decision_score(const HyperplaneModel& model,
                      const PoolingWeights& weights,
                      const ResampledFeatureMatrix& X);

}  // namespace framepool
