#include "framepool/core.hpp"

namespace framepool {

void validate_sequence(const FrameFeatureSequence& seq) {
  if (seq.frame_count() < 1) {
    throw ValidationError("video '" + seq.video_id + "' has no frames");
  }
  if (seq.feature_dim() < 1) {
    throw ValidationError("video '" + seq.video_id +
                          "' has zero feature dimension");
  }
  if (!seq.values.allFinite()) {
    throw ValidationError("video '" + seq.video_id +
                          "' contains non-finite feature values");
  }
}

void validate_weights(const PoolingWeights& weights,
                      Eigen::Index expected_length) {
  const auto& theta = weights.theta;
  if (expected_length >= 0 && theta.size() != expected_length) {
    throw ValidationError("pooling weights have length " +
                          std::to_string(theta.size()) + ", expected " +
                          std::to_string(expected_length));
  }
  if (theta.size() == 0) {
    throw ValidationError("pooling weights are empty");
  }
  if (!theta.allFinite() || theta.minCoeff() < 0.0) {
    throw ValidationError("pooling weights must be finite and non-negative");
  }
  if (std::abs(theta.sum() - 1.0) > 1e-9) {
    throw ValidationError("pooling weights sum to " +
                          std::to_string(theta.sum()) + ", expected 1");
  }
}

void validate_dataset(const LabeledDataset& dataset, bool for_training) {
  if (dataset.empty()) {
    throw ValidationError("dataset for event '" + dataset.event_id +
                          "' is empty");
  }
  const Eigen::Index m = dataset.feature_dim();
  const Eigen::Index T = dataset.column_count();
  int n_pos = 0;
  int n_neg = 0;
  for (const auto& item : dataset.items) {
    const auto& mat = item.features;
    if (mat.feature_dim() != m || mat.column_count() != T) {
      throw ValidationError(
          "item '" + mat.video_id + "' has shape " +
          std::to_string(mat.feature_dim()) + "x" +
          std::to_string(mat.column_count()) + ", expected " +
          std::to_string(m) + "x" + std::to_string(T));
    }
    if (!mat.X.allFinite()) {
      throw ValidationError("item '" + mat.video_id +
                            "' contains non-finite values");
    }
    if (item.label == 1) {
      ++n_pos;
    } else if (item.label == -1) {
      ++n_neg;
    } else {
      throw ValidationError("item '" + mat.video_id + "' has label " +
                            std::to_string(item.label) +
                            ", expected +1 or -1");
    }
  }
  if (for_training) {
    if (dataset.size() < 2 || n_pos == 0 || n_neg == 0) {
      throw ValidationError("training dataset for event '" +
                            dataset.event_id +
                            "' needs at least one item of each label");
    }
  }
}

double joint_objective(const LabeledDataset& dataset,
                       const HyperplaneModel& model,
                       const PoolingWeights& weights, double C) {
  if (dataset.empty()) {
    throw ValidationError("joint objective over empty dataset");
  }
  if (C <= 0.0) {
    throw ConfigError("C must be positive, got " + std::to_string(C));
  }
  const Eigen::Index m = model.w.size();
  const Eigen::Index T = weights.theta.size();
  for (const auto& item : dataset.items) {
    if (item.features.feature_dim() != m) {
      throw ValidationError(
          "hyperplane has dimension " + std::to_string(m) + ", item '" +
          item.features.video_id +
          "' has m = " + std::to_string(item.features.feature_dim()));
    }
    if (item.features.column_count() != T) {
      throw ValidationError(
          "pooling weights have length " + std::to_string(T) + ", item '" +
          item.features.video_id +
          "' has T = " + std::to_string(item.features.column_count()));
    }
  }
  double hinge_sum = 0.0;
  for (const auto& item : dataset.items) {
    const double score =
        model.w.dot(item.features.X * weights.theta) + model.b;
    hinge_sum += hinge(1.0 - item.label * score);
  }
  return C * hinge_sum + 0.5 * model.w.squaredNorm();
}

}  // namespace framepool
