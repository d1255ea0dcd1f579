#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace framepool {

/// Input or domain-object violates a documented precondition.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be parsed (bad CSV cell, malformed JSON, schema mismatch).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration knob is out of its legal range.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical solver failed to produce a usable answer.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw per-frame feature vectors of one video. Columns are frames in
/// temporal order; rows are feature components, so `values` is m x T_i.
struct FrameFeatureSequence {
  std::string video_id;
  Eigen::MatrixXd values;

  Eigen::Index frame_count() const { return values.cols(); }
  Eigen::Index feature_dim() const { return values.rows(); }
};

/// Checks T_i >= 1, m >= 1 and finiteness of every entry.
void validate_sequence(const FrameFeatureSequence& seq);

/// The m x T matrix obtained from a sequence by per-component descending
/// sort, interpolation and uniform resampling. Rows are non-increasing.
struct ResampledFeatureMatrix {
  std::string video_id;
  Eigen::MatrixXd X;

  Eigen::Index column_count() const { return X.cols(); }
  Eigen::Index feature_dim() const { return X.rows(); }
};

/// Simplex-constrained pooling weight vector of length T.
struct PoolingWeights {
  Eigen::VectorXd theta;
};

/// Checks theta_k >= 0 and |sum(theta) - 1| <= 1e-9; `expected_length` < 0
/// skips the length check.
void validate_weights(const PoolingWeights& weights,
                      Eigen::Index expected_length = -1);

/// Linear classifier parameters: score(x) = w . x + b.
struct HyperplaneModel {
  Eigen::VectorXd w;
  double b = 0.0;
};

struct LabeledItem {
  ResampledFeatureMatrix features;
  int label = 0;  // +1 or -1
};

/// Per-event training or test collection. All matrices share m and T.
struct LabeledDataset {
  std::string event_id;
  std::vector<LabeledItem> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
  Eigen::Index feature_dim() const {
    return items.empty() ? 0 : items.front().features.feature_dim();
  }
  Eigen::Index column_count() const {
    return items.empty() ? 0 : items.front().features.column_count();
  }
};

/// Checks shared dimensions, finite entries and labels in {+1, -1}.
/// With `for_training` also requires n >= 2 and both labels present.
void validate_dataset(const LabeledDataset& dataset, bool for_training);

/// Hinge loss max(0, v).
inline double hinge(double v) { return v > 0.0 ? v : 0.0; }

/// Value of the joint training objective
///
///   C * sum_i max(0, 1 - y_i (w^T X_i theta + b)) + 0.5 * w^T w
///
/// over the whole dataset. Pure; throws ValidationError on dimension
/// mismatches, naming the offending item.
double joint_objective(const LabeledDataset& dataset,
                       const HyperplaneModel& model,
                       const PoolingWeights& weights, double C = 1.0);

}  // namespace framepool
