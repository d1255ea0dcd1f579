#include "framepool/pooling.hpp"

namespace framepool {

PoolingKind pooling_kind_from_string(const std::string& name) {
  if (name == "average") return PoolingKind::kAverage;
  if (name == "max") return PoolingKind::kMax;
  if (name == "median") return PoolingKind::kMedian;
  if (name == "min") return PoolingKind::kMin;
  throw ConfigError("unknown pooling method '" + name + "'");
}

std::string to_string(PoolingKind kind) {
  switch (kind) {
    case PoolingKind::kAverage:
      return "average";
    case PoolingKind::kMax:
      return "max";
    case PoolingKind::kMedian:
      return "median";
    case PoolingKind::kMin:
      return "min";
  }
  return "?";
}

Eigen::VectorXd pool(const Eigen::Ref<const Eigen::MatrixXd>& X,
                     const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (X.cols() != theta.size()) {
    throw ValidationError("cannot pool " + std::to_string(X.cols()) +
                          " columns with " + std::to_string(theta.size()) +
                          " weights");
  }
  return X * theta;
}

Eigen::VectorXd pool(const ResampledFeatureMatrix& X,
                     const PoolingWeights& weights) {
  if (X.column_count() != weights.theta.size()) {
    throw ValidationError(
        "video '" + X.video_id + "' has " + std::to_string(X.column_count()) +
        " columns, pooling weights have length " +
        std::to_string(weights.theta.size()));
  }
  return X.X * weights.theta;
}

PoolingWeights baseline_weights(PoolingKind kind, int T) {
  if (T < 2) {
    throw ConfigError("baseline weights need T >= 2, got " +
                      std::to_string(T));
  }
  PoolingWeights weights;
  weights.theta = Eigen::VectorXd::Zero(T);
  switch (kind) {
    case PoolingKind::kAverage:
      weights.theta.setConstant(1.0 / static_cast<double>(T));
      break;
    case PoolingKind::kMax:
      weights.theta[0] = 1.0;
      break;
    case PoolingKind::kMin:
      weights.theta[T - 1] = 1.0;
      break;
    case PoolingKind::kMedian:
      // ceil((T+1)/2) in 1-based positions.
      weights.theta[(T + 1 + 1) / 2 - 1] = 1.0;
      break;
  }
  return weights;
}

double decision_score(const HyperplaneModel& model,
                      const PoolingWeights& weights,
                      const ResampledFeatureMatrix& X) {
  if (model.w.size() != X.feature_dim()) {
    throw ValidationError("hyperplane has dimension " +
                          std::to_string(model.w.size()) + ", video '" +
                          X.video_id + "' has m = " +
                          std::to_string(X.feature_dim()));
  }
  return model.w.dot(pool(X, weights)) + model.b;
}

}  // namespace framepool
