#include "framepool/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace framepool {

namespace {

// Barycentric weights for the integer node grid 1..n. Up to a common
// scale factor (which cancels in the second barycentric form) these are
// alternating binomial coefficients of order n-1.
Eigen::VectorXd barycentric_weights(int n) {
  Eigen::VectorXd w(n);
  w[0] = 1.0;
  for (int j = 1; j < n; ++j) {
    w[j] = -w[j - 1] * static_cast<double>(n - j) / static_cast<double>(j);
  }
  return w;
}

void check_range(double u, Eigen::Index n) {
  // Tiny slack absorbs grid round-off; genuine extrapolation is rejected.
  if (!(u >= 1.0 - 1e-9 && u <= static_cast<double>(n) + 1e-9)) {
    throw ValidationError("interpolation point " + std::to_string(u) +
                          " outside node range [1, " + std::to_string(n) +
                          "]");
  }
}

}  // namespace

ResampleGrid make_resample_grid(int source_length, int target_length) {
  if (target_length < 2) {
    throw ConfigError("target length must be at least 2, got " +
                      std::to_string(target_length));
  }
  if (source_length < 1) {
    throw ValidationError("source length must be at least 1");
  }
  ResampleGrid grid;
  grid.source_length = source_length;
  grid.target_length = target_length;
  grid.points.resize(target_length);
  const double step = static_cast<double>(source_length - 1) /
                      static_cast<double>(target_length - 1);
  for (int k = 0; k < target_length; ++k) {
    grid.points[k] = 1.0 + static_cast<double>(k) * step;
  }
  // Endpoints land on the first and last frame exactly.
  grid.points[0] = 1.0;
  grid.points[target_length - 1] = static_cast<double>(source_length);
  return grid;
}

InterpolationMode interpolation_mode_from_string(const std::string& name) {
  if (name == "lagrange") return InterpolationMode::kLagrange;
  if (name == "linear") return InterpolationMode::kLinear;
  if (name == "auto") return InterpolationMode::kAuto;
  throw ConfigError("unknown interpolation mode '" + name + "'");
}

std::string to_string(InterpolationMode mode) {
  switch (mode) {
    case InterpolationMode::kLagrange:
      return "lagrange";
    case InterpolationMode::kLinear:
      return "linear";
    case InterpolationMode::kAuto:
      return "auto";
  }
  return "?";
}

FrameFeatureSequence sort_components_descending(
    const FrameFeatureSequence& seq) {
  validate_sequence(seq);
  FrameFeatureSequence out;
  out.video_id = seq.video_id;
  out.values = seq.values;
  for (Eigen::Index j = 0; j < out.values.rows(); ++j) {
    // Rows of a column-major matrix are strided; sort a contiguous copy.
    Eigen::RowVectorXd row = out.values.row(j);
    std::stable_sort(row.data(), row.data() + row.size(),
                     std::greater<double>());
    out.values.row(j) = row;
  }
  return out;
}

double interpolant_eval(const Eigen::Ref<const Eigen::VectorXd>& nodes,
                        double u) {
  const Eigen::Index n = nodes.size();
  if (n < 1) {
    throw ValidationError("interpolation over empty node set");
  }
  check_range(u, n);
  if (n == 1) return nodes[0];

  // Snap to the nearest node when u lands on it; keeps node evaluation
  // exact and avoids the 1/(u - t) singularity.
  const double nearest = std::round(u);
  if (std::abs(u - nearest) < 1e-12 && nearest >= 1.0 &&
      nearest <= static_cast<double>(n)) {
    return nodes[static_cast<Eigen::Index>(nearest) - 1];
  }

  const Eigen::VectorXd w = barycentric_weights(static_cast<int>(n));
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double q = w[t] / (u - static_cast<double>(t + 1));
    num += q * nodes[t];
    den += q;
  }
  return num / den;
}

double linear_interpolant_eval(const Eigen::Ref<const Eigen::VectorXd>& nodes,
                               double u) {
  const Eigen::Index n = nodes.size();
  if (n < 1) {
    throw ValidationError("interpolation over empty node set");
  }
  check_range(u, n);
  if (n == 1) return nodes[0];
  double lo = std::floor(u);
  if (lo < 1.0) lo = 1.0;
  if (lo > static_cast<double>(n - 1)) lo = static_cast<double>(n - 1);
  const Eigen::Index i = static_cast<Eigen::Index>(lo) - 1;
  const double frac = u - lo;
  if (frac == 0.0) return nodes[i];
  // frac reaches exactly 1 only at u == n (the clamped last interval);
  // return the node itself, a + (b - a) is not always bitwise b.
  if (frac == 1.0) return nodes[i + 1];
  return nodes[i] + frac * (nodes[i + 1] - nodes[i]);
}

ResampledFeatureMatrix resample(const FrameFeatureSequence& seq_sorted,
                                const PreprocessOptions& options) {
  validate_sequence(seq_sorted);
  const Eigen::Index m = seq_sorted.feature_dim();
  const Eigen::Index source = seq_sorted.frame_count();
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index t = 0; t + 1 < source; ++t) {
      if (seq_sorted.values(j, t) < seq_sorted.values(j, t + 1)) {
        throw ValidationError("video '" + seq_sorted.video_id +
                              "' component " + std::to_string(j + 1) +
                              " is not sorted in descending order");
      }
    }
  }

  InterpolationMode mode = options.mode;
  if (mode == InterpolationMode::kAuto) {
    mode = source > options.lagrange_cutover ? InterpolationMode::kLinear
                                             : InterpolationMode::kLagrange;
  }

  const ResampleGrid grid =
      make_resample_grid(static_cast<int>(source), options.target_length);
  const Eigen::Index T = grid.target_length;

  ResampledFeatureMatrix out;
  out.video_id = seq_sorted.video_id;
  out.X.resize(m, T);

  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::RowVectorXd row = seq_sorted.values.row(j);
    const Eigen::VectorXd nodes = row.transpose();
    for (Eigen::Index k = 0; k < T; ++k) {
      out.X(j, k) = mode == InterpolationMode::kLagrange
                        ? interpolant_eval(nodes, grid.points[k])
                        : linear_interpolant_eval(nodes, grid.points[k]);
    }
    if (mode == InterpolationMode::kLagrange) {
      // Polynomial wiggle between nodes can break the sorted order the
      // pooling weights rely on; clamp with a running minimum.
      for (Eigen::Index k = 1; k < T; ++k) {
        if (out.X(j, k) > out.X(j, k - 1)) out.X(j, k) = out.X(j, k - 1);
      }
    }
  }
  return out;
}

ResampledFeatureMatrix preprocess_sequence(const FrameFeatureSequence& seq,
                                           const PreprocessOptions& options) {
  return resample(sort_components_descending(seq), options);
}

std::vector<ResampledFeatureMatrix> preprocess_corpus(
    const std::vector<FrameFeatureSequence>& corpus,
    const PreprocessOptions& options) {
  std::vector<ResampledFeatureMatrix> out;
  if (corpus.empty()) return out;
  const Eigen::Index m = corpus.front().feature_dim();
  std::string offenders;
  for (const auto& seq : corpus) {
    if (seq.feature_dim() != m) {
      offenders += offenders.empty() ? "" : ", ";
      offenders += seq.video_id;
    }
  }
  if (!offenders.empty()) {
    throw ValidationError(
        "inconsistent feature dimension across corpus (expected m = " +
        std::to_string(m) + "): " + offenders);
  }
  out.reserve(corpus.size());
  for (const auto& seq : corpus) {
    out.push_back(preprocess_sequence(seq, options));
  }
  return out;
}

}  // namespace framepool
