#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "framepool/core.hpp"

namespace framepool {

/// Uniform resampling positions on the frame axis:
///   points[k] = 1 + k * (T_i - 1) / (T - 1),  k = 0 .. T-1,
/// so points front/back hit frames 1 and T_i exactly.
struct ResampleGrid {
  int source_length = 0;  // T_i
  int target_length = 0;  // T
  Eigen::VectorXd points;
};

ResampleGrid make_resample_grid(int source_length, int target_length);

enum class InterpolationMode {
  kLagrange,  // full-degree polynomial through the sorted nodes
  kLinear,    // piecewise-linear between the sorted nodes
  kAuto,      // kLagrange up to the cutover length, kLinear beyond
};

InterpolationMode interpolation_mode_from_string(const std::string& name);
std::string to_string(InterpolationMode mode);

struct PreprocessOptions {
  int target_length = 20;
  InterpolationMode mode = InterpolationMode::kAuto;
  // Above this many source frames kAuto falls back to piecewise-linear;
  // full-degree polynomials through hundreds of nodes are numerically
  // useless.
  int lagrange_cutover = 60;
};

/// Sorts every feature component independently in descending order.
/// Output has the same shape; each row holds the same multiset of values.
FrameFeatureSequence sort_components_descending(
    const FrameFeatureSequence& seq);

/// Evaluates the degree-(T_i - 1) polynomial through (t, nodes[t-1]),
/// t = 1..T_i, at u in [1, T_i]. Uses the second barycentric form, which
/// is the same polynomial as the textbook product formula but stable to
/// evaluate. Exact at the nodes.
double interpolant_eval(const Eigen::Ref<const Eigen::VectorXd>& nodes,
                        double u);

/// Piecewise-linear counterpart of interpolant_eval on the same node grid.
double linear_interpolant_eval(const Eigen::Ref<const Eigen::VectorXd>& nodes,
                               double u);

/// Resamples a component-wise sorted sequence onto `options.target_length`
/// uniform positions. Rows of the result are non-increasing; in Lagrange
/// mode wiggle between nodes is clamped by a running minimum.
ResampledFeatureMatrix resample(const FrameFeatureSequence& seq_sorted,
                                const PreprocessOptions& options);

/// sort + resample for one raw sequence.
ResampledFeatureMatrix preprocess_sequence(const FrameFeatureSequence& seq,
                                           const PreprocessOptions& options);

/// Batch wrapper; all videos must share the feature dimension m.
std::vector<ResampledFeatureMatrix> preprocess_corpus(
    const std::vector<FrameFeatureSequence>& corpus,
    const PreprocessOptions& options);

}  // namespace framepool
