#pragma once

#include <cstdint>
#include <vector>

#include "framepool/core.hpp"

namespace framepool {

// Recipe for a seeded synthetic corpus. The class signal is planted at a
// chosen order statistic of one feature component: the frame ranked
// ceil(q * T_i) (descending) in signal_component gains +signal_strength
// on positive videos.
struct SynthSpec {
  int n_pos = 1;
  int n_neg = 1;
  Eigen::Index m = 1;             // feature dimension
  int min_frames = 1;             // T_i drawn uniformly from [min, max]
  int max_frames = 1;
  Eigen::Index signal_component = 1;  // 1-based
  double signal_quantile = 0.5;   // q in (0, 1)
  double signal_strength = 1.0;
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;
};

struct SynthCorpus {
  std::vector<FrameFeatureSequence> sequences;
  std::vector<int> labels;  // +1 / -1, aligned with sequences
};

// Deterministic per seed. Positives come first ("pos_0001", ...), then
// negatives ("neg_0001", ...).
//
// Every component is i.i.d. gaussian noise; when the planted order
// statistic is an interior rank, the signal component additionally
// carries a fixed descending ramp (identical for both classes after
// resampling) whose per-rank gap dominates both the noise and the
// planted bump. The ramp pins each frame's descending rank, so the
// +signal_strength added at rank ceil(q * T_i) still sits at that rank
// after preprocessing sorts the frames — without it, sorting would
// relocate the bumped frame and the planted order statistic would be
// lost. The ramp itself cancels between classes and contributes nothing
// to any pooled score's class separation. When the target rank is 1 for
// every possible T_i and the bump is nonnegative, no ramp is added:
// raising the maximum cannot change any frame's rank.
SynthCorpus generate(const SynthSpec& spec);

}  // namespace framepool
