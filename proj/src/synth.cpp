#include "framepool/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "framepool/rng.hpp"

namespace framepool {

namespace {

void validate_spec(const SynthSpec& spec) {
  if (spec.n_pos < 1 || spec.n_neg < 1) {
    throw ConfigError("synth needs at least one video per class");
  }
  if (spec.m < 1) {
    throw ConfigError("synth needs feature dimension m >= 1");
  }
  if (spec.min_frames < 1 || spec.max_frames < spec.min_frames) {
    throw ConfigError("synth needs 1 <= min_frames <= max_frames");
  }
  if (spec.signal_component < 1 || spec.signal_component > spec.m) {
    throw ConfigError("signal_component must lie in 1.." +
                      std::to_string(spec.m));
  }
  if (!(spec.signal_quantile > 0.0) || !(spec.signal_quantile < 1.0)) {
    throw ConfigError("signal_quantile must lie strictly inside (0, 1)");
  }
  if (spec.noise_sigma < 0.0) {
    throw ConfigError("noise_sigma must be non-negative");
  }
  if (!std::isfinite(spec.signal_strength) ||
      !std::isfinite(spec.noise_sigma)) {
    throw ConfigError("signal_strength and noise_sigma must be finite");
  }
}

std::string padded_id(const char* prefix, int index) {
  std::string digits = std::to_string(index);
  while (digits.size() < 4) digits.insert(digits.begin(), '0');
  return std::string(prefix) + "_" + digits;
}

// Descending rank (1-based) of the signal value planted on positives.
// The small slack keeps q * T_i landing on its mathematical value when
// the product picks up one ulp of noise (0.05 * 20 must give rank 1).
Eigen::Index signal_rank(double q, Eigen::Index frames) {
  const double r = std::ceil(q * static_cast<double>(frames) - 1e-9);
  return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(r));
}

}  // namespace

SynthCorpus generate(const SynthSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.seed);

  // Adjacent ramp values differ by at least `gap`, sized so neither noise
  // nor the planted bump reorders the frames when preprocessing sorts
  // them. The ramp is linear in the frame index and centered on zero, so
  // uniform resampling reproduces the same values for every T_i and the
  // ramp cancels exactly between classes. A nonnegative bump planted at
  // rank 1 for every possible T_i needs no pinning at all — raising the
  // maximum keeps it the maximum — so those corpora stay pure noise.
  const bool needs_ramp =
      signal_rank(spec.signal_quantile, spec.max_frames) > 1 ||
      spec.signal_strength < 0.0;
  const double gap = std::max({2.5 * std::abs(spec.signal_strength),
                               4.0 * spec.noise_sigma, 1.0});
  const double span =
      needs_ramp ? gap * static_cast<double>(spec.max_frames - 1) : 0.0;

  const int total = spec.n_pos + spec.n_neg;
  SynthCorpus corpus;
  corpus.sequences.reserve(total);
  corpus.labels.reserve(total);

  const Eigen::Index sig = spec.signal_component - 1;
  for (int v = 0; v < total; ++v) {
    const bool positive = v < spec.n_pos;
    FrameFeatureSequence seq;
    seq.video_id = positive ? padded_id("pos", v + 1)
                            : padded_id("neg", v - spec.n_pos + 1);

    const Eigen::Index frames = rng.uniform_int(spec.min_frames,
                                                spec.max_frames);
    seq.values.resize(spec.m, frames);
    for (Eigen::Index t = 0; t < frames; ++t) {
      for (Eigen::Index j = 0; j < spec.m; ++j) {
        seq.values(j, t) = spec.noise_sigma * rng.gaussian();
      }
    }

    if (needs_ramp) {
      for (Eigen::Index t = 0; t < frames; ++t) {
        const double frac = frames > 1 ? static_cast<double>(t) /
                                             static_cast<double>(frames - 1)
                                       : 0.0;
        seq.values(sig, t) += span * (0.5 - frac);
      }
    }

    if (positive) {
      // Locate the frame currently holding the target descending rank
      // (ties broken toward the earlier frame) and bump it.
      const Eigen::Index rank = signal_rank(spec.signal_quantile, frames);
      std::vector<Eigen::Index> order(frames);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return seq.values(sig, a) > seq.values(sig, b);
                       });
      seq.values(sig, order[rank - 1]) += spec.signal_strength;
    }

    corpus.sequences.push_back(std::move(seq));
    corpus.labels.push_back(positive ? 1 : -1);
  }
  return corpus;
}

}  // namespace framepool
