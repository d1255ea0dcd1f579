#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "doctest.h"
#include "framepool/core.hpp"
#include "framepool/pooling.hpp"
#include "framepool/preprocess.hpp"
#include "framepool/rng.hpp"

using namespace framepool;

namespace {

FrameFeatureSequence random_video(std::uint64_t seed, Eigen::Index m,
                                  Eigen::Index frames) {
  Rng rng(seed);
  FrameFeatureSequence seq;
  seq.video_id = "v" + std::to_string(seed);
  seq.values.resize(m, frames);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < frames; ++c) {
      seq.values(r, c) = 3.0 * rng.gaussian();
    }
  }
  return seq;
}

ResampledFeatureMatrix preprocessed(const FrameFeatureSequence& seq,
                                    int target_length) {
  PreprocessOptions options;
  options.target_length = target_length;
  options.mode = InterpolationMode::kLinear;
  return preprocess_sequence(seq, options);
}

}  // namespace

TEST_CASE("pool is a straight matrix product") {
  Eigen::MatrixXd X(2, 3);
  X << 4, 2, 0,
       9, 3, -3;
  Eigen::VectorXd theta(3);
  theta << 0.2, 0.3, 0.5;
  const Eigen::VectorXd pooled = pool(X, theta);
  REQUIRE(pooled.size() == 2);
  CHECK(pooled[0] == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(pooled[1] == doctest::Approx(1.2).epsilon(1e-13));
}

TEST_CASE("uniform weights reproduce the mean of the raw frames") {
  // With as many columns as frames the sorted matrix holds exactly the raw
  // values, and the mean does not care about their order.
  const FrameFeatureSequence raw = random_video(5, 4, 20);
  const ResampledFeatureMatrix X = preprocessed(raw, 20);
  const PoolingWeights uniform = baseline_weights(PoolingKind::kAverage, 20);
  const Eigen::VectorXd pooled = pool(X, uniform);
  const Eigen::VectorXd mean = raw.values.rowwise().mean();
  CHECK((pooled - mean).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("max and min weights read the extreme order statistics") {
  // The resample grid pins its first and last points to frames 1 and T_i,
  // so the extremes survive any target length exactly.
  for (int target : {20, 7}) {
    const FrameFeatureSequence raw = random_video(6, 3, 20);
    const ResampledFeatureMatrix X = preprocessed(raw, target);
    const Eigen::VectorXd top =
        pool(X, baseline_weights(PoolingKind::kMax, target));
    const Eigen::VectorXd bottom =
        pool(X, baseline_weights(PoolingKind::kMin, target));
    const Eigen::VectorXd expected_max = raw.values.rowwise().maxCoeff();
    const Eigen::VectorXd expected_min = raw.values.rowwise().minCoeff();
    CHECK((top - expected_max).cwiseAbs().maxCoeff() == 0.0);
    CHECK((bottom - expected_min).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("baseline weight vectors are the classic pooling strategies") {
  const PoolingWeights average = baseline_weights(PoolingKind::kAverage, 4);
  REQUIRE(average.theta.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(average.theta[k] == 0.25);

  const PoolingWeights top = baseline_weights(PoolingKind::kMax, 3);
  CHECK(top.theta[0] == 1.0);
  CHECK(top.theta[1] == 0.0);
  CHECK(top.theta[2] == 0.0);

  const PoolingWeights bottom = baseline_weights(PoolingKind::kMin, 3);
  CHECK(bottom.theta[0] == 0.0);
  CHECK(bottom.theta[1] == 0.0);
  CHECK(bottom.theta[2] == 1.0);

  // Median sits at ceil((T+1)/2), counting from 1; even lengths take the
  // higher middle.
  const PoolingWeights odd = baseline_weights(PoolingKind::kMedian, 5);
  CHECK(odd.theta[2] == 1.0);
  CHECK(odd.theta.sum() == 1.0);
  const PoolingWeights even = baseline_weights(PoolingKind::kMedian, 4);
  CHECK(even.theta[2] == 1.0);
  const PoolingWeights two = baseline_weights(PoolingKind::kMedian, 2);
  CHECK(two.theta[1] == 1.0);
  const PoolingWeights twenty = baseline_weights(PoolingKind::kMedian, 20);
  CHECK(twenty.theta[10] == 1.0);  // position 11

  for (PoolingKind kind : {PoolingKind::kAverage, PoolingKind::kMax,
                           PoolingKind::kMedian, PoolingKind::kMin}) {
    CHECK_NOTHROW(validate_weights(baseline_weights(kind, 9), 9));
    CHECK_THROWS_AS(baseline_weights(kind, 1), ConfigError);
  }
}

TEST_CASE("pooling strategy names round-trip") {
  for (PoolingKind kind : {PoolingKind::kAverage, PoolingKind::kMax,
                           PoolingKind::kMedian, PoolingKind::kMin}) {
    CHECK(pooling_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(pooling_kind_from_string("softmax"), ConfigError);
}

TEST_CASE("sorted rows order the pooled extremes") {
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    const ResampledFeatureMatrix X = preprocessed(random_video(seed, 4, 33), 8);
    const Eigen::VectorXd top = pool(X, baseline_weights(PoolingKind::kMax, 8));
    const Eigen::VectorXd mid =
        pool(X, baseline_weights(PoolingKind::kAverage, 8));
    const Eigen::VectorXd med =
        pool(X, baseline_weights(PoolingKind::kMedian, 8));
    const Eigen::VectorXd bottom =
        pool(X, baseline_weights(PoolingKind::kMin, 8));
    for (Eigen::Index r = 0; r < 4; ++r) {
      const double slack = 1e-12 * (1.0 + std::abs(top[r]));
      CHECK(top[r] >= mid[r] - slack);
      CHECK(mid[r] >= bottom[r] - slack);
      CHECK(top[r] >= med[r] - slack);
      CHECK(med[r] >= bottom[r] - slack);
    }
  }
}

TEST_CASE("pool is linear in weights and features") {
  Rng rng(41);
  Eigen::MatrixXd X(3, 5);
  Eigen::MatrixXd Y(3, 5);
  for (Eigen::Index r = 0; r < 3; ++r) {
    for (Eigen::Index c = 0; c < 5; ++c) {
      X(r, c) = rng.gaussian();
      Y(r, c) = rng.gaussian();
    }
  }
  Eigen::VectorXd a(5), b(5);
  for (Eigen::Index k = 0; k < 5; ++k) {
    a[k] = rng.gaussian();
    b[k] = rng.gaussian();
  }
  const Eigen::VectorXd lhs = pool(X, 2.0 * a + 3.0 * b);
  const Eigen::VectorXd rhs = 2.0 * pool(X, a) + 3.0 * pool(X, b);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);

  const Eigen::VectorXd sum_x = pool(X + Y, a);
  const Eigen::VectorXd split = pool(X, a) + pool(Y, a);
  CHECK((sum_x - split).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("decision score is the scored pool") {
  ResampledFeatureMatrix X;
  X.video_id = "v";
  X.X.resize(1, 2);
  X.X << 3, 1;

  HyperplaneModel flat;
  flat.w = Eigen::VectorXd::Zero(1);
  flat.b = 0.7;
  PoolingWeights theta;
  theta.theta = Eigen::VectorXd::Constant(2, 0.5);
  CHECK(decision_score(flat, theta, X) == 0.7);

  HyperplaneModel slope;
  slope.w = Eigen::VectorXd::Constant(1, 2.0);
  slope.b = 0.0;
  CHECK(decision_score(slope, theta, X) == 4.0);
}

TEST_CASE("decision score is linear in the weights") {
  Rng rng(47);
  ResampledFeatureMatrix X;
  X.video_id = "v";
  X.X.resize(3, 4);
  for (Eigen::Index r = 0; r < 3; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) X.X(r, c) = rng.gaussian();
  }
  HyperplaneModel model;
  model.w.resize(3);
  model.w << rng.gaussian(), rng.gaussian(), rng.gaussian();
  model.b = rng.gaussian();

  PoolingWeights t1, t2, blend;
  t1.theta = Eigen::VectorXd::Constant(4, 0.25);
  t2.theta.resize(4);
  t2.theta << 0.7, 0.1, 0.1, 0.1;
  const double alpha = 0.3;
  blend.theta = alpha * t1.theta + (1.0 - alpha) * t2.theta;

  const double s1 = decision_score(model, t1, X);
  const double s2 = decision_score(model, t2, X);
  const double sb = decision_score(model, blend, X);
  CHECK(sb == doctest::Approx(alpha * s1 + (1.0 - alpha) * s2).epsilon(1e-12));
}

TEST_CASE("dimension mismatches name the video") {
  ResampledFeatureMatrix X;
  X.video_id = "clip_42";
  X.X = Eigen::MatrixXd::Ones(2, 3);

  PoolingWeights wrong_theta;
  wrong_theta.theta = Eigen::VectorXd::Constant(4, 0.25);
  try {
    pool(X, wrong_theta);
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("clip_42") != std::string::npos);
  }

  PoolingWeights theta;
  theta.theta = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  HyperplaneModel narrow;
  narrow.w = Eigen::VectorXd::Zero(5);
  CHECK_THROWS_AS(decision_score(narrow, theta, X), ValidationError);

  Eigen::VectorXd plain = Eigen::VectorXd::Constant(4, 0.25);
  CHECK_THROWS_AS(pool(X.X, plain), ValidationError);
}
