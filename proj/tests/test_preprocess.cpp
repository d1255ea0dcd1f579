#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "framepool/core.hpp"
#include "framepool/preprocess.hpp"
#include "framepool/rng.hpp"

using namespace framepool;

namespace {

FrameFeatureSequence sequence(const std::string& id,
                              const Eigen::MatrixXd& values) {
  FrameFeatureSequence seq;
  seq.video_id = id;
  seq.values = values;
  return seq;
}

Eigen::VectorXd random_descending_nodes(Rng& rng, Eigen::Index count,
                                        double scale) {
  Eigen::VectorXd nodes(count);
  for (Eigen::Index i = 0; i < count; ++i) nodes[i] = scale * rng.gaussian();
  std::sort(nodes.data(), nodes.data() + nodes.size(),
            std::greater<double>());
  return nodes;
}

// Textbook product-form Lagrange interpolation over nodes at 1..T_i —
// an independent (if unstable) oracle for moderate degrees.
double lagrange_product_form(const Eigen::VectorXd& nodes, double u) {
  const Eigen::Index count = nodes.size();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < count; ++j) {
    double basis = 1.0;
    for (Eigen::Index k = 0; k < count; ++k) {
      if (k == j) continue;
      basis *= (u - static_cast<double>(k + 1)) /
               static_cast<double>(j - k);
    }
    sum += nodes[j] * basis;
  }
  return sum;
}

}  // namespace

TEST_CASE("resample grid endpoints hit the first and last frame exactly") {
  const ResampleGrid grid = make_resample_grid(5, 3);
  REQUIRE(grid.points.size() == 3);
  CHECK(grid.points[0] == 1.0);
  CHECK(grid.points[1] == 3.0);
  CHECK(grid.points[2] == 5.0);

  const ResampleGrid wide = make_resample_grid(7, 20);
  REQUIRE(wide.points.size() == 20);
  CHECK(wide.points[0] == 1.0);
  CHECK(wide.points[19] == 7.0);
  for (int k = 0; k + 1 < 20; ++k) CHECK(wide.points[k] < wide.points[k + 1]);
  for (int k = 0; k < 20; ++k) {
    CHECK(wide.points[k] == doctest::Approx(1.0 + k * 6.0 / 19.0).epsilon(1e-15));
  }

  const ResampleGrid identity = make_resample_grid(20, 20);
  for (int k = 0; k < 20; ++k) CHECK(identity.points[k] == k + 1.0);
}

TEST_CASE("resample grid rejects out-of-range lengths") {
  CHECK_THROWS_AS(make_resample_grid(5, 1), ConfigError);
  CHECK_THROWS_AS(make_resample_grid(5, 0), ConfigError);
  CHECK_THROWS_AS(make_resample_grid(0, 4), ValidationError);
}

TEST_CASE("descending sort happens per component") {
  Eigen::MatrixXd one_row(1, 3);
  one_row << 1, 3, 2;
  Eigen::MatrixXd sorted = sort_components_descending(
      sequence("a", one_row)).values;
  CHECK(sorted(0, 0) == 3);
  CHECK(sorted(0, 1) == 2);
  CHECK(sorted(0, 2) == 1);

  Eigen::MatrixXd two_rows(2, 2);
  two_rows << 1, 3,
              5, 4;
  sorted = sort_components_descending(sequence("b", two_rows)).values;
  CHECK(sorted(0, 0) == 3);
  CHECK(sorted(0, 1) == 1);
  CHECK(sorted(1, 0) == 5);
  CHECK(sorted(1, 1) == 4);

  Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(1, 3, 7.0);
  sorted = sort_components_descending(sequence("c", constant)).values;
  CHECK((sorted.array() == 7.0).all());
}

TEST_CASE("sorting preserves each component's multiset of values") {
  Rng rng(31);
  Eigen::MatrixXd values(3, 11);
  for (Eigen::Index r = 0; r < 3; ++r) {
    for (Eigen::Index c = 0; c < 11; ++c) values(r, c) = rng.gaussian();
  }
  const FrameFeatureSequence sorted =
      sort_components_descending(sequence("v", values));
  for (Eigen::Index r = 0; r < 3; ++r) {
    std::vector<double> raw(values.row(r).begin(), values.row(r).end());
    std::vector<double> out(sorted.values.row(r).begin(),
                            sorted.values.row(r).end());
    std::sort(raw.begin(), raw.end());
    std::vector<double> out_sorted = out;
    std::sort(out_sorted.begin(), out_sorted.end());
    CHECK(raw == out_sorted);
    CHECK(std::is_sorted(out.begin(), out.end(), std::greater<double>()));
  }
  // Idempotent on already-sorted input.
  const FrameFeatureSequence twice = sort_components_descending(sorted);
  CHECK((twice.values - sorted.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("interpolant matches the nodes it passes through") {
  Eigen::VectorXd nodes(3);
  nodes << 4, 2, 1;
  CHECK(interpolant_eval(nodes, 2.0) == 2.0);
  CHECK(interpolant_eval(nodes, 1.0) == 4.0);
  CHECK(interpolant_eval(nodes, 3.0) == 1.0);
  CHECK(interpolant_eval(nodes, 1.5) == doctest::Approx(2.875).epsilon(1e-12));

  const Eigen::VectorXd constant = Eigen::VectorXd::Constant(4, -3.25);
  for (double u : {1.0, 1.7, 2.5, 3.9, 4.0}) {
    CHECK(interpolant_eval(constant, u) == doctest::Approx(-3.25).epsilon(1e-13));
  }

  Rng rng(57);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index count = 1 + rng.uniform_int(0, 29);
    const Eigen::VectorXd random_nodes =
        random_descending_nodes(rng, count, 10.0);
    for (Eigen::Index t = 0; t < count; ++t) {
      const double v = interpolant_eval(random_nodes,
                                        static_cast<double>(t + 1));
      CHECK(std::abs(v - random_nodes[t]) <=
            1e-8 * (1.0 + std::abs(random_nodes[t])));
    }
  }
}

TEST_CASE("interpolant agrees with the textbook product formula") {
  Rng rng(91);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index count = 2 + rng.uniform_int(0, 10);
    const Eigen::VectorXd nodes = random_descending_nodes(rng, count, 5.0);
    for (int probe = 0; probe < 4; ++probe) {
      const double u = 1.0 + rng.uniform01() * (count - 1);
      const double expected = lagrange_product_form(nodes, u);
      const double actual = interpolant_eval(nodes, u);
      CHECK(std::abs(actual - expected) <= 1e-9 * (1.0 + std::abs(expected)));
    }
  }
}

TEST_CASE("interpolation outside the node range is refused") {
  Eigen::VectorXd nodes(3);
  nodes << 4, 2, 1;
  CHECK_THROWS_AS(interpolant_eval(nodes, 0.99), ValidationError);
  CHECK_THROWS_AS(interpolant_eval(nodes, 3.01), ValidationError);
  CHECK_THROWS_AS(linear_interpolant_eval(nodes, 0.5), ValidationError);
  CHECK_THROWS_AS(linear_interpolant_eval(nodes, 3.5), ValidationError);
}

TEST_CASE("piecewise-linear interpolant is exact at nodes, linear between") {
  Eigen::VectorXd nodes(3);
  nodes << 4, 2, 1;
  CHECK(linear_interpolant_eval(nodes, 1.0) == 4.0);
  CHECK(linear_interpolant_eval(nodes, 2.0) == 2.0);
  CHECK(linear_interpolant_eval(nodes, 3.0) == 1.0);
  CHECK(linear_interpolant_eval(nodes, 1.5) == doctest::Approx(3.0));
  CHECK(linear_interpolant_eval(nodes, 2.5) == doctest::Approx(1.5));
  CHECK(linear_interpolant_eval(nodes, 2.25) == doctest::Approx(1.75));
}

TEST_CASE("resampling with matching lengths returns the sorted input") {
  Eigen::MatrixXd values(1, 3);
  values << 5, 3, 0;
  PreprocessOptions linear;
  linear.target_length = 3;
  linear.mode = InterpolationMode::kLinear;
  const ResampledFeatureMatrix out = resample(sequence("v", values), linear);
  CHECK((out.X - values).cwiseAbs().maxCoeff() == 0.0);

  PreprocessOptions lagrange = linear;
  lagrange.mode = InterpolationMode::kLagrange;
  const ResampledFeatureMatrix poly = resample(sequence("v", values),
                                               lagrange);
  CHECK((poly.X - values).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("integer-landing grids read off the sorted frames") {
  Eigen::MatrixXd values(1, 5);
  values << 9, 7, 4, 2, -1;
  for (InterpolationMode mode :
       {InterpolationMode::kLinear, InterpolationMode::kLagrange}) {
    PreprocessOptions options;
    options.target_length = 3;
    options.mode = mode;
    const ResampledFeatureMatrix out = resample(sequence("v", values),
                                                options);
    REQUIRE(out.X.cols() == 3);
    CHECK(out.X(0, 0) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(out.X(0, 1) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(out.X(0, 2) == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("two-point targets keep the endpoints") {
  Eigen::MatrixXd values(1, 3);
  values << 4, 2, 1;
  PreprocessOptions options;
  options.target_length = 2;
  options.mode = InterpolationMode::kLinear;
  const ResampledFeatureMatrix out = resample(sequence("v", values), options);
  REQUIRE(out.X.cols() == 2);
  CHECK(out.X(0, 0) == 4.0);
  CHECK(out.X(0, 1) == 1.0);
}

TEST_CASE("single-frame videos repeat their only column") {
  Eigen::MatrixXd values(2, 1);
  values << 3.5,
            -1.25;
  for (InterpolationMode mode :
       {InterpolationMode::kLinear, InterpolationMode::kLagrange,
        InterpolationMode::kAuto}) {
    PreprocessOptions options;
    options.target_length = 4;
    options.mode = mode;
    const ResampledFeatureMatrix out = resample(sequence("v", values),
                                                options);
    REQUIRE(out.X.rows() == 2);
    REQUIRE(out.X.cols() == 4);
    for (int k = 0; k < 4; ++k) {
      CHECK(out.X(0, k) == 3.5);
      CHECK(out.X(1, k) == -1.25);
    }
  }
}

TEST_CASE("resampling rejects target lengths below two") {
  Eigen::MatrixXd values(1, 3);
  values << 3, 2, 1;
  PreprocessOptions options;
  options.target_length = 1;
  CHECK_THROWS_AS(resample(sequence("v", values), options), ConfigError);
}

TEST_CASE("rows stay non-increasing at the grid") {
  Rng rng(77);
  for (int trial = 0; trial < 12; ++trial) {
    const Eigen::Index frames = 2 + rng.uniform_int(0, 78);
    Eigen::MatrixXd values(3, frames);
    for (Eigen::Index r = 0; r < 3; ++r) {
      for (Eigen::Index c = 0; c < frames; ++c) values(r, c) = rng.gaussian();
    }
    for (InterpolationMode mode :
         {InterpolationMode::kLinear, InterpolationMode::kLagrange,
          InterpolationMode::kAuto}) {
      // Full-degree polynomials through dozens of random nodes overflow;
      // keep the explicit Lagrange probe to short videos.
      if (mode == InterpolationMode::kLagrange && frames > 40) continue;
      PreprocessOptions options;
      options.target_length = 20;
      options.mode = mode;
      const ResampledFeatureMatrix out =
          preprocess_sequence(sequence("v", values), options);
      REQUIRE(out.X.rows() == 3);
      REQUIRE(out.X.cols() == 20);
      for (Eigen::Index r = 0; r < 3; ++r) {
        for (Eigen::Index k = 0; k + 1 < 20; ++k) {
          CHECK(out.X(r, k) >= out.X(r, k + 1));
        }
      }
    }
  }
}

TEST_CASE("preprocessing ignores the temporal order of the input frames") {
  Rng rng(83);
  Eigen::MatrixXd values(2, 9);
  for (Eigen::Index r = 0; r < 2; ++r) {
    for (Eigen::Index c = 0; c < 9; ++c) values(r, c) = rng.gaussian();
  }
  PreprocessOptions options;
  options.target_length = 5;
  options.mode = InterpolationMode::kLagrange;
  const ResampledFeatureMatrix base =
      preprocess_sequence(sequence("v", values), options);

  std::vector<int> order(9);
  std::iota(order.begin(), order.end(), 0);
  for (int shuffle = 0; shuffle < 5; ++shuffle) {
    for (int i = 8; i > 0; --i) std::swap(order[i], order[rng.uniform_int(0, i)]);
    Eigen::MatrixXd permuted(2, 9);
    for (int c = 0; c < 9; ++c) permuted.col(c) = values.col(order[c]);
    const ResampledFeatureMatrix out =
        preprocess_sequence(sequence("v", permuted), options);
    CHECK((out.X - base.X).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("auto mode switches to piecewise-linear beyond the cutover") {
  Rng rng(97);
  auto convex_video = [&](Eigen::Index frames) {
    // Strictly convex decreasing values, so polynomial and piecewise-linear
    // resampling disagree between nodes.
    Eigen::MatrixXd values(1, frames);
    for (Eigen::Index c = 0; c < frames; ++c) {
      const double d = static_cast<double>(frames - 1 - c);
      values(0, c) = d * d / frames + 0.01 * rng.uniform01();
    }
    return sequence("v", values);
  };

  auto with_mode = [](InterpolationMode mode, int cutover = 60) {
    PreprocessOptions options;
    // 8 columns over 60 or 61 frames put most grid points between nodes,
    // where polynomial and piecewise-linear resampling genuinely differ.
    options.target_length = 8;
    options.mode = mode;
    options.lagrange_cutover = cutover;
    return options;
  };

  const FrameFeatureSequence at_cutover = convex_video(60);
  const Eigen::MatrixXd auto_at =
      preprocess_sequence(at_cutover, with_mode(InterpolationMode::kAuto)).X;
  const Eigen::MatrixXd poly_at =
      preprocess_sequence(at_cutover, with_mode(InterpolationMode::kLagrange)).X;
  CHECK((auto_at - poly_at).cwiseAbs().maxCoeff() == 0.0);

  const FrameFeatureSequence beyond = convex_video(61);
  const Eigen::MatrixXd auto_beyond =
      preprocess_sequence(beyond, with_mode(InterpolationMode::kAuto)).X;
  const Eigen::MatrixXd linear_beyond =
      preprocess_sequence(beyond, with_mode(InterpolationMode::kLinear)).X;
  const Eigen::MatrixXd poly_beyond =
      preprocess_sequence(beyond, with_mode(InterpolationMode::kLagrange)).X;
  CHECK((auto_beyond - linear_beyond).cwiseAbs().maxCoeff() == 0.0);
  CHECK((auto_beyond - poly_beyond).cwiseAbs().maxCoeff() > 0.0);

  // The cutover is a knob, not a constant.
  const FrameFeatureSequence short_video = convex_video(11);
  const Eigen::MatrixXd auto_low_cutover =
      preprocess_sequence(short_video,
                          with_mode(InterpolationMode::kAuto, 10)).X;
  const Eigen::MatrixXd linear_short =
      preprocess_sequence(short_video, with_mode(InterpolationMode::kLinear)).X;
  CHECK((auto_low_cutover - linear_short).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("corpus preprocessing handles batches and validates shapes") {
  PreprocessOptions options;
  options.target_length = 6;
  options.mode = InterpolationMode::kAuto;

  CHECK(preprocess_corpus({}, options).empty());

  Rng rng(13);
  Eigen::MatrixXd matching(2, 6);
  for (Eigen::Index r = 0; r < 2; ++r) {
    for (Eigen::Index c = 0; c < 6; ++c) matching(r, c) = rng.gaussian();
  }
  const auto single = preprocess_corpus({sequence("only", matching)}, options);
  REQUIRE(single.size() == 1);
  const Eigen::MatrixXd sorted =
      sort_components_descending(sequence("only", matching)).values;
  CHECK((single[0].X - sorted).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd short_video(2, 10);
  Eigen::MatrixXd long_video(2, 500);
  for (Eigen::Index c = 0; c < 10; ++c) short_video.col(c).setConstant(10 - c);
  for (Eigen::Index c = 0; c < 500; ++c) long_video.col(c).setConstant(500 - c);
  const auto mixed = preprocess_corpus(
      {sequence("short", short_video), sequence("long", long_video)}, options);
  REQUIRE(mixed.size() == 2);
  for (const auto& out : mixed) {
    CHECK(out.X.rows() == 2);
    CHECK(out.X.cols() == 6);
  }

  Eigen::MatrixXd other_dim = Eigen::MatrixXd::Ones(3, 4);
  try {
    preprocess_corpus({sequence("fine", matching), sequence("bad_a", other_dim),
                       sequence("bad_b", other_dim)},
                      options);
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("bad_a") != std::string::npos);
    CHECK(what.find("bad_b") != std::string::npos);
  }
}

TEST_CASE("interpolation mode names round-trip") {
  for (InterpolationMode mode :
       {InterpolationMode::kLagrange, InterpolationMode::kLinear,
        InterpolationMode::kAuto}) {
    CHECK(interpolation_mode_from_string(to_string(mode)) == mode);
  }
  CHECK(interpolation_mode_from_string("linear") == InterpolationMode::kLinear);
  CHECK_THROWS_AS(interpolation_mode_from_string("cubic"), ConfigError);
}
