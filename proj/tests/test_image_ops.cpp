#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "regforge/image_ops.hpp"

using namespace regforge;

namespace {

GrayImage make_gray(int rows, int cols, double value) {
  GrayImage img;
  img.values = Eigen::MatrixXd::Constant(rows, cols, value);
  return img;
}

GrayImage vertical_step(int rows, int cols, int step_col) {
  GrayImage img = make_gray(rows, cols, 0.0);
  for (int r = 0; r < rows; ++r)
    for (int c = step_col; c < cols; ++c) img.values(r, c) = 255.0;
  return img;
}

}  // namespace

TEST_CASE("vertical step produces G = 1020 on the two adjacent columns") {
  // [DERIVED] |[[-1,0,1],[-2,0,2],[-1,0,1]] * step| = 4 * 255 = 1020 at the
  // columns flanking a 0|255 boundary.
  const GrayImage img = vertical_step(16, 32, 16);
  const Eigen::MatrixXd g = sobel_response(img);
  for (int r = 1; r < 15; ++r) {
    CHECK(g(r, 15) == doctest::Approx(1020.0).epsilon(1e-12));
    CHECK(g(r, 16) == doctest::Approx(1020.0).epsilon(1e-12));
    CHECK(g(r, 14) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g(r, 17) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("negation duality: |response| is invariant under I -> 255 - I") {
  GrayImage img = make_gray(12, 20, 0.0);
  // A deterministic but irregular pattern.
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 20; ++c)
      img.values(r, c) = std::fmod(17.0 * r + 31.0 * c * c, 256.0);
  GrayImage neg = img;
  neg.values = (255.0 - neg.values.array()).matrix();
  const Eigen::MatrixXd ga = sobel_response(img);
  const Eigen::MatrixXd gb = sobel_response(neg);
  CHECK((ga - gb).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("constant image yields no edge candidates") {
  const GrayImage img = make_gray(16, 16, 128.0);
  try {
    sobel_edges(img, 50.0, 100);
    FAIL("expected empty-input error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_input);
  }
}

TEST_CASE("wavelet filter with infinite threshold is the identity") {
  GrayImage img = make_gray(10, 14, 0.0);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 14; ++c) img.values(r, c) = std::fmod(13.0 * r * c + 7.0 * c, 256.0);
  const GrayImage out = wavelet_filter(img, kWaveletIdentityThreshold);
  CHECK((out.values - img.values).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("wavelet suppress-large flattens a 0/255 checkerboard to 127.5") {
  GrayImage img = make_gray(8, 8, 0.0);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) img.values(r, c) = ((r + c) % 2) ? 255.0 : 0.0;
  // Every high-frequency Haar coefficient has magnitude 255 > 50 and is
  // zeroed; only the LL average 127.5 survives.
  const GrayImage out = wavelet_filter(img, 50.0, WaveletMode::suppress_large);
  CHECK((out.values.array() - 127.5).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("wavelet suppress-small keeps strong structure, kills weak texture") {
  GrayImage img = make_gray(8, 8, 100.0);
  img.values(3, 3) = 104.0;  // weak blip, Haar coefficients ~2
  const GrayImage small_killed = wavelet_filter(img, 10.0, WaveletMode::suppress_small);
  // The blip's high-frequency content is below threshold and removed; what
  // remains is the 2x2 block average spread over the block.
  CHECK(small_killed.values(3, 3) < 104.0);
  CHECK(small_killed.values(3, 3) > 100.0);

  const GrayImage large_kept = wavelet_filter(img, 10.0, WaveletMode::suppress_large);
  CHECK(large_kept.values(3, 3) == doctest::Approx(104.0).epsilon(1e-12));
}

TEST_CASE("wavelet handles odd dimensions by edge replication") {
  GrayImage img = make_gray(7, 9, 42.0);
  const GrayImage out = wavelet_filter(img, kWaveletIdentityThreshold);
  CHECK(out.rows() == 7);
  CHECK(out.cols() == 9);
  CHECK((out.values.array() - 42.0).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("edge extraction: NMS, score ordering, and padding contract") {
  GrayImage img = make_gray(24, 40, 0.0);
  for (int r = 0; r < 24; ++r)
    for (int c = 20; c < 40; ++c) img.values(r, c) = 255.0;
  const int target = 64;
  const EdgeSet edges = sobel_edges(img, 50.0, target);

  CHECK(edges.size() == target);
  CHECK(edges.target_count == target);
  CHECK(edges.real_count >= 1);
  CHECK(edges.real_count <= target);
  CHECK(edges.padded == (edges.real_count < target));

  const Eigen::MatrixXd g = sobel_response(img);
  for (int i = 0; i < edges.real_count; ++i) {
    const int r = edges.pixels(i, 0), c = edges.pixels(i, 1);
    CHECK(r >= 0);
    CHECK(r < img.rows());
    CHECK(c >= 0);
    CHECK(c < img.cols());
    CHECK(edges.scores(i) == doctest::Approx(g(r, c)).epsilon(1e-12));
    CHECK(edges.scores(i) > 50.0);
    if (i > 0) CHECK(edges.scores(i) <= edges.scores(i - 1));
  }
  // 3x3 NMS: no two kept candidates within Chebyshev distance 1.
  for (int a = 0; a < edges.real_count; ++a)
    for (int b = a + 1; b < edges.real_count; ++b) {
      const int dr = std::abs(edges.pixels(a, 0) - edges.pixels(b, 0));
      const int dc = std::abs(edges.pixels(a, 1) - edges.pixels(b, 1));
      CHECK(std::max(dr, dc) > 1);
    }
  // Padding repeats the last real candidate.
  for (int i = edges.real_count; i < edges.size(); ++i) {
    CHECK(edges.pixels(i, 0) == edges.pixels(edges.real_count - 1, 0));
    CHECK(edges.pixels(i, 1) == edges.pixels(edges.real_count - 1, 1));
  }
}

TEST_CASE("edge extraction trims to the strongest target_count") {
  GrayImage img = make_gray(32, 64, 0.0);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 64; ++c)
      img.values(r, c) = std::fmod(37.0 * r * r + 101.0 * c * r + 3.0 * c, 256.0);
  const EdgeSet all = sobel_edges(img, 50.0, 4000);
  REQUIRE(all.real_count > 16);
  const EdgeSet few = sobel_edges(img, 50.0, 16);
  CHECK(few.size() == 16);
  CHECK(few.real_count == 16);
  CHECK_FALSE(few.padded);
  // The trimmed set is the head of the full ranking.
  for (int i = 0; i < 16; ++i) {
    CHECK(few.pixels(i, 0) == all.pixels(i, 0));
    CHECK(few.pixels(i, 1) == all.pixels(i, 1));
  }
}

TEST_CASE("red_channel: verbatim copy and area-average downsample") {
  CameraFrame frame;
  frame.image.height = 4;
  frame.image.width = 6;
  frame.image.rgb.assign(static_cast<std::size_t>(4 * 6 * 3), 0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 6; ++c) {
      frame.image.at(r, c, 0) = static_cast<std::uint8_t>(10 * r + c);
      frame.image.at(r, c, 1) = 200;  // ignored channels
      frame.image.at(r, c, 2) = 100;
    }

  const GrayImage verbatim = red_channel(frame);
  CHECK(verbatim.rows() == 4);
  CHECK(verbatim.cols() == 6);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 6; ++c)
      CHECK(verbatim.values(r, c) == doctest::Approx(10.0 * r + c).epsilon(1e-12));

  const GrayImage half = red_channel(frame, TargetSize{2, 3});
  CHECK(half.rows() == 2);
  CHECK(half.cols() == 3);
  // Each output pixel is the mean of a 2x2 input block.
  CHECK(half.values(0, 0) == doctest::Approx((0.0 + 1.0 + 10.0 + 11.0) / 4.0).epsilon(1e-9));
  CHECK(half.values(1, 2) == doctest::Approx((24.0 + 25.0 + 34.0 + 35.0) / 4.0).epsilon(1e-9));
}
