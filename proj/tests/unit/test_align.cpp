#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "prdeep/metrics.hpp"

using namespace prdeep;

namespace {

RealImage negate(RealImage x) {
  for (auto& v : x) v = -v;
  return x;
}

}  // namespace

TEST(Psnr, AnchorValues) {
  std::mt19937_64 rng(1);
  const RealImage x = oracle::random_image({9, 11}, rng);
  EXPECT_EQ(psnr(x, x), std::numeric_limits<double>::infinity());
  RealImage y = x;
  for (auto& v : y) v += 1.0;
  EXPECT_NEAR(psnr(y, x), 10.0 * std::log10(255.0 * 255.0), 1e-9);
  EXPECT_NEAR(psnr(y, x), 48.13, 5e-3);
  EXPECT_THROW(psnr(x, RealImage({11, 9})), ShapeError);
}

TEST(Psnr, SymmetricWithoutAmbiguity) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const RealImage a = oracle::random_image({8, 8}, rng);
    const RealImage b = oracle::random_image({8, 8}, rng);
    EXPECT_EQ(align_and_psnr(a, b, Ambiguity::None).psnr, align_and_psnr(b, a, Ambiguity::None).psnr);
    EXPECT_EQ(align_and_psnr(a, b, Ambiguity::None).psnr, psnr(a, b));
  }
}

TEST(Align, EveryGroupTransformIsUndone) {
  std::mt19937_64 rng(3);
  const RealImage x = oracle::random_image({10, 12}, rng);
  for (bool flip : {false, true}) {
    for (bool neg : {false, true}) {
      for (std::size_t di : {0u, 3u, 9u}) {
        for (std::size_t dj : {0u, 5u, 11u}) {
          RealImage t = cyclic_shift(x, {di, dj});
          if (flip) t = flip180(t);
          if (neg) t = negate(t);
          const AlignedPsnr a = align_and_psnr(t, x, Ambiguity::Fourier);
          EXPECT_EQ(a.psnr, std::numeric_limits<double>::infinity()) << flip << neg << di << dj;
          EXPECT_EQ(a.aligned, x);
          EXPECT_EQ(a.negated, neg);
        }
      }
    }
  }
  // The worked example: flip of a (3, 5) shift.
  EXPECT_EQ(align_and_psnr(flip180(cyclic_shift(x, {3, 5})), x, Ambiguity::Fourier).psnr,
            std::numeric_limits<double>::infinity());
}

TEST(Align, MatchesBruteForceInFrame) {
  std::mt19937_64 rng(4);
  const Shape s{16, 16};
  const Shape frame{32, 32};
  for (int t = 0; t < 50; ++t) {
    const RealImage ref = oracle::random_image(s, rng);
    const RealImage est = oracle::random_image(s, rng, -255.0, 255.0);
    const AlignedPsnr fft = align_and_psnr(est, ref, Ambiguity::Fourier, frame);
    const oracle::Alignment brute = oracle::brute_force_alignment(est, ref, frame);
    EXPECT_EQ(fft.flipped, brute.flipped) << t;
    EXPECT_EQ(fft.negated, brute.negated) << t;
    EXPECT_EQ(fft.shift.row, brute.shift.row) << t;
    EXPECT_EQ(fft.shift.col, brute.shift.col) << t;

    RealImage cand = embed(est, frame, {0, 0});
    if (brute.flipped) cand = flip180(cand);
    if (brute.negated) cand = negate(cand);
    const RealImage aligned = crop(cyclic_shift(cand, brute.shift), s, {0, 0});
    EXPECT_LE(oracle::max_abs_diff(fft.aligned.values(), aligned.values()), 1e-9);
    EXPECT_NEAR(fft.psnr, psnr(aligned, ref), 1e-9);
  }
}

TEST(Align, Errors) {
  EXPECT_THROW(align_and_psnr(RealImage({4, 4}), RealImage({4, 5}), Ambiguity::Fourier), ShapeError);
  EXPECT_THROW(align_and_psnr(RealImage({4, 4}), RealImage({4, 4}), Ambiguity::Fourier, Shape{3, 8}), ShapeError);
}
