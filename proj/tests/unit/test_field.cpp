#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "prdeep/field.hpp"

using namespace prdeep;

TEST(Field, FftMatchesNaiveDft) {
  std::mt19937_64 rng(11);
  for (Shape s : {Shape{1, 1}, Shape{2, 3}, Shape{5, 4}, Shape{8, 8}, Shape{7, 12}}) {
    const ComplexField x = oracle::random_field(s, rng);
    EXPECT_LT(oracle::rel_diff(fft2(x).values(), oracle::naive_dft(x, -1).values()), 1e-12) << s.height << "x" << s.width;
    EXPECT_LT(oracle::rel_diff(ifft2(x).values(), oracle::naive_dft(x, +1).values()), 1e-12);
  }
}

TEST(Field, ParsevalAndRoundTrip) {
  std::mt19937_64 rng(12);
  for (std::size_t n : {2, 3, 4, 8, 16, 64, 128, 256}) {
    const ComplexField x = oracle::random_field({n, n}, rng);
    const ComplexField fx = fft2(x);
    EXPECT_NEAR(norm2(fx.values()) / norm2(x.values()), 1.0, 1e-12) << n;
    EXPECT_LT(oracle::rel_diff(ifft2(fx).values(), x.values()), 1e-12) << n;
  }
}

TEST(Field, FftRejectsBadInput) {
  ComplexField x({2, 2});
  x[1] = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  EXPECT_THROW(fft2(x), NumericError);
  EXPECT_THROW(fft2(ComplexField{}), ShapeError);
}

TEST(Field, EmbedCenteredBlock) {
  const RealImage ones({2, 2}, 1.0);
  const RealImage out = embed(ones, {4, 4}, {1, 1});
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      const bool inside = r >= 1 && r <= 2 && c >= 1 && c <= 2;
      EXPECT_EQ(out(r, c), inside ? 1.0 : 0.0);
    }
  }
}

TEST(Field, CropUndoesEmbedExactly) {
  std::mt19937_64 rng(13);
  const RealImage x = oracle::random_image({5, 7}, rng);
  EXPECT_EQ(crop(embed(x, {9, 16}, {3, 2}), x.shape(), {3, 2}), x);
}

TEST(Field, EmbedCropAdjoint) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexField x = oracle::random_field({6, 5}, rng);
    const ComplexField u = oracle::random_field({10, 12}, rng);
    const Offset off{static_cast<std::size_t>(trial % 5), static_cast<std::size_t>(trial % 8)};
    const Complex lhs = inner(embed(x, u.shape(), off).values(), u.values());
    const Complex rhs = inner(x.values(), crop(u, x.shape(), off).values());
    EXPECT_LE(std::abs(lhs - rhs), 1e-14 * norm2(x.values()) * norm2(u.values()));
  }
}

TEST(Field, PlacementOutsideFrameThrows) {
  EXPECT_THROW(embed(RealImage({3, 3}), {4, 4}, {2, 0}), ShapeError);
  EXPECT_THROW(crop(RealImage({4, 4}), {3, 3}, {0, 2}), ShapeError);
  EXPECT_THROW(RealImage({2, 2}, std::vector<double>(3)), ShapeError);
}
