#pragma once

#include <optional>

#include "prdeep/field.hpp"

namespace prdeep {

/// 10 log10(255^2 / MSE); +infinity when the images are identical.
double psnr(const RealImage& estimate, const RealImage& reference);

enum class Ambiguity { None, Fourier };

struct AlignedPsnr {
  double psnr = 0.0;
  RealImage aligned;
  bool flipped = false;
  bool negated = false;
  /// Cyclic shift (in the search frame) applied to the estimate.
  Offset shift{};
};

/// PSNR after undoing the trivial ambiguities of Fourier magnitudes.
///
/// With Ambiguity::Fourier the estimate is compared against every element of
/// {+1, -1} x {identity, 180-degree flip} x (cyclic translations of `frame`),
/// choosing the one with the largest FFT cross-correlation against the
/// reference. Both images are zero-padded into `frame` (default: the image
/// shape itself, i.e. plain cyclic shifts).
AlignedPsnr align_and_psnr(const RealImage& estimate, const RealImage& reference, Ambiguity ambiguity,
                           std::optional<Shape> frame = std::nullopt);

/// x[(-i) mod h, (-j) mod w]
RealImage flip180(const RealImage& x);
/// out[(i + di) mod h, (j + dj) mod w] = x[i, j]
RealImage cyclic_shift(const RealImage& x, Offset shift);

}  // namespace prdeep
