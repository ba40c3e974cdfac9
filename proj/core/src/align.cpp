#include <cmath>
#include <limits>

#include "prdeep/metrics.hpp"

namespace prdeep {

double psnr(const RealImage& estimate, const RealImage& reference) {
  if (estimate.shape() != reference.shape()) throw ShapeError("psnr: image dimensions differ");
  if (estimate.empty()) throw ShapeError("psnr: empty images");
  double acc = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double d = estimate[i] - reference[i];
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(estimate.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

RealImage flip180(const RealImage& x) {
  const auto h = x.height();
  const auto w = x.width();
  RealImage out(x.shape());
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) out((h - i) % h, (w - j) % w) = x(i, j);
  }
  return out;
}

RealImage cyclic_shift(const RealImage& x, Offset shift) {
  const auto h = x.height();
  const auto w = x.width();
  RealImage out(x.shape());
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) out((i + shift.row) % h, (j + shift.col) % w) = x(i, j);
  }
  return out;
}

AlignedPsnr align_and_psnr(const RealImage& estimate, const RealImage& reference, Ambiguity ambiguity,
                           std::optional<Shape> frame) {
  if (estimate.shape() != reference.shape()) throw ShapeError("align_and_psnr: image dimensions differ");
  if (ambiguity == Ambiguity::None) return {psnr(estimate, reference), estimate, false, false, {}};

  const Shape grid = frame.value_or(estimate.shape());
  const Offset origin{};
  const RealImage ref_framed = embed(reference, grid, origin);
  const RealImage est_framed = embed(estimate, grid, origin);
  const ComplexField ref_hat = fft2(to_complex(ref_framed));
  const double scale = std::sqrt(static_cast<double>(grid.size()));

  AlignedPsnr best;
  double best_score = -std::numeric_limits<double>::infinity();
  RealImage best_candidate;

  for (bool flipped : {false, true}) {
    const RealImage candidate = flipped ? flip180(est_framed) : est_framed;
    const ComplexField cand_hat = fft2(to_complex(candidate));
    // corr[s] = sum_r ref[r] * candidate[r - s]
    ComplexField product(grid);
    for (std::size_t k = 0; k < product.size(); ++k) product[k] = ref_hat[k] * std::conj(cand_hat[k]) * scale;
    const ComplexField corr = ifft2(product);
    for (bool negated : {false, true}) {
      for (std::size_t k = 0; k < corr.size(); ++k) {
        const double score = negated ? -corr[k].real() : corr[k].real();
        if (score > best_score) {
          best_score = score;
          best.flipped = flipped;
          best.negated = negated;
          best.shift = Offset{k / grid.width, k % grid.width};
          best_candidate = candidate;
        }
      }
    }
  }

  RealImage moved = cyclic_shift(best_candidate, best.shift);
  if (best.negated) {
    for (auto& v : moved) v = -v;
  }
  best.aligned = crop(moved, estimate.shape(), origin);
  best.psnr = psnr(best.aligned, reference);
  return best;
}

}  // namespace prdeep
