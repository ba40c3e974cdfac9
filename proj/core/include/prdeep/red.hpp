#pragma once

#include <memory>

#include "prdeep/denoise.hpp"

namespace prdeep {

/// Weight, inner prox iterations and the (denoiser, sigma) binding of the RED
/// penalty R(x) = (lambda / 2) <x, x - D(x)>.
struct RedConfig {
  double lambda = 0.0;
  std::size_t prox_inner_iters = 1;
  std::shared_ptr<const Denoiser> denoiser;
  double sigma = 0.0;

  void validate() const;
};

double red_value(const RealImage& x, const RedConfig& cfg);

/// lambda (x - D(x)); the exact gradient of red_value only when D is linear
/// and symmetric.
RealImage red_grad(const RealImage& x, const RedConfig& cfg);

/// v_0 = z, v_k = (z + lambda D(v_{k-1})) / (1 + lambda), returns v_j.
/// The fixed point is the stationary point of 0.5 |v - z|^2 + R(v) for
/// linear symmetric D.
RealImage red_prox(const RealImage& z, const RedConfig& cfg);

}  // namespace prdeep
