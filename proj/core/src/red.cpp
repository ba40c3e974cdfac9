#include "prdeep/red.hpp"

#include <cmath>

namespace prdeep {

void RedConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("RED lambda must be finite and >= 0");
  if (prox_inner_iters < 1) throw ParameterError("RED prox needs at least one inner iteration");
  if (lambda > 0.0 && !denoiser) throw ParameterError("RED config has no denoiser");
}

double red_value(const RealImage& x, const RedConfig& cfg) {
  cfg.validate();
  if (cfg.lambda == 0.0) return 0.0;
  const RealImage d = (*cfg.denoiser)(x, cfg.sigma);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * (x[i] - d[i]);
  return 0.5 * cfg.lambda * acc;
}

RealImage red_grad(const RealImage& x, const RedConfig& cfg) {
  cfg.validate();
  RealImage g(x.shape());
  if (cfg.lambda == 0.0) return g;
  const RealImage d = (*cfg.denoiser)(x, cfg.sigma);
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = cfg.lambda * (x[i] - d[i]);
  return g;
}

RealImage red_prox(const RealImage& z, const RedConfig& cfg) {
  cfg.validate();
  if (cfg.lambda == 0.0) return z;
  const double scale = 1.0 / (1.0 + cfg.lambda);
  RealImage v = z;
  for (std::size_t k = 0; k < cfg.prox_inner_iters; ++k) {
    const RealImage d = (*cfg.denoiser)(v, cfg.sigma);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = scale * (z[i] + cfg.lambda * d[i]);
  }
  return v;
}

}  // namespace prdeep
