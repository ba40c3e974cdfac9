#include <cmath>

#include "prdeep/denoise.hpp"

namespace prdeep {
namespace {

// Forward differences with Neumann boundary; div is the negative adjoint.
struct DualField {
  std::vector<double> px;
  std::vector<double> py;
};

void divergence(const DualField& p, std::size_t h, std::size_t w, std::vector<double>& out) {
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const std::size_t k = i * w + j;
      double dx = 0.0;
      if (w > 1) {
        if (j == 0) dx = p.px[k];
        else if (j == w - 1) dx = -p.px[k - 1];
        else dx = p.px[k] - p.px[k - 1];
      }
      double dy = 0.0;
      if (h > 1) {
        if (i == 0) dy = p.py[k];
        else if (i == h - 1) dy = -p.py[k - w];
        else dy = p.py[k] - p.py[k - w];
      }
      out[k] = dx + dy;
    }
  }
}

inline double grad_x(const std::vector<double>& u, std::size_t i, std::size_t j, std::size_t w) {
  return j + 1 < w ? u[i * w + j + 1] - u[i * w + j] : 0.0;
}

inline double grad_y(const std::vector<double>& u, std::size_t i, std::size_t j, std::size_t h, std::size_t w) {
  return i + 1 < h ? u[(i + 1) * w + j] - u[i * w + j] : 0.0;
}

// gamma * (TV(u) - <grad u, p>); nonnegative whenever |p| <= 1.
double duality_gap(const std::vector<double>& u, const DualField& p, std::size_t h, std::size_t w, double gamma) {
  double gap = 0.0;
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const double gx = grad_x(u, i, j, w);
      const double gy = grad_y(u, i, j, h, w);
      const std::size_t k = i * w + j;
      gap += std::sqrt(gx * gx + gy * gy) - (gx * p.px[k] + gy * p.py[k]);
    }
  }
  return gamma * gap;
}

}  // namespace

TvResult tv_denoise_detailed(const RealImage& x, double sigma, const TvOptions& opts) {
  if (!(sigma >= 0.0)) throw ParameterError("tv sigma must be >= 0");
  if (!(opts.step > 0.0)) throw ParameterError("tv step must be positive");
  const double gamma = opts.strength_per_sigma * sigma;
  if (gamma <= 0.0) return {x, 0, 0.0};

  const std::size_t h = x.height();
  const std::size_t w = x.width();
  const std::size_t n = x.size();
  const std::vector<double> f(x.begin(), x.end());

  DualField p{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<double> div(n, 0.0);
  std::vector<double> v(n);
  std::vector<double> u(f);
  const std::size_t check_every = std::max<std::size_t>(opts.gap_check_every, 1);

  TvResult result;
  double gap = duality_gap(u, p, h, w, gamma);
  std::size_t it = 0;
  while (it < opts.max_iters && gap > opts.gap_tol * static_cast<double>(n)) {
    for (std::size_t k = 0; k < n; ++k) v[k] = div[k] - f[k] / gamma;
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        const double gx = grad_x(v, i, j, w);
        const double gy = grad_y(v, i, j, h, w);
        const double denom = 1.0 + opts.step * std::sqrt(gx * gx + gy * gy);
        const std::size_t k = i * w + j;
        p.px[k] = (p.px[k] + opts.step * gx) / denom;
        p.py[k] = (p.py[k] + opts.step * gy) / denom;
      }
    }
    divergence(p, h, w, div);
    ++it;
    if (it % check_every == 0 || it == opts.max_iters) {
      for (std::size_t k = 0; k < n; ++k) u[k] = f[k] - gamma * div[k];
      gap = duality_gap(u, p, h, w, gamma);
    }
  }
  for (std::size_t k = 0; k < n; ++k) u[k] = f[k] - gamma * div[k];

  result.image = RealImage(x.shape(), std::move(u));
  result.iterations = it;
  result.gap = gap;
  return result;
}

RealImage tv_denoise(const RealImage& x, double sigma, const TvOptions& opts) {
  return tv_denoise_detailed(x, sigma, opts).image;
}

}  // namespace prdeep
