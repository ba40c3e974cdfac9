#pragma once

// Independent reference implementations used as test oracles. None of these
// call into the library's numerical code paths they are meant to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "prdeep/field.hpp"

namespace oracle {

using prdeep::Complex;
using prdeep::ComplexField;
using prdeep::RealImage;
using prdeep::Shape;

inline RealImage random_image(Shape shape, std::mt19937_64& rng, double lo = 0.0, double hi = 255.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  RealImage x(shape);
  for (auto& v : x) v = u(rng);
  return x;
}

inline ComplexField random_field(Shape shape, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexField x(shape);
  for (auto& v : x) v = {g(rng), g(rng)};
  return x;
}

inline std::vector<Complex> random_complex(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Complex> v(n);
  for (auto& c : v) c = {g(rng), g(rng)};
  return v;
}

/// O(N^2) unitary DFT, straight from the definition. sign = -1 forward, +1 inverse.
inline ComplexField naive_dft(const ComplexField& f, int sign = -1) {
  const std::size_t h = f.height();
  const std::size_t w = f.width();
  const double scale = 1.0 / std::sqrt(static_cast<double>(h * w));
  ComplexField out(f.shape());
  for (std::size_t u = 0; u < h; ++u) {
    for (std::size_t v = 0; v < w; ++v) {
      Complex acc{};
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
          const double phase = sign * 2.0 * std::numbers::pi *
                               (static_cast<double>(u * r % h) / h + static_cast<double>(v * c % w) / w);
          acc += f(r, c) * std::polar(1.0, phase);
        }
      }
      out(u, v) = acc * scale;
    }
  }
  return out;
}

inline double rel_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / std::max(den, std::numeric_limits<double>::min()));
}

inline double rel_diff(std::span<const double> a, std::span<const double> b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / std::max(den, std::numeric_limits<double>::min()));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Dense matrix of a linear map on images, built column by column from basis images.
inline Eigen::MatrixXd dense_matrix(Shape shape, const std::function<RealImage(const RealImage&)>& map) {
  const std::size_t n = shape.size();
  Eigen::MatrixXd m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    RealImage e(shape, 0.0);
    e[j] = 1.0;
    const RealImage col = map(e);
    for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
  }
  return m;
}

/// ROF denoising min_u 0.5|u - f|^2 + gamma TV(u) (isotropic, forward
/// differences, Neumann boundary) via FISTA on the dual with explicit
/// gradient / divergence matrices. Slow and simple on purpose.
inline RealImage rof_reference(const RealImage& f, double gamma, std::size_t iters = 200000) {
  const std::size_t h = f.height();
  const std::size_t w = f.width();
  const std::size_t n = h * w;
  // D maps u (n) to stacked (dx, dy) (2n).
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2 * n, n);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const std::size_t k = i * w + j;
      if (j + 1 < w) {
        d(k, k + 1) = 1.0;
        d(k, k) = -1.0;
      }
      if (i + 1 < h) {
        d(n + k, k + w) = 1.0;
        d(n + k, k) = -1.0;
      }
    }
  }
  Eigen::VectorXd fv(n);
  for (std::size_t k = 0; k < n; ++k) fv[k] = f[k];

  // Dual: min_{|p_k| <= 1} 0.5 |f - gamma D^T p|^2, u = f - gamma D^T p.
  auto project = [&](Eigen::VectorXd& p) {
    for (std::size_t k = 0; k < n; ++k) {
      const double m = std::hypot(p[k], p[n + k]);
      if (m > 1.0) {
        p[k] /= m;
        p[n + k] /= m;
      }
    }
  };
  const double lip = gamma * gamma * 8.0;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(2 * n);
  Eigen::VectorXd q = p;
  double t = 1.0;
  for (std::size_t it = 0; it < iters; ++it) {
    const Eigen::VectorXd u = fv - gamma * d.transpose() * q;
    Eigen::VectorXd next = q + (gamma / lip) * (d * u);
    project(next);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    q = next + ((t - 1.0) / tn) * (next - p);
    if ((next - p).norm() < 1e-15 * (1.0 + next.norm())) {
      p = next;
      break;
    }
    p = next;
    t = tn;
  }
  const Eigen::VectorXd u = fv - gamma * d.transpose() * p;
  RealImage out(f.shape());
  for (std::size_t k = 0; k < n; ++k) out[k] = u[k];
  return out;
}

struct Alignment {
  bool flipped = false;
  bool negated = false;
  prdeep::Offset shift{};
  double correlation = -std::numeric_limits<double>::infinity();
};

/// Exhaustive search over sign x {identity, 180-degree flip} x every cyclic
/// shift of the frame, scoring by the direct (non-FFT) correlation sum.
inline Alignment brute_force_alignment(const RealImage& est, const RealImage& ref, Shape frame) {
  const std::size_t fh = frame.height;
  const std::size_t fw = frame.width;
  std::vector<double> a(fh * fw, 0.0);
  std::vector<double> b(fh * fw, 0.0);
  for (std::size_t r = 0; r < est.height(); ++r) {
    for (std::size_t c = 0; c < est.width(); ++c) {
      a[r * fw + c] = est(r, c);
      b[r * fw + c] = ref(r, c);
    }
  }
  Alignment best;
  for (int flip = 0; flip < 2; ++flip) {
    std::vector<double> cand(fh * fw);
    for (std::size_t r = 0; r < fh; ++r) {
      for (std::size_t c = 0; c < fw; ++c) {
        cand[r * fw + c] = flip ? a[((fh - r) % fh) * fw + (fw - c) % fw] : a[r * fw + c];
      }
    }
    for (std::size_t dr = 0; dr < fh; ++dr) {
      for (std::size_t dc = 0; dc < fw; ++dc) {
        double corr = 0.0;
        for (std::size_t r = 0; r < fh; ++r) {
          for (std::size_t c = 0; c < fw; ++c) {
            corr += b[((r + dr) % fh) * fw + (c + dc) % fw] * cand[r * fw + c];
          }
        }
        for (int neg = 0; neg < 2; ++neg) {
          const double score = neg ? -corr : corr;
          if (score > best.correlation) best = {flip == 1, neg == 1, {dr, dc}, score};
        }
      }
    }
  }
  return best;
}

}  // namespace oracle
