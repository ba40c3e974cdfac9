#include "prdeep/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

namespace prdeep {
namespace {

// FFTW's planner is not thread-safe; execution on new arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(Shape shape, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(shape.height, shape.width, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::vector<Complex> scratch(shape.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(shape.height), static_cast<int>(shape.width),
                                      buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void transform(std::span<Complex> data, Shape shape, int sign) {
  if (shape.height == 0 || shape.width == 0) throw ShapeError("FFT of an empty field");
  if (data.size() != shape.size()) throw ShapeError("FFT buffer length does not match shape");
  if (!all_finite(std::span<const Complex>(data))) throw NumericError("FFT input is not finite");

  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_cache().get(shape, sign), buf, buf);

  const double scale = 1.0 / std::sqrt(static_cast<double>(shape.size()));
  for (auto& v : data) v *= scale;
}

}  // namespace

void fft2_inplace(std::span<Complex> data, Shape shape) { transform(data, shape, FFTW_FORWARD); }

void ifft2_inplace(std::span<Complex> data, Shape shape) { transform(data, shape, FFTW_BACKWARD); }

ComplexField fft2(const ComplexField& f) {
  ComplexField out = f;
  fft2_inplace(out.values(), out.shape());
  return out;
}

ComplexField ifft2(const ComplexField& f) {
  ComplexField out = f;
  ifft2_inplace(out.values(), out.shape());
  return out;
}

ComplexField embed_real(const RealImage& x, Shape frame, Offset offset) {
  detail::check_placement(x.shape(), frame, offset);
  ComplexField out(frame);
  for (std::size_t r = 0; r < x.height(); ++r) {
    for (std::size_t c = 0; c < x.width(); ++c) {
      out(offset.row + r, offset.col + c) = Complex(x(r, c), 0.0);
    }
  }
  return out;
}

ComplexField to_complex(const RealImage& x) {
  ComplexField out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = Complex(x[i], 0.0);
  return out;
}

RealImage real_part(const ComplexField& f) {
  RealImage out(f.shape());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw ShapeError("inner: length mismatch");
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm2(std::span<const Complex> a) {
  double acc = 0.0;
  for (const auto& v : a) acc += std::norm(v);
  return std::sqrt(acc);
}

bool all_finite(std::span<const double> a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool all_finite(std::span<const Complex> a) {
  for (const auto& v : a) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

}  // namespace prdeep
