#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "prdeep/error.hpp"

namespace prdeep {

using Complex = std::complex<double>;

struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;

  constexpr std::size_t size() const { return height * width; }
  friend constexpr bool operator==(const Shape&, const Shape&) = default;
};

struct Offset {
  std::size_t row = 0;
  std::size_t col = 0;

  friend constexpr bool operator==(const Offset&, const Offset&) = default;
};

/// Row-major 2D grid of scalars.
template <class T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  explicit Grid(Shape shape, T fill = T{}) : shape_(shape), data_(shape.size(), fill) {}
  Grid(Shape shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
      throw ShapeError("grid data length does not match height*width");
    }
  }

  Shape shape() const { return shape_; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * shape_.width + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * shape_.width + c]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Shape shape_{};
  std::vector<T> data_;
};

/// Real image, nominal dynamic range [0, 255].
using RealImage = Grid<double>;
using ComplexField = Grid<Complex>;

/// Unitary 2D DFT: each transform is scaled by 1/sqrt(height*width).
/// Throws NumericError on non-finite input and ShapeError on empty fields.
ComplexField fft2(const ComplexField& f);
/// Inverse (and adjoint) of fft2.
ComplexField ifft2(const ComplexField& f);

/// In-place variants on a raw row-major buffer of the given shape.
void fft2_inplace(std::span<Complex> data, Shape shape);
void ifft2_inplace(std::span<Complex> data, Shape shape);

/// Zero-padded copy of `x` placed at `offset` inside a grid of shape `frame`.
template <class T>
Grid<T> embed(const Grid<T>& x, Shape frame, Offset offset);
/// Adjoint of embed: extracts a `shape` block starting at `offset`.
template <class T>
Grid<T> crop(const Grid<T>& u, Shape shape, Offset offset);

ComplexField embed_real(const RealImage& x, Shape frame, Offset offset);

ComplexField to_complex(const RealImage& x);
RealImage real_part(const ComplexField& f);

/// Real inner product sum(a_i * b_i).
double dot(std::span<const double> a, std::span<const double> b);
/// Complex inner product sum(conj(a_i) * b_i).
Complex inner(std::span<const Complex> a, std::span<const Complex> b);

double norm2(std::span<const double> a);
double norm2(std::span<const Complex> a);

bool all_finite(std::span<const double> a);
bool all_finite(std::span<const Complex> a);

// ---------------------------------------------------------------------------

namespace detail {
inline void check_placement(Shape inner, Shape outer, Offset offset) {
  if (offset.row + inner.height > outer.height || offset.col + inner.width > outer.width) {
    throw ShapeError("block does not fit inside frame at the requested offset");
  }
}
}  // namespace detail

template <class T>
Grid<T> embed(const Grid<T>& x, Shape frame, Offset offset) {
  detail::check_placement(x.shape(), frame, offset);
  Grid<T> out(frame);
  for (std::size_t r = 0; r < x.height(); ++r) {
    for (std::size_t c = 0; c < x.width(); ++c) {
      out(offset.row + r, offset.col + c) = x(r, c);
    }
  }
  return out;
}

template <class T>
Grid<T> crop(const Grid<T>& u, Shape shape, Offset offset) {
  detail::check_placement(shape, u.shape(), offset);
  Grid<T> out(shape);
  for (std::size_t r = 0; r < shape.height; ++r) {
    for (std::size_t c = 0; c < shape.width; ++c) {
      out(r, c) = u(offset.row + r, offset.col + c);
    }
  }
  return out;
}

}  // namespace prdeep
