#include "prdeep/measurement.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace prdeep {
namespace {

void check_shape(const ComplexField& x, Shape expected) {
  if (x.shape() != expected) throw ShapeError("operator input shape does not match operator");
}

}  // namespace

CdpOperator::CdpOperator(Shape shape, std::size_t mask_count, std::uint64_t seed)
    : shape_(shape), seed_(seed) {
  if (mask_count == 0) throw ParameterError("CDP operator needs at least one mask");
  if (shape.size() == 0) throw ShapeError("CDP operator needs a non-empty image shape");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  masks_.reserve(mask_count);
  for (std::size_t k = 0; k < mask_count; ++k) {
    ComplexField mask(shape);
    for (auto& v : mask) v = std::polar(1.0, phase(rng));
    masks_.push_back(std::move(mask));
  }
}

CdpOperator CdpOperator::from_masks(Shape shape, std::vector<ComplexField> masks) {
  if (masks.empty()) throw ParameterError("CDP operator needs at least one mask");
  for (const auto& mask : masks) {
    if (mask.shape() != shape) throw ShapeError("mask shape does not match image shape");
    for (const auto& v : mask) {
      if (std::abs(std::abs(v) - 1.0) > 1e-12) throw ParameterError("CDP mask entries must have unit modulus");
    }
  }
  CdpOperator op;
  op.shape_ = shape;
  op.masks_ = std::move(masks);
  return op;
}

MeasurementVector CdpOperator::forward(const ComplexField& x) const {
  check_shape(x, shape_);
  const std::size_t n = shape_.size();
  MeasurementVector out(masks_.size() * n);
  for (std::size_t k = 0; k < masks_.size(); ++k) {
    std::span<Complex> block(out.data() + k * n, n);
    for (std::size_t i = 0; i < n; ++i) block[i] = masks_[k][i] * x[i];
    fft2_inplace(block, shape_);
  }
  return out;
}

ComplexField CdpOperator::adjoint(std::span<const Complex> u) const {
  const std::size_t n = shape_.size();
  if (u.size() != measurement_size()) throw ShapeError("CDP adjoint: measurement length mismatch");
  ComplexField out(shape_);
  std::vector<Complex> block(n);
  for (std::size_t k = 0; k < masks_.size(); ++k) {
    std::copy_n(u.begin() + static_cast<std::ptrdiff_t>(k * n), n, block.begin());
    ifft2_inplace(block, shape_);
    for (std::size_t i = 0; i < n; ++i) out[i] += std::conj(masks_[k][i]) * block[i];
  }
  return out;
}

FourierOsOperator::FourierOsOperator(Shape image, Shape frame, Offset offset)
    : image_(image), frame_(frame), offset_(offset) {
  if (image.size() == 0) throw ShapeError("Fourier operator needs a non-empty image shape");
  if (frame.height < image.height || frame.width < image.width) {
    throw ShapeError("oversampled frame must be at least as large as the image");
  }
  detail::check_placement(image, frame, offset);
}

FourierOsOperator FourierOsOperator::centered(Shape image) {
  return centered(image, Shape{2 * image.height, 2 * image.width});
}

FourierOsOperator FourierOsOperator::centered(Shape image, Shape frame) {
  if (frame.height < image.height || frame.width < image.width) {
    throw ShapeError("oversampled frame must be at least as large as the image");
  }
  return FourierOsOperator(image, frame,
                           Offset{(frame.height - image.height) / 2, (frame.width - image.width) / 2});
}

MeasurementVector FourierOsOperator::forward(const ComplexField& x) const {
  check_shape(x, image_);
  ComplexField framed = embed(x, frame_, offset_);
  fft2_inplace(framed.values(), frame_);
  return MeasurementVector(framed.begin(), framed.end());
}

ComplexField FourierOsOperator::adjoint(std::span<const Complex> u) const {
  if (u.size() != frame_.size()) throw ShapeError("Fourier adjoint: measurement length mismatch");
  ComplexField framed(frame_, std::vector<Complex>(u.begin(), u.end()));
  ifft2_inplace(framed.values(), frame_);
  return crop(framed, image_, offset_);
}

MeasurementOp MeasurementOp::from_spec(const OperatorSpec& spec) {
  if (spec.kind == OperatorKind::Cdp) return CdpOperator(spec.shape, spec.mask_count, spec.seed);
  const Shape frame = spec.frame.size() == 0 ? Shape{2 * spec.shape.height, 2 * spec.shape.width} : spec.frame;
  if (spec.has_offset) return FourierOsOperator(spec.shape, frame, spec.offset);
  return FourierOsOperator::centered(spec.shape, frame);
}

OperatorKind MeasurementOp::kind() const {
  return std::holds_alternative<CdpOperator>(impl_) ? OperatorKind::Cdp : OperatorKind::FourierOs;
}

Shape MeasurementOp::image_shape() const {
  return std::visit([](const auto& op) { return op.image_shape(); }, impl_);
}

std::size_t MeasurementOp::measurement_size() const {
  return std::visit([](const auto& op) { return op.measurement_size(); }, impl_);
}

double MeasurementOp::gram_scale() const {
  return std::visit([](const auto& op) { return op.gram_scale(); }, impl_);
}

MeasurementVector MeasurementOp::forward(const ComplexField& x) const {
  return std::visit([&](const auto& op) { return op.forward(x); }, impl_);
}

MeasurementVector MeasurementOp::forward(const RealImage& x) const { return forward(to_complex(x)); }

ComplexField MeasurementOp::adjoint(std::span<const Complex> u) const {
  return std::visit([&](const auto& op) { return op.adjoint(u); }, impl_);
}

std::vector<double> MeasurementOp::amplitude(const RealImage& x) const { return abs_values(forward(x)); }

std::vector<double> abs_values(std::span<const Complex> z) {
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::abs(z[i]);
  return out;
}

std::string to_string(OperatorKind kind) { return kind == OperatorKind::Cdp ? "cdp" : "fourier_os"; }

OperatorKind operator_kind_from_string(const std::string& name) {
  if (name == "cdp") return OperatorKind::Cdp;
  if (name == "fourier_os") return OperatorKind::FourierOs;
  throw ParameterError("unknown operator type '" + name + "' (expected cdp or fourier_os)");
}

}  // namespace prdeep
