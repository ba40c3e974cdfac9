#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "prdeep/field.hpp"

namespace prdeep {

/// Stacked measurement Ax. Length K*n for CDP, frame pixel count for Fourier.
using MeasurementVector = std::vector<Complex>;

/// Coded diffraction patterns: A = [F D_1; ...; F D_K] with unit-modulus
/// diagonal masks D_k and the unitary 2D DFT F. A^H A = K I.
class CdpOperator {
 public:
  /// Draws `mask_count` masks with i.i.d. uniform phase from `seed`.
  CdpOperator(Shape shape, std::size_t mask_count = 4, std::uint64_t seed = 0);

  /// Builds an operator from explicit masks. Every entry must have unit modulus.
  static CdpOperator from_masks(Shape shape, std::vector<ComplexField> masks);

  Shape image_shape() const { return shape_; }
  std::size_t mask_count() const { return masks_.size(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<ComplexField>& masks() const { return masks_; }
  std::size_t measurement_size() const { return masks_.size() * shape_.size(); }
  double gram_scale() const { return static_cast<double>(masks_.size()); }

  MeasurementVector forward(const ComplexField& x) const;
  ComplexField adjoint(std::span<const Complex> u) const;

 private:
  CdpOperator() = default;

  Shape shape_{};
  std::uint64_t seed_ = 0;
  std::vector<ComplexField> masks_;
};

/// Oversampled Fourier measurements: A = F E where E zero-pads the image into
/// a larger frame at a known offset. A^H A = I.
class FourierOsOperator {
 public:
  FourierOsOperator(Shape image, Shape frame, Offset offset);

  /// Image centred in a frame twice as large in each dimension (4x oversampling).
  static FourierOsOperator centered(Shape image);
  static FourierOsOperator centered(Shape image, Shape frame);

  Shape image_shape() const { return image_; }
  Shape frame_shape() const { return frame_; }
  Offset offset() const { return offset_; }
  std::size_t measurement_size() const { return frame_.size(); }
  double gram_scale() const { return 1.0; }

  MeasurementVector forward(const ComplexField& x) const;
  ComplexField adjoint(std::span<const Complex> u) const;

 private:
  Shape image_{};
  Shape frame_{};
  Offset offset_{};
};

enum class OperatorKind { Cdp, FourierOs };

/// Plain description of an operator, as stored in experiment configs.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::Cdp;
  Shape shape{64, 64};
  std::size_t mask_count = 4;
  std::uint64_t seed = 0;
  /// Fourier only; zero means twice the image size.
  Shape frame{};
  /// Fourier only; unset means centred.
  bool has_offset = false;
  Offset offset{};
};

/// Value-semantic handle over either operator.
class MeasurementOp {
 public:
  MeasurementOp(CdpOperator op) : impl_(std::move(op)) {}
  MeasurementOp(FourierOsOperator op) : impl_(std::move(op)) {}

  static MeasurementOp from_spec(const OperatorSpec& spec);

  OperatorKind kind() const;
  Shape image_shape() const;
  std::size_t measurement_size() const;
  /// c such that A^H A = c I.
  double gram_scale() const;

  const CdpOperator* as_cdp() const { return std::get_if<CdpOperator>(&impl_); }
  const FourierOsOperator* as_fourier() const { return std::get_if<FourierOsOperator>(&impl_); }

  MeasurementVector forward(const ComplexField& x) const;
  MeasurementVector forward(const RealImage& x) const;
  ComplexField adjoint(std::span<const Complex> u) const;
  /// |forward(x)| elementwise.
  std::vector<double> amplitude(const RealImage& x) const;

 private:
  std::variant<CdpOperator, FourierOsOperator> impl_;
};

std::vector<double> abs_values(std::span<const Complex> z);

std::string to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(const std::string& name);

}  // namespace prdeep
