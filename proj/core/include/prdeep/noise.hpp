#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "prdeep/field.hpp"

namespace prdeep {

/// Observed amplitudes y together with the shot-noise scale alpha.
class PhaselessData {
 public:
  PhaselessData() = default;
  /// Throws if any y is negative or non-finite, or alpha < 0.
  PhaselessData(std::vector<double> y, double alpha);

  std::span<const double> y() const { return y_; }
  double alpha() const { return alpha_; }
  std::size_t size() const { return y_.size(); }
  /// Cached alpha * RMS(y); NaN when y is empty.
  double sigma_w_bar() const { return sigma_w_bar_; }

 private:
  std::vector<double> y_;
  double alpha_ = 0.0;
  double sigma_w_bar_ = 0.0;
};

/// y^2 = |z|^2 + w with w ~ N(0, alpha^2 |z|^2), negative intensities clamped
/// to zero before the square root. Deterministic per seed.
PhaselessData sample_shot_noise(std::span<const Complex> z, double alpha, std::uint64_t seed);

/// Plug-in estimate of the intensity-noise std: alpha * sqrt(mean(y^2)).
double noise_std_estimate(const PhaselessData& data);

/// Flat little-endian file: "PRYD", u32 m, f64 alpha, m x f64 y.
void write_phaseless(const std::filesystem::path& path, const PhaselessData& data);
PhaselessData read_phaseless(const std::filesystem::path& path);

}  // namespace prdeep
