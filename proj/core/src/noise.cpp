#include "prdeep/noise.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>

#include "binary_io.hpp"

namespace prdeep {

PhaselessData::PhaselessData(std::vector<double> y, double alpha) : y_(std::move(y)), alpha_(alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ParameterError("noise scale alpha must be finite and >= 0");
  for (double v : y_) {
    if (!std::isfinite(v) || v < 0.0) throw ParameterError("amplitudes must be finite and nonnegative");
  }
  sigma_w_bar_ = y_.empty() ? std::numeric_limits<double>::quiet_NaN() : noise_std_estimate(*this);
}

PhaselessData sample_shot_noise(std::span<const Complex> z, double alpha, std::uint64_t seed) {
  if (!(alpha >= 0.0)) throw ParameterError("noise scale alpha must be >= 0");
  if (!all_finite(z)) throw NumericError("shot noise input is not finite");

  std::vector<double> y(z.size());
  if (alpha == 0.0) {
    for (std::size_t i = 0; i < z.size(); ++i) y[i] = std::abs(z[i]);
    return PhaselessData(std::move(y), alpha);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double magnitude = std::abs(z[i]);
    const double intensity = magnitude * magnitude + alpha * magnitude * gauss(rng);
    y[i] = std::sqrt(std::max(intensity, 0.0));
  }
  return PhaselessData(std::move(y), alpha);
}

double noise_std_estimate(const PhaselessData& data) {
  const auto y = data.y();
  if (y.empty()) throw ParameterError("noise estimate of empty measurements");
  double acc = 0.0;
  for (double v : y) acc += v * v;
  return data.alpha() * std::sqrt(acc / static_cast<double>(y.size()));
}

void write_phaseless(const std::filesystem::path& path, const PhaselessData& data) {
  if (data.size() > std::numeric_limits<std::uint32_t>::max()) throw FormatError("too many measurements for PRYD");
  std::string bytes = "PRYD";
  detail::put_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(data.size()));
  detail::put_le<double>(bytes, data.alpha());
  for (double v : data.y()) detail::put_le<double>(bytes, v);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

PhaselessData read_phaseless(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  constexpr std::size_t header = 4 + 4 + 8;
  if (bytes.size() < header || bytes.compare(0, 4, "PRYD") != 0) {
    throw FormatError(path.string() + ": missing PRYD magic");
  }
  const auto m = detail::get_le<std::uint32_t>(bytes.data() + 4);
  const double alpha = detail::get_le<double>(bytes.data() + 8);
  if (bytes.size() != header + std::size_t{m} * 8) {
    throw FormatError(path.string() + ": length field does not match file size");
  }
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = detail::get_le<double>(bytes.data() + header + 8 * i);
  return PhaselessData(std::move(y), alpha);
}

}  // namespace prdeep
