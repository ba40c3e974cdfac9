#pragma once

#include <array>
#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "prdeep/field.hpp"

namespace prdeep {

/// A denoising map D(x, sigma) on real images, sigma on the [0, 255] scale.
///
/// Callers go through operator(), which enforces the shared contract
/// (sigma >= 0, finite input, same-shape finite output). Outputs are never
/// clipped to [0, 255]: RED relies on the unclipped map.
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  RealImage operator()(const RealImage& x, double sigma) const;
  virtual std::string name() const = 0;

 protected:
  virtual RealImage run(const RealImage& x, double sigma) const = 0;
};

class IdentityDenoiser final : public Denoiser {
 public:
  explicit IdentityDenoiser(std::string name = "identity") : name_(std::move(name)) {}
  std::string name() const override { return name_; }

 protected:
  RealImage run(const RealImage& x, double) const override { return x; }

 private:
  std::string name_;
};

/// (2r+1)^2 median with symmetric boundary extension.
RealImage median_filter(const RealImage& x, std::size_t radius);

class MedianDenoiser final : public Denoiser {
 public:
  explicit MedianDenoiser(std::size_t radius = 1, std::string name = "median")
      : radius_(radius), name_(std::move(name)) {}
  std::string name() const override { return name_; }

 protected:
  RealImage run(const RealImage& x, double) const override { return median_filter(x, radius_); }

 private:
  std::size_t radius_;
  std::string name_;
};

/// Circular convolution with a normalised Gaussian of `width` pixels std,
/// truncated at 3 std.
/// The resulting operator is linear and symmetric.
RealImage gaussian_blur(const RealImage& x, double width);

/// Linear symmetric blur. The kernel width is fixed at construction and does
/// not depend on sigma, so the map stays the same operator across stages.
class GaussianBlurDenoiser final : public Denoiser {
 public:
  explicit GaussianBlurDenoiser(double width = 1.0, std::string name = "gaussian_blur")
      : width_(width), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  double width() const { return width_; }

 protected:
  RealImage run(const RealImage& x, double) const override { return gaussian_blur(x, width_); }

 private:
  double width_;
  std::string name_;
};

struct TvOptions {
  /// ROF weight gamma = strength_per_sigma * sigma.
  double strength_per_sigma = 0.9;
  std::size_t max_iters = 200;
  /// Stop once the duality gap per pixel drops below this.
  double gap_tol = 1e-2;
  double step = 0.25;
  std::size_t gap_check_every = 10;
};

struct TvResult {
  RealImage image;
  std::size_t iterations = 0;
  double gap = 0.0;
};

/// Rudin-Osher-Fatemi denoising, argmin_u 0.5 |u - x|^2 + gamma TV(u), with
/// isotropic TV and Chambolle's dual projection iteration.
TvResult tv_denoise_detailed(const RealImage& x, double sigma, const TvOptions& opts = {});
RealImage tv_denoise(const RealImage& x, double sigma, const TvOptions& opts = {});

class TvDenoiser final : public Denoiser {
 public:
  explicit TvDenoiser(TvOptions opts = {}, std::string name = "tv") : opts_(opts), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  const TvOptions& options() const { return opts_; }

 protected:
  RealImage run(const RealImage& x, double sigma) const override { return tv_denoise(x, sigma, opts_); }

 private:
  TvOptions opts_;
  std::string name_;
};

struct NlmOptions {
  std::size_t patch_radius = 3;   // 7x7 patches
  std::size_t search_radius = 10; // 21x21 window
  double h_per_sigma = 0.4;
};

/// Non-local means with weights exp(-max(d^2 - 2 sigma^2, 0) / h^2).
RealImage nlm_denoise(const RealImage& x, double sigma, const NlmOptions& opts = {});

class NlmDenoiser final : public Denoiser {
 public:
  explicit NlmDenoiser(NlmOptions opts = {}, std::string name = "nlm") : opts_(opts), name_(std::move(name)) {}
  std::string name() const override { return name_; }

 protected:
  RealImage run(const RealImage& x, double sigma) const override { return nlm_denoise(x, sigma, opts_); }

 private:
  NlmOptions opts_;
  std::string name_;
};

enum class DenoiserKind { Identity, Median, GaussianBlur, Tv, Nlm, External };

std::string to_string(DenoiserKind kind);
DenoiserKind denoiser_kind_from_string(const std::string& name);

/// Everything needed to construct a denoiser; only the fields of `kind` are read.
struct DenoiserSpec {
  std::string name;
  DenoiserKind kind = DenoiserKind::Identity;
  std::size_t median_radius = 1;
  double blur_width = 1.0;
  TvOptions tv{};
  NlmOptions nlm{};
  std::vector<std::string> command;
  std::chrono::milliseconds timeout{30000};
};

std::shared_ptr<const Denoiser> make_denoiser(const DenoiserSpec& spec);

/// Name -> denoiser map with unique names.
class DenoiserRegistry {
 public:
  void add(std::shared_ptr<const Denoiser> denoiser);
  std::shared_ptr<const Denoiser> get(const std::string& name) const;
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  std::vector<std::string> names() const;

  /// identity, median, gaussian_blur, tv and nlm with default settings.
  static DenoiserRegistry builtin();

 private:
  std::map<std::string, std::shared_ptr<const Denoiser>> entries_;
};

inline constexpr std::array<double, 4> kDefaultSigmaSchedule{60.0, 40.0, 20.0, 10.0};

struct DenoiserStage {
  std::shared_ptr<const Denoiser> denoiser;
  double sigma = 0.0;
};

/// Ordered (denoiser, sigma) stages with strictly decreasing sigma.
class DenoiserBank {
 public:
  explicit DenoiserBank(std::vector<DenoiserStage> stages);
  static DenoiserBank with_schedule(std::shared_ptr<const Denoiser> denoiser,
                                    std::vector<double> sigmas = {kDefaultSigmaSchedule.begin(),
                                                                  kDefaultSigmaSchedule.end()});

  const std::vector<DenoiserStage>& stages() const { return stages_; }
  std::size_t size() const { return stages_.size(); }

 private:
  std::vector<DenoiserStage> stages_;
};

}  // namespace prdeep
