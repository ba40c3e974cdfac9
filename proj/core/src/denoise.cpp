#include "prdeep/denoise.hpp"

#include <algorithm>
#include <cmath>

#include "prdeep/external_denoiser.hpp"

namespace prdeep {
namespace {

// Symmetric extension: -1 -> 0, n -> n-1.
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto len = static_cast<std::ptrdiff_t>(n);
  if (len == 1) return 0;
  const std::ptrdiff_t period = 2 * len;
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < len ? i : period - 1 - i);
}

std::vector<double> circular_kernel(double width, std::size_t n) {
  std::vector<double> kernel(n, 0.0);
  if (width <= 0.0) {
    kernel[0] = 1.0;
    return kernel;
  }
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * width));
  double total = 0.0;
  for (std::ptrdiff_t t = -radius; t <= radius; ++t) total += std::exp(-0.5 * static_cast<double>(t * t) / (width * width));
  const auto len = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
    const double w = std::exp(-0.5 * static_cast<double>(t * t) / (width * width)) / total;
    kernel[static_cast<std::size_t>(((t % len) + len) % len)] += w;
  }
  return kernel;
}

}  // namespace

RealImage Denoiser::operator()(const RealImage& x, double sigma) const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("denoiser sigma must be finite and >= 0");
  if (!all_finite(x.values())) throw NumericError("denoiser input is not finite");
  RealImage out = run(x, sigma);
  if (out.shape() != x.shape()) throw ShapeError("denoiser '" + name() + "' changed the image dimensions");
  if (!all_finite(out.values())) throw NumericError("denoiser '" + name() + "' produced non-finite output");
  return out;
}

RealImage median_filter(const RealImage& x, std::size_t radius) {
  const auto h = x.height();
  const auto w = x.width();
  const auto r = static_cast<std::ptrdiff_t>(radius);
  RealImage out(x.shape());
  std::vector<double> window;
  window.reserve((2 * radius + 1) * (2 * radius + 1));
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      window.clear();
      for (std::ptrdiff_t di = -r; di <= r; ++di) {
        for (std::ptrdiff_t dj = -r; dj <= r; ++dj) {
          window.push_back(x(reflect(static_cast<std::ptrdiff_t>(i) + di, h), reflect(static_cast<std::ptrdiff_t>(j) + dj, w)));
        }
      }
      auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      out(i, j) = *mid;
    }
  }
  return out;
}

RealImage gaussian_blur(const RealImage& x, double width) {
  if (!(width >= 0.0)) throw ParameterError("blur width must be >= 0");
  const auto h = x.height();
  const auto w = x.width();
  const auto row_kernel = circular_kernel(width, w);
  const auto col_kernel = circular_kernel(width, h);

  RealImage tmp(x.shape());
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      double acc = 0.0;
      for (std::size_t d = 0; d < w; ++d) {
        if (row_kernel[d] != 0.0) acc += row_kernel[d] * x(i, (j + w - d) % w);
      }
      tmp(i, j) = acc;
    }
  }
  RealImage out(x.shape());
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      double acc = 0.0;
      for (std::size_t d = 0; d < h; ++d) {
        if (col_kernel[d] != 0.0) acc += col_kernel[d] * tmp((i + h - d) % h, j);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

RealImage nlm_denoise(const RealImage& x, double sigma, const NlmOptions& opts) {
  const double hpar = opts.h_per_sigma * sigma;
  if (hpar <= 0.0) return x;

  const auto h = x.height();
  const auto w = x.width();
  const auto pr = static_cast<std::ptrdiff_t>(opts.patch_radius);
  const auto sr = static_cast<std::ptrdiff_t>(opts.search_radius);
  const auto pad = pr + sr;

  // Padded copy so patch lookups need no boundary logic.
  const std::size_t ph = h + 2 * static_cast<std::size_t>(pad);
  const std::size_t pw = w + 2 * static_cast<std::size_t>(pad);
  std::vector<double> padded(ph * pw);
  for (std::size_t i = 0; i < ph; ++i) {
    for (std::size_t j = 0; j < pw; ++j) {
      padded[i * pw + j] = x(reflect(static_cast<std::ptrdiff_t>(i) - pad, h), reflect(static_cast<std::ptrdiff_t>(j) - pad, w));
    }
  }
  auto at = [&](std::ptrdiff_t i, std::ptrdiff_t j) { return padded[static_cast<std::size_t>(i + pad) * pw + static_cast<std::size_t>(j + pad)]; };

  const double patch_size = static_cast<double>((2 * pr + 1) * (2 * pr + 1));
  const double offset = 2.0 * sigma * sigma;
  const double inv_h2 = 1.0 / (hpar * hpar);

  RealImage out(x.shape());
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(h); ++i) {
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(w); ++j) {
      double weight_sum = 0.0;
      double acc = 0.0;
      for (std::ptrdiff_t si = -sr; si <= sr; ++si) {
        for (std::ptrdiff_t sj = -sr; sj <= sr; ++sj) {
          double d2 = 0.0;
          for (std::ptrdiff_t a = -pr; a <= pr; ++a) {
            for (std::ptrdiff_t b = -pr; b <= pr; ++b) {
              const double diff = at(i + a, j + b) - at(i + si + a, j + sj + b);
              d2 += diff * diff;
            }
          }
          d2 /= patch_size;
          const double weight = std::exp(-std::max(d2 - offset, 0.0) * inv_h2);
          weight_sum += weight;
          acc += weight * at(i + si, j + sj);
        }
      }
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = acc / weight_sum;
    }
  }
  return out;
}

std::string to_string(DenoiserKind kind) {
  switch (kind) {
    case DenoiserKind::Identity: return "identity";
    case DenoiserKind::Median: return "median";
    case DenoiserKind::GaussianBlur: return "gaussian_blur";
    case DenoiserKind::Tv: return "tv";
    case DenoiserKind::Nlm: return "nlm";
    case DenoiserKind::External: return "external";
  }
  return "unknown";
}

DenoiserKind denoiser_kind_from_string(const std::string& name) {
  for (auto kind : {DenoiserKind::Identity, DenoiserKind::Median, DenoiserKind::GaussianBlur, DenoiserKind::Tv,
                    DenoiserKind::Nlm, DenoiserKind::External}) {
    if (to_string(kind) == name) return kind;
  }
  throw ParameterError("unknown denoiser kind '" + name + "'");
}

std::shared_ptr<const Denoiser> make_denoiser(const DenoiserSpec& spec) {
  const std::string name = spec.name.empty() ? to_string(spec.kind) : spec.name;
  switch (spec.kind) {
    case DenoiserKind::Identity: return std::make_shared<IdentityDenoiser>(name);
    case DenoiserKind::Median: return std::make_shared<MedianDenoiser>(spec.median_radius, name);
    case DenoiserKind::GaussianBlur: return std::make_shared<GaussianBlurDenoiser>(spec.blur_width, name);
    case DenoiserKind::Tv: return std::make_shared<TvDenoiser>(spec.tv, name);
    case DenoiserKind::Nlm: return std::make_shared<NlmDenoiser>(spec.nlm, name);
    case DenoiserKind::External: return std::make_shared<ExternalDenoiser>(spec.command, spec.timeout, name);
  }
  throw ParameterError("unhandled denoiser kind");
}

void DenoiserRegistry::add(std::shared_ptr<const Denoiser> denoiser) {
  if (!denoiser) throw ParameterError("cannot register a null denoiser");
  const auto name = denoiser->name();
  if (!entries_.emplace(name, std::move(denoiser)).second) {
    throw ParameterError("denoiser name '" + name + "' is already registered");
  }
}

std::shared_ptr<const Denoiser> DenoiserRegistry::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ParameterError("no denoiser named '" + name + "'");
  return it->second;
}

std::vector<std::string> DenoiserRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

DenoiserRegistry DenoiserRegistry::builtin() {
  DenoiserRegistry registry;
  registry.add(std::make_shared<IdentityDenoiser>());
  registry.add(std::make_shared<MedianDenoiser>());
  registry.add(std::make_shared<GaussianBlurDenoiser>());
  registry.add(std::make_shared<TvDenoiser>());
  registry.add(std::make_shared<NlmDenoiser>());
  return registry;
}

DenoiserBank::DenoiserBank(std::vector<DenoiserStage> stages) : stages_(std::move(stages)) {
  if (stages_.empty()) throw ParameterError("denoiser bank must not be empty");
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    if (!stages_[i].denoiser) throw ParameterError("denoiser bank stage without a denoiser");
    if (!(stages_[i].sigma >= 0.0)) throw ParameterError("denoiser bank sigma must be >= 0");
    if (i > 0 && !(stages_[i].sigma < stages_[i - 1].sigma)) {
      throw ParameterError("denoiser bank sigmas must be strictly decreasing");
    }
  }
}

DenoiserBank DenoiserBank::with_schedule(std::shared_ptr<const Denoiser> denoiser, std::vector<double> sigmas) {
  std::vector<DenoiserStage> stages;
  for (double s : sigmas) stages.push_back({denoiser, s});
  return DenoiserBank(std::move(stages));
}

}  // namespace prdeep
