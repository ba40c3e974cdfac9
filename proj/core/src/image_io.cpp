#include "prdeep/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>

namespace prdeep {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open image " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Reads one whitespace-delimited PNM header token, skipping comments.
std::string next_token(const std::string& bytes, std::size_t& pos) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return bytes.substr(start, pos - start);
}

std::size_t parse_header_number(const std::string& token, const std::filesystem::path& path, const char* field) {
  if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw FormatError(path.string() + ": invalid PGM " + field);
  }
  return std::stoul(token);
}

RealImage decode_pgm(const std::string& bytes, const std::filesystem::path& path) {
  std::size_t pos = 2;
  const std::size_t width = parse_header_number(next_token(bytes, pos), path, "width");
  const std::size_t height = parse_header_number(next_token(bytes, pos), path, "height");
  const std::size_t maxval = parse_header_number(next_token(bytes, pos), path, "maxval");
  if (maxval == 0 || maxval > 255) {
    throw FormatError(path.string() + ": unsupported PGM bit depth (maxval " + std::to_string(maxval) + ", need <= 255)");
  }
  ++pos;  // single whitespace after maxval
  if (width == 0 || height == 0) throw FormatError(path.string() + ": empty PGM");
  if (bytes.size() < pos + width * height) throw FormatError(path.string() + ": truncated PGM pixel data");

  RealImage image(Shape{height, width});
  for (std::size_t i = 0; i < width * height; ++i) image[i] = static_cast<unsigned char>(bytes[pos + i]);
  return image;
}

RealImage decode_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&png, path.c_str()) == 0) {
    throw FormatError(path.string() + ": " + png.message);
  }
  const auto fail = [&](const std::string& why) {
    png_image_free(&png);
    throw FormatError(path.string() + ": " + why);
  };
  if (png.format & PNG_FORMAT_FLAG_LINEAR) fail("unsupported PNG bit depth (16-bit); need 8-bit grayscale");
  if (png.format & PNG_FORMAT_FLAG_COLOR) fail("unsupported PNG color type; need 8-bit grayscale");
  if (png.format & PNG_FORMAT_FLAG_ALPHA) fail("unsupported PNG alpha channel; need 8-bit grayscale");

  png.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(png));
  if (png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr) == 0) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw FormatError(path.string() + ": " + msg);
  }
  RealImage image(Shape{png.height, png.width});
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = buffer[i];
  return image;
}

RealImage clamp_to_range(RealImage image) {
  for (auto& v : image) v = std::clamp(v, 0.0, 255.0);
  return image;
}

RealImage make_shapes(Shape shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = static_cast<double>(shape.height);
  const double w = static_cast<double>(shape.width);
  RealImage img(shape);
  const double base = 40.0 + 50.0 * u(rng);
  const double gi = 60.0 * (u(rng) - 0.5);
  const double gj = 60.0 * (u(rng) - 0.5);
  for (std::size_t i = 0; i < shape.height; ++i) {
    for (std::size_t j = 0; j < shape.width; ++j) img(i, j) = base + gi * static_cast<double>(i) / h + gj * static_cast<double>(j) / w;
  }
  const int ellipses = 6 + static_cast<int>(u(rng) * 4);
  for (int e = 0; e < ellipses; ++e) {
    const double ci = h * u(rng);
    const double cj = w * u(rng);
    const double ra = h * (0.08 + 0.22 * u(rng));
    const double rb = w * (0.08 + 0.22 * u(rng));
    const double theta = std::numbers::pi * u(rng);
    const double level = 255.0 * u(rng);
    const double shade = 40.0 * (u(rng) - 0.5);
    for (std::size_t i = 0; i < shape.height; ++i) {
      for (std::size_t j = 0; j < shape.width; ++j) {
        const double di = static_cast<double>(i) - ci;
        const double dj = static_cast<double>(j) - cj;
        const double a = (di * std::cos(theta) + dj * std::sin(theta)) / ra;
        const double b = (-di * std::sin(theta) + dj * std::cos(theta)) / rb;
        const double r2 = a * a + b * b;
        if (r2 <= 1.0) img(i, j) = level + shade * (1.0 - r2);
      }
    }
  }
  const int bars = 2;
  for (int b = 0; b < bars; ++b) {
    const auto i0 = static_cast<std::size_t>(h * 0.8 * u(rng));
    const auto j0 = static_cast<std::size_t>(w * 0.8 * u(rng));
    const auto bh = static_cast<std::size_t>(std::max(2.0, h * (0.05 + 0.2 * u(rng))));
    const auto bw = static_cast<std::size_t>(std::max(2.0, w * (0.05 + 0.2 * u(rng))));
    const double level = 255.0 * u(rng);
    for (std::size_t i = i0; i < std::min(shape.height, i0 + bh); ++i) {
      for (std::size_t j = j0; j < std::min(shape.width, j0 + bw); ++j) img(i, j) = level;
    }
  }
  return clamp_to_range(std::move(img));
}

RealImage make_texture(Shape shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = static_cast<double>(shape.height);
  const double w = static_cast<double>(shape.width);
  RealImage img(shape);
  constexpr int waves = 12;
  for (int k = 0; k < waves; ++k) {
    const double fi = 2.0 * std::numbers::pi * (u(rng) * 5.0) / h;
    const double fj = 2.0 * std::numbers::pi * (u(rng) * 5.0 - 2.5) / w;
    const double phase = 2.0 * std::numbers::pi * u(rng);
    const double amp = 1.0 / (1.0 + k);
    for (std::size_t i = 0; i < shape.height; ++i) {
      for (std::size_t j = 0; j < shape.width; ++j) img(i, j) += amp * std::cos(fi * static_cast<double>(i) + fj * static_cast<double>(j) + phase);
    }
  }
  const auto [lo, hi] = std::minmax_element(img.begin(), img.end());
  const double mn = *lo;
  const double span = std::max(*hi - mn, 1e-9);
  for (auto& v : img) v = 60.0 + 140.0 * (v - mn) / span;

  for (int e = 0; e < 3; ++e) {
    const double ni = u(rng) - 0.5;
    const double nj = u(rng) - 0.5;
    const double c = u(rng);
    const double step = 70.0 * (u(rng) - 0.5);
    for (std::size_t i = 0; i < shape.height; ++i) {
      for (std::size_t j = 0; j < shape.width; ++j) {
        if (ni * (static_cast<double>(i) / h - c) + nj * (static_cast<double>(j) / w - c) > 0.0) img(i, j) += step;
      }
    }
  }
  return clamp_to_range(std::move(img));
}

RealImage make_cells(Shape shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = static_cast<double>(shape.height);
  const double w = static_cast<double>(shape.width);
  RealImage img(shape, 12.0);
  const int cells = 5 + static_cast<int>(u(rng) * 5);
  for (int c = 0; c < cells; ++c) {
    const double ci = h * (0.1 + 0.8 * u(rng));
    const double cj = w * (0.1 + 0.8 * u(rng));
    const double ra = h * (0.04 + 0.08 * u(rng));
    const double rb = ra * (1.5 + 1.5 * u(rng));
    const double theta = std::numbers::pi * u(rng);
    const double level = 140.0 + 100.0 * u(rng);
    for (std::size_t i = 0; i < shape.height; ++i) {
      for (std::size_t j = 0; j < shape.width; ++j) {
        const double di = static_cast<double>(i) - ci;
        const double dj = static_cast<double>(j) - cj;
        const double a = (di * std::cos(theta) + dj * std::sin(theta)) / ra;
        const double b = (-di * std::sin(theta) + dj * std::cos(theta)) / rb;
        const double r2 = a * a + b * b;
        img(i, j) = std::max(img(i, j), 12.0 + (level - 12.0) * std::exp(-r2 * r2));
      }
    }
  }
  return clamp_to_range(std::move(img));
}

RealImage make_galaxy(Shape shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = static_cast<double>(shape.height);
  const double w = static_cast<double>(shape.width);
  RealImage img(shape);
  const double ci = h * (0.4 + 0.2 * u(rng));
  const double cj = w * (0.4 + 0.2 * u(rng));
  const double scale = 0.18 * std::min(h, w) * (0.8 + 0.4 * u(rng));
  const double twist = 2.0 + 2.0 * u(rng);
  const double rot = 2.0 * std::numbers::pi * u(rng);
  for (std::size_t i = 0; i < shape.height; ++i) {
    for (std::size_t j = 0; j < shape.width; ++j) {
      const double di = static_cast<double>(i) - ci;
      const double dj = static_cast<double>(j) - cj;
      const double r = std::sqrt(di * di + dj * dj) + 1e-9;
      const double theta = std::atan2(di, dj);
      const double arms = 1.0 + 0.7 * std::cos(2.0 * theta - twist * std::log(r / scale + 1.0) + rot);
      img(i, j) = 8.0 + 170.0 * std::exp(-r / scale) * arms + 60.0 * std::exp(-(r * r) / (0.08 * scale * scale));
    }
  }
  const int stars = 10;
  for (int s = 0; s < stars; ++s) {
    const double si = h * u(rng);
    const double sj = w * u(rng);
    const double level = 100.0 + 155.0 * u(rng);
    const double rad = 0.6 + 0.8 * u(rng);
    for (std::size_t i = 0; i < shape.height; ++i) {
      for (std::size_t j = 0; j < shape.width; ++j) {
        const double di = static_cast<double>(i) - si;
        const double dj = static_cast<double>(j) - sj;
        img(i, j) += level * std::exp(-(di * di + dj * dj) / (2.0 * rad * rad));
      }
    }
  }
  return clamp_to_range(std::move(img));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto at = s.find(sep, start);
    parts.push_back(s.substr(start, at - start));
    if (at == std::string::npos) break;
    start = at + 1;
  }
  return parts;
}

}  // namespace

RealImage load_image(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    if (bytes[1] == '5') return decode_pgm(bytes, path);
    throw FormatError(path.string() + ": unsupported PNM variant P" + std::string(1, bytes[1]) + " (need binary P5)");
  }
  static constexpr unsigned char png_magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(png_magic, png_magic + 8, reinterpret_cast<const unsigned char*>(bytes.data()))) {
    return decode_png(path);
  }
  throw FormatError(path.string() + ": unrecognised image format (need P5 PGM or PNG)");
}

void save_pgm(const std::filesystem::path& path, const RealImage& image) {
  std::string bytes = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  bytes.reserve(bytes.size() + image.size());
  for (double v : image) {
    const double clamped = std::isfinite(v) ? std::clamp(std::round(v), 0.0, 255.0) : 0.0;
    bytes.push_back(static_cast<char>(static_cast<unsigned char>(clamped)));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::Shapes: return "shapes";
    case SyntheticKind::Texture: return "texture";
    case SyntheticKind::Cells: return "cells";
    case SyntheticKind::Galaxy: return "galaxy";
  }
  return "unknown";
}

SyntheticKind synthetic_kind_from_string(const std::string& name) {
  for (auto kind : {SyntheticKind::Shapes, SyntheticKind::Texture, SyntheticKind::Cells, SyntheticKind::Galaxy}) {
    if (to_string(kind) == name) return kind;
  }
  throw ParameterError("unknown synthetic image kind '" + name + "'");
}

RealImage synthetic_image(SyntheticKind kind, Shape shape, std::uint64_t seed) {
  if (shape.size() == 0) throw ShapeError("synthetic image needs a non-empty shape");
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(kind));
  switch (kind) {
    case SyntheticKind::Shapes: return make_shapes(shape, rng);
    case SyntheticKind::Texture: return make_texture(shape, rng);
    case SyntheticKind::Cells: return make_cells(shape, rng);
    case SyntheticKind::Galaxy: return make_galaxy(shape, rng);
  }
  throw ParameterError("unhandled synthetic kind");
}

RealImage resolve_image(const std::string& ref, Shape shape) {
  if (ref.rfind("synthetic:", 0) == 0) {
    const auto parts = split(ref, ':');
    if (parts.size() != 3) throw ParameterError("synthetic image reference must be synthetic:<kind>:<seed>");
    return synthetic_image(synthetic_kind_from_string(parts[1]), shape, std::stoull(parts[2]));
  }
  RealImage image = load_image(ref);
  if (image.shape() == shape) return image;
  if (image.height() < shape.height || image.width() < shape.width) {
    throw ShapeError(ref + ": image is smaller than the operator shape");
  }
  return crop(image, shape, Offset{(image.height() - shape.height) / 2, (image.width() - shape.width) / 2});
}

std::string image_id(const std::string& ref) {
  if (ref.rfind("synthetic:", 0) == 0) {
    std::string id = ref;
    std::replace(id.begin(), id.end(), ':', '-');
    return id;
  }
  return std::filesystem::path(ref).stem().string();
}

}  // namespace prdeep
