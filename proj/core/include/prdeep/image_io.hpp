#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "prdeep/field.hpp"

namespace prdeep {

/// Reads an 8-bit grayscale binary PGM (P5) or 8-bit grayscale PNG.
/// Anything else raises FormatError naming the offending property.
RealImage load_image(const std::filesystem::path& path);

/// Writes a P5 PGM, rounding and clamping to [0, 255].
void save_pgm(const std::filesystem::path& path, const RealImage& image);

enum class SyntheticKind {
  Shapes,   // piecewise-smooth cartoon: gradient background, ellipses, bars
  Texture,  // band-limited random field with a few hard edges
  Cells,    // bright blobs on a dark background, microscopy-like
  Galaxy,   // diffuse spiral-ish glow with point sources
};

std::string to_string(SyntheticKind kind);
SyntheticKind synthetic_kind_from_string(const std::string& name);

/// Deterministic procedurally generated test image with values in [0, 255].
RealImage synthetic_image(SyntheticKind kind, Shape shape, std::uint64_t seed);

/// Resolves an image reference: either a file path or
/// "synthetic:<kind>:<seed>", generated at `shape`.
RealImage resolve_image(const std::string& ref, Shape shape);

/// Stable identifier for an image reference (file stem, or synthetic-<kind>-<seed>).
std::string image_id(const std::string& ref);

}  // namespace prdeep
