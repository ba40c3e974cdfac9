#include <gtest/gtest.h>
#include <png.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "oracles.hpp"
#include "prdeep/image_io.hpp"

using namespace prdeep;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("prdeep-io-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_png(const fs::path& p, png_uint_32 format, const void* pixels, png_uint_32 w, png_uint_32 h) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = w;
  img.height = h;
  img.format = format;
  ASSERT_NE(png_image_write_to_file(&img, p.c_str(), 0, pixels, 0, nullptr), 0) << img.message;
}

std::string error_of(const fs::path& p) {
  try {
    load_image(p);
  } catch (const FormatError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Pgm, LoadsHandWrittenBytes) {
  TempDir dir;
  write_bytes(dir / "a.pgm", std::string("P5\n# comment\n2 2\n255\n") + std::string("\x00\xff\x11\x22", 4));
  const RealImage x = load_image(dir / "a.pgm");
  ASSERT_EQ(x.shape(), (Shape{2, 2}));
  EXPECT_EQ(x[0], 0.0);
  EXPECT_EQ(x[1], 255.0);
  EXPECT_EQ(x[2], 17.0);
  EXPECT_EQ(x[3], 34.0);
}

TEST(Pgm, RoundTripIsBitExact) {
  TempDir dir;
  std::mt19937_64 rng(1);
  RealImage x({13, 7});
  std::uniform_int_distribution<int> u(0, 255);
  for (auto& v : x) v = u(rng);
  save_pgm(dir / "x.pgm", x);
  EXPECT_EQ(load_image(dir / "x.pgm"), x);
  const std::string first = read_bytes(dir / "x.pgm");
  save_pgm(dir / "y.pgm", load_image(dir / "x.pgm"));
  EXPECT_EQ(read_bytes(dir / "y.pgm"), first);
}

TEST(Pgm, SaveRoundsAndClamps) {
  TempDir dir;
  RealImage x({1, 4});
  x[0] = -5.0;
  x[1] = 300.0;
  x[2] = 12.4;
  x[3] = 12.6;
  save_pgm(dir / "c.pgm", x);
  const RealImage y = load_image(dir / "c.pgm");
  EXPECT_EQ(y[0], 0.0);
  EXPECT_EQ(y[1], 255.0);
  EXPECT_EQ(y[2], 12.0);
  EXPECT_EQ(y[3], 13.0);
}

TEST(Pgm, Rejections) {
  TempDir dir;
  write_bytes(dir / "p2.pgm", "P2\n2 2\n255\n0 1 2 3\n");
  EXPECT_NE(error_of(dir / "p2.pgm").find("P2"), std::string::npos);
  write_bytes(dir / "deep.pgm", "P5\n1 1\n65535\n\x01\x02");
  EXPECT_NE(error_of(dir / "deep.pgm").find("bit depth"), std::string::npos);
  write_bytes(dir / "short.pgm", "P5\n4 4\n255\nabc");
  EXPECT_NE(error_of(dir / "short.pgm").find("truncated"), std::string::npos);
  write_bytes(dir / "junk.bin", "hello");
  EXPECT_NE(error_of(dir / "junk.bin").find("unrecognised"), std::string::npos);
  EXPECT_THROW(load_image(dir / "missing.pgm"), FormatError);
}

TEST(Png, LoadsEightBitGray) {
  TempDir dir;
  const unsigned char px[6] = {0, 10, 20, 200, 254, 255};
  write_png(dir / "g.png", PNG_FORMAT_GRAY, px, 3, 2);
  const RealImage x = load_image(dir / "g.png");
  ASSERT_EQ(x.shape(), (Shape{2, 3}));
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(x[i], px[i]);
}

TEST(Png, SixteenBitIsRejected) {
  TempDir dir;
  const png_uint_16 px[4] = {0, 1000, 40000, 65535};
  write_png(dir / "d.png", PNG_FORMAT_LINEAR_Y, px, 2, 2);
  EXPECT_NE(error_of(dir / "d.png").find("16-bit"), std::string::npos);
}

TEST(Png, ColorIsRejected) {
  TempDir dir;
  const unsigned char px[12] = {255, 0, 0, 0, 255, 0, 0, 0, 255, 1, 2, 3};
  write_png(dir / "c.png", PNG_FORMAT_RGB, px, 2, 2);
  EXPECT_NE(error_of(dir / "c.png").find("color"), std::string::npos);
}

TEST(Synthetic, DeterministicAndInRange) {
  for (auto kind : {SyntheticKind::Shapes, SyntheticKind::Texture, SyntheticKind::Cells, SyntheticKind::Galaxy}) {
    const RealImage a = synthetic_image(kind, {48, 40}, 3);
    EXPECT_EQ(a, synthetic_image(kind, {48, 40}, 3)) << to_string(kind);
    EXPECT_NE(a, synthetic_image(kind, {48, 40}, 4)) << to_string(kind);
    const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
    EXPECT_GE(*lo, 0.0);
    EXPECT_LE(*hi, 255.0);
    EXPECT_GT(*hi - *lo, 50.0) << to_string(kind);
    EXPECT_EQ(synthetic_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(synthetic_kind_from_string("lena"), ParameterError);
}

TEST(Resolve, SyntheticAndFileReferences) {
  EXPECT_EQ(resolve_image("synthetic:cells:7", {16, 16}), synthetic_image(SyntheticKind::Cells, {16, 16}, 7));
  EXPECT_EQ(image_id("synthetic:cells:7"), "synthetic-cells-7");
  EXPECT_EQ(image_id("/data/images/boat.png"), "boat");
  EXPECT_THROW(resolve_image("synthetic:cells", {4, 4}), ParameterError);

  TempDir dir;
  RealImage big({6, 8});
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<double>(i);
  save_pgm(dir / "big.pgm", big);
  const RealImage centre = resolve_image((dir / "big.pgm").string(), {2, 4});
  EXPECT_EQ(centre, crop(big, {2, 4}, {2, 2}));
  EXPECT_THROW(resolve_image((dir / "big.pgm").string(), {8, 8}), ShapeError);
}
