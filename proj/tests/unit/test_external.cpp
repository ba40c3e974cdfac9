#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include "oracles.hpp"
#include "prdeep/external_denoiser.hpp"

using namespace prdeep;
using namespace std::chrono_literals;

namespace {

std::vector<std::string> plugin(const std::string& mode) { return {PRDEEP_ECHO_PLUGIN, mode}; }

float to_f32(double v) { return static_cast<float>(v); }

}  // namespace

TEST(Prdn1, EchoRoundTripIsExactAtF32) {
  std::mt19937_64 rng(1);
  const RealImage x = oracle::random_image({33, 17}, rng, -20.0, 300.0);
  ExternalDenoiser d(plugin("echo"), 10s, "echo");
  EXPECT_EQ(d.protocol_version(), kPrdnVersion);
  const RealImage out = d(x, 25.0);
  ASSERT_EQ(out.shape(), x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(out[i], static_cast<double>(to_f32(x[i])));
  EXPECT_EQ(d.shutdown(), 0);
}

TEST(Prdn1, F32ValuesSurviveBitExact) {
  // Values exactly representable in f32 come back unchanged.
  RealImage x({2, 3});
  const double vals[] = {0.0, -0.0, 1.5, 255.0, std::ldexp(1.0, -100), 3.0517578125e-05};
  for (std::size_t i = 0; i < 6; ++i) x[i] = vals[i];
  const RealImage out = external_denoise(plugin("echo"), x, 0.0, 10s);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(std::memcmp(&out[i], &x[i], sizeof(double)), 0) << i;
  }
}

TEST(Prdn1, SigmaIsTransmitted) {
  ExternalDenoiser d(plugin("add-sigma"), 10s);
  const RealImage out = d(RealImage({4, 4}, 10.0), 2.5);
  for (double v : out) EXPECT_EQ(v, 12.5);
  // Several requests on one process.
  for (int i = 0; i < 5; ++i) EXPECT_EQ(d(RealImage({1, 2}, 1.0), i)[1], 1.0 + i);
}

TEST(Prdn1, ConcurrentRequestsAreSerialised) {
  ExternalDenoiser d(plugin("add-sigma"), 10s);
  std::vector<std::thread> threads;
  std::vector<int> ok(8, 0);
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      const RealImage out = d(RealImage({16, 16}, static_cast<double>(t)), 1.0);
      ok[t] = out[255] == t + 1.0;
    });
  }
  for (auto& th : threads) th.join();
  for (int v : ok) EXPECT_EQ(v, 1);
}

TEST(Prdn1, VersionMismatchIsAHandshakeError) {
  EXPECT_THROW(ExternalDenoiser(plugin("bad-version"), 5s), ProtocolError);
  EXPECT_THROW(ExternalDenoiser(plugin("bad-magic"), 5s), ProtocolError);
}

TEST(Prdn1, PluginErrorCarriesMessage) {
  ExternalDenoiser d(plugin("error"), 5s);
  try {
    d(RealImage({2, 2}, 0.0), 7.0);
    FAIL() << "expected PluginError";
  } catch (const PluginError& e) {
    EXPECT_NE(std::string(e.what()).find("cannot denoise at sigma 7"), std::string::npos);
  }
  // An error response leaves the process usable.
  EXPECT_THROW(d(RealImage({2, 2}, 0.0), 1.0), PluginError);
}

TEST(Prdn1, CrashReportsStderr) {
  ExternalDenoiser d(plugin("crash"), 5s);
  try {
    d(RealImage({3, 5}, 1.0), 1.0);
    FAIL() << "expected ProcessError";
  } catch (const ProcessError& e) {
    EXPECT_NE(e.diagnostics().find("simulated crash on 3x5"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("code 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(d(RealImage({3, 5}, 1.0), 1.0), ProcessError);
}

TEST(Prdn1, TruncatedResponseFails) {
  ExternalDenoiser d(plugin("shrink"), 5s);
  EXPECT_THROW(d(RealImage({4, 4}, 1.0), 1.0), ExternalDenoiserError);
}

TEST(Prdn1, HangTimesOutAndBreaksProcess) {
  ExternalDenoiser d(plugin("hang"), 300ms);
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(d(RealImage({2, 2}, 1.0), 1.0), TimeoutError);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 5s);
  EXPECT_THROW(d(RealImage({2, 2}, 1.0), 1.0), ProcessError);
}

TEST(Prdn1, SilentPluginTimesOutDuringHandshake) {
  EXPECT_THROW(ExternalDenoiser(plugin("silent"), 300ms), TimeoutError);
}

TEST(Prdn1, MissingExecutable) {
  EXPECT_THROW(ExternalDenoiser({"/nonexistent/prdn-plugin"}, 1s), ExternalDenoiserError);
  EXPECT_THROW(ExternalDenoiser({}, 1s), ParameterError);
}

TEST(Prdn1, ConfiguredThroughSpec) {
  DenoiserSpec spec;
  spec.kind = DenoiserKind::External;
  spec.command = plugin("echo");
  spec.name = "plugin-echo";
  const auto d = make_denoiser(spec);
  EXPECT_EQ(d->name(), "plugin-echo");
  EXPECT_EQ((*d)(RealImage({2, 2}, 3.0), 1.0), RealImage({2, 2}, 3.0));
}
