#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "prdeep/denoise.hpp"

namespace prdeep {

/// Failure talking to an external denoiser. `diagnostics()` holds whatever the
/// child wrote to stderr.
class ExternalDenoiserError : public Error {
 public:
  ExternalDenoiserError(const std::string& what, std::string diagnostics)
      : Error(diagnostics.empty() ? what : what + "\n--- plugin stderr ---\n" + diagnostics),
        diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  std::string diagnostics_;
};

/// Bad magic, wrong version or malformed frame.
class ProtocolError : public ExternalDenoiserError {
 public:
  using ExternalDenoiserError::ExternalDenoiserError;
};

class TimeoutError : public ExternalDenoiserError {
 public:
  using ExternalDenoiserError::ExternalDenoiserError;
};

/// The child could not be started or exited mid-conversation.
class ProcessError : public ExternalDenoiserError {
 public:
  using ExternalDenoiserError::ExternalDenoiserError;
};

/// The child answered a request with status 1.
class PluginError : public ExternalDenoiserError {
 public:
  using ExternalDenoiserError::ExternalDenoiserError;
};

inline constexpr std::uint8_t kPrdnVersion = 1;

/// Denoiser served by a child process speaking PRDN1 over stdin/stdout.
///
/// Handshake: child writes "PRDN" + u8 version. Request: u32 height, u32 width,
/// f32 sigma, height*width f32 pixels (row-major, little-endian). Response:
/// u8 status; 0 is followed by the pixels, 1 by u32 length + UTF-8 message.
/// Closing stdin asks the child to exit.
///
/// Requests are serialised per instance. After a timeout or protocol error the
/// process is considered broken and every later request fails fast.
class ExternalDenoiser final : public Denoiser {
 public:
  ExternalDenoiser(std::vector<std::string> command,
                   std::chrono::milliseconds timeout = std::chrono::seconds(30),
                   std::string name = "external");
  ~ExternalDenoiser() override;

  ExternalDenoiser(const ExternalDenoiser&) = delete;
  ExternalDenoiser& operator=(const ExternalDenoiser&) = delete;

  std::string name() const override { return name_; }
  std::uint8_t protocol_version() const { return version_; }

  /// Closes the child's stdin and waits for it; returns its exit code.
  int shutdown();

 protected:
  RealImage run(const RealImage& x, double sigma) const override;

 private:
  struct Process;

  std::string name_;
  std::chrono::milliseconds timeout_;
  std::unique_ptr<Process> process_;
  std::uint8_t version_ = 0;
  mutable std::mutex mutex_;
};

/// One-shot helper: start the plugin, denoise one image, shut it down.
RealImage external_denoise(const std::vector<std::string>& command, const RealImage& x, double sigma,
                           std::chrono::milliseconds timeout = std::chrono::seconds(30));

}  // namespace prdeep
