// Minimal PRDN1 plugin for protocol tests.
//
//   echo_plugin [mode]
//     echo         return the pixels unchanged (default)
//     add-sigma    return pixel + sigma
//     shrink       answer with one pixel less than requested
//     bad-version  advertise protocol version 2
//     bad-magic    send "PRDX" instead of "PRDN"
//     error        answer every request with status 1
//     crash        write to stderr and exit 3 after reading a request
//     hang         read a request and never answer
//     silent       never send the handshake

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

namespace {

bool read_exact(void* buf, std::size_t n) { return std::fread(buf, 1, n, stdin) == n; }

void write_exact(const void* buf, std::size_t n) { std::fwrite(buf, 1, n, stdout); }

// The test host is little-endian; the plugin writes native byte order.
template <class T>
bool read_value(T& v) {
  return read_exact(&v, sizeof v);
}

template <class T>
void write_value(const T& v) {
  write_exact(&v, sizeof v);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "echo";

  if (mode == "silent") {
    std::this_thread::sleep_for(std::chrono::hours(1));
    return 0;
  }
  write_exact(mode == "bad-magic" ? "PRDX" : "PRDN", 4);
  write_value<std::uint8_t>(mode == "bad-version" ? 2 : 1);
  std::fflush(stdout);

  for (;;) {
    std::uint32_t h = 0, w = 0;
    float sigma = 0.0f;
    if (!read_value(h)) return 0;  // stdin closed: clean shutdown
    if (!read_value(w) || !read_value(sigma)) return 4;
    std::vector<float> pixels(static_cast<std::size_t>(h) * w);
    if (!read_exact(pixels.data(), pixels.size() * sizeof(float))) return 4;

    if (mode == "crash") {
      std::fprintf(stderr, "echo_plugin: simulated crash on %ux%u request\n", h, w);
      return 3;
    }
    if (mode == "hang") {
      std::this_thread::sleep_for(std::chrono::hours(1));
      return 0;
    }
    if (mode == "error") {
      const std::string msg = "cannot denoise at sigma " + std::to_string(sigma);
      write_value<std::uint8_t>(1);
      write_value<std::uint32_t>(static_cast<std::uint32_t>(msg.size()));
      write_exact(msg.data(), msg.size());
      std::fflush(stdout);
      continue;
    }
    if (mode == "add-sigma") {
      for (auto& p : pixels) p += sigma;
    }
    std::size_t count = pixels.size();
    if (mode == "shrink" && count > 0) --count;
    write_value<std::uint8_t>(0);
    write_exact(pixels.data(), count * sizeof(float));
    std::fflush(stdout);
    if (mode == "shrink") return 0;
  }
}
