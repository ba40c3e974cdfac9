#include "prdeep/external_denoiser.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <limits>
#include <thread>

#include "binary_io.hpp"

extern char** environ;

namespace prdeep {

struct ExternalDenoiser::Process {
  pid_t pid = -1;
  int to_child = -1;    // socket end, written with MSG_NOSIGNAL
  int from_child = -1;  // pipe read end
  int err_fd = -1;
  bool broken = false;
  bool exited = false;
  int exit_code = -1;

  std::mutex err_mutex;
  std::string err_text;
  std::thread err_reader;

  std::string diagnostics() {
    std::lock_guard lock(err_mutex);
    return err_text;
  }

  void start_stderr_reader() {
    err_reader = std::thread([this] {
      char buf[4096];
      for (;;) {
        const ssize_t got = ::read(err_fd, buf, sizeof buf);
        if (got > 0) {
          std::lock_guard lock(err_mutex);
          err_text.append(buf, static_cast<std::size_t>(got));
          if (err_text.size() > 64 * 1024) err_text.erase(0, err_text.size() - 64 * 1024);
        } else if (got == 0 || errno != EINTR) {
          break;
        }
      }
    });
  }

  void close_stdin() {
    if (to_child >= 0) {
      ::close(to_child);
      to_child = -1;
    }
  }

  // Reaps the child, killing it if it does not leave within `grace`.
  void reap(std::chrono::milliseconds grace) {
    if (pid <= 0 || exited) return;
    const auto deadline = std::chrono::steady_clock::now() + grace;
    int status = 0;
    for (;;) {
      const pid_t r = ::waitpid(pid, &status, WNOHANG);
      if (r == pid) break;
      if (r < 0 && errno != EINTR) {
        exited = true;
        return;
      }
      if (std::chrono::steady_clock::now() >= deadline) {
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    exited = true;
    exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  }

  ~Process() {
    close_stdin();
    reap(std::chrono::seconds(2));
    if (from_child >= 0) ::close(from_child);
    if (err_reader.joinable()) err_reader.join();
    if (err_fd >= 0) ::close(err_fd);
  }

  [[noreturn]] void fail_exited(const std::string& context) {
    broken = true;
    reap(std::chrono::milliseconds(500));
    if (err_reader.joinable()) err_reader.join();
    throw ProcessError(context + ": plugin exited (code " + std::to_string(exit_code) + ")", diagnostics());
  }

  void write_all(const std::string& bytes) {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
      const ssize_t n = ::send(to_child, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        fail_exited("writing request");
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::string read_exact(std::size_t count, std::chrono::steady_clock::time_point deadline, const char* context) {
    std::string out(count, '\0');
    std::size_t got = 0;
    while (got < count) {
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (remaining.count() <= 0) {
        broken = true;
        throw TimeoutError(std::string(context) + ": timed out waiting for plugin", diagnostics());
      }
      pollfd pfd{from_child, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), std::numeric_limits<int>::max())));
      if (ready < 0) {
        if (errno == EINTR) continue;
        broken = true;
        throw ProcessError(std::string(context) + ": poll failed: " + std::strerror(errno), diagnostics());
      }
      if (ready == 0) continue;
      const ssize_t n = ::read(from_child, out.data() + got, count - got);
      if (n < 0) {
        if (errno == EINTR) continue;
        broken = true;
        throw ProcessError(std::string(context) + ": read failed: " + std::strerror(errno), diagnostics());
      }
      if (n == 0) fail_exited(context);
      got += static_cast<std::size_t>(n);
    }
    return out;
  }
};

ExternalDenoiser::ExternalDenoiser(std::vector<std::string> command, std::chrono::milliseconds timeout, std::string name)
    : name_(std::move(name)), timeout_(timeout), process_(std::make_unique<Process>()) {
  if (command.empty()) throw ParameterError("external denoiser needs a command line");

  int in_pair[2];
  int out_pipe[2];
  int err_pipe[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0) {
    throw ProcessError(std::string("socketpair failed: ") + std::strerror(errno), {});
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0 || ::pipe2(err_pipe, O_CLOEXEC) != 0) {
    throw ProcessError(std::string("pipe failed: ") + std::strerror(errno), {});
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pair[1], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err_pipe[1], STDERR_FILENO);

  std::vector<char*> argv;
  for (auto& arg : command) argv.push_back(arg.data());
  argv.push_back(nullptr);

  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pair[1]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  process_->to_child = in_pair[0];
  process_->from_child = out_pipe[0];
  process_->err_fd = err_pipe[0];
  process_->start_stderr_reader();

  if (rc != 0) {
    process_->exited = true;
    process_->close_stdin();
    throw ProcessError("cannot start '" + command.front() + "': " + std::strerror(rc), {});
  }
  process_->pid = pid;

  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  const std::string hello = process_->read_exact(5, deadline, "handshake");
  if (hello.compare(0, 4, "PRDN") != 0) {
    process_->broken = true;
    throw ProtocolError("handshake: plugin did not send the PRDN magic", process_->diagnostics());
  }
  version_ = static_cast<std::uint8_t>(hello[4]);
  if (version_ != kPrdnVersion) {
    process_->broken = true;
    throw ProtocolError("handshake: plugin speaks protocol version " + std::to_string(version_) + ", expected " +
                            std::to_string(kPrdnVersion),
                        process_->diagnostics());
  }
}

ExternalDenoiser::~ExternalDenoiser() = default;

int ExternalDenoiser::shutdown() {
  std::lock_guard lock(mutex_);
  process_->close_stdin();
  process_->reap(timeout_);
  return process_->exit_code;
}

RealImage ExternalDenoiser::run(const RealImage& x, double sigma) const {
  std::lock_guard lock(mutex_);
  Process& proc = *process_;
  if (proc.broken || proc.to_child < 0) {
    throw ProcessError("external denoiser '" + name_ + "' is no longer usable", proc.diagnostics());
  }
  if (x.height() > std::numeric_limits<std::uint32_t>::max() || x.width() > std::numeric_limits<std::uint32_t>::max()) {
    throw ShapeError("image too large for PRDN1");
  }

  std::string request;
  request.reserve(12 + 4 * x.size());
  detail::put_le<std::uint32_t>(request, static_cast<std::uint32_t>(x.height()));
  detail::put_le<std::uint32_t>(request, static_cast<std::uint32_t>(x.width()));
  detail::put_le<float>(request, static_cast<float>(sigma));
  for (double v : x) detail::put_le<float>(request, static_cast<float>(v));
  proc.write_all(request);

  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  const std::string status = proc.read_exact(1, deadline, "response status");
  if (status[0] == 1) {
    const std::string len_bytes = proc.read_exact(4, deadline, "error length");
    const auto len = detail::get_le<std::uint32_t>(len_bytes.data());
    const std::string message = proc.read_exact(len, deadline, "error message");
    throw PluginError("plugin '" + name_ + "' reported an error: " + message, proc.diagnostics());
  }
  if (status[0] != 0) {
    proc.broken = true;
    throw ProtocolError("response: unknown status byte " + std::to_string(static_cast<unsigned char>(status[0])),
                        proc.diagnostics());
  }

  const std::string payload = proc.read_exact(4 * x.size(), deadline, "response pixels");
  RealImage out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<double>(detail::get_le<float>(payload.data() + 4 * i));
  return out;
}

RealImage external_denoise(const std::vector<std::string>& command, const RealImage& x, double sigma,
                           std::chrono::milliseconds timeout) {
  ExternalDenoiser denoiser(command, timeout);
  RealImage out = denoiser(x, sigma);
  denoiser.shutdown();
  return out;
}

}  // namespace prdeep
