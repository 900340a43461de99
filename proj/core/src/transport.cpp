#include "vforge/transport.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <thread>

#include "vforge/error.hpp"

namespace vforge {

namespace {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

}  // namespace

SubprocessTransport::SubprocessTransport(std::string command) : command_(std::move(command)) {
  ignore_sigpipe();
  spawn();
}

SubprocessTransport::~SubprocessTransport() { shutdown(); }

void SubprocessTransport::spawn() {
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kIo, std::string("pipe: ") + std::strerror(errno));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error(ErrorCode::kIo, std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) {
      ::close(fd);
    }
    throw Error(ErrorCode::kIo, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  pending_.clear();
}

void SubprocessTransport::shutdown() {
  close_fd(to_child_);
  close_fd(from_child_);
  if (pid_ > 0) {
    // Closing stdin asks the backend to exit; escalate if it lingers.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
}

std::string SubprocessTransport::round_trip(const std::string& line,
                                            std::chrono::milliseconds timeout) {
  if (pid_ < 0) {
    spawn();
  }
  std::string out = line;
  out.push_back('\n');
  std::size_t written = 0;
  while (written < out.size()) {
    const ssize_t n = ::write(to_child_, out.data() + written, out.size() - written);
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      shutdown();
      throw Error(ErrorCode::kProtocolError,
                  "backend '" + command_ + "' closed its input: " + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    const auto nl = pending_.find('\n');
    if (nl != std::string::npos) {
      std::string response = pending_.substr(0, nl);
      pending_.erase(0, nl + 1);
      if (!response.empty() && response.back() == '\r') {
        response.pop_back();
      }
      return response;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      // A late reply would desynchronise the stream; start over next time.
      shutdown();
      throw Error(ErrorCode::kBackendTimeout,
                  "backend '" + command_ + "' did not answer within " +
                      std::to_string(timeout.count()) + " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) {
        continue;
      }
      throw Error(ErrorCode::kIo, std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) {
      continue;
    }
    char buf[65536];
    const ssize_t n = ::read(from_child_, buf, sizeof(buf));
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      shutdown();
      throw Error(ErrorCode::kProtocolError, std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) {
      shutdown();
      throw Error(ErrorCode::kProtocolError, "backend '" + command_ + "' closed its output");
    }
    pending_.append(buf, static_cast<std::size_t>(n));
  }
}

}  // namespace vforge
