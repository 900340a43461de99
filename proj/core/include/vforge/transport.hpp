#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <sys/types.h>

namespace vforge {

// One request line out, one response line back. Implementations are used by a
// single caller at a time; the gateway pools them.
class Transport {
 public:
  virtual ~Transport() = default;

  // `line` carries no trailing newline; neither does the result.
  // Throws BackendTimeout or ProtocolError.
  virtual std::string round_trip(const std::string& line, std::chrono::milliseconds timeout) = 0;
};

// Long-lived child process started with /bin/sh -c <command>, speaking
// newline-delimited messages over stdin/stdout. A child that times out or
// dies is restarted on the next call.
class SubprocessTransport final : public Transport {
 public:
  explicit SubprocessTransport(std::string command);
  ~SubprocessTransport() override;

  SubprocessTransport(const SubprocessTransport&) = delete;
  SubprocessTransport& operator=(const SubprocessTransport&) = delete;

  std::string round_trip(const std::string& line, std::chrono::milliseconds timeout) override;

 private:
  void spawn();
  void shutdown();

  std::string command_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string pending_;
};

// POSTs each line to an HTTP endpoint; the body of the reply is the response line.
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::string url);
  ~HttpTransport() override;

  std::string round_trip(const std::string& line, std::chrono::milliseconds timeout) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// In-process handler; exercises the same wire encoding without a process boundary.
class LoopbackTransport final : public Transport {
 public:
  using Handler = std::function<std::string(const std::string&)>;
  explicit LoopbackTransport(Handler handler) : handler_(std::move(handler)) {}

  std::string round_trip(const std::string& line, std::chrono::milliseconds) override {
    return handler_(line);
  }

 private:
  Handler handler_;
};

}  // namespace vforge
