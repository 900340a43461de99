#include <httplib.h>

#include "vforge/error.hpp"
#include "vforge/transport.hpp"

namespace vforge {

struct HttpTransport::Impl {
  std::string origin;
  std::string path;
  std::unique_ptr<httplib::Client> client;
};

HttpTransport::HttpTransport(std::string url) : impl_(std::make_unique<Impl>()) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "backend URL needs a scheme: " + url);
  }
  const auto slash = url.find('/', scheme + 3);
  impl_->origin = slash == std::string::npos ? url : url.substr(0, slash);
  impl_->path = slash == std::string::npos ? "/" : url.substr(slash);
  impl_->client = std::make_unique<httplib::Client>(impl_->origin);
  impl_->client->set_keep_alive(true);
}

HttpTransport::~HttpTransport() = default;

std::string HttpTransport::round_trip(const std::string& line, std::chrono::milliseconds timeout) {
  auto& client = *impl_->client;
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  auto res = client.Post(impl_->path, line, "application/x-ndjson");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write ||
        err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorCode::kBackendTimeout,
                  impl_->origin + impl_->path + ": " + httplib::to_string(err));
    }
    throw Error(ErrorCode::kProtocolError,
                impl_->origin + impl_->path + ": " + httplib::to_string(err));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProtocolError,
                impl_->origin + impl_->path + " answered HTTP " + std::to_string(res->status));
  }
  std::string body = res->body;
  while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) {
    body.pop_back();
  }
  return body;
}

}  // namespace vforge
