#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "vforge/qc_store.hpp"

namespace vforge {

// HTTP front end of a QcStore:
//   GET  /api/queue/next?reviewer=<id>   200 sample payload, 204 when done
//   GET  /api/sample/<id>                200 payload, 404
//   GET  /media/<id>/<frames|masks|masked>/<index>   PNG bytes, 404
//   POST /api/verdict                    200, 400, 404, 409
//   GET  /api/stats                      200
// Static files under `static_dir` are served at "/".
class QcServer {
 public:
  QcServer(QcStore& store, std::filesystem::path static_dir = {});
  ~QcServer();

  QcServer(const QcServer&) = delete;
  QcServer& operator=(const QcServer&) = delete;

  // Blocks until stop(). Returns false if the address cannot be bound.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it (or -1); then call listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vforge
