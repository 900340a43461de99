#include "vforge/qc_server.hpp"

#include <httplib.h>

#include <fstream>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "vforge/error.hpp"
#include "vforge/image_io.hpp"

namespace vforge {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kFallbackPage =
    "<!doctype html><html><head><title>vivid-forge QC</title></head><body>"
    "<p>The review UI bundle is not installed. The JSON API is available under /api/.</p>"
    "</body></html>";

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json stats_json(const QualityStats& s) {
  return {{"mg_rate", opt(s.mg_rate)}, {"mp_rate", opt(s.mp_rate)}, {"ta_rate", opt(s.ta_rate)},
          {"hq_rate", opt(s.hq_rate)}, {"n_reviewed", s.n_reviewed},
          {"n_reviewed_video", s.n_reviewed_video}};
}

json payload(const SampleRecord& r) {
  const std::string base = "/media/" + r.id + "/";
  json frames = json::array();
  json masks = json::array();
  json masked = json::array();
  for (int i = 0; i < r.num_frames; ++i) {
    frames.push_back(base + "frames/" + std::to_string(i));
    masks.push_back(base + "masks/" + std::to_string(i));
    if (r.masked_ref) {
      masked.push_back(base + "masked/" + std::to_string(i));
    }
  }
  json j;
  j["id"] = r.id;
  j["task"] = to_string(r.task);
  j["caption"] = r.caption;
  j["caption_length_class"] = to_string(r.caption_length_class);
  j["augmentation"] = to_string(r.augmentation);
  j["propagation"] = to_string(r.propagation);
  j["entity_label"] = r.entity_label ? json(*r.entity_label) : json(nullptr);
  j["num_frames"] = r.num_frames;
  j["fps"] = r.fps.to_string();
  j["fps_value"] = r.fps.value();
  j["resolution"] = {r.resolution.width, r.resolution.height};
  j["needs_mp"] = r.num_frames > 1;
  j["frames"] = std::move(frames);
  j["masks"] = std::move(masks);
  j["masked"] = std::move(masked);
  return j;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& msg) {
  send_json(res, status, json{{"error", code}, {"message", msg}});
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSample: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kMpPresenceViolation:
    case ErrorCode::kSchemaViolation: return 400;
    default: return 500;
  }
}

std::optional<std::filesystem::path> media_path(const QcStore& store, const SampleRecord& r,
                                                const std::string& kind, int index) {
  if (index < 0 || index >= r.num_frames) {
    return std::nullopt;
  }
  const auto i = static_cast<std::size_t>(index);
  if (kind == "frames") {
    const auto base = resolve_ref(store.manifest_path(), r.frames_ref);
    if (std::filesystem::is_regular_file(base)) {
      return index == 0 ? std::optional(base) : std::nullopt;
    }
    return base / frame_filename(i);
  }
  if (kind == "masks") {
    return resolve_ref(store.manifest_path(), r.masks_ref) / mask_filename(i);
  }
  if (kind == "masked" && r.masked_ref) {
    return resolve_ref(store.manifest_path(), *r.masked_ref) / frame_filename(i);
  }
  return std::nullopt;
}

}  // namespace

struct QcServer::Impl {
  QcStore& store;
  httplib::Server server;

  explicit Impl(QcStore& s) : store(s) {}
};

QcServer::QcServer(QcStore& store, std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>(store)) {
  auto& srv = impl_->server;
  QcStore& st = store;

  srv.Get("/api/queue/next", [&st](const httplib::Request& req, httplib::Response& res) {
    const std::string reviewer = req.get_param_value("reviewer");
    if (reviewer.empty()) {
      send_error(res, 400, "InvalidArgument", "reviewer query parameter is required");
      return;
    }
    const auto next = st.next_sample(reviewer);
    if (!next) {
      res.status = 204;
      return;
    }
    send_json(res, 200, payload(*next));
  });

  srv.Get(R"(/api/sample/([^/]+))", [&st](const httplib::Request& req, httplib::Response& res) {
    const auto rec = st.find(req.matches[1]);
    if (!rec) {
      send_error(res, 404, "UnknownSample", "no sample '" + std::string(req.matches[1]) + "'");
      return;
    }
    send_json(res, 200, payload(*rec));
  });

  srv.Get(R"(/media/([^/]+)/(frames|masks|masked)/(\d{1,6}))",
          [&st](const httplib::Request& req, httplib::Response& res) {
            const auto rec = st.find(req.matches[1]);
            const auto path =
                rec ? media_path(st, *rec, req.matches[2], std::stoi(req.matches[3])) : std::nullopt;
            if (!path || !std::filesystem::is_regular_file(*path)) {
              send_error(res, 404, "NotFound", "no such media");
              return;
            }
            std::ifstream in(*path, std::ios::binary);
            std::ostringstream bytes;
            bytes << in.rdbuf();
            res.set_content(bytes.str(), "image/png");
          });

  srv.Post("/api/verdict", [&st](const httplib::Request& req, httplib::Response& res) {
    try {
      st.submit(decode_verdict(req.body));
      send_json(res, 200, json{{"ok", true}});
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), std::string(to_string(e.code())), e.what());
    }
  });

  srv.Get("/api/stats", [&st](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, stats_json(st.stats()));
  });

  if (!static_dir.empty() && std::filesystem::is_directory(static_dir)) {
    srv.set_mount_point("/", static_dir.string());
  } else {
    srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kFallbackPage, "text/html");
    });
  }

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string msg = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
    }
    spdlog::error("qc request failed: {}", msg);
    send_error(res, 500, "Internal", msg);
  });
}

QcServer::~QcServer() { stop(); }

bool QcServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int QcServer::bind_to_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool QcServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void QcServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void QcServer::stop() {
  if (impl_) {
    impl_->server.stop();
  }
}

}  // namespace vforge
