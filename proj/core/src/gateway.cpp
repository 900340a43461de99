#include "vforge/gateway.hpp"

#include <unistd.h>

#include <cctype>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>

#include <spdlog/spdlog.h>

#include "vforge/error.hpp"
#include "vforge/image_io.hpp"
#include "wire.hpp"

namespace vforge {

using wire::json;

std::string_view to_string(TransportKind kind) {
  switch (kind) {
    case TransportKind::kSubprocess: return "subprocess";
    case TransportKind::kHttp: return "http";
    case TransportKind::kMock: return "mock";
  }
  return "";
}

TransportKind parse_transport_kind(std::string_view name) {
  for (TransportKind k : {TransportKind::kSubprocess, TransportKind::kHttp, TransportKind::kMock}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown transport '" + std::string(name) + "'");
}

BackendDescriptor BackendDescriptor::parse_endpoint(Role role, const std::string& spec) {
  BackendDescriptor d;
  d.role = role;
  if (spec == "mock") {
    d.transport = TransportKind::kMock;
  } else if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    d.transport = TransportKind::kHttp;
    d.endpoint = spec;
  } else {
    constexpr std::string_view kPrefix = "subprocess:";
    d.transport = TransportKind::kSubprocess;
    d.endpoint = spec.rfind(kPrefix, 0) == 0 ? spec.substr(kPrefix.size()) : spec;
  }
  if (d.transport != TransportKind::kMock && d.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "empty endpoint for role " + std::string(to_string(role)));
  }
  return d;
}

GatewayConfig GatewayConfig::all_mock() {
  GatewayConfig cfg;
  for (Role r : kAllRoles) {
    BackendDescriptor d;
    d.role = r;
    cfg.backends[r] = d;
  }
  return cfg;
}

GatewayConfig GatewayConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open backend config " + path.string());
  }
  GatewayConfig cfg = all_mock();
  try {
    const json j = json::parse(in);
    if (j.contains("scratch_dir")) {
      cfg.scratch_dir = j.at("scratch_dir").get<std::string>();
    }
    if (j.contains("mock_config")) {
      std::filesystem::path mock = j.at("mock_config").get<std::string>();
      if (mock.is_relative()) {
        mock = path.parent_path() / mock;
      }
      cfg.mock = MockBackendOptions::from_json_file(mock);
    }
    if (j.contains("backends")) {
      for (const auto& [name, entry] : j.at("backends").items()) {
        const Role role = parse_role(name);
        BackendDescriptor d;
        d.role = role;
        d.transport = parse_transport_kind(entry.value("transport", std::string("mock")));
        d.endpoint = entry.value("endpoint", std::string());
        d.timeout_seconds = entry.value("timeout_seconds", d.timeout_seconds);
        d.sessions = entry.value("sessions", d.sessions);
        if (d.timeout_seconds <= 0 || d.sessions < 1) {
          throw Error(ErrorCode::kInvalidArgument,
                      "backend " + name + " needs a positive timeout and at least one session");
        }
        if (d.transport != TransportKind::kMock && d.endpoint.empty()) {
          throw Error(ErrorCode::kInvalidArgument, "backend " + name + " has no endpoint");
        }
        cfg.backends[role] = d;
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
  return cfg;
}

void GatewayConfig::apply_env_overrides() {
  for (Role r : kAllRoles) {
    std::string var = "VFORGE_BACKEND_";
    for (char c : to_string(r)) {
      var.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    const char* value = std::getenv(var.c_str());
    if (value == nullptr || *value == '\0') {
      continue;
    }
    BackendDescriptor d = BackendDescriptor::parse_endpoint(r, value);
    if (auto it = backends.find(r); it != backends.end()) {
      d.timeout_seconds = it->second.timeout_seconds;
      d.sessions = it->second.sessions;
    }
    backends[r] = d;
  }
}

const BackendDescriptor& GatewayConfig::descriptor(Role role) const {
  auto it = backends.find(role);
  if (it == backends.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "no backend configured for role " + std::string(to_string(role)));
  }
  return it->second;
}

namespace {

class SessionPool {
 public:
  SessionPool(BackendDescriptor descriptor, const TransportFactory& factory)
      : descriptor_(std::move(descriptor)), factory_(factory) {}

  const BackendDescriptor& descriptor() const { return descriptor_; }

  std::unique_ptr<Transport> acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !idle_.empty() || live_ < descriptor_.sessions; });
    if (!idle_.empty()) {
      auto t = std::move(idle_.back());
      idle_.pop_back();
      return t;
    }
    ++live_;
    lock.unlock();
    try {
      return factory_(descriptor_);
    } catch (...) {
      discard();
      throw;
    }
  }

  void release(std::unique_ptr<Transport> t) {
    {
      std::lock_guard lock(mu_);
      idle_.push_back(std::move(t));
    }
    cv_.notify_one();
  }

  // A session that failed mid-request is dropped; a fresh one replaces it on demand.
  void discard() {
    {
      std::lock_guard lock(mu_);
      --live_;
    }
    cv_.notify_one();
  }

 private:
  BackendDescriptor descriptor_;
  const TransportFactory& factory_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<Transport>> idle_;
  int live_ = 0;
};

struct TempFiles {
  std::vector<std::filesystem::path> paths;
  ~TempFiles() {
    std::error_code ec;
    for (const auto& p : paths) {
      std::filesystem::remove(p, ec);
    }
  }
};

[[noreturn]] void invalid(std::string_view method, const std::string& what) {
  throw Error(ErrorCode::kValidationFailure, std::string(method) + " response: " + what);
}

}  // namespace

struct Gateway::Impl {
  TransportFactory factory;
  std::shared_ptr<const MockBackend> mock;
  std::map<Role, std::unique_ptr<SessionPool>> pools;
  std::filesystem::path scratch;
  bool owns_scratch = false;
  std::atomic<std::uint64_t> next_id{1};
  std::atomic<std::uint64_t> next_file{0};

  std::filesystem::path scratch_path(std::string_view ext) {
    return scratch / ("t" + std::to_string(next_file++) + std::string(ext));
  }

  json image_param(const Image& img, TempFiles& temps) {
    auto p = scratch_path(".png");
    write_png(p, img);
    temps.paths.push_back(p);
    return wire::image_ref(p.string());
  }

  json call(Role role, std::string_view method, json params) {
    SessionPool& pool = *pools.at(role);
    const std::uint64_t id = next_id++;
    const std::string line =
        json{{"id", id}, {"method", method}, {"params", std::move(params)}}.dump();
    const auto timeout = std::chrono::milliseconds(
        static_cast<long long>(std::llround(pool.descriptor().timeout_seconds * 1000.0)));

    std::unique_ptr<Transport> t = pool.acquire();
    std::string reply;
    try {
      reply = t->round_trip(line, timeout);
    } catch (...) {
      t.reset();
      pool.discard();
      throw;
    }
    pool.release(std::move(t));

    json resp;
    try {
      resp = json::parse(reply);
    } catch (const json::exception&) {
      throw Error(ErrorCode::kProtocolError,
                  std::string(to_string(role)) + " sent a malformed response line");
    }
    if (!resp.is_object() || !resp.contains("id") || resp.at("id") != json(id)) {
      throw Error(ErrorCode::kProtocolError,
                  std::string(to_string(role)) + " response does not echo request id " +
                      std::to_string(id));
    }
    if (resp.contains("error")) {
      const auto& err = resp.at("error");
      std::string msg = err.is_object() ? err.value("message", err.dump()) : err.dump();
      throw Error(ErrorCode::kBackendError,
                  std::string(to_string(role)) + "." + std::string(method) + ": " + msg);
    }
    if (!resp.contains("result")) {
      throw Error(ErrorCode::kProtocolError,
                  std::string(to_string(role)) + " response has neither result nor error");
    }
    return std::move(resp.at("result"));
  }
};

Gateway::Gateway(GatewayConfig config, TransportFactory factory)
    : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  impl_->mock = std::make_shared<const MockBackend>(config_.mock);
  if (factory) {
    impl_->factory = std::move(factory);
  } else {
    std::shared_ptr<const MockBackend> mock = impl_->mock;
    impl_->factory = [mock](const BackendDescriptor& d) -> std::unique_ptr<Transport> {
      switch (d.transport) {
        case TransportKind::kSubprocess: return std::make_unique<SubprocessTransport>(d.endpoint);
        case TransportKind::kHttp: return std::make_unique<HttpTransport>(d.endpoint);
        case TransportKind::kMock: break;
      }
      return std::make_unique<LoopbackTransport>(
          [mock](const std::string& line) { return mock->handle_line(line); });
    };
  }
  for (Role r : kAllRoles) {
    BackendDescriptor d;
    d.role = r;
    if (auto it = config_.backends.find(r); it != config_.backends.end()) {
      d = it->second;
    }
    impl_->pools[r] = std::make_unique<SessionPool>(d, impl_->factory);
  }
  if (config_.scratch_dir.empty()) {
    static std::atomic<int> counter{0};
    impl_->scratch = std::filesystem::temp_directory_path() /
                     ("vforge-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    impl_->owns_scratch = true;
  } else {
    impl_->scratch = config_.scratch_dir;
  }
  std::filesystem::create_directories(impl_->scratch);
}

Gateway::~Gateway() {
  if (impl_ && impl_->owns_scratch) {
    impl_->pools.clear();
    std::error_code ec;
    std::filesystem::remove_all(impl_->scratch, ec);
  }
}

bool Gateway::ping(Role role) {
  try {
    const json r = impl_->call(role, method::kPing, json::object());
    return r.value("ok", false);
  } catch (const Error& e) {
    spdlog::warn("ping {}: {}", to_string(role), e.what());
    return false;
  }
}

std::vector<std::string> Gateway::tag_frame(const Image& frame) {
  TempFiles temps;
  json params{{"image", impl_->image_param(frame, temps)}};
  const json r = impl_->call(Role::kTagger, method::kTag, std::move(params));
  if (!r.contains("labels") || !r.at("labels").is_array()) {
    invalid(method::kTag, "missing labels array");
  }
  std::vector<std::string> labels;
  for (const auto& l : r.at("labels")) {
    if (!l.is_string()) {
      invalid(method::kTag, "label is not a string");
    }
    labels.push_back(l.get<std::string>());
  }
  return labels;
}

std::vector<Detection> Gateway::detect_label(const Image& frame, const std::string& label) {
  TempFiles temps;
  json params{{"image", impl_->image_param(frame, temps)}, {"label", label}};
  const json r = impl_->call(Role::kDetector, method::kDetect, std::move(params));
  if (!r.contains("detections") || !r.at("detections").is_array()) {
    invalid(method::kDetect, "missing detections array");
  }
  std::vector<Detection> out;
  for (const auto& j : r.at("detections")) {
    Detection d = wire::detection_from_json(j);
    const Rect& b = d.box;
    if (!(b.x0 < b.x1 && b.y0 < b.y1 && b.x0 >= 0 && b.y0 >= 0 && b.x1 <= frame.width() &&
          b.y1 <= frame.height())) {
      invalid(method::kDetect, "box outside the frame or degenerate");
    }
    if (!std::isfinite(d.score) || d.score < 0.0 || d.score > 1.0) {
      invalid(method::kDetect, "score outside [0, 1]");
    }
    out.push_back(std::move(d));
  }
  return out;
}

Mask Gateway::segment_box(const Image& frame, const Rect& box) {
  TempFiles temps;
  json params{{"image", impl_->image_param(frame, temps)}, {"box", wire::box_to_json(box)}};
  const json r = impl_->call(Role::kSegmenter, method::kSegment, std::move(params));
  if (!r.contains("mask")) {
    invalid(method::kSegment, "missing mask");
  }
  Mask m = wire::mask_from_json(r.at("mask"));
  if (m.size() != frame.size()) {
    invalid(method::kSegment, "mask resolution differs from the frame");
  }
  return m;
}

MaskSequence Gateway::propagate_mask(const FrameSequence& frames, const Mask& first_mask) {
  if (first_mask.size() != frames.size()) {
    throw Error(ErrorCode::kResolutionMismatch, "first mask does not match frame resolution");
  }
  TempFiles temps;
  json list = json::array();
  for (const Image& f : frames.frames()) {
    list.push_back(impl_->image_param(f, temps));
  }
  json params{{"frames", std::move(list)}, {"mask", wire::mask_to_json(first_mask)}};
  const json r = impl_->call(Role::kSegmenter, method::kPropagate, std::move(params));
  if (!r.contains("masks") || !r.at("masks").is_array()) {
    invalid(method::kPropagate, "missing masks array");
  }
  if (r.at("masks").size() != frames.length()) {
    invalid(method::kPropagate, "expected " + std::to_string(frames.length()) + " masks, got " +
                                    std::to_string(r.at("masks").size()));
  }
  std::vector<Mask> masks;
  for (const auto& j : r.at("masks")) {
    Mask m = wire::mask_from_json(j);
    if (m.size() != frames.size()) {
      invalid(method::kPropagate, "mask resolution differs from the frames");
    }
    masks.push_back(std::move(m));
  }
  return MaskSequence(std::move(masks));
}

std::string Gateway::caption_entity(const FrameSequence& cropped, const std::string& tag,
                                    const std::string& prompt) {
  TempFiles temps;
  json list = json::array();
  for (const Image& f : cropped.frames()) {
    list.push_back(impl_->image_param(f, temps));
  }
  json params{{"frames", std::move(list)}, {"tag", tag}, {"prompt", prompt}};
  const json r = impl_->call(Role::kCaptioner, method::kCaption, std::move(params));
  if (!r.contains("text") || !r.at("text").is_string()) {
    invalid(method::kCaption, "missing text");
  }
  return r.at("text").get<std::string>();
}

FlowField Gateway::estimate_flow(const Image& a, const Image& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kResolutionMismatch, "flow frames differ in resolution");
  }
  TempFiles temps;
  const auto out = impl_->scratch_path(".flow");
  temps.paths.push_back(out);
  json params{{"image_a", impl_->image_param(a, temps)},
              {"image_b", impl_->image_param(b, temps)},
              {"output_path", out.string()}};
  const json r = impl_->call(Role::kFlow, method::kFlow, std::move(params));
  if (!r.contains("flow")) {
    invalid(method::kFlow, "missing flow reference");
  }
  FlowField f = read_flow_sidecar(wire::image_path(r.at("flow")));
  if (f.size() != a.size()) {
    invalid(method::kFlow, "flow resolution differs from the frames");
  }
  f.validate();
  return f;
}

Embedding Gateway::embed_frame(const Image& frame) {
  TempFiles temps;
  json params{{"image", impl_->image_param(frame, temps)}};
  const json r = impl_->call(Role::kEmbedder, method::kEmbed, std::move(params));
  if (!r.contains("embedding") || !r.at("embedding").is_array() || r.at("embedding").empty()) {
    invalid(method::kEmbed, "missing embedding");
  }
  Embedding v;
  double norm = 0.0;
  for (const auto& e : r.at("embedding")) {
    if (!e.is_number()) {
      invalid(method::kEmbed, "non-numeric embedding entry");
    }
    v.push_back(e.get<double>());
    if (!std::isfinite(v.back())) {
      invalid(method::kEmbed, "non-finite embedding entry");
    }
    norm += v.back() * v.back();
  }
  if (norm == 0.0) {
    invalid(method::kEmbed, "zero embedding");
  }
  return v;
}

double Gateway::score_text(const Image& frame, const std::string& text) {
  TempFiles temps;
  json params{{"image", impl_->image_param(frame, temps)}, {"text", text}};
  const json r = impl_->call(Role::kScorer, method::kScore, std::move(params));
  if (!r.contains("score") || !r.at("score").is_number()) {
    invalid(method::kScore, "missing score");
  }
  const double s = r.at("score").get<double>();
  if (!std::isfinite(s)) {
    invalid(method::kScore, "non-finite score");
  }
  return s;
}

FlowEstimator Gateway::flow_estimator() {
  return [this](const Image& a, const Image& b) { return estimate_flow(a, b); };
}

Embedder Gateway::embedder() {
  return [this](const Image& f) { return embed_frame(f); };
}

Scorer Gateway::scorer() {
  return [this](const Image& f, const std::string& t) { return score_text(f, t); };
}

}  // namespace vforge
