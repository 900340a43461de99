#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vforge/flow.hpp"
#include "vforge/metrics.hpp"
#include "vforge/mock_backend.hpp"
#include "vforge/protocol.hpp"
#include "vforge/raster.hpp"
#include "vforge/sequence.hpp"
#include "vforge/transport.hpp"

namespace vforge {

enum class TransportKind { kSubprocess, kHttp, kMock };

std::string_view to_string(TransportKind kind);
TransportKind parse_transport_kind(std::string_view name);

struct BackendDescriptor {
  Role role = Role::kTagger;
  TransportKind transport = TransportKind::kMock;
  std::string endpoint;  // shell command or URL; unused for mock
  double timeout_seconds = 60.0;
  int sessions = 1;

  // "mock", "http://host:port/path", "subprocess:<command>" or a bare command.
  static BackendDescriptor parse_endpoint(Role role, const std::string& spec);
};

struct GatewayConfig {
  std::map<Role, BackendDescriptor> backends;
  MockBackendOptions mock;
  std::filesystem::path scratch_dir;  // empty: a fresh directory under the system temp dir

  // Every role served by the in-process mock.
  static GatewayConfig all_mock();

  // {"scratch_dir": .., "mock_config": path, "backends": {"<role>": {"transport", "endpoint",
  // "timeout_seconds", "sessions"}}}. Roles not listed use the mock.
  static GatewayConfig from_json_file(const std::filesystem::path& path);

  // VFORGE_BACKEND_<ROLE> (e.g. VFORGE_BACKEND_TAGGER) replaces a role's endpoint.
  void apply_env_overrides();

  const BackendDescriptor& descriptor(Role role) const;
};

using TransportFactory = std::function<std::unique_ptr<Transport>(const BackendDescriptor&)>;

// Client side of the backend protocol. Each role owns a pool of sessions with
// one request in flight per session; safe to call from many threads.
class Gateway {
 public:
  explicit Gateway(GatewayConfig config, TransportFactory factory = {});
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  bool ping(Role role);

  std::vector<std::string> tag_frame(const Image& frame);
  std::vector<Detection> detect_label(const Image& frame, const std::string& label);
  Mask segment_box(const Image& frame, const Rect& box);
  MaskSequence propagate_mask(const FrameSequence& frames, const Mask& first_mask);
  std::string caption_entity(const FrameSequence& cropped, const std::string& tag,
                             const std::string& prompt);
  FlowField estimate_flow(const Image& a, const Image& b);
  Embedding embed_frame(const Image& frame);
  double score_text(const Image& frame, const std::string& text);

  FlowEstimator flow_estimator();
  Embedder embedder();
  Scorer scorer();

  const GatewayConfig& config() const { return config_; }

 private:
  struct Impl;
  GatewayConfig config_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vforge
