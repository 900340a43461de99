#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "fixtures.hpp"
#include "vforge/error.hpp"
#include "vforge/gateway.hpp"
#include "vforge/image_io.hpp"
#include "vforge/mock_backend.hpp"
#include "vforge/protocol.hpp"
#include "vforge/random.hpp"
#include "vforge/transport.hpp"

using namespace vforge;
using vforge::testing::kCar;
using vforge::testing::kDog;
using vforge::testing::kGround;
using vforge::testing::kSky;
using vforge::testing::TempDir;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(-1);
}

Image car_frame(Rect car = Rect{20, 12, 44, 30}) {
  Image img(Size{80, 48}, kGround);
  img.fill_rect(car, kCar);
  return img;
}

// Gateway whose every role replies through `handler`.
std::unique_ptr<Gateway> scripted(LoopbackTransport::Handler handler) {
  GatewayConfig cfg = GatewayConfig::all_mock();
  for (auto& [role, d] : cfg.backends) {
    d.transport = TransportKind::kSubprocess;
    d.endpoint = "unused";
  }
  return std::make_unique<Gateway>(cfg, [handler](const BackendDescriptor&) {
    return std::make_unique<LoopbackTransport>(handler);
  });
}

std::string echo_id(const std::string& line, const std::string& result) {
  const auto id_at = line.find("\"id\":") + 5;
  const auto id_end = line.find_first_of(",}", id_at);
  return "{\"id\":" + line.substr(id_at, id_end - id_at) + ",\"result\":" + result + "}";
}

GatewayConfig single_role(Role role, const std::string& spec, double timeout = 10.0) {
  GatewayConfig cfg = GatewayConfig::all_mock();
  BackendDescriptor d = BackendDescriptor::parse_endpoint(role, spec);
  d.timeout_seconds = timeout;
  cfg.backends[role] = d;
  return cfg;
}

}  // namespace

TEST(Rle, RoundTripRandom) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Mask m = vforge::testing::random_blob(Size{33, 21}, s);
    EXPECT_EQ(decode_rle(m.size(), encode_rle(m)), m);
  }
  const Mask full(Size{4, 3}, true);
  EXPECT_EQ(encode_rle(full), (std::vector<std::uint32_t>{0, 12}));
  const std::vector<std::uint32_t> short_runs{3, 2};
  EXPECT_EQ(code_of([&] { decode_rle(Size{4, 3}, short_runs); }), ErrorCode::kValidationFailure);
}

TEST(Descriptor, ParsesEndpointForms) {
  EXPECT_EQ(BackendDescriptor::parse_endpoint(Role::kTagger, "mock").transport, TransportKind::kMock);
  const auto h = BackendDescriptor::parse_endpoint(Role::kTagger, "http://127.0.0.1:9/tag");
  EXPECT_EQ(h.transport, TransportKind::kHttp);
  EXPECT_EQ(h.endpoint, "http://127.0.0.1:9/tag");
  const auto s = BackendDescriptor::parse_endpoint(Role::kFlow, "subprocess:python3 serve.py");
  EXPECT_EQ(s.transport, TransportKind::kSubprocess);
  EXPECT_EQ(s.endpoint, "python3 serve.py");
  EXPECT_EQ(BackendDescriptor::parse_endpoint(Role::kFlow, "./bin/flow").endpoint, "./bin/flow");
  EXPECT_THROW(BackendDescriptor::parse_endpoint(Role::kFlow, "subprocess:"), Error);
}

TEST(GatewayConfigFile, ReadsBackendsAndMockOptions) {
  TempDir dir("cfg");
  std::ofstream(dir / "mock.json") << R"({"palette":[{"label":"cat","color":[10,200,10]}],"min_pixels":4})";
  std::ofstream(dir / "backends.json") << R"({
    "mock_config": "mock.json",
    "backends": {"detector": {"transport": "http", "endpoint": "http://localhost:1/x",
                              "timeout_seconds": 2.5, "sessions": 3}}})";
  const GatewayConfig cfg = GatewayConfig::from_json_file(dir / "backends.json");
  EXPECT_EQ(cfg.descriptor(Role::kDetector).transport, TransportKind::kHttp);
  EXPECT_EQ(cfg.descriptor(Role::kDetector).sessions, 3);
  EXPECT_DOUBLE_EQ(cfg.descriptor(Role::kDetector).timeout_seconds, 2.5);
  EXPECT_EQ(cfg.descriptor(Role::kTagger).transport, TransportKind::kMock);
  ASSERT_EQ(cfg.mock.palette.size(), 1U);
  EXPECT_EQ(cfg.mock.palette[0].label, "cat");
  EXPECT_EQ(cfg.mock.min_pixels, 4);

  std::ofstream(dir / "bad.json") << R"({"backends": {"detector": {"transport": "http"}}})";
  EXPECT_THROW(GatewayConfig::from_json_file(dir / "bad.json"), Error);
}

TEST(GatewayConfigFile, EnvironmentOverride) {
  GatewayConfig cfg = GatewayConfig::all_mock();
  cfg.backends[Role::kCaptioner].timeout_seconds = 7;
  ::setenv("VFORGE_BACKEND_CAPTIONER", "subprocess:cat", 1);
  cfg.apply_env_overrides();
  ::unsetenv("VFORGE_BACKEND_CAPTIONER");
  EXPECT_EQ(cfg.descriptor(Role::kCaptioner).transport, TransportKind::kSubprocess);
  EXPECT_EQ(cfg.descriptor(Role::kCaptioner).endpoint, "cat");
  EXPECT_DOUBLE_EQ(cfg.descriptor(Role::kCaptioner).timeout_seconds, 7);
}

TEST(MockGateway, TaggerSeesRedRectangleAsCar) {
  Gateway gw(GatewayConfig::all_mock());
  EXPECT_EQ(gw.tag_frame(car_frame()), (std::vector<std::string>{"car"}));
}

TEST(MockGateway, TaggerReportsEveryPaletteEntryPresent) {
  Gateway gw(GatewayConfig::all_mock());
  Image img = car_frame();
  img.fill_rect(Rect{0, 0, 80, 8}, kSky);
  img.fill_rect(Rect{60, 30, 70, 40}, kDog);
  img.fill_rect(Rect{0, 40, 3, 43}, kCar);  // below min_pixels on its own, car already present
  const auto tags = gw.tag_frame(img);
  EXPECT_EQ(tags.size(), 3U);
  for (const char* t : {"car", "sky", "dog"}) {
    EXPECT_NE(std::find(tags.begin(), tags.end(), t), tags.end()) << t;
  }
}

TEST(MockGateway, DetectAndSegmentRecoverRectangle) {
  Gateway gw(GatewayConfig::all_mock());
  const Rect car{20, 12, 44, 30};
  const Image img = car_frame(car);
  const auto dets = gw.detect_label(img, "car");
  ASSERT_EQ(dets.size(), 1U);
  EXPECT_EQ(dets[0].box, car);
  EXPECT_DOUBLE_EQ(dets[0].score, 1.0);
  EXPECT_EQ(gw.segment_box(img, car), Mask::from_rect(img.size(), car));
  EXPECT_TRUE(gw.detect_label(img, "dog").empty());
}

TEST(MockGateway, PropagateTracksMovingRectangle) {
  Gateway gw(GatewayConfig::all_mock());
  std::vector<Image> frames;
  for (int i = 0; i < 4; ++i) frames.push_back(car_frame(Rect{20 + 3 * i, 12, 44 + 3 * i, 30}));
  const FrameSequence seq(frames, Rational(30, 1));
  const MaskSequence out = gw.propagate_mask(seq, Mask::from_rect(seq.size(), Rect{20, 12, 44, 30}));
  ASSERT_EQ(out.length(), 4U);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(out[static_cast<std::size_t>(i)],
              Mask::from_rect(seq.size(), Rect{20 + 3 * i, 12, 44 + 3 * i, 30}));
  }
}

TEST(MockGateway, CaptionerAnswersThreeConformantLines) {
  Gateway gw(GatewayConfig::all_mock());
  const FrameSequence crop({car_frame()}, Rational(1, 1));
  const std::string text = gw.caption_entity(crop, "car", "describe the center object car");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_EQ(text.rfind("The video shows", 0), 0U);
  EXPECT_EQ(code_of([&] { gw.caption_entity(crop, "car", "no tag here"); }),
            ErrorCode::kBackendError);
}

TEST(MockGateway, FlowEmbedScore) {
  Gateway gw(GatewayConfig::all_mock());
  const Image a = car_frame(Rect{20, 12, 44, 30});
  const Image b = car_frame(Rect{22, 12, 46, 30});
  const FlowField f = gw.estimate_flow(a, b);
  EXPECT_EQ(f.size(), a.size());
  // The wire carries flow in 1/64 px fixed point.
  const FlowField want = block_match_flow(a, b);
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      ASSERT_NEAR(f.dx(x, y), want.dx(x, y), 0.5 / 64) << x << "," << y;
      ASSERT_NEAR(f.dy(x, y), want.dy(x, y), 0.5 / 64) << x << "," << y;
    }
  }
  const Embedding e = gw.embed_frame(a);
  EXPECT_EQ(e, builtin_embed(a));
  EXPECT_DOUBLE_EQ(gw.score_text(a, "a car"), 0.21);
  EXPECT_TRUE(gw.ping(Role::kFlow));
}

TEST(MockGateway, SameRequestSameResponse) {
  const MockBackend mock;
  TempDir dir("det");
  write_png(dir / "f.png", car_frame());
  const std::string line = R"({"id":5,"method":"detect","params":{"image":{"path":")" +
                           (dir / "f.png").string() + R"("},"label":"car"}})";
  EXPECT_EQ(mock.handle_line(line), mock.handle_line(line));
}

TEST(ScriptedGateway, MalformedLineIsProtocolError) {
  auto gw = scripted([](const std::string&) { return std::string("this is not json"); });
  EXPECT_EQ(code_of([&] { gw->tag_frame(car_frame()); }), ErrorCode::kProtocolError);
}

TEST(ScriptedGateway, WrongIdIsProtocolError) {
  auto gw = scripted([](const std::string&) { return std::string(R"({"id":999,"result":[]})"); });
  EXPECT_EQ(code_of([&] { gw->tag_frame(car_frame()); }), ErrorCode::kProtocolError);
}

TEST(ScriptedGateway, BackendErrorPassesThrough) {
  auto gw = scripted([](const std::string& line) {
    const auto id_at = line.find("\"id\":") + 5;
    const auto id_end = line.find_first_of(",}", id_at);
    return "{\"id\":" + line.substr(id_at, id_end - id_at) + R"(,"error":{"message":"oom"}})";
  });
  try {
    gw->tag_frame(car_frame());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendError);
    EXPECT_NE(std::string(e.what()).find("oom"), std::string::npos);
  }
}

TEST(ScriptedGateway, MaskValuesBinarizedAndValidated) {
  auto gw = scripted([](const std::string& line) {
    return echo_id(line, R"({"mask":{"width":2,"height":1,"values":[127,200]}})");
  });
  const Image img(Size{2, 1});
  const Mask m = gw->segment_box(img, Rect{0, 0, 2, 1});
  EXPECT_FALSE(m.test(0, 0));
  EXPECT_TRUE(m.test(1, 0));

  auto wrong = scripted([](const std::string& line) {
    return echo_id(line, R"({"mask":{"width":3,"height":1,"values":[0,0,255]}})");
  });
  EXPECT_EQ(code_of([&] { wrong->segment_box(img, Rect{0, 0, 2, 1}); }),
            ErrorCode::kValidationFailure);
}

TEST(ScriptedGateway, DetectionOutsideFrameRejected) {
  auto gw = scripted([](const std::string& line) {
    return echo_id(line, R"({"detections":[{"label":"car","box":[0,0,500,10],"score":0.9}]})");
  });
  EXPECT_EQ(code_of([&] { gw->detect_label(car_frame(), "car"); }), ErrorCode::kValidationFailure);
}

TEST(ScriptedGateway, NonFiniteEmbeddingRejected) {
  auto gw = scripted([](const std::string& line) {
    return echo_id(line, R"({"embedding":[]})");
  });
  EXPECT_EQ(code_of([&] { gw->embed_frame(car_frame()); }), ErrorCode::kValidationFailure);
}

#ifdef VFORGE_CLI_PATH
TEST(SubprocessGateway, MockBackendOverStdio) {
  Gateway gw(single_role(Role::kTagger, std::string("subprocess:") + VFORGE_CLI_PATH + " mock-backend"));
  EXPECT_EQ(gw.tag_frame(car_frame()), (std::vector<std::string>{"car"}));
  EXPECT_EQ(gw.tag_frame(car_frame()), (std::vector<std::string>{"car"}));
}
#endif

TEST(SubprocessGateway, GarbageReplyIsProtocolError) {
  Gateway gw(single_role(Role::kTagger, "while read l; do echo garbage; done"));
  EXPECT_EQ(code_of([&] { gw.tag_frame(car_frame()); }), ErrorCode::kProtocolError);
}

TEST(SubprocessGateway, SilentChildTimesOut) {
  Gateway gw(single_role(Role::kTagger, "sleep 30", 0.3));
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(code_of([&] { gw.tag_frame(car_frame()); }), ErrorCode::kBackendTimeout);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(5));
}

TEST(SubprocessGateway, ExitingChildIsProtocolError) {
  Gateway gw(single_role(Role::kTagger, "exit 0"));
  EXPECT_EQ(code_of([&] { gw.tag_frame(car_frame()); }), ErrorCode::kProtocolError);
}

TEST(HttpGateway, MockBehindHttpServer) {
  const MockBackend mock;
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/rpc", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    res.set_content(mock.handle_line(req.body), "application/json");
  });
  server.Post("/slow", [&](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    res.set_content("{}", "application/json");
  });
  server.Post("/broken", [&](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const std::string base = "http://127.0.0.1:" + std::to_string(port);

  {
    Gateway gw(single_role(Role::kTagger, base + "/rpc"));
    EXPECT_EQ(gw.tag_frame(car_frame()), (std::vector<std::string>{"car"}));
    EXPECT_EQ(hits.load(), 1);
  }
  {
    Gateway gw(single_role(Role::kTagger, base + "/slow", 0.3));
    EXPECT_EQ(code_of([&] { gw.tag_frame(car_frame()); }), ErrorCode::kBackendTimeout);
  }
  {
    Gateway gw(single_role(Role::kTagger, base + "/broken"));
    EXPECT_EQ(code_of([&] { gw.tag_frame(car_frame()); }), ErrorCode::kProtocolError);
  }
  server.stop();
  th.join();
}

TEST(MockGateway, ConcurrentCallsWithPooledSessions) {
  GatewayConfig cfg = GatewayConfig::all_mock();
  cfg.backends[Role::kDetector].sessions = 3;
  Gateway gw(cfg);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 5; ++i) {
        const Rect r{2 + t * 4 + i, 4, 20 + t * 4 + i, 20};
        const auto d = gw.detect_label(car_frame(r), "car");
        if (d.size() == 1 && d[0].box == r) ++ok;
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(ok.load(), 20);
}
