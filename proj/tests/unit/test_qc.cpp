#include <gtest/gtest.h>

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <thread>

#include <json.hpp>

#include "fixtures.hpp"
#include "vforge/error.hpp"
#include "vforge/image_io.hpp"
#include "vforge/manifest.hpp"
#include "vforge/qc_server.hpp"
#include "vforge/qc_store.hpp"
#include "vforge/random.hpp"

using namespace vforge;
using vforge::testing::TempDir;
using json = nlohmann::json;

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

std::string sid(int i) { return "q" + std::to_string(i); }

// Manifest of records q0..q{n-1} with the given frame counts; media for each
// record is written next to the manifest.
std::filesystem::path write_qc_manifest(const std::filesystem::path& dir,
                                        const std::vector<int>& frame_counts) {
  std::vector<SampleRecord> recs;
  const Size s{16, 12};
  for (std::size_t i = 0; i < frame_counts.size(); ++i) {
    SampleRecord r = vforge::testing::sample_record(sid(static_cast<int>(i)));
    r.num_frames = frame_counts[i];
    r.resolution = s;
    for (int f = 0; f < r.num_frames; ++f) {
      const auto fi = static_cast<std::size_t>(f);
      write_png(dir / r.frames_ref / frame_filename(fi), Image(s, Rgb{10, 20, 30}));
      write_mask_png(dir / r.masks_ref / mask_filename(fi), Mask::from_rect(s, Rect{2, 2, 6, 6}));
      write_png(dir / *r.masked_ref / frame_filename(fi), Image(s, Rgb{0, 0, 0}));
    }
    recs.push_back(std::move(r));
  }
  const auto path = dir / "manifest.jsonl";
  write_manifest(path, recs);
  return path;
}

VerdictRecord verdict(const std::string& sample, const std::string& reviewer, bool mg, bool ta,
                      std::optional<bool> mp = std::nullopt) {
  VerdictRecord v;
  v.sample_id = sample;
  v.reviewer_id = reviewer;
  v.mg = mg;
  v.ta = ta;
  v.mp = mp;
  v.timestamp = "2026-01-01T00:00:00Z";
  return v;
}

}  // namespace

TEST(QcStats, TenSampleReviewMatchesHandCount) {
  TempDir dir("qc");
  const auto m = write_qc_manifest(dir.path(), std::vector<int>(10, 1));
  QcStore store(m, dir / "verdicts.jsonl");
  for (int i = 0; i < 10; ++i) {
    store.submit(verdict(sid(i), "r1", i >= 2, i != 2));
  }
  const QualityStats s = store.stats();
  EXPECT_EQ(s.n_reviewed, 10u);
  EXPECT_EQ(s.n_reviewed_video, 0u);
  EXPECT_DOUBLE_EQ(*s.mg_rate, 0.8);
  EXPECT_DOUBLE_EQ(*s.ta_rate, 0.9);
  EXPECT_DOUBLE_EQ(*s.hq_rate, 0.7);
  EXPECT_FALSE(s.mp_rate.has_value());
}

TEST(QcStats, AllPassingGivesOne) {
  TempDir dir("qc");
  const auto m = write_qc_manifest(dir.path(), {1, 3, 3, 1});
  QcStore store(m, dir / "v.jsonl");
  for (int i = 0; i < 4; ++i) {
    const bool video = store.find(sid(i))->num_frames > 1;
    store.submit(verdict(sid(i), "r", true, true, video ? std::optional(true) : std::nullopt));
  }
  const auto s = store.stats();
  EXPECT_EQ(*s.mg_rate, 1.0);
  EXPECT_EQ(*s.ta_rate, 1.0);
  EXPECT_EQ(*s.mp_rate, 1.0);
  EXPECT_EQ(*s.hq_rate, 1.0);
  EXPECT_EQ(s.n_reviewed_video, 2u);
}

TEST(QcStats, NothingReviewed) {
  const auto s = quality_stats({vforge::testing::sample_record("a")}, {});
  EXPECT_EQ(s.n_reviewed, 0u);
  EXPECT_FALSE(s.mg_rate.has_value());
  EXPECT_FALSE(s.hq_rate.has_value());
}

TEST(QcStats, TiedVotesFail) {
  SampleRecord r = vforge::testing::sample_record("a");
  r.num_frames = 1;
  const auto s = quality_stats({r}, {verdict("a", "x", true, true), verdict("a", "y", false, true)});
  EXPECT_EQ(*s.mg_rate, 0.0);
  EXPECT_EQ(*s.ta_rate, 1.0);
  EXPECT_EQ(*s.hq_rate, 0.0);
}

TEST(QcStats, RandomLogsMatchMajorityOracle) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Rng rng(seed);
    const bool all_video = seed % 2 == 0;
    std::vector<SampleRecord> samples;
    const int n = 3 + static_cast<int>(rng.index(12));
    for (int i = 0; i < n; ++i) {
      SampleRecord r = vforge::testing::sample_record(sid(i));
      r.num_frames = all_video || rng.index(2) == 0 ? 2 + static_cast<int>(rng.index(40)) : 1;
      samples.push_back(r);
    }
    std::vector<VerdictRecord> log;
    const int reviewers = 1 + static_cast<int>(rng.index(4));
    for (int r = 0; r < reviewers; ++r) {
      for (const auto& s : samples) {
        if (rng.index(3) == 0) continue;
        std::optional<bool> mp;
        if (s.num_frames > 1) mp = rng.index(3) != 0;
        log.push_back(verdict(s.id, "r" + std::to_string(r), rng.index(4) != 0, rng.index(4) != 0, mp));
      }
    }

    // Oracle: tally each sample's verdicts directly.
    std::size_t reviewed = 0, videos = 0, mg = 0, ta = 0, mp = 0, hq = 0;
    for (const auto& s : samples) {
      std::vector<VerdictRecord> mine;
      std::copy_if(log.begin(), log.end(), std::back_inserter(mine),
                   [&](const VerdictRecord& v) { return v.sample_id == s.id; });
      if (mine.empty()) continue;
      ++reviewed;
      const auto half = mine.size();
      const auto yes_mg = std::count_if(mine.begin(), mine.end(), [](auto& v) { return v.mg; });
      const auto yes_ta = std::count_if(mine.begin(), mine.end(), [](auto& v) { return v.ta; });
      const bool ok_mg = static_cast<std::size_t>(yes_mg) * 2 > half;
      const bool ok_ta = static_cast<std::size_t>(yes_ta) * 2 > half;
      bool ok = ok_mg && ok_ta;
      mg += ok_mg;
      ta += ok_ta;
      if (s.num_frames > 1) {
        ++videos;
        const auto yes_mp = std::count_if(mine.begin(), mine.end(), [](auto& v) { return *v.mp; });
        const bool ok_mp = static_cast<std::size_t>(yes_mp) * 2 > half;
        mp += ok_mp;
        ok = ok && ok_mp;
      }
      hq += ok;
    }

    const QualityStats st = quality_stats(samples, log);
    ASSERT_EQ(st.n_reviewed, reviewed) << seed;
    ASSERT_EQ(st.n_reviewed_video, videos) << seed;
    if (reviewed == 0) continue;
    const double d = static_cast<double>(reviewed);
    EXPECT_DOUBLE_EQ(*st.mg_rate, mg / d) << seed;
    EXPECT_DOUBLE_EQ(*st.ta_rate, ta / d) << seed;
    EXPECT_DOUBLE_EQ(*st.hq_rate, hq / d) << seed;
    EXPECT_LE(*st.hq_rate, *st.mg_rate);
    EXPECT_LE(*st.hq_rate, *st.ta_rate);
    if (videos > 0) {
      EXPECT_DOUBLE_EQ(*st.mp_rate, mp / static_cast<double>(videos)) << seed;
    }
    if (all_video) {
      EXPECT_LE(*st.hq_rate, *st.mp_rate) << seed;
    }
  }
}

TEST(QcVerdict, RoundTrip) {
  const VerdictRecord a = verdict("s", "r", true, false, false);
  EXPECT_EQ(decode_verdict(encode_verdict(a)), a);
  const VerdictRecord b = verdict("s", "r", false, true);
  EXPECT_EQ(decode_verdict(encode_verdict(b)), b);
  EXPECT_EQ(encode_verdict(a).find('\n'), std::string::npos);
}

TEST(QcVerdict, MalformedLines) {
  EXPECT_EQ(code_of([] { decode_verdict("{"); }), ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of([] { decode_verdict(R"({"sample_id":"a","mg":true,"ta":true})"); }),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of([] { decode_verdict(R"({"sample_id":"a","reviewer_id":"r","mg":1,"ta":true})"); }),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of([] { decode_verdict(R"({"sample_id":"","reviewer_id":"r","mg":true,"ta":true})"); }),
            ErrorCode::kSchemaViolation);
}

TEST(QcStore, ReplaysLogOnReopen) {
  TempDir dir("qc");
  const auto m = write_qc_manifest(dir.path(), {1, 1, 1});
  const auto log = dir / "v.jsonl";
  {
    QcStore store(m, log);
    store.submit(verdict(sid(0), "r", true, true));
    store.submit(verdict(sid(1), "r", false, true));
  }
  QcStore again(m, log);
  EXPECT_EQ(again.verdicts().size(), 2u);
  EXPECT_EQ(again.next_sample("r")->id, sid(2));
  EXPECT_EQ(code_of([&] { again.submit(verdict(sid(0), "r", true, true)); }), ErrorCode::kConflict);
  EXPECT_DOUBLE_EQ(*again.stats().mg_rate, 0.5);
}

TEST(QcStore, TornTailIsDropped) {
  TempDir dir("qc");
  const auto m = write_qc_manifest(dir.path(), {1, 1});
  const auto log = dir / "v.jsonl";
  {
    QcStore store(m, log);
    store.submit(verdict(sid(0), "r", true, true));
  }
  const auto good = std::filesystem::file_size(log);
  {
    std::ofstream out(log, std::ios::binary | std::ios::app);
    out << R"({"sample_id":"q1","revie)";
  }
  {
    QcStore store(m, log);
    EXPECT_EQ(store.verdicts().size(), 1u);
    EXPECT_EQ(std::filesystem::file_size(log), good);
    store.submit(verdict(sid(1), "r", true, false));
  }
  QcStore third(m, log);
  EXPECT_EQ(third.verdicts().size(), 2u);
}

TEST(QcStore, CorruptCompleteLineIsRejected) {
  TempDir dir("qc");
  const auto m = write_qc_manifest(dir.path(), {1});
  const auto log = dir / "v.jsonl";
  {
    std::ofstream out(log, std::ios::binary);
    out << "not json\n";
  }
  EXPECT_EQ(code_of([&] { QcStore s(m, log); }), ErrorCode::kSchemaViolation);
}

TEST(QcStore, QueueOrderAndIndependence) {
  TempDir dir("qc");
  const auto m = write_qc_manifest(dir.path(), {1, 1, 1});
  QcStore store(m, dir / "v.jsonl");
  EXPECT_EQ(store.next_sample("a")->id, sid(0));
  store.submit(verdict(sid(0), "a", true, true));
  EXPECT_EQ(store.next_sample("a")->id, sid(1));
  EXPECT_EQ(store.next_sample("b")->id, sid(0));
  store.submit(verdict(sid(2), "a", true, true));
  store.submit(verdict(sid(1), "a", true, true));
  EXPECT_FALSE(store.next_sample("a").has_value());
  EXPECT_EQ(store.next_sample("b")->id, sid(0));
}

TEST(QcStore, SubmitErrors) {
  TempDir dir("qc");
  const auto m = write_qc_manifest(dir.path(), {1, 5});
  QcStore store(m, dir / "v.jsonl");
  EXPECT_EQ(code_of([&] { store.submit(verdict("nope", "r", true, true)); }),
            ErrorCode::kUnknownSample);
  EXPECT_EQ(code_of([&] { store.submit(verdict(sid(0), "r", true, true, true)); }),
            ErrorCode::kMpPresenceViolation);
  EXPECT_EQ(code_of([&] { store.submit(verdict(sid(1), "r", true, true)); }),
            ErrorCode::kMpPresenceViolation);
  store.submit(verdict(sid(1), "r", true, true, false));
  EXPECT_EQ(code_of([&] { store.submit(verdict(sid(1), "r", true, true, true)); }),
            ErrorCode::kConflict);
  EXPECT_EQ(store.verdicts().size(), 1u);
}

TEST(QcStore, FillsMissingTimestamp) {
  TempDir dir("qc");
  const auto m = write_qc_manifest(dir.path(), {1});
  QcStore store(m, dir / "v.jsonl");
  VerdictRecord v = verdict(sid(0), "r", true, true);
  v.timestamp.clear();
  store.submit(v);
  const std::string ts = store.verdicts().front().timestamp;
  ASSERT_EQ(ts.size(), 20u);
  EXPECT_EQ(ts.back(), 'Z');
}

class QcServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    manifest_ = write_qc_manifest(dir_.path(), {1, 3});
    store_ = std::make_unique<QcStore>(manifest_, dir_ / "v.jsonl");
    server_ = std::make_unique<QcServer>(*store_);
    port_ = server_->bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }
  void TearDown() override {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }
  httplib::Result post(const json& body) {
    return client().Post("/api/verdict", body.dump(), "application/json");
  }

  TempDir dir_{"qcs"};
  std::filesystem::path manifest_;
  std::unique_ptr<QcStore> store_;
  std::unique_ptr<QcServer> server_;
  std::thread thread_;
  int port_ = -1;
};

TEST_F(QcServerTest, QueueAndSample) {
  auto res = client().Get("/api/queue/next?reviewer=ann");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const json p = json::parse(res->body);
  EXPECT_EQ(p["id"], sid(0));
  EXPECT_EQ(p["needs_mp"], false);
  EXPECT_EQ(p["frames"].size(), 1u);

  res = client().Get("/api/queue/next");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  res = client().Get("/api/sample/" + sid(1));
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const json q = json::parse(res->body);
  EXPECT_EQ(q["needs_mp"], true);
  EXPECT_EQ(q["masks"].size(), 3u);
  EXPECT_EQ(q["fps"], "30000/1001");

  res = client().Get("/api/sample/ghost");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
}

TEST_F(QcServerTest, Media) {
  auto res = client().Get("/media/" + sid(1) + "/masks/2");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(res->body, vforge::testing::read_file(dir_ / ("masks/" + sid(1)) / mask_filename(2)));
  res = client().Get("/media/" + sid(1) + "/frames/0");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = client().Get("/media/" + sid(1) + "/masked/1");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = client().Get("/media/" + sid(1) + "/masks/3");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  res = client().Get("/media/ghost/frames/0");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
}

TEST_F(QcServerTest, VerdictStatuses) {
  json v = {{"sample_id", sid(0)}, {"reviewer_id", "ann"}, {"mg", true}, {"ta", false}};
  auto res = post(v);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);

  res = post(v);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 409);
  EXPECT_EQ(json::parse(res->body)["error"], "Conflict");

  res = post({{"sample_id", "ghost"}, {"reviewer_id", "ann"}, {"mg", true}, {"ta", true}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);

  res = post({{"sample_id", sid(1)}, {"reviewer_id", "ann"}, {"mg", true}, {"ta", true}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  res = client().Post("/api/verdict", "{oops", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  res = client().Get("/api/queue/next?reviewer=ann");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["id"], sid(1));

  res = post({{"sample_id", sid(1)}, {"reviewer_id", "ann"}, {"mg", true}, {"ta", true}, {"mp", true}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = client().Get("/api/queue/next?reviewer=ann");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);

  res = client().Get("/api/stats");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const json s = json::parse(res->body);
  EXPECT_EQ(s["n_reviewed"], 2);
  EXPECT_DOUBLE_EQ(s["mg_rate"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(s["ta_rate"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(s["mp_rate"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(s["hq_rate"].get<double>(), 0.5);
}

TEST_F(QcServerTest, FallbackPage) {
  auto res = client().Get("/");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_NE(res->body.find("/api/"), std::string::npos);
}
