#include <gtest/gtest.h>

#include <cstdio>
#include <sys/wait.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "vforge/image_io.hpp"
#include "vforge/manifest.hpp"

using namespace vforge;
using vforge::testing::TempDir;
using vforge::testing::read_file;

namespace {

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(VFORGE_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, BuildAddmodIsDeterministic) {
  TempDir dir("cli");
  const auto corpus = vforge::testing::write_fixture_corpus(dir / "src");
  for (const char* out : {"a", "b"}) {
    const CliRun r = cli("-q --seed 1 build-addmod --corpus " + q(corpus) + " --out " + q(dir / out));
    ASSERT_EQ(r.status, 0) << r.out;
  }
  const std::string a = read_file(dir / "a/manifest.jsonl");
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, read_file(dir / "b/manifest.jsonl"));

  const CliRun w = cli("-q --seed 1 --workers 3 build-addmod --corpus " + q(corpus) + " --out " +
                    q(dir / "c"));
  ASSERT_EQ(w.status, 0) << w.out;
  EXPECT_EQ(a, read_file(dir / "c/manifest.jsonl"));

  const CliRun s = cli("stats --json " + q(dir / "a/manifest.jsonl"));
  ASSERT_EQ(s.status, 0) << s.out;
  const auto j = nlohmann::json::parse(s.out);
  const Manifest m = read_manifest(dir / "a/manifest.jsonl");
  EXPECT_EQ(j["addition_modification"], m.records.size());
  EXPECT_EQ(j["deletion"], 0);
  EXPECT_EQ(j["sources"], 3);
  EXPECT_EQ(j["image_sources"], 2);
  EXPECT_EQ(j["video_sources"], 1);
}

TEST(Cli, BuildDeletionFromAddmodDonors) {
  TempDir dir("cli");
  const auto corpus = vforge::testing::write_fixture_corpus(dir / "src");
  ASSERT_EQ(cli("-q build-addmod --corpus " + q(corpus) + " --out " + q(dir / "am")).status, 0);
  const CliRun r = cli("-q build-del --corpus " + q(corpus) + " --donors " +
                    q(dir / "am/manifest.jsonl") + " --out " + q(dir / "del"));
  ASSERT_EQ(r.status, 0) << r.out;
  const Manifest m = read_manifest(dir / "del/manifest.jsonl");
  EXPECT_EQ(m.count(Task::kDeletion), m.records.size());
  for (const auto& rec : m.records) {
    EXPECT_EQ(rec.caption, kDeletionCaption);
  }
}

TEST(Cli, StrictIngestRejectsShortClip) {
  TempDir dir("cli");
  for (std::size_t i = 0; i < 3; ++i) {
    write_png(dir / "clip" / frame_filename(i), Image(Size{720, 720}, Rgb{1, 2, 3}));
  }
  const CliRun strict = cli("ingest --strict --fps 1 " + q(dir / "clip"));
  EXPECT_EQ(strict.status, 1);
  EXPECT_NE(strict.out.find("rejected:"), std::string::npos) << strict.out;

  const CliRun lax = cli("ingest --fps 1 --listing " + q(dir / "list.txt") + " " + q(dir / "clip"));
  EXPECT_EQ(lax.status, 0) << lax.out;
  EXPECT_NE(read_file(dir / "list.txt").find(" 1"), std::string::npos);
}

TEST(Cli, KiveChainAndCost) {
  const CliRun chain = cli("kive chain --frames 145");
  ASSERT_EQ(chain.status, 0) << chain.out;
  EXPECT_EQ(chain.out, "0 48\n48 96\n96 144\n");

  const CliRun cost = cli("kive cost --attempts 5");
  ASSERT_EQ(cost.status, 0) << cost.out;
  EXPECT_NE(cost.out.find("direct      85.5 PFLOPs"), std::string::npos) << cost.out;
  EXPECT_NE(cost.out.find("kive        24.6 PFLOPs"), std::string::npos) << cost.out;
}

TEST(Cli, BadArgumentsFail) {
  EXPECT_NE(cli("build-addmod").status, 0);
  EXPECT_NE(cli("kive chain --frames 0").status, 0);
  EXPECT_NE(cli("stats /nonexistent/manifest.jsonl").status, 0);
}
