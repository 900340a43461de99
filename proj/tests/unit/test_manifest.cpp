#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "fixtures.hpp"
#include "vforge/error.hpp"
#include "vforge/manifest.hpp"
#include "vforge/random.hpp"

using namespace vforge;
using vforge::testing::sample_record;
using vforge::testing::TempDir;

namespace {

ErrorCode read_error(const std::filesystem::path& p) {
  try {
    read_manifest(p);
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(-1);
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p);
  for (const auto& l : lines) {
    out << l << '\n';
  }
}

}  // namespace

TEST(Manifest, EmptyRoundTrip) {
  TempDir dir("mf");
  write_manifest(dir / "m.jsonl", {});
  const Manifest m = read_manifest(dir / "m.jsonl");
  EXPECT_EQ(m.schema_version, "vivid-forge/1");
  EXPECT_TRUE(m.records.empty());
  EXPECT_EQ(m.count(Task::kDeletion), 0U);
}

TEST(Manifest, SingleRecordRoundTrip) {
  TempDir dir("mf");
  const SampleRecord r = sample_record("a");
  write_manifest(dir / "m.jsonl", std::vector<SampleRecord>{r});
  const Manifest m = read_manifest(dir / "m.jsonl");
  ASSERT_EQ(m.records.size(), 1U);
  EXPECT_EQ(m.records[0], r);
  EXPECT_EQ(m.count(Task::kAdditionModification), 1U);
}

TEST(Manifest, RandomRecordSetsRoundTrip) {
  TempDir dir("mf");
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SampleRecord> records;
    const std::size_t n = rng.index(12);
    for (std::size_t i = 0; i < n; ++i) {
      const bool del = rng.bernoulli(0.3);
      SampleRecord r = sample_record("r" + std::to_string(i), del ? Task::kDeletion : Task::kAdditionModification);
      r.augmentation = kAllAugmentations[rng.index(6)];
      r.caption_length_class = static_cast<CaptionLength>(rng.index(3));
      r.propagation = static_cast<Propagation>(rng.index(3));
      r.num_frames = 1 + static_cast<int>(rng.index(60));
      r.kive = rng.bernoulli(0.2);
      if (rng.bernoulli(0.5)) {
        r.masked_ref.reset();
      }
      if (rng.bernoulli(0.5)) {
        r.provenance.clear();
      }
      r.provenance["quote\"and\\slash"] = "\xc3\xa9t\xc3\xa9\n";
      records.push_back(r);
    }
    write_manifest(dir / "m.jsonl", records);
    const Manifest m = read_manifest(dir / "m.jsonl");
    ASSERT_EQ(m.records, records);
  }
}

TEST(Manifest, MissingCaptionIsSchemaViolation) {
  TempDir dir("mf");
  SampleRecord r = sample_record("a");
  r.caption.clear();
  try {
    write_manifest(dir / "m.jsonl", std::vector<SampleRecord>{r});
    FAIL() << "expected SchemaViolation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaViolation);
  }
  // A hand-written line without the caption field fails on read as well.
  write_manifest(dir / "ok.jsonl", std::vector<SampleRecord>{sample_record("a")});
  std::ifstream in(dir / "ok.jsonl");
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) {
    lines.push_back(l);
  }
  const auto pos = lines[1].find("\"caption\":");
  const auto end = lines[1].find(",\"caption_length_class\"");
  ASSERT_NE(pos, std::string::npos);
  lines[1].erase(pos, end - pos + 1);
  write_lines(dir / "bad.jsonl", lines);
  EXPECT_EQ(read_error(dir / "bad.jsonl"), ErrorCode::kSchemaViolation);
}

TEST(Manifest, DeletionCaptionMustBeFixed) {
  SampleRecord r = sample_record("d", Task::kDeletion);
  EXPECT_NO_THROW(validate_record(r));
  EXPECT_EQ(r.caption, "Remove objects and generate areas that blend with the background.");
  r.caption += " ";
  EXPECT_THROW(validate_record(r), Error);
}

TEST(Manifest, DuplicateIds) {
  TempDir dir("mf");
  const std::vector<SampleRecord> dup{sample_record("x"), sample_record("x")};
  try {
    write_manifest(dir / "m.jsonl", dup);
    FAIL() << "expected DuplicateId";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateId);
  }
  const std::string rec = encode_record(sample_record("x"));
  write_lines(dir / "d.jsonl", {R"({"schema_version":"vivid-forge/1"})", rec, rec,
                                R"({"counts":{"addition_modification":2,"deletion":0}})"});
  EXPECT_EQ(read_error(dir / "d.jsonl"), ErrorCode::kDuplicateId);
}

TEST(Manifest, CountsMustMatch) {
  TempDir dir("mf");
  write_lines(dir / "c.jsonl", {R"({"schema_version":"vivid-forge/1"})",
                                encode_record(sample_record("x")),
                                R"({"counts":{"addition_modification":2,"deletion":0}})"});
  EXPECT_EQ(read_error(dir / "c.jsonl"), ErrorCode::kSchemaViolation);
}

TEST(Manifest, WrongSchemaVersion) {
  TempDir dir("mf");
  write_lines(dir / "v.jsonl", {R"({"schema_version":"vivid-forge/0"})",
                                R"({"counts":{"addition_modification":0,"deletion":0}})"});
  EXPECT_EQ(read_error(dir / "v.jsonl"), ErrorCode::kSchemaViolation);
}

TEST(Manifest, UnknownEnumValue) {
  std::string line = encode_record(sample_record("x"));
  const auto pos = line.find("hull_expand");
  ASSERT_NE(pos, std::string::npos);
  line.replace(pos, 11, "blur");
  EXPECT_THROW(decode_record(line), Error);
}

TEST(Manifest, FieldNamesMatchRecord) {
  const std::string line = encode_record(sample_record("x"));
  for (const char* field : {"\"id\"", "\"task\"", "\"frames_ref\"", "\"masks_ref\"", "\"masked_ref\"",
                            "\"caption\"", "\"caption_length_class\"", "\"augmentation\"",
                            "\"propagation\"", "\"entity_label\"", "\"fps\"", "\"resolution\"",
                            "\"provenance\""}) {
    EXPECT_NE(line.find(field), std::string::npos) << field;
  }
}

TEST(Manifest, WriterSerializesConcurrentAppends) {
  TempDir dir("mf");
  {
    ManifestWriter w(dir / "w.jsonl");
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&, t] {
        for (int i = 0; i < 25; ++i) {
          w.append(sample_record("t" + std::to_string(t) + "_" + std::to_string(i)));
        }
      });
    }
    for (auto& t : threads) {
      t.join();
    }
    EXPECT_THROW(w.append(sample_record("t0_0")), Error);
    w.close();
  }
  const Manifest m = read_manifest(dir / "w.jsonl");
  EXPECT_EQ(m.records.size(), 100U);
}

TEST(Manifest, EvalRecordRoundTrip) {
  TempDir dir("mf");
  EvalRecord a{sample_record("a"), "edited/a"};
  EvalRecord b{sample_record("b", Task::kDeletion), std::nullopt};
  write_eval_manifest(dir / "e.jsonl", std::vector<EvalRecord>{a, b});
  const auto back = read_eval_manifest(dir / "e.jsonl");
  ASSERT_EQ(back.size(), 2U);
  EXPECT_EQ(back[0], a);
  EXPECT_EQ(back[1], b);
}

TEST(Manifest, RefsAreRelativeToManifest) {
  TempDir dir("mf");
  const auto target = dir / "masks" / "s" / "e0";
  EXPECT_EQ(make_ref(dir.path(), target), "masks/s/e0");
  EXPECT_EQ(resolve_ref(dir / "manifest.jsonl", "masks/s/e0").lexically_normal(),
            target.lexically_normal());
}
