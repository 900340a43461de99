#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vforge/pipeline_addmod.hpp"
#include "vforge/pipeline_deletion.hpp"
#include "vforge/sequence.hpp"

namespace vforge {

struct CorpusEntry {
  std::filesystem::path path;  // frame directory or single image
  Rational fps;
  std::string source_id;
};

// One "<path> <fps>" per line; '#' starts a comment, blank lines are ignored.
// Relative paths resolve against the listing's directory. The source id is the
// sanitized file or directory name. Throws DuplicateId, SchemaViolation.
std::vector<CorpusEntry> read_corpus_listing(const std::filesystem::path& listing);
void append_corpus_listing(const std::filesystem::path& listing, const std::filesystem::path& path,
                           Rational fps);

struct CorpusRunOptions {
  unsigned workers = 1;
  std::uint64_t seed = 0;
  bool write_masked = true;
};

struct CorpusRunSummary {
  std::size_t sources = 0;
  std::size_t failed_sources = 0;
  std::size_t records = 0;
};

// Runs the addition/modification pipeline over every source and writes
// <out_dir>/manifest.jsonl in listing order. Per-source failures are logged
// and counted; the run aborts only if every source fails.
CorpusRunSummary run_addmod_corpus(const std::vector<CorpusEntry>& corpus, Gateway& gateway,
                                   const VocabularyConfig& vocab, const AddmodOptions& options,
                                   const CorpusRunOptions& run, const std::filesystem::path& out_dir);

struct DeletionRunConfig {
  RegionSearchConfig background = default_background_search();
  DeletionOptions deletion;
  bool builtin_flow = false;  // bypass the flow backend
};

CorpusRunSummary run_deletion_corpus(const std::vector<CorpusEntry>& corpus, Gateway& gateway,
                                     const VocabularyConfig& vocab, const DonorPool& donors,
                                     const DeletionRunConfig& config, const CorpusRunOptions& run,
                                     const std::filesystem::path& out_dir);

inline constexpr int kMinShortSide = 720;
inline constexpr double kMinDurationSeconds = 5.0;

struct IngestCheck {
  Size size;
  std::size_t frames = 0;
  double duration_seconds = 0.0;
  bool resolution_ok = false;
  bool duration_ok = false;  // vacuous for single images

  bool ok() const { return resolution_ok && duration_ok; }
  std::vector<std::string> problems() const;
};

IngestCheck check_ingest_quality(Size size, std::size_t frames, Rational fps);

// Substitutes {input} and {output} (shell-quoted) into the template and runs it
// with /bin/sh. Throws Io on a non-zero exit.
void run_frame_extraction(const std::string& command_template, const std::filesystem::path& input,
                          const std::filesystem::path& output_dir);

std::string shell_quote(const std::string& s);

}  // namespace vforge
