#include "vforge/corpus.hpp"

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "vforge/error.hpp"
#include "vforge/image_io.hpp"
#include "vforge/manifest.hpp"

namespace vforge {

namespace fs = std::filesystem;

std::vector<CorpusEntry> read_corpus_listing(const fs::path& listing) {
  std::ifstream in(listing);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open corpus listing " + listing.string());
  }
  std::vector<CorpusEntry> out;
  std::set<std::string> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    // The rate is the last field; everything before it is the path, which may
    // contain spaces.
    const auto last = line.find_last_not_of(" \t\r");
    if (last == std::string::npos) {
      continue;
    }
    line.resize(last + 1);
    const auto first = line.find_first_not_of(" \t");
    const auto split = line.find_last_of(" \t");
    if (split == std::string::npos || split < first) {
      throw Error(ErrorCode::kSchemaViolation, listing.string() + ":" + std::to_string(lineno) +
                                                   ": expected '<path> <fps>'");
    }
    const std::string fps = line.substr(split + 1);
    std::string path = line.substr(first, split - first);
    path.resize(path.find_last_not_of(" \t") + 1);
    CorpusEntry e;
    e.path = fs::path(path).is_relative() ? listing.parent_path() / path : fs::path(path);
    e.fps = Rational::parse(fps);
    fs::path name = fs::path(path).lexically_normal();
    if (name.filename().empty()) {
      name = name.parent_path();
    }
    e.source_id = sanitize_id(fs::is_directory(e.path) ? name.filename().string()
                                                         : name.stem().string());
    if (!ids.insert(e.source_id).second) {
      throw Error(ErrorCode::kDuplicateId, "corpus source id '" + e.source_id + "' appears twice");
    }
    out.push_back(std::move(e));
  }
  return out;
}

void append_corpus_listing(const fs::path& listing, const fs::path& path, Rational fps) {
  std::ofstream out(listing, std::ios::app);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot append to " + listing.string());
  }
  out << path.string() << ' ' << fps.to_string() << '\n';
}

namespace {

using SourceJob = std::function<std::vector<SampleRecord>(const CorpusEntry&, const FrameSequence&,
                                                          const std::string& frames_ref)>;

CorpusRunSummary run_corpus(const std::vector<CorpusEntry>& corpus, const CorpusRunOptions& run,
                            const fs::path& out_dir, const char* what, const SourceJob& job) {
  fs::create_directories(out_dir);
  std::vector<std::vector<SampleRecord>> results(corpus.size());
  std::vector<char> failed(corpus.size(), 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next++;
      if (i >= corpus.size()) {
        return;
      }
      const CorpusEntry& e = corpus[i];
      try {
        const FrameSequence frames = load_frames(e.path, e.fps, e.source_id);
        results[i] = job(e, frames, make_ref(out_dir, e.path));
        spdlog::info("{} {}: {} records", what, e.source_id, results[i].size());
      } catch (const Error& err) {
        failed[i] = 1;
        spdlog::error("{} {}: {}", what, e.source_id, err.what());
      } catch (...) {
        failed[i] = 1;
        std::lock_guard lock(fatal_mu);
        if (!fatal) {
          fatal = std::current_exception();
        }
      }
    }
  };
  const unsigned n = std::max(1U, std::min<unsigned>(run.workers, static_cast<unsigned>(corpus.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < n; ++t) {
      threads.emplace_back(worker);
    }
    for (auto& t : threads) {
      t.join();
    }
  }
  if (fatal) {
    std::rethrow_exception(fatal);
  }

  CorpusRunSummary summary;
  summary.sources = corpus.size();
  ManifestWriter writer(out_dir / "manifest.jsonl");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    summary.failed_sources += failed[i] != 0;
    for (const auto& r : results[i]) {
      writer.append(r);
    }
  }
  writer.close();
  summary.records = writer.size();
  if (summary.sources > 0 && summary.failed_sources == summary.sources) {
    throw Error(ErrorCode::kBackendError,
                std::string(what) + ": every source failed; see the log for details");
  }
  return summary;
}

}  // namespace

CorpusRunSummary run_addmod_corpus(const std::vector<CorpusEntry>& corpus, Gateway& gateway,
                                   const VocabularyConfig& vocab, const AddmodOptions& options,
                                   const CorpusRunOptions& run, const fs::path& out_dir) {
  const SampleStore store(out_dir, run.write_masked);
  return run_corpus(corpus, run, out_dir, "addmod",
                    [&](const CorpusEntry&, const FrameSequence& frames, const std::string& ref) {
                      return build_addmod_samples(gateway, frames, ref, vocab, options, run.seed,
                                                  store);
                    });
}

CorpusRunSummary run_deletion_corpus(const std::vector<CorpusEntry>& corpus, Gateway& gateway,
                                     const VocabularyConfig& vocab, const DonorPool& donors,
                                     const DeletionRunConfig& config, const CorpusRunOptions& run,
                                     const fs::path& out_dir) {
  if (donors.empty()) {
    throw Error(ErrorCode::kEmptyDonorPool, "the donor manifest has no usable mask sequences");
  }
  const SampleStore store(out_dir, run.write_masked);
  const FlowEstimator flow = config.builtin_flow ? builtin_flow_estimator() : gateway.flow_estimator();
  return run_corpus(corpus, run, out_dir, "deletion",
                    [&](const CorpusEntry&, const FrameSequence& frames, const std::string& ref) {
                      const auto regions =
                          position_background(gateway, frames[0], vocab, config.background);
                      return synthesize_deletion_samples(frames, ref, regions, donors, flow,
                                                         run.seed, config.deletion, store);
                    });
}

std::vector<std::string> IngestCheck::problems() const {
  std::vector<std::string> out;
  if (!resolution_ok) {
    out.push_back("resolution " + std::to_string(size.width) + "x" + std::to_string(size.height) +
                  " is below " + std::to_string(kMinShortSide) + "p");
  }
  if (!duration_ok) {
    std::ostringstream s;
    s << "duration " << duration_seconds << " s is shorter than " << kMinDurationSeconds << " s";
    out.push_back(s.str());
  }
  return out;
}

IngestCheck check_ingest_quality(Size size, std::size_t frames, Rational fps) {
  IngestCheck c;
  c.size = size;
  c.frames = frames;
  c.duration_seconds = static_cast<double>(frames) / fps.value();
  c.resolution_ok = std::min(size.width, size.height) >= kMinShortSide;
  c.duration_ok = frames == 1 || c.duration_seconds >= kMinDurationSeconds;
  return c;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

void run_frame_extraction(const std::string& command_template, const fs::path& input,
                          const fs::path& output_dir) {
  fs::create_directories(output_dir);
  std::string cmd = command_template;
  auto substitute = [&](const std::string& key, const std::string& value) {
    for (auto pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + value.size())) {
      cmd.replace(pos, key.size(), value);
    }
  };
  substitute("{input}", shell_quote(input.string()));
  substitute("{output}", shell_quote(output_dir.string()));
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::kIo, "frame extraction failed: " + cmd);
  }
}

}  // namespace vforge
