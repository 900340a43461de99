#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/manifest.hpp"

namespace vforge {

struct VerdictRecord {
  std::string sample_id;
  std::string reviewer_id;
  bool mg = false;
  std::optional<bool> mp;  // present iff the sample has more than one frame
  bool ta = false;
  std::string timestamp;   // ISO-8601 UTC

  bool operator==(const VerdictRecord&) const = default;
};

std::string encode_verdict(const VerdictRecord& v);
// Throws SchemaViolation.
VerdictRecord decode_verdict(std::string_view line);

std::string utc_timestamp();

struct QualityStats {
  std::optional<double> mg_rate;
  std::optional<double> mp_rate;  // over reviewed multi-frame samples only
  std::optional<double> ta_rate;
  std::optional<double> hq_rate;
  std::size_t n_reviewed = 0;
  std::size_t n_reviewed_video = 0;
};

// Majority vote per sample and dimension (ties fail); HQ is MG and TA, plus
// MP for multi-frame samples. Rates are over reviewed samples.
QualityStats quality_stats(const std::vector<SampleRecord>& samples,
                           const std::vector<VerdictRecord>& verdicts);

// Review queue and append-only verdict log for one manifest. Opening replays
// the existing log. Thread-safe.
class QcStore {
 public:
  QcStore(std::filesystem::path manifest_path, std::filesystem::path verdict_log);

  const std::filesystem::path& manifest_path() const { return manifest_path_; }
  const std::vector<SampleRecord>& samples() const { return manifest_.records; }

  // First sample in manifest order this reviewer has not judged.
  std::optional<SampleRecord> next_sample(const std::string& reviewer_id);
  std::optional<SampleRecord> find(const std::string& sample_id) const;

  // Throws UnknownSample, MpPresenceViolation, Conflict.
  void submit(VerdictRecord verdict);

  std::vector<VerdictRecord> verdicts() const;
  QualityStats stats() const;

 private:
  void check(const VerdictRecord& v) const;

  std::filesystem::path manifest_path_;
  Manifest manifest_;
  std::map<std::string, std::size_t> index_;
  mutable std::mutex mu_;
  std::ofstream log_;
  std::vector<VerdictRecord> verdicts_;
  std::set<std::pair<std::string, std::string>> judged_;  // (reviewer, sample)
  std::map<std::string, std::size_t> cursor_;             // per reviewer
};

}  // namespace vforge
