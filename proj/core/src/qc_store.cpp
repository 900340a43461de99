#include "vforge/qc_store.hpp"

#include <chrono>
#include <ctime>

#include <json.hpp>

#include "vforge/error.hpp"

namespace vforge {

using json = nlohmann::ordered_json;

std::string encode_verdict(const VerdictRecord& v) {
  json j;
  j["sample_id"] = v.sample_id;
  j["reviewer_id"] = v.reviewer_id;
  j["mg"] = v.mg;
  if (v.mp) {
    j["mp"] = *v.mp;
  }
  j["ta"] = v.ta;
  j["timestamp"] = v.timestamp;
  return j.dump();
}

VerdictRecord decode_verdict(std::string_view line) {
  try {
    const json j = json::parse(line);
    VerdictRecord v;
    v.sample_id = j.at("sample_id").get<std::string>();
    v.reviewer_id = j.at("reviewer_id").get<std::string>();
    v.mg = j.at("mg").get<bool>();
    if (j.contains("mp") && !j.at("mp").is_null()) {
      v.mp = j.at("mp").get<bool>();
    }
    v.ta = j.at("ta").get<bool>();
    v.timestamp = j.value("timestamp", std::string());
    if (v.sample_id.empty() || v.reviewer_id.empty()) {
      throw Error(ErrorCode::kSchemaViolation, "verdict needs sample_id and reviewer_id");
    }
    return v;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("malformed verdict: ") + e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

QualityStats quality_stats(const std::vector<SampleRecord>& samples,
                           const std::vector<VerdictRecord>& verdicts) {
  struct Votes {
    int n = 0, mg = 0, ta = 0, mp_n = 0, mp = 0;
  };
  std::map<std::string, Votes> votes;
  for (const auto& v : verdicts) {
    Votes& t = votes[v.sample_id];
    ++t.n;
    t.mg += v.mg;
    t.ta += v.ta;
    if (v.mp) {
      ++t.mp_n;
      t.mp += *v.mp;
    }
  }
  auto majority = [](int yes, int n) { return n > 0 && 2 * yes > n; };

  QualityStats s;
  std::size_t mg = 0, ta = 0, mp = 0, hq = 0;
  for (const auto& rec : samples) {
    auto it = votes.find(rec.id);
    if (it == votes.end()) {
      continue;
    }
    const Votes& t = it->second;
    ++s.n_reviewed;
    const bool pass_mg = majority(t.mg, t.n);
    const bool pass_ta = majority(t.ta, t.n);
    bool pass = pass_mg && pass_ta;
    mg += pass_mg;
    ta += pass_ta;
    if (rec.num_frames > 1) {
      ++s.n_reviewed_video;
      const bool pass_mp = majority(t.mp, t.mp_n);
      mp += pass_mp;
      pass = pass && pass_mp;
    }
    hq += pass;
  }
  auto rate = [](std::size_t k, std::size_t n) {
    return n == 0 ? std::nullopt
                  : std::optional<double>(static_cast<double>(k) / static_cast<double>(n));
  };
  s.mg_rate = rate(mg, s.n_reviewed);
  s.ta_rate = rate(ta, s.n_reviewed);
  s.hq_rate = rate(hq, s.n_reviewed);
  s.mp_rate = rate(mp, s.n_reviewed_video);
  return s;
}

QcStore::QcStore(std::filesystem::path manifest_path, std::filesystem::path verdict_log)
    : manifest_path_(std::move(manifest_path)), manifest_(read_manifest(manifest_path_)) {
  for (std::size_t i = 0; i < manifest_.records.size(); ++i) {
    index_[manifest_.records[i].id] = i;
  }
  if (std::filesystem::exists(verdict_log)) {
    std::ifstream in(verdict_log, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    std::size_t lineno = 0;
    while (pos < content.size()) {
      const auto nl = content.find('\n', pos);
      if (nl == std::string::npos) {
        // A torn final write from a crash; it was never acknowledged.
        break;
      }
      ++lineno;
      const std::string_view line(content.data() + pos, nl - pos);
      pos = nl + 1;
      if (line.empty()) {
        continue;
      }
      VerdictRecord v = decode_verdict(line);
      try {
        check(v);
      } catch (const Error& e) {
        throw Error(ErrorCode::kSchemaViolation, verdict_log.string() + ":" +
                                                     std::to_string(lineno) + ": " + e.what());
      }
      judged_.emplace(v.reviewer_id, v.sample_id);
      verdicts_.push_back(std::move(v));
    }
    if (pos < content.size()) {
      std::filesystem::resize_file(verdict_log, pos);
    }
  } else if (verdict_log.has_parent_path()) {
    std::filesystem::create_directories(verdict_log.parent_path());
  }
  log_.open(verdict_log, std::ios::binary | std::ios::app);
  if (!log_) {
    throw Error(ErrorCode::kIo, "cannot open verdict log " + verdict_log.string());
  }
}

std::optional<SampleRecord> QcStore::next_sample(const std::string& reviewer_id) {
  std::lock_guard lock(mu_);
  std::size_t& c = cursor_[reviewer_id];
  while (c < manifest_.records.size() &&
         judged_.count({reviewer_id, manifest_.records[c].id}) != 0) {
    ++c;
  }
  if (c == manifest_.records.size()) {
    return std::nullopt;
  }
  return manifest_.records[c];
}

std::optional<SampleRecord> QcStore::find(const std::string& sample_id) const {
  auto it = index_.find(sample_id);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return manifest_.records[it->second];
}

void QcStore::check(const VerdictRecord& v) const {
  auto it = index_.find(v.sample_id);
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownSample, "no sample '" + v.sample_id + "'");
  }
  const bool video = manifest_.records[it->second].num_frames > 1;
  if (video != v.mp.has_value()) {
    throw Error(ErrorCode::kMpPresenceViolation,
                video ? "multi-frame sample '" + v.sample_id + "' needs an mp verdict"
                      : "single-frame sample '" + v.sample_id + "' takes no mp verdict");
  }
  if (judged_.count({v.reviewer_id, v.sample_id}) != 0) {
    throw Error(ErrorCode::kConflict,
                "reviewer '" + v.reviewer_id + "' already judged '" + v.sample_id + "'");
  }
}

void QcStore::submit(VerdictRecord verdict) {
  if (verdict.reviewer_id.empty()) {
    throw Error(ErrorCode::kSchemaViolation, "verdict needs a reviewer_id");
  }
  if (verdict.timestamp.empty()) {
    verdict.timestamp = utc_timestamp();
  }
  std::lock_guard lock(mu_);
  check(verdict);
  log_ << encode_verdict(verdict) << '\n';
  log_.flush();
  if (!log_) {
    throw Error(ErrorCode::kIo, "verdict log write failed");
  }
  judged_.emplace(verdict.reviewer_id, verdict.sample_id);
  verdicts_.push_back(std::move(verdict));
}

std::vector<VerdictRecord> QcStore::verdicts() const {
  std::lock_guard lock(mu_);
  return verdicts_;
}

QualityStats QcStore::stats() const { return quality_stats(manifest_.records, verdicts()); }

}  // namespace vforge
