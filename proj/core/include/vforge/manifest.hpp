#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "vforge/sample.hpp"

namespace vforge {

// Newline-delimited manifest:
//   line 1       {"schema_version":"vivid-forge/1"}
//   lines 2..n   one SampleRecord object per line, append order
//   last line    {"counts":{"addition_modification":A,"deletion":D}}   (absent if unfinished)
struct Manifest {
  std::string schema_version{kSchemaVersion};
  std::vector<SampleRecord> records;
  std::map<Task, std::size_t> counts;

  std::size_t count(Task task) const {
    auto it = counts.find(task);
    return it == counts.end() ? 0 : it->second;
  }
};

std::string encode_record(const SampleRecord& record);
SampleRecord decode_record(std::string_view line);
std::string encode_eval_record(const EvalRecord& record);
EvalRecord decode_eval_record(std::string_view line);

void write_manifest(const std::filesystem::path& path, std::span<const SampleRecord> records);
Manifest read_manifest(const std::filesystem::path& path);

void write_eval_manifest(const std::filesystem::path& path, std::span<const EvalRecord> records);
std::vector<EvalRecord> read_eval_manifest(const std::filesystem::path& path);

// Append-only writer. Appends are serialized internally; one writer per file.
class ManifestWriter {
 public:
  explicit ManifestWriter(const std::filesystem::path& path);
  ~ManifestWriter();

  ManifestWriter(const ManifestWriter&) = delete;
  ManifestWriter& operator=(const ManifestWriter&) = delete;

  // Validates the record and rejects duplicate ids.
  void append(const SampleRecord& record);
  // Writes the counts trailer. Further appends are rejected.
  void close();

  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::ofstream out_;
  std::filesystem::path path_;
  std::unordered_set<std::string> ids_;
  std::map<Task, std::size_t> counts_;
  bool closed_ = false;
};

// Refs are stored relative to the manifest's directory with '/' separators.
std::string make_ref(const std::filesystem::path& manifest_dir, const std::filesystem::path& target);
std::filesystem::path resolve_ref(const std::filesystem::path& manifest_path, std::string_view ref);

}  // namespace vforge
