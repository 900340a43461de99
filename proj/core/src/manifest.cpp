#include "vforge/manifest.hpp"

#include <json.hpp>

#include "vforge/error.hpp"

namespace vforge {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_error(const std::string& why) {
  throw Error(ErrorCode::kSchemaViolation, why);
}

ordered_json record_to_json(const SampleRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["task"] = to_string(r.task);
  j["frames_ref"] = r.frames_ref;
  j["masks_ref"] = r.masks_ref;
  if (r.masked_ref) {
    j["masked_ref"] = *r.masked_ref;
  }
  j["caption"] = r.caption;
  j["caption_length_class"] = to_string(r.caption_length_class);
  j["augmentation"] = to_string(r.augmentation);
  j["propagation"] = to_string(r.propagation);
  if (r.entity_label) {
    j["entity_label"] = *r.entity_label;
  }
  j["fps"] = r.fps.to_string();
  j["resolution"] = {r.resolution.width, r.resolution.height};
  j["num_frames"] = r.num_frames;
  if (r.kive) {
    j["kive"] = true;
  }
  j["provenance"] = ordered_json::object();
  for (const auto& [k, v] : r.provenance) {
    j["provenance"][k] = v;
  }
  return j;
}

const ordered_json& require(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    schema_error(std::string("missing field '") + key + "'");
  }
  return *it;
}

std::string require_string(const ordered_json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) {
    schema_error(std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    return std::nullopt;
  }
  if (!it->is_string()) {
    schema_error(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

SampleRecord record_from_json(const ordered_json& j) {
  if (!j.is_object()) {
    schema_error("record must be an object");
  }
  SampleRecord r;
  r.id = require_string(j, "id");
  r.task = parse_task(require_string(j, "task"));
  r.frames_ref = require_string(j, "frames_ref");
  r.masks_ref = require_string(j, "masks_ref");
  r.masked_ref = optional_string(j, "masked_ref");
  r.caption = require_string(j, "caption");
  r.caption_length_class = parse_caption_length(require_string(j, "caption_length_class"));
  r.augmentation = parse_augmentation(require_string(j, "augmentation"));
  r.propagation = parse_propagation(require_string(j, "propagation"));
  r.entity_label = optional_string(j, "entity_label");
  try {
    r.fps = Rational::parse(require_string(j, "fps"));
  } catch (const Error& e) {
    schema_error(e.what());
  }
  const auto& res = require(j, "resolution");
  if (!res.is_array() || res.size() != 2 || !res[0].is_number_integer() ||
      !res[1].is_number_integer()) {
    schema_error("resolution must be [width, height]");
  }
  r.resolution = Size{res[0].get<int>(), res[1].get<int>()};
  const auto& nf = require(j, "num_frames");
  if (!nf.is_number_integer()) {
    schema_error("num_frames must be an integer");
  }
  r.num_frames = nf.get<int>();
  if (auto it = j.find("kive"); it != j.end()) {
    if (!it->is_boolean()) {
      schema_error("kive must be a boolean");
    }
    r.kive = it->get<bool>();
  }
  if (auto it = j.find("provenance"); it != j.end()) {
    if (!it->is_object()) {
      schema_error("provenance must be an object");
    }
    for (const auto& [k, v] : it->items()) {
      r.provenance[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  validate_record(r);
  return r;
}

ordered_json parse_line(std::string_view line) {
  try {
    return ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    schema_error(std::string("malformed manifest line: ") + e.what());
  }
}

std::string header_line() {
  ordered_json h;
  h["schema_version"] = kSchemaVersion;
  return h.dump();
}

std::string footer_line(const std::map<Task, std::size_t>& counts) {
  ordered_json f;
  f["counts"] = ordered_json::object();
  for (Task t : {Task::kAdditionModification, Task::kDeletion}) {
    auto it = counts.find(t);
    f["counts"][std::string(to_string(t))] = it == counts.end() ? 0 : it->second;
  }
  return f.dump();
}

enum class LineKind { kHeader, kFooter, kRecord };

LineKind classify(const ordered_json& j) {
  if (j.is_object() && j.contains("schema_version") && !j.contains("id")) {
    return LineKind::kHeader;
  }
  if (j.is_object() && j.contains("counts") && !j.contains("id")) {
    return LineKind::kFooter;
  }
  return LineKind::kRecord;
}

// Reads header/records/footer, handing each record object to `on_record`.
template <typename OnRecord>
std::string read_lines(const fs::path& path, std::map<Task, std::size_t>& counts,
                       OnRecord&& on_record) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open manifest " + path.string());
  }
  std::string line;
  std::string version;
  std::optional<ordered_json> footer;
  std::unordered_set<std::string> ids;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    const ordered_json j = parse_line(line);
    switch (classify(j)) {
      case LineKind::kHeader:
        if (lineno != 1) {
          schema_error("schema header must be the first line");
        }
        version = j["schema_version"].is_string() ? j["schema_version"].get<std::string>() : "";
        if (version != kSchemaVersion) {
          schema_error("unsupported schema_version '" + version + "'");
        }
        break;
      case LineKind::kFooter:
        if (footer) {
          schema_error("duplicate counts trailer");
        }
        footer = j["counts"];
        break;
      case LineKind::kRecord: {
        if (version.empty()) {
          schema_error("records before schema header");
        }
        if (footer) {
          schema_error("record after counts trailer");
        }
        const std::string id = on_record(j);
        if (!ids.insert(id).second) {
          throw Error(ErrorCode::kDuplicateId, "duplicate record id '" + id + "'");
        }
        break;
      }
    }
  }
  if (version.empty()) {
    schema_error("manifest has no schema header");
  }
  if (footer) {
    for (Task t : {Task::kAdditionModification, Task::kDeletion}) {
      const std::string key(to_string(t));
      const std::size_t expected =
          footer->contains(key) && (*footer)[key].is_number_unsigned()
              ? (*footer)[key].get<std::size_t>()
              : 0;
      if (expected != counts[t]) {
        schema_error("counts trailer says " + std::to_string(expected) + " " + key +
                     " records, found " + std::to_string(counts[t]));
      }
    }
  }
  return version;
}

void write_all(const fs::path& path, const std::vector<std::string>& lines,
               const std::map<Task, std::size_t>& counts) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write manifest " + path.string());
  }
  out << header_line() << '\n';
  for (const auto& l : lines) {
    out << l << '\n';
  }
  out << footer_line(counts) << '\n';
}

}  // namespace

std::string encode_record(const SampleRecord& record) {
  validate_record(record);
  return record_to_json(record).dump();
}

SampleRecord decode_record(std::string_view line) { return record_from_json(parse_line(line)); }

std::string encode_eval_record(const EvalRecord& record) {
  validate_record(record.sample);
  ordered_json j = record_to_json(record.sample);
  if (record.edited_ref) {
    j["edited_ref"] = *record.edited_ref;
  }
  return j.dump();
}

EvalRecord decode_eval_record(std::string_view line) {
  const ordered_json j = parse_line(line);
  EvalRecord r;
  r.sample = record_from_json(j);
  r.edited_ref = optional_string(j, "edited_ref");
  return r;
}

void write_manifest(const fs::path& path, std::span<const SampleRecord> records) {
  std::vector<std::string> lines;
  std::unordered_set<std::string> ids;
  std::map<Task, std::size_t> counts;
  for (const auto& r : records) {
    lines.push_back(encode_record(r));
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate record id '" + r.id + "'");
    }
    ++counts[r.task];
  }
  write_all(path, lines, counts);
}

Manifest read_manifest(const fs::path& path) {
  Manifest m;
  std::map<Task, std::size_t> counts;
  m.schema_version = read_lines(path, counts, [&](const ordered_json& j) {
    m.records.push_back(record_from_json(j));
    ++counts[m.records.back().task];
    return m.records.back().id;
  });
  m.counts = counts;
  return m;
}

void write_eval_manifest(const fs::path& path, std::span<const EvalRecord> records) {
  std::vector<std::string> lines;
  std::unordered_set<std::string> ids;
  std::map<Task, std::size_t> counts;
  for (const auto& r : records) {
    lines.push_back(encode_eval_record(r));
    if (!ids.insert(r.sample.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate record id '" + r.sample.id + "'");
    }
    ++counts[r.sample.task];
  }
  write_all(path, lines, counts);
}

std::vector<EvalRecord> read_eval_manifest(const fs::path& path) {
  std::vector<EvalRecord> out;
  std::map<Task, std::size_t> counts;
  read_lines(path, counts, [&](const ordered_json& j) {
    EvalRecord r;
    r.sample = record_from_json(j);
    r.edited_ref = optional_string(j, "edited_ref");
    ++counts[r.sample.task];
    out.push_back(std::move(r));
    return out.back().sample.id;
  });
  return out;
}

ManifestWriter::ManifestWriter(const fs::path& path) : path_(path) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) {
    throw Error(ErrorCode::kIo, "cannot write manifest " + path.string());
  }
  out_ << header_line() << '\n';
  out_.flush();
}

ManifestWriter::~ManifestWriter() {
  try {
    close();
  } catch (...) {
  }
}

void ManifestWriter::append(const SampleRecord& record) {
  const std::string line = encode_record(record);
  std::lock_guard lock(mu_);
  if (closed_) {
    throw Error(ErrorCode::kInvalidArgument, "manifest " + path_.string() + " is closed");
  }
  if (!ids_.insert(record.id).second) {
    throw Error(ErrorCode::kDuplicateId, "duplicate record id '" + record.id + "'");
  }
  ++counts_[record.task];
  out_ << line << '\n';
  out_.flush();
}

void ManifestWriter::close() {
  std::lock_guard lock(mu_);
  if (closed_) {
    return;
  }
  closed_ = true;
  out_ << footer_line(counts_) << '\n';
  out_.close();
}

std::size_t ManifestWriter::size() const {
  std::lock_guard lock(mu_);
  return ids_.size();
}

std::string make_ref(const fs::path& manifest_dir, const fs::path& target) {
  const fs::path base = fs::weakly_canonical(fs::absolute(manifest_dir));
  const fs::path abs = fs::weakly_canonical(fs::absolute(target));
  fs::path rel = abs.lexically_relative(base);
  if (rel.empty()) {
    rel = abs;
  }
  return rel.generic_string();
}

fs::path resolve_ref(const fs::path& manifest_path, std::string_view ref) {
  const fs::path p{std::string(ref)};
  if (p.is_absolute()) {
    return p;
  }
  return (manifest_path.parent_path() / p).lexically_normal();
}

}  // namespace vforge
