#include "vforge/batch_plan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "vforge/error.hpp"
#include "vforge/random.hpp"

namespace vforge {

using json = nlohmann::ordered_json;

std::string_view to_string(Modality m) { return m == Modality::kImage ? "image" : "video"; }

void PlanConfig::validate() const {
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (batch_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "batch size must be at least 1");
  }
  if (!nonneg(image_ratio) || !nonneg(video_ratio) || image_ratio + video_ratio <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "modality ratios must be non-negative, not both zero");
  }
  if (!nonneg(addmod_weight) || !nonneg(deletion_weight) || addmod_weight + deletion_weight <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "task weights must be non-negative, not both zero");
  }
  if (!(kive_prob >= 0.0 && kive_prob <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kive probability must lie in [0, 1]");
  }
  if (strict_cycle && (image_ratio != std::floor(image_ratio) || video_ratio != std::floor(video_ratio))) {
    throw Error(ErrorCode::kInvalidArgument, "strict cycling needs integer ratios");
  }
}

SamplePools SamplePools::from_manifests(const Manifest& images, const Manifest& videos) {
  SamplePools p;
  for (const auto& r : images.records) {
    (r.task == Task::kAdditionModification ? p.image_addmod : p.image_deletion).push_back(r.id);
  }
  for (const auto& r : videos.records) {
    (r.task == Task::kAdditionModification ? p.video_addmod : p.video_deletion).push_back(r.id);
  }
  return p;
}

namespace {

// Shuffled pass over a pool; reshuffles when every id has been handed out.
class PoolCursor {
 public:
  PoolCursor(const std::vector<std::string>& ids, std::uint64_t seed) : ids_(ids), rng_(seed) {}

  const std::string& next() {
    if (pos_ == order_.size()) {
      order_.resize(ids_.size());
      for (std::size_t i = 0; i < order_.size(); ++i) {
        order_[i] = i;
      }
      for (std::size_t i = order_.size(); i > 1; --i) {
        std::swap(order_[i - 1], order_[rng_.index(i)]);
      }
      pos_ = 0;
    }
    return ids_[order_[pos_++]];
  }

 private:
  const std::vector<std::string>& ids_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

enum Salt : std::uint64_t { kModality = 1, kTask = 2, kKive = 3, kPool = 16 };

}  // namespace

BatchPlan plan_batches(const SamplePools& pools, const PlanConfig& config) {
  config.validate();
  const double p_image = config.image_ratio / (config.image_ratio + config.video_ratio);
  const double p_addmod = config.addmod_weight / (config.addmod_weight + config.deletion_weight);

  struct Need {
    const std::vector<std::string>* ids;
    Modality modality;
    Task task;
    bool used;
  };
  const Need needs[] = {
      {&pools.image_addmod, Modality::kImage, Task::kAdditionModification, p_image > 0 && p_addmod > 0},
      {&pools.image_deletion, Modality::kImage, Task::kDeletion, p_image > 0 && p_addmod < 1},
      {&pools.video_addmod, Modality::kVideo, Task::kAdditionModification, p_image < 1 && p_addmod > 0},
      {&pools.video_deletion, Modality::kVideo, Task::kDeletion, p_image < 1 && p_addmod < 1},
  };
  if (config.n_batches > 0) {
    for (const Need& n : needs) {
      if (n.used && n.ids->empty()) {
        throw Error(ErrorCode::kEmptyPool, "no " + std::string(to_string(n.modality)) + " " +
                                               std::string(to_string(n.task)) + " samples to draw");
      }
    }
  }

  Rng modality_rng(mix_seed(config.seed, kModality));
  Rng task_rng(mix_seed(config.seed, kTask));
  Rng kive_rng(mix_seed(config.seed, kKive));
  std::vector<PoolCursor> cursors;
  for (std::uint64_t i = 0; i < 4; ++i) {
    cursors.emplace_back(*needs[i].ids, mix_seed(config.seed, kPool + i));
  }

  const auto cycle = static_cast<std::size_t>(config.image_ratio + config.video_ratio);
  BatchPlan plan;
  plan.config = config;
  plan.batches.reserve(config.n_batches);
  for (std::size_t b = 0; b < config.n_batches; ++b) {
    Batch batch;
    const bool image = config.strict_cycle
                           ? (b % cycle) < static_cast<std::size_t>(config.image_ratio)
                           : modality_rng.bernoulli(p_image);
    batch.modality = image ? Modality::kImage : Modality::kVideo;
    batch.samples.reserve(config.batch_size);
    for (std::size_t s = 0; s < config.batch_size; ++s) {
      const bool addmod = task_rng.bernoulli(p_addmod);
      const std::size_t pool = (image ? 0 : 2) + (addmod ? 0 : 1);
      batch.samples.push_back(
          {cursors[pool].next(), addmod ? Task::kAdditionModification : Task::kDeletion});
    }
    batch.kive = !image && kive_rng.bernoulli(config.kive_prob);
    plan.batches.push_back(std::move(batch));
  }
  return plan;
}

PlanSummary summarize(const BatchPlan& plan) {
  PlanSummary s;
  for (const auto& b : plan.batches) {
    if (b.modality == Modality::kImage) {
      ++s.image_batches;
    } else {
      ++s.video_batches;
      s.kive_batches += b.kive;
    }
    for (const auto& x : b.samples) {
      ++s.samples;
      s.addmod_samples += x.task == Task::kAdditionModification;
    }
  }
  return s;
}

void write_batch_plan(const std::filesystem::path& path, const BatchPlan& plan) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write " + path.string());
  }
  const PlanConfig& c = plan.config;
  json header;
  header["seed"] = c.seed;
  header["batch_size"] = c.batch_size;
  header["n_batches"] = c.n_batches;
  header["ratios"] = {{"image", c.image_ratio},
                      {"video", c.video_ratio},
                      {"addition_modification", c.addmod_weight},
                      {"deletion", c.deletion_weight},
                      {"kive", c.kive_prob}};
  header["strict_cycle"] = c.strict_cycle;
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < plan.batches.size(); ++i) {
    const Batch& b = plan.batches[i];
    json j;
    j["batch"] = i;
    j["modality"] = to_string(b.modality);
    j["kive"] = b.kive;
    json samples = json::array();
    for (const auto& s : b.samples) {
      samples.push_back({{"id", s.id}, {"task", to_string(s.task)}});
    }
    j["samples"] = std::move(samples);
    out << j.dump() << '\n';
  }
  if (!out) {
    throw Error(ErrorCode::kIo, "short write to " + path.string());
  }
}

BatchPlan read_batch_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  BatchPlan plan;
  std::string line;
  try {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::kSchemaViolation, path.string() + ": missing plan header");
    }
    const json h = json::parse(line);
    PlanConfig& c = plan.config;
    c.seed = h.at("seed").get<std::uint64_t>();
    c.batch_size = h.at("batch_size").get<std::size_t>();
    c.n_batches = h.at("n_batches").get<std::size_t>();
    const auto& r = h.at("ratios");
    c.image_ratio = r.at("image").get<double>();
    c.video_ratio = r.at("video").get<double>();
    c.addmod_weight = r.at("addition_modification").get<double>();
    c.deletion_weight = r.at("deletion").get<double>();
    c.kive_prob = r.at("kive").get<double>();
    c.strict_cycle = h.value("strict_cycle", false);
    while (std::getline(in, line)) {
      if (line.empty()) {
        continue;
      }
      const json j = json::parse(line);
      Batch b;
      const auto m = j.at("modality").get<std::string>();
      if (m != "image" && m != "video") {
        throw Error(ErrorCode::kSchemaViolation, "unknown modality '" + m + "'");
      }
      b.modality = m == "image" ? Modality::kImage : Modality::kVideo;
      b.kive = j.at("kive").get<bool>();
      for (const auto& s : j.at("samples")) {
        b.samples.push_back({s.at("id").get<std::string>(), parse_task(s.at("task").get<std::string>())});
      }
      plan.batches.push_back(std::move(b));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, path.string() + ": " + e.what());
  }
  return plan;
}

}  // namespace vforge
