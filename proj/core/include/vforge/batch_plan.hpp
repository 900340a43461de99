#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/manifest.hpp"
#include "vforge/sample.hpp"

namespace vforge {

enum class Modality { kImage, kVideo };

std::string_view to_string(Modality m);

struct PlannedSample {
  std::string id;
  Task task = Task::kAdditionModification;

  bool operator==(const PlannedSample&) const = default;
};

struct Batch {
  Modality modality = Modality::kImage;
  std::vector<PlannedSample> samples;
  bool kive = false;  // always false for image batches

  bool operator==(const Batch&) const = default;
};

struct PlanConfig {
  std::size_t n_batches = 0;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  double image_ratio = 10.0;
  double video_ratio = 1.0;
  double addmod_weight = 3.0;
  double deletion_weight = 1.0;
  double kive_prob = 0.5;
  // Deterministic image_ratio-then-video_ratio cycle instead of a per-batch draw.
  bool strict_cycle = false;

  void validate() const;
};

struct SamplePools {
  std::vector<std::string> image_addmod;
  std::vector<std::string> image_deletion;
  std::vector<std::string> video_addmod;
  std::vector<std::string> video_deletion;

  static SamplePools from_manifests(const Manifest& images, const Manifest& videos);
};

struct BatchPlan {
  std::vector<Batch> batches;
  PlanConfig config;
};

// Modality per batch ~ Bernoulli(image share); task per sample ~ categorical
// over the task weights, drawn from a per-pool shuffle that restarts when
// exhausted; video batches carry kive ~ Bernoulli(kive_prob). Throws EmptyPool
// for any pool that could be drawn from but is empty.
BatchPlan plan_batches(const SamplePools& pools, const PlanConfig& config);

struct PlanSummary {
  std::size_t image_batches = 0;
  std::size_t video_batches = 0;
  std::size_t kive_batches = 0;
  std::size_t samples = 0;
  std::size_t addmod_samples = 0;
};

PlanSummary summarize(const BatchPlan& plan);

// A header line with the seed and ratios, then one line per batch.
void write_batch_plan(const std::filesystem::path& path, const BatchPlan& plan);
BatchPlan read_batch_plan(const std::filesystem::path& path);

}  // namespace vforge
