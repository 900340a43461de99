#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vforge/flow.hpp"
#include "vforge/manifest.hpp"
#include "vforge/pipeline_addmod.hpp"

namespace vforge {

inline RegionSearchConfig default_background_search() {
  RegionSearchConfig c;
  c.area.max_fraction = 0.95;
  return c;
}

// Background regions of the first frame, found with the background allowlist.
std::vector<Region> position_background(Gateway& gateway, const Image& first_frame,
                                        const VocabularyConfig& vocab,
                                        const RegionSearchConfig& config = default_background_search());

// Mask sequences borrowed from addition/modification samples. Masks load on
// first use and stay cached; safe to share between workers.
class DonorPool {
 public:
  struct Entry {
    std::string id;
    std::filesystem::path masks_dir;
    std::size_t length = 0;
  };

  DonorPool() = default;
  explicit DonorPool(std::vector<Entry> entries);

  // One donor per distinct un-augmented mask directory of the addmod records.
  static DonorPool from_manifest(const std::filesystem::path& manifest_path);
  // In-memory donors, mainly for tests.
  static DonorPool from_sequences(std::vector<std::pair<std::string, MaskSequence>> donors);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entry& entry(std::size_t i) const { return entries_[i]; }
  std::shared_ptr<const MaskSequence> masks(std::size_t i) const;

 private:
  std::vector<Entry> entries_;
  std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
  mutable std::vector<std::shared_ptr<const MaskSequence>> cache_;
};

struct DeletionOptions {
  bool augment = false;  // also emit the five augmented variants of each mask sequence
  unsigned flow_workers = 1;
};

// Per region: pick a donor (seeded), paste its first mask into the region,
// then propagate. Videos give a copied and a flowed record sharing the paste
// transform; single frames give one record. Throws EmptyDonorPool.
std::vector<SampleRecord> synthesize_deletion_samples(const FrameSequence& target,
                                                      const std::string& frames_ref,
                                                      const std::vector<Region>& regions,
                                                      const DonorPool& pool,
                                                      const FlowEstimator& flow,
                                                      std::uint64_t seed,
                                                      const DeletionOptions& options,
                                                      const SampleStore& store);

}  // namespace vforge
