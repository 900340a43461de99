#include "vforge/pipeline_deletion.hpp"

#include <set>

#include <spdlog/spdlog.h>

#include "vforge/error.hpp"
#include "vforge/image_io.hpp"
#include "vforge/random.hpp"

namespace vforge {

std::vector<Region> position_background(Gateway& gateway, const Image& first_frame,
                                        const VocabularyConfig& vocab,
                                        const RegionSearchConfig& config) {
  return find_regions(gateway, first_frame, LabelMode::kBackground, vocab, config);
}

DonorPool::DonorPool(std::vector<Entry> entries)
    : entries_(std::move(entries)), cache_(entries_.size()) {}

DonorPool DonorPool::from_manifest(const std::filesystem::path& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  std::vector<Entry> entries;
  std::set<std::string> seen;
  for (const auto& r : m.records) {
    if (r.task != Task::kAdditionModification || r.augmentation != AugmentationKind::kNone) {
      continue;
    }
    if (!seen.insert(r.masks_ref).second) {
      continue;
    }
    entries.push_back(Entry{r.masks_ref, resolve_ref(manifest_path, r.masks_ref),
                            static_cast<std::size_t>(r.num_frames)});
  }
  return DonorPool(std::move(entries));
}

DonorPool DonorPool::from_sequences(std::vector<std::pair<std::string, MaskSequence>> donors) {
  std::vector<Entry> entries;
  for (const auto& [id, masks] : donors) {
    entries.push_back(Entry{id, {}, masks.length()});
  }
  DonorPool pool(std::move(entries));
  for (std::size_t i = 0; i < donors.size(); ++i) {
    pool.cache_[i] = std::make_shared<const MaskSequence>(std::move(donors[i].second));
  }
  return pool;
}

std::shared_ptr<const MaskSequence> DonorPool::masks(std::size_t i) const {
  std::lock_guard lock(*mu_);
  if (!cache_.at(i)) {
    cache_[i] = std::make_shared<const MaskSequence>(load_masks(entries_[i].masks_dir));
  }
  return cache_[i];
}

namespace {

struct Variant {
  Propagation propagation;
  MaskSequence masks;
};

}  // namespace

std::vector<SampleRecord> synthesize_deletion_samples(const FrameSequence& target,
                                                      const std::string& frames_ref,
                                                      const std::vector<Region>& regions,
                                                      const DonorPool& pool,
                                                      const FlowEstimator& flow,
                                                      std::uint64_t seed,
                                                      const DeletionOptions& options,
                                                      const SampleStore& store) {
  if (pool.empty()) {
    throw Error(ErrorCode::kEmptyDonorPool, "deletion synthesis needs at least one donor");
  }
  const std::string src = sanitize_id(target.source_id());
  const std::uint64_t base = mix_seed(seed, hash_string(target.source_id()));
  const bool video = target.length() > 1;

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool.entry(i).length >= target.length()) {
      eligible.push_back(i);
    }
  }

  std::optional<std::vector<FlowField>> flows;
  std::vector<SampleRecord> records;
  for (std::size_t k = 0; k < regions.size(); ++k) {
    const Region& region = regions[k];
    const std::string key = "bg" + std::to_string(k);
    if (eligible.empty()) {
      spdlog::warn("{}: no donor covers {} frames, region {} skipped", target.source_id(),
                   target.length(), k);
      continue;
    }
    const std::uint64_t region_seed = mix_seed(base, k);
    Rng rng(region_seed);
    const std::size_t donor_index = eligible[rng.index(eligible.size())];
    const auto donor = pool.masks(donor_index);

    PasteResult paste;
    try {
      paste = paste_mask(region.mask, (*donor)[0], mix_seed(region_seed, 1));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoFeasiblePlacement && e.code() != ErrorCode::kEmptyMask) {
        throw;
      }
      spdlog::info("{}: region {} ('{}') skipped: {}", target.source_id(), k, region.label,
                   e.what());
      continue;
    }

    std::vector<Variant> variants;
    if (!video) {
      variants.push_back({Propagation::kCopied, MaskSequence({paste.mask})});
    } else {
      MaskSequence copied =
          propagate_by_copy(*donor, paste.transform, target.length(), target.size());
      if (copied.any_empty()) {
        spdlog::info("{}: region {} copied masks leave the frame, dropped", target.source_id(), k);
      } else {
        variants.push_back({Propagation::kCopied, std::move(copied)});
      }
      try {
        if (!flows) {
          flows = estimate_flows(target, flow, options.flow_workers);
        }
        variants.push_back({Propagation::kFlowed, propagate_by_flow(*flows, paste.mask)});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyMask) {
          throw;
        }
        spdlog::info("{}: region {} flowed mask vanished, dropped", target.source_id(), k);
      }
    }

    for (const Variant& v : variants) {
      std::vector<std::pair<AugmentationKind, MaskSequence>> outputs;
      if (options.augment) {
        for (AugmentationKind kind : kAllAugmentations) {
          outputs.emplace_back(kind, augment(v.masks, kind,
                                             mix_seed(region_seed, 16 + static_cast<int>(kind))));
        }
      } else {
        outputs.emplace_back(AugmentationKind::kNone, v.masks);
      }
      for (const auto& [kind, masks] : outputs) {
        std::string id = src + "." + key;
        std::string group = key;
        if (video) {
          id += "." + std::string(to_string(v.propagation));
          group += "/" + std::string(to_string(v.propagation));
        }
        if (options.augment) {
          id += "." + std::string(to_string(kind));
          group += "/" + std::string(to_string(kind));
        }
        SampleRecord r;
        r.id = std::move(id);
        r.task = Task::kDeletion;
        r.frames_ref = frames_ref;
        r.masks_ref = store.put_masks(src, group, masks);
        r.masked_ref = store.put_masked(src, group, target, masks);
        r.caption = std::string(kDeletionCaption);
        r.caption_length_class = CaptionLength::kShort;
        r.augmentation = kind;
        r.propagation = v.propagation;
        r.fps = target.fps();
        r.resolution = target.size();
        r.num_frames = static_cast<int>(target.length());
        r.provenance["source"] = target.source_id();
        r.provenance["background_label"] = region.label;
        r.provenance["donor"] = pool.entry(donor_index).id;
        const Point off = paste.transform.offset();
        r.provenance["paste_offset"] = std::to_string(off.x) + "," + std::to_string(off.y);
        r.provenance["paste_anchor"] = std::to_string(paste.transform.anchor.x) + "," +
                                       std::to_string(paste.transform.anchor.y);
        r.provenance["paste_top_left"] = std::to_string(paste.transform.top_left.x) + "," +
                                         std::to_string(paste.transform.top_left.y);
        r.provenance["paste_scale_step"] = std::to_string(paste.attempt);
        records.push_back(std::move(r));
      }
    }
  }
  return records;
}

}  // namespace vforge
