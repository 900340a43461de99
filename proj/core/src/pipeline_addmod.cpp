#include "vforge/pipeline_addmod.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "vforge/error.hpp"
#include "vforge/random.hpp"

namespace vforge {

namespace {

constexpr CaptionLength kLengths[] = {CaptionLength::kShort, CaptionLength::kMedium,
                                      CaptionLength::kLong};

std::uint64_t source_seed(std::uint64_t seed, const FrameSequence& source) {
  return mix_seed(seed, hash_string(source.source_id()));
}

}  // namespace

std::vector<Region> find_regions(Gateway& gateway, const Image& frame, LabelMode mode,
                                 const VocabularyConfig& vocab, const RegionSearchConfig& config) {
  config.area.validate();
  const auto labels = filter_labels(gateway.tag_frame(frame), mode, vocab);
  std::vector<Detection> dets;
  for (const auto& label : labels) {
    for (auto& d : gateway.detect_label(frame, label)) {
      if (d.score >= config.detection_threshold) {
        dets.push_back(std::move(d));
      }
    }
  }
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) { return a.score > b.score; });
  if (dets.size() > static_cast<std::size_t>(config.max_detections_per_frame)) {
    dets.resize(static_cast<std::size_t>(config.max_detections_per_frame));
  }
  std::vector<Region> out;
  for (const auto& d : dets) {
    if (out.size() >= static_cast<std::size_t>(config.max_regions)) {
      break;
    }
    Mask m = gateway.segment_box(frame, d.box);
    if (!area_filter(m, config.area)) {
      spdlog::debug("dropping '{}' region: area {} of {}", d.label, m.area(), frame.size().pixels());
      continue;
    }
    out.push_back(Region{d.label, std::move(m), d.score});
  }
  return out;
}

std::vector<Region> select_entities(Gateway& gateway, const Image& first_frame,
                                    const VocabularyConfig& vocab,
                                    const RegionSearchConfig& config) {
  return find_regions(gateway, first_frame, LabelMode::kForeground, vocab, config);
}

std::vector<AddmodEntity> prepare_addmod_entities(Gateway& gateway, const FrameSequence& source,
                                                  const VocabularyConfig& vocab,
                                                  const AddmodOptions& options,
                                                  std::uint64_t seed) {
  options.augmented_area.validate();
  const std::uint64_t base = source_seed(seed, source);
  auto regions = select_entities(gateway, source[0], vocab, options.selection);

  std::vector<AddmodEntity> out;
  for (std::size_t k = 0; k < regions.size(); ++k) {
    Region& region = regions[k];
    try {
      MaskSequence masks = source.length() == 1
                               ? MaskSequence({region.mask})
                               : gateway.propagate_mask(source, region.mask);
      if (masks.any_empty()) {
        spdlog::info("{}: entity {} ('{}') lost during propagation, skipped", source.source_id(),
                     k, region.label);
        continue;
      }
      const FrameSequence cropped = crop_entity(source, masks);
      const std::string text =
          gateway.caption_entity(cropped, region.label, render_caption_prompt(region.label));
      CaptionTriplet captions = parse_caption_triplet(text, region.label);

      AddmodEntity entity{region.label, region.score, masks, std::move(captions), {}};
      const std::uint64_t entity_seed = mix_seed(base, k);
      for (AugmentationKind kind : options.kinds) {
        MaskSequence aug =
            augment(masks, kind, mix_seed(entity_seed, static_cast<std::uint64_t>(kind)));
        if (!area_filter(aug, options.augmented_area)) {
          spdlog::debug("{}: entity {} {} mask filtered by area", source.source_id(), k,
                        to_string(kind));
          continue;
        }
        entity.augmented.emplace_back(kind, std::move(aug));
      }
      out.push_back(std::move(entity));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kBackendTimeout || e.code() == ErrorCode::kProtocolError) {
        throw;
      }
      spdlog::warn("{}: entity {} ('{}') skipped: {}", source.source_id(), k, region.label,
                   e.what());
    }
  }
  return out;
}

std::vector<SampleRecord> build_addmod_samples(Gateway& gateway, const FrameSequence& source,
                                               const std::string& frames_ref,
                                               const VocabularyConfig& vocab,
                                               const AddmodOptions& options, std::uint64_t seed,
                                               const SampleStore& store) {
  const auto entities = prepare_addmod_entities(gateway, source, vocab, options, seed);
  const std::string src = sanitize_id(source.source_id());
  std::vector<SampleRecord> records;
  for (std::size_t k = 0; k < entities.size(); ++k) {
    const AddmodEntity& e = entities[k];
    const std::string entity_key = "e" + std::to_string(k);
    for (const auto& [kind, masks] : e.augmented) {
      const std::string group = entity_key + "/" + std::string(to_string(kind));
      const std::string masks_ref = store.put_masks(src, group, masks);
      const auto masked_ref = store.put_masked(src, group, source, masks);
      for (std::size_t c = 0; c < 3; ++c) {
        SampleRecord r;
        r.id = src + "." + entity_key + "." + std::string(to_string(kind)) + "." +
               std::string(to_string(kLengths[c]));
        r.task = Task::kAdditionModification;
        r.frames_ref = frames_ref;
        r.masks_ref = masks_ref;
        r.masked_ref = masked_ref;
        r.caption = e.captions[c];
        r.caption_length_class = kLengths[c];
        r.augmentation = kind;
        r.propagation = Propagation::kTracked;
        r.entity_label = e.label;
        r.fps = source.fps();
        r.resolution = source.size();
        r.num_frames = static_cast<int>(source.length());
        r.provenance["source"] = source.source_id();
        r.provenance["entity"] = std::to_string(k);
        records.push_back(std::move(r));
      }
    }
  }
  return records;
}

}  // namespace vforge
