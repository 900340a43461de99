#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vforge/caption.hpp"
#include "vforge/gateway.hpp"
#include "vforge/mask_ops.hpp"
#include "vforge/sample.hpp"
#include "vforge/sample_store.hpp"
#include "vforge/sequence.hpp"
#include "vforge/vocabulary.hpp"

namespace vforge {

struct RegionSearchConfig {
  double detection_threshold = 0.35;
  int max_detections_per_frame = 8;
  int max_regions = 4;
  AreaFilterConfig area;
};

struct Region {
  std::string label;
  Mask mask;
  double score = 0.0;
};

// tag -> filter_labels(mode) -> detect per label -> segment per box. Keeps the
// top detections by score, drops masks failing the area filter, returns at
// most max_regions, best first.
std::vector<Region> find_regions(Gateway& gateway, const Image& frame, LabelMode mode,
                                 const VocabularyConfig& vocab, const RegionSearchConfig& config);

std::vector<Region> select_entities(Gateway& gateway, const Image& first_frame,
                                    const VocabularyConfig& vocab,
                                    const RegionSearchConfig& config = {});

struct AddmodOptions {
  RegionSearchConfig selection;
  std::vector<AugmentationKind> kinds{std::begin(kAllAugmentations), std::end(kAllAugmentations)};
  AreaFilterConfig augmented_area;  // applied to every augmented sequence
};

// One selected entity after propagation and captioning, with the augmented
// mask sequences that passed the area filter.
struct AddmodEntity {
  std::string label;
  double score = 0.0;
  MaskSequence masks;
  CaptionTriplet captions;
  std::vector<std::pair<AugmentationKind, MaskSequence>> augmented;
};

// Entity selection, propagation (videos only), captioning and augmentation.
// Entities whose propagation empties a frame or whose captions fail to parse
// are logged and skipped.
std::vector<AddmodEntity> prepare_addmod_entities(Gateway& gateway, const FrameSequence& source,
                                                  const VocabularyConfig& vocab,
                                                  const AddmodOptions& options, std::uint64_t seed);

// One record per (caption, surviving augmentation) of every prepared entity.
// Mask and masked-frame directories go to `store`; frames_ref is used as is.
std::vector<SampleRecord> build_addmod_samples(Gateway& gateway, const FrameSequence& source,
                                               const std::string& frames_ref,
                                               const VocabularyConfig& vocab,
                                               const AddmodOptions& options, std::uint64_t seed,
                                               const SampleStore& store);

}  // namespace vforge
