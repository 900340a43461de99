#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "vforge/raster.hpp"
#include "vforge/sequence.hpp"

namespace vforge {

inline constexpr std::string_view kSchemaVersion = "vivid-forge/1";

// Caption shared by every deletion record.
inline constexpr std::string_view kDeletionCaption =
    "Remove objects and generate areas that blend with the background.";

enum class Task { kAdditionModification, kDeletion };
enum class CaptionLength { kShort, kMedium, kLong };
enum class AugmentationKind { kNone, kExpand, kHull, kBox, kHullExpand, kBoxExpand };
enum class Propagation { kTracked, kCopied, kFlowed };

std::string_view to_string(Task v);
std::string_view to_string(CaptionLength v);
std::string_view to_string(AugmentationKind v);
std::string_view to_string(Propagation v);

// Parsers throw SchemaViolation on unknown names.
Task parse_task(std::string_view s);
CaptionLength parse_caption_length(std::string_view s);
AugmentationKind parse_augmentation(std::string_view s);
Propagation parse_propagation(std::string_view s);

// The six augmentation kinds in canonical order, none first.
inline constexpr AugmentationKind kAllAugmentations[] = {
    AugmentationKind::kNone, AugmentationKind::kExpand,     AugmentationKind::kHull,
    AugmentationKind::kBox,  AugmentationKind::kHullExpand, AugmentationKind::kBoxExpand,
};

// One training record: source frames, masks, optional masked video and local caption.
// Paths are stored as written; manifests keep them relative to the manifest directory.
struct SampleRecord {
  std::string id;
  Task task = Task::kAdditionModification;
  std::string frames_ref;
  std::string masks_ref;
  std::optional<std::string> masked_ref;
  std::string caption;
  CaptionLength caption_length_class = CaptionLength::kShort;
  AugmentationKind augmentation = AugmentationKind::kNone;
  Propagation propagation = Propagation::kTracked;
  std::optional<std::string> entity_label;
  Rational fps;
  Size resolution;
  int num_frames = 1;
  bool kive = false;
  std::map<std::string, std::string> provenance;

  bool operator==(const SampleRecord&) const = default;
};

// A record under evaluation, pointing at the edited video produced by an external editor.
struct EvalRecord {
  SampleRecord sample;
  std::optional<std::string> edited_ref;

  bool operator==(const EvalRecord&) const = default;
};

// Throws SchemaViolation describing the first broken field.
void validate_record(const SampleRecord& record);

}  // namespace vforge
