#include "vforge/sample.hpp"

#include "vforge/error.hpp"

namespace vforge {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const Enum (&values)[N], const char* what) {
  for (Enum v : values) {
    if (to_string(v) == s) {
      return v;
    }
  }
  throw Error(ErrorCode::kSchemaViolation, std::string("unknown ") + what + " '" +
                                               std::string(s) + "'");
}

constexpr Task kTasks[] = {Task::kAdditionModification, Task::kDeletion};
constexpr CaptionLength kLengths[] = {CaptionLength::kShort, CaptionLength::kMedium,
                                      CaptionLength::kLong};
constexpr Propagation kPropagations[] = {Propagation::kTracked, Propagation::kCopied,
                                         Propagation::kFlowed};

}  // namespace

std::string_view to_string(Task v) {
  switch (v) {
    case Task::kAdditionModification: return "addition_modification";
    case Task::kDeletion: return "deletion";
  }
  return "";
}

std::string_view to_string(CaptionLength v) {
  switch (v) {
    case CaptionLength::kShort: return "short";
    case CaptionLength::kMedium: return "medium";
    case CaptionLength::kLong: return "long";
  }
  return "";
}

std::string_view to_string(AugmentationKind v) {
  switch (v) {
    case AugmentationKind::kNone: return "none";
    case AugmentationKind::kExpand: return "expand";
    case AugmentationKind::kHull: return "hull";
    case AugmentationKind::kBox: return "box";
    case AugmentationKind::kHullExpand: return "hull_expand";
    case AugmentationKind::kBoxExpand: return "box_expand";
  }
  return "";
}

std::string_view to_string(Propagation v) {
  switch (v) {
    case Propagation::kTracked: return "tracked";
    case Propagation::kCopied: return "copied";
    case Propagation::kFlowed: return "flowed";
  }
  return "";
}

Task parse_task(std::string_view s) { return parse_enum(s, kTasks, "task"); }
CaptionLength parse_caption_length(std::string_view s) {
  return parse_enum(s, kLengths, "caption_length_class");
}
AugmentationKind parse_augmentation(std::string_view s) {
  return parse_enum(s, kAllAugmentations, "augmentation");
}
Propagation parse_propagation(std::string_view s) {
  return parse_enum(s, kPropagations, "propagation");
}

void validate_record(const SampleRecord& r) {
  auto fail = [&r](const std::string& why) {
    throw Error(ErrorCode::kSchemaViolation, "record '" + r.id + "': " + why);
  };
  if (r.id.empty()) {
    fail("id is empty");
  }
  if (r.frames_ref.empty()) {
    fail("frames_ref is empty");
  }
  if (r.masks_ref.empty()) {
    fail("masks_ref is empty");
  }
  if (r.caption.empty()) {
    fail("caption is empty");
  }
  if (r.task == Task::kDeletion && r.caption != kDeletionCaption) {
    fail("deletion caption must be the fixed deletion prompt");
  }
  if (r.resolution.width <= 0 || r.resolution.height <= 0) {
    fail("resolution must be positive");
  }
  if (r.num_frames < 1) {
    fail("num_frames must be at least 1");
  }
}

}  // namespace vforge
