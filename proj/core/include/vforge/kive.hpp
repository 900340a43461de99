#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vforge/raster.hpp"
#include "vforge/sequence.hpp"

namespace vforge {

// Conditional input for keyframe-guided editing: the keyframe unmasked in
// slot 0 (with an all-zero mask) followed by the masked source frames.
struct KiveConditional {
  FrameSequence frames;
  MaskSequence masks;
  std::string caption;
};

// Throws ResolutionMismatch or LengthMismatch.
KiveConditional assemble_kive_conditional(const FrameSequence& source, const MaskSequence& masks,
                                          const Image& keyframe, std::string caption);

inline constexpr std::size_t kDefaultClipLength = 49;

struct ClipSpan {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive

  std::size_t length() const { return end - start + 1; }
  bool operator==(const ClipSpan&) const = default;
};

// Clips of clip_length frames where each clip starts on the previous clip's
// last frame: (0,48), (48,96), ... The final clip may be shorter.
std::vector<ClipSpan> chain_long_video(std::size_t total_frames,
                                       std::size_t clip_length = kDefaultClipLength);

struct CostModel {
  double c_im = 1.5;   // PFLOPs per keyframe edit
  double c_vid = 17.1;  // PFLOPs per clip edit

  void validate() const;
};

enum class EditMode { kDirect, kKive };

// Direct: N * c_vid. KIVE: N * c_im + c_vid. Throws NonPositiveAttempts.
double editing_cost(long long n_attempts, EditMode mode, const CostModel& cm = {});

// Smallest N for which KIVE is strictly cheaper than direct editing.
long long kive_break_even(const CostModel& cm = {});

}  // namespace vforge
