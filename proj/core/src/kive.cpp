#include "vforge/kive.hpp"

#include <cmath>

#include "vforge/error.hpp"

namespace vforge {

KiveConditional assemble_kive_conditional(const FrameSequence& source, const MaskSequence& masks,
                                          const Image& keyframe, std::string caption) {
  check_aligned(source, masks);
  if (keyframe.size() != source.size()) {
    throw Error(ErrorCode::kResolutionMismatch, "keyframe resolution differs from the clip");
  }
  std::vector<Image> frames;
  std::vector<Mask> cond_masks;
  frames.reserve(source.length());
  cond_masks.reserve(source.length());
  frames.push_back(keyframe);
  cond_masks.emplace_back(source.size());
  for (std::size_t i = 1; i < source.length(); ++i) {
    frames.push_back(apply_mask(source[i], masks[i]));
    cond_masks.push_back(masks[i]);
  }
  return KiveConditional{FrameSequence(std::move(frames), source.fps(), source.source_id()),
                         MaskSequence(std::move(cond_masks)), std::move(caption)};
}

std::vector<ClipSpan> chain_long_video(std::size_t total_frames, std::size_t clip_length) {
  if (total_frames < 1) {
    throw Error(ErrorCode::kInvalidArgument, "a video needs at least one frame");
  }
  if (clip_length < 2) {
    throw Error(ErrorCode::kInvalidArgument, "clips must hold at least two frames to chain");
  }
  std::vector<ClipSpan> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = std::min(start + clip_length - 1, total_frames - 1);
    out.push_back({start, end});
    if (end + 1 >= total_frames) {
      break;
    }
    start = end;
  }
  return out;
}

void CostModel::validate() const {
  if (!(c_im > 0.0) || !(c_vid > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cost constants must be positive");
  }
}

double editing_cost(long long n_attempts, EditMode mode, const CostModel& cm) {
  cm.validate();
  if (n_attempts < 1) {
    throw Error(ErrorCode::kNonPositiveAttempts, "attempt count must be at least 1");
  }
  const double n = static_cast<double>(n_attempts);
  return mode == EditMode::kDirect ? n * cm.c_vid : n * cm.c_im + cm.c_vid;
}

long long kive_break_even(const CostModel& cm) {
  cm.validate();
  if (cm.c_im >= cm.c_vid) {
    throw Error(ErrorCode::kInvalidArgument, "keyframe edits must be cheaper than clip edits");
  }
  // n * c_im + c_vid < n * c_vid  <=>  n > c_vid / (c_vid - c_im)
  const double bound = cm.c_vid / (cm.c_vid - cm.c_im);
  long long n = static_cast<long long>(std::floor(bound)) + 1;
  while (n > 1 && editing_cost(n - 1, EditMode::kKive, cm) < editing_cost(n - 1, EditMode::kDirect, cm)) {
    --n;
  }
  while (!(editing_cost(n, EditMode::kKive, cm) < editing_cost(n, EditMode::kDirect, cm))) {
    ++n;
  }
  return n;
}

}  // namespace vforge
