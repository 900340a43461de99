#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <vector>

#include "vforge/mask_ops.hpp"
#include "vforge/raster.hpp"
#include "vforge/sequence.hpp"

namespace vforge {

// Dense displacement field in pixels, from frame i to frame i+1.
class FlowField {
 public:
  FlowField() = default;
  explicit FlowField(Size size);

  Size size() const { return size_; }
  float dx(int x, int y) const { return data_[index(x, y)]; }
  float dy(int x, int y) const { return data_[index(x, y) + 1]; }
  void set(int x, int y, float dx, float dy) {
    data_[index(x, y)] = dx;
    data_[index(x, y) + 1] = dy;
  }

  // Throws ValidationFailure for non-finite vectors or magnitudes above max(W, H).
  void validate() const;

  bool operator==(const FlowField&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(size_.width) +
            static_cast<std::size_t>(x)) * 2U;
  }

  Size size_;
  std::vector<float> data_;
};

// Sidecar layout: "VFFLOW01", u32 LE width, u32 LE height, then row-major
// (dx, dy) pairs as i16 LE in 1/64 px units (saturating).
inline constexpr int kFlowFixedPointScale = 64;
void write_flow_sidecar(const std::filesystem::path& path, const FlowField& flow);
FlowField read_flow_sidecar(const std::filesystem::path& path);

inline constexpr int kFlowBlockSize = 8;
inline constexpr int kFlowSearchRadius = 4;
inline constexpr int kFlowLevels = 3;

// Coarse-to-fine integer block matching (3 levels, 8x8 blocks, +/-4 px search
// per level, SAD cost) with bilinear upsampling between levels.
FlowField block_match_flow(const Image& a, const Image& b);

using FlowEstimator = std::function<FlowField(const Image&, const Image&)>;
FlowEstimator builtin_flow_estimator();

// Forward advection of set pixels by their rounded flow, then closing with radius 1.
Mask warp_mask(const Mask& mask, const FlowField& flow);

// Flow for every consecutive pair; pairs run concurrently when workers > 1.
std::vector<FlowField> estimate_flows(const FrameSequence& frames, const FlowEstimator& estimator,
                                      unsigned workers = 1);

// Chained warping over precomputed flows; flows.size() + 1 masks.
MaskSequence propagate_by_flow(const std::vector<FlowField>& flows, const Mask& keyframe_mask);

// mask_0 = keyframe mask; mask_i = warp(mask_{i-1}, flow(frame_{i-1} -> frame_i)).
// Throws EmptyMask once the mask has been advected entirely off-frame.
MaskSequence propagate_by_flow(const FrameSequence& frames, const Mask& keyframe_mask,
                               const FlowEstimator& estimator, unsigned workers = 1);

// mask_i = donor mask_i under the paste transform, for i < target_len.
MaskSequence propagate_by_copy(const MaskSequence& donor, const PasteTransform& transform,
                               std::size_t target_len, Size target_size);

}  // namespace vforge
