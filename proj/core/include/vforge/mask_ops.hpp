#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "vforge/raster.hpp"
#include "vforge/sample.hpp"
#include "vforge/sequence.hpp"

namespace vforge {

// Accept a mask only when its area fraction lies in [min_fraction, max_fraction].
struct AreaFilterConfig {
  double min_fraction = 0.005;
  double max_fraction = 0.60;

  // Throws InvalidArgument unless 0 < min < max < 1.
  void validate() const;
};

// Morphology with the discrete disk {(dx, dy) : dx*dx + dy*dy <= r*r}.
// Dilation treats out-of-frame pixels as unset, erosion treats them as set.
Mask dilate_disk(const Mask& mask, int radius);
Mask erode_disk(const Mask& mask, int radius);
Mask close_disk(const Mask& mask, int radius);

// Radius law for expand: max(2, round(u * 0.2 * sqrt(area))), u ~ U[0.5, 1.5) from seed.
int expand_radius(std::size_t area, std::uint64_t seed);

// Disk dilation by expand_radius(area(mask), seed). Throws EmptyMask.
Mask expand(const Mask& mask, std::uint64_t seed);
Mask expand_by(const Mask& mask, int radius);

// Rasterized convex hull of the set pixel centres. Throws EmptyMask.
Mask hull(const Mask& mask);
// Filled bounding rectangle. Throws EmptyMask.
Mask box(const Mask& mask);

struct AugmentOptions {
  // Overrides the seeded expand radius.
  std::optional<int> forced_radius;
};

// Per-frame augmentation. Compositions apply hull/box first, then expand with a
// single radius drawn from the first frame.
MaskSequence augment(const MaskSequence& masks, AugmentationKind kind, std::uint64_t seed,
                     const AugmentOptions& options = {});

bool area_filter(const Mask& mask, const AreaFilterConfig& config);
bool area_filter(const MaskSequence& masks, const AreaFilterConfig& config);

inline constexpr int kCropPadding = 8;

// Union bounding box of the sequence, padded and clamped to the frame.
Rect crop_window(const MaskSequence& masks, int padding = kCropPadding);

// Zeroes pixels outside each mask and crops every frame to one shared window.
FrameSequence crop_entity(const FrameSequence& frames, const MaskSequence& masks);

// Maps a donor mask into a target frame: target pixel q is set when donor pixel
// anchor + floor((q - top_left) / scale) is set. Scale 1 is a pure translation.
struct PasteTransform {
  Point anchor;
  double scale = 1.0;
  Point top_left;

  Point offset() const { return Point{top_left.x - anchor.x, top_left.y - anchor.y}; }
  Mask apply(const Mask& donor, Size target) const;

  bool operator==(const PasteTransform&) const = default;
};

struct PasteResult {
  Mask mask;
  PasteTransform transform;
  int attempt = 0;  // 0-based scale step used
};

inline constexpr double kPasteInsideFraction = 0.95;
inline constexpr double kPasteScaleStep = 0.8;
inline constexpr int kPasteMaxAttempts = 20;

// Places the donor so that at least 95% of its set pixels fall inside the
// background region, shrinking by 0.8 per attempt. The offset is drawn
// uniformly among all feasible placements at the first feasible scale.
// Throws EmptyMask or NoFeasiblePlacement.
PasteResult paste_mask(const Mask& background, const Mask& donor, std::uint64_t seed);

}  // namespace vforge
