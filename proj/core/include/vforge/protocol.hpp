#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/raster.hpp"

namespace vforge {

// Backend roles. The first five are the dataset perception cascade; embedder
// and scorer serve evaluation.
enum class Role { kTagger, kDetector, kSegmenter, kCaptioner, kFlow, kEmbedder, kScorer };

inline constexpr Role kAllRoles[] = {Role::kTagger,    Role::kDetector, Role::kSegmenter,
                                     Role::kCaptioner, Role::kFlow,     Role::kEmbedder,
                                     Role::kScorer};

std::string_view to_string(Role role);
Role parse_role(std::string_view name);

// Wire method names.
namespace method {
inline constexpr std::string_view kPing = "ping";
inline constexpr std::string_view kTag = "tag";
inline constexpr std::string_view kDetect = "detect";
inline constexpr std::string_view kSegment = "segment";
inline constexpr std::string_view kPropagate = "propagate";
inline constexpr std::string_view kCaption = "caption";
inline constexpr std::string_view kFlow = "flow";
inline constexpr std::string_view kEmbed = "embed";
inline constexpr std::string_view kScore = "score";
}  // namespace method

struct Detection {
  std::string label;
  Rect box;  // half-open pixel box, x0 < x1 and y0 < y1
  double score = 0.0;

  bool operator==(const Detection&) const = default;
};

// Row-major run lengths alternating unset/set, starting with an unset run
// (which may be 0). Runs sum to width * height.
std::vector<std::uint32_t> encode_rle(const Mask& mask);
// Throws ValidationFailure when the runs do not cover the raster exactly.
Mask decode_rle(Size size, std::span<const std::uint32_t> runs);

}  // namespace vforge
