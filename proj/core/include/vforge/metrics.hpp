#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vforge/raster.hpp"
#include "vforge/sample.hpp"
#include "vforge/sequence.hpp"

namespace vforge {

using Embedding = std::vector<double>;
using Embedder = std::function<Embedding(const Image&)>;
using Scorer = std::function<double(const Image&, const std::string&)>;

inline constexpr int kBuiltinEmbedSide = 16;

// Area-averaged 16x16 grayscale thumbnail, flattened and L2-normalized. An
// all-black frame maps to the uniform unit vector so the result is never zero.
Embedding builtin_embed(const Image& frame);
Embedder builtin_embedder();

double cosine_similarity(const Embedding& a, const Embedding& b);

// Mean absolute difference over every channel of every pixel where the mask is
// unset, in 0..255 units. Throws ShapeMismatch or NoBackgroundPixels.
double background_preservation(const FrameSequence& original, const FrameSequence& edited,
                               const MaskSequence& masks);

// 100 * mean cosine between consecutive frame embeddings. Throws TooFewFrames.
double temporal_consistency(const FrameSequence& video, const Embedder& embedder);

// Per frame: zero outside the mask, crop to the mask bounds, score against the
// caption. Returns 100 * mean. Throws EmptyMask.
double text_alignment(const FrameSequence& edited, const MaskSequence& masks,
                      const std::string& caption, const Scorer& scorer);

// Absent for deletion, whose caption is fixed.
std::optional<double> text_alignment_for(Task task, const FrameSequence& edited,
                                         const MaskSequence& masks, const std::string& caption,
                                         const Scorer& scorer);

inline constexpr int kDefaultFpsFactor = 4;

// Keeps frames 0, factor, 2*factor, ... and divides fps by factor.
FrameSequence downsample_fps(const FrameSequence& video, int factor = kDefaultFpsFactor);
MaskSequence downsample_masks(const MaskSequence& masks, int factor = kDefaultFpsFactor);

}  // namespace vforge
