#include "vforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "vforge/error.hpp"

namespace vforge {

namespace {

double gray(const Image& img, int x, int y) {
  const Rgb p = img.at(x, y);
  return (299.0 * p[0] + 587.0 * p[1] + 114.0 * p[2]) / 1000.0;
}

std::pair<int, int> cell_span(int i, int extent) {
  int lo = static_cast<int>(static_cast<long long>(i) * extent / kBuiltinEmbedSide);
  int hi = static_cast<int>(static_cast<long long>(i + 1) * extent / kBuiltinEmbedSide);
  lo = std::min(lo, extent - 1);
  hi = std::max(hi, lo + 1);
  return {lo, hi};
}

}  // namespace

Embedding builtin_embed(const Image& frame) {
  Embedding v(static_cast<std::size_t>(kBuiltinEmbedSide * kBuiltinEmbedSide), 0.0);
  for (int cy = 0; cy < kBuiltinEmbedSide; ++cy) {
    const auto [y0, y1] = cell_span(cy, frame.height());
    for (int cx = 0; cx < kBuiltinEmbedSide; ++cx) {
      const auto [x0, x1] = cell_span(cx, frame.width());
      double sum = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          sum += gray(frame, x, y);
        }
      }
      v[static_cast<std::size_t>(cy * kBuiltinEmbedSide + cx)] =
          sum / static_cast<double>((y1 - y0) * (x1 - x0));
    }
  }
  double norm = 0.0;
  for (double e : v) {
    norm += e * e;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    std::fill(v.begin(), v.end(), 1.0 / kBuiltinEmbedSide);
    return v;
  }
  for (double& e : v) {
    e /= norm;
  }
  return v;
}

Embedder builtin_embedder() { return [](const Image& f) { return builtin_embed(f); }; }

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "embeddings differ in dimension");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::kValidationFailure, "zero embedding");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double background_preservation(const FrameSequence& original, const FrameSequence& edited,
                               const MaskSequence& masks) {
  if (original.length() != edited.length() || original.length() != masks.length() ||
      original.size() != edited.size() || original.size() != masks.size()) {
    throw Error(ErrorCode::kShapeMismatch, "original, edited and masks must align");
  }
  std::uint64_t total = 0;
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < original.length(); ++i) {
    const auto a = original[i].data();
    const auto b = edited[i].data();
    const auto m = masks[i].data();
    for (std::size_t p = 0; p < m.size(); ++p) {
      if (m[p] != Mask::kOff) {
        continue;
      }
      for (std::size_t c = 0; c < 3; ++c) {
        total += static_cast<std::uint64_t>(std::abs(int{a[p * 3 + c]} - int{b[p * 3 + c]}));
      }
      count += 3;
    }
  }
  if (count == 0) {
    throw Error(ErrorCode::kNoBackgroundPixels, "every pixel lies inside the edit mask");
  }
  return static_cast<double>(total) / static_cast<double>(count);
}

double temporal_consistency(const FrameSequence& video, const Embedder& embedder) {
  if (video.length() < 2) {
    throw Error(ErrorCode::kTooFewFrames, "temporal consistency needs at least 2 frames");
  }
  Embedding prev = embedder(video[0]);
  double sum = 0.0;
  for (std::size_t i = 1; i < video.length(); ++i) {
    Embedding cur = embedder(video[i]);
    sum += cosine_similarity(prev, cur);
    prev = std::move(cur);
  }
  return 100.0 * sum / static_cast<double>(video.length() - 1);
}

double text_alignment(const FrameSequence& edited, const MaskSequence& masks,
                      const std::string& caption, const Scorer& scorer) {
  check_aligned(edited, masks);
  double sum = 0.0;
  for (std::size_t i = 0; i < edited.length(); ++i) {
    const auto bounds = masks[i].bounds();
    if (!bounds) {
      throw Error(ErrorCode::kEmptyMask, "frame " + std::to_string(i) + " has an empty edit mask");
    }
    const Image region = apply_mask(edited[i], mask_not(masks[i])).crop(*bounds);
    sum += scorer(region, caption);
  }
  return 100.0 * sum / static_cast<double>(edited.length());
}

std::optional<double> text_alignment_for(Task task, const FrameSequence& edited,
                                         const MaskSequence& masks, const std::string& caption,
                                         const Scorer& scorer) {
  if (task == Task::kDeletion) {
    return std::nullopt;
  }
  return text_alignment(edited, masks, caption, scorer);
}

FrameSequence downsample_fps(const FrameSequence& video, int factor) {
  if (factor < 1) {
    throw Error(ErrorCode::kInvalidArgument, "fps factor must be >= 1");
  }
  if (factor == 1) {
    return video;
  }
  std::vector<Image> kept;
  for (std::size_t i = 0; i < video.length(); i += static_cast<std::size_t>(factor)) {
    kept.push_back(video[i]);
  }
  const Rational fps(video.fps().num(), video.fps().den() * factor);
  return FrameSequence(std::move(kept), fps, video.source_id());
}

MaskSequence downsample_masks(const MaskSequence& masks, int factor) {
  if (factor < 1) {
    throw Error(ErrorCode::kInvalidArgument, "fps factor must be >= 1");
  }
  std::vector<Mask> kept;
  for (std::size_t i = 0; i < masks.length(); i += static_cast<std::size_t>(factor)) {
    kept.push_back(masks[i]);
  }
  return MaskSequence(std::move(kept));
}

}  // namespace vforge
