#include "vforge/sequence.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "vforge/error.hpp"

namespace vforge {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (num <= 0 || den <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame rate must be positive, got " + std::to_string(num) + "/" +
                    std::to_string(den));
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Rational Rational::parse(std::string_view text) {
  auto parse_int = [text](std::string_view part) {
    std::int64_t v = 0;
    const auto* end = part.data() + part.size();
    auto [ptr, ec] = std::from_chars(part.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
      throw Error(ErrorCode::kInvalidArgument, "malformed frame rate '" + std::string(text) + "'");
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Rational(parse_int(text), 1);
  }
  return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

std::string Rational::to_string() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

FrameSequence::FrameSequence(std::vector<Image> frames, Rational fps, std::string source_id)
    : frames_(std::move(frames)), fps_(fps), source_id_(std::move(source_id)) {
  if (frames_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "a frame sequence needs at least one frame");
  }
  const Size s = frames_.front().size();
  for (const auto& f : frames_) {
    if (f.size() != s) {
      throw Error(ErrorCode::kResolutionMismatch, "frames in a sequence must share one resolution");
    }
  }
}

MaskSequence::MaskSequence(std::vector<Mask> masks) : masks_(std::move(masks)) {
  if (masks_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "a mask sequence needs at least one mask");
  }
  const Size s = masks_.front().size();
  for (const auto& m : masks_) {
    if (m.size() != s) {
      throw Error(ErrorCode::kResolutionMismatch, "masks in a sequence must share one resolution");
    }
  }
}

bool MaskSequence::any_empty() const {
  return std::any_of(masks_.begin(), masks_.end(), [](const Mask& m) { return m.empty(); });
}

void check_aligned(const FrameSequence& frames, const MaskSequence& masks) {
  if (frames.length() != masks.length()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(frames.length()) + " frames vs " +
                                               std::to_string(masks.length()) + " masks");
  }
  if (frames.size() != masks.size()) {
    throw Error(ErrorCode::kResolutionMismatch, "frame and mask resolutions differ");
  }
}

Image apply_mask(const Image& frame, const Mask& mask) {
  if (frame.size() != mask.size()) {
    throw Error(ErrorCode::kResolutionMismatch, "frame and mask resolutions differ");
  }
  Image out = frame;
  auto px = out.data();
  const auto m = mask.data();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] != Mask::kOff) {
      px[i * 3U] = 0;
      px[i * 3U + 1U] = 0;
      px[i * 3U + 2U] = 0;
    }
  }
  return out;
}

FrameSequence apply_mask(const FrameSequence& frames, const MaskSequence& masks) {
  check_aligned(frames, masks);
  std::vector<Image> out;
  out.reserve(frames.length());
  for (std::size_t i = 0; i < frames.length(); ++i) {
    out.push_back(apply_mask(frames[i], masks[i]));
  }
  return FrameSequence(std::move(out), frames.fps(), frames.source_id());
}

}  // namespace vforge
