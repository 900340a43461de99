#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/raster.hpp"

namespace vforge {

// Positive rational frame rate, kept in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den);

  // Accepts "30", "30/1" and "30000/1001".
  static Rational parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  bool operator==(const Rational&) const = default;

 private:
  std::int64_t num_ = 1;
  std::int64_t den_ = 1;
};

// Ordered RGB frames of one resolution. A still image is a one-frame sequence.
class FrameSequence {
 public:
  FrameSequence() = default;
  FrameSequence(std::vector<Image> frames, Rational fps, std::string source_id = {});

  const std::vector<Image>& frames() const { return frames_; }
  const Image& operator[](std::size_t i) const { return frames_[i]; }
  std::size_t length() const { return frames_.size(); }
  Size size() const { return frames_.empty() ? Size{} : frames_.front().size(); }
  Rational fps() const { return fps_; }
  const std::string& source_id() const { return source_id_; }

  bool operator==(const FrameSequence&) const = default;

 private:
  std::vector<Image> frames_;
  Rational fps_;
  std::string source_id_;
};

// Binary masks paired frame-for-frame with a FrameSequence.
class MaskSequence {
 public:
  MaskSequence() = default;
  explicit MaskSequence(std::vector<Mask> masks);

  const std::vector<Mask>& masks() const { return masks_; }
  const Mask& operator[](std::size_t i) const { return masks_[i]; }
  std::size_t length() const { return masks_.size(); }
  Size size() const { return masks_.empty() ? Size{} : masks_.front().size(); }
  bool any_empty() const;

  bool operator==(const MaskSequence&) const = default;

 private:
  std::vector<Mask> masks_;
};

// Throws LengthMismatch / ResolutionMismatch when the pair is not aligned.
void check_aligned(const FrameSequence& frames, const MaskSequence& masks);

// Erases the masked region: pixels under a set mask become (0, 0, 0).
Image apply_mask(const Image& frame, const Mask& mask);
FrameSequence apply_mask(const FrameSequence& frames, const MaskSequence& masks);

}  // namespace vforge
