#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "vforge/sequence.hpp"

namespace vforge {

// frame_00000.png, mask_00000.png, ...
std::string frame_filename(std::size_t index);
std::string mask_filename(std::size_t index);

// Any PNG colour type is converted to 8-bit RGB.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);

// Masks are stored as 8-bit grayscale holding only 0 and 255.
Mask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const Mask& mask);

std::size_t count_frames(const std::filesystem::path& dir);
std::size_t count_masks(const std::filesystem::path& dir);

// A directory of frame_%05d.png files, or a single PNG file as a one-frame sequence.
FrameSequence load_frames(const std::filesystem::path& path, Rational fps,
                          std::string source_id = {});
MaskSequence load_masks(const std::filesystem::path& dir);

void save_frames(const std::filesystem::path& dir, const FrameSequence& frames);
void save_masks(const std::filesystem::path& dir, const MaskSequence& masks);

}  // namespace vforge
