#include "vforge/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <vector>

#include "vforge/error.hpp"

namespace vforge {

namespace fs = std::filesystem;

namespace {

std::string numbered(const char* prefix, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%05zu.png", prefix, index);
  return buf;
}

std::vector<std::uint8_t> read_png_raw(const fs::path& path, png_uint_32 format, Size& size) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
    throw Error(ErrorCode::kIo, "cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
    png_image_free(&image);
    throw Error(ErrorCode::kIo, "cannot decode PNG " + path.string() + ": " + image.message);
  }
  size = Size{static_cast<int>(image.width), static_cast<int>(image.height)};
  return buffer;
}

void write_png_raw(const fs::path& path, Size size, png_uint_32 format, const std::uint8_t* data) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(size.width);
  image.height = static_cast<png_uint_32>(size.height);
  image.format = format;
  if (png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr) == 0) {
    throw Error(ErrorCode::kIo, "cannot write PNG " + path.string() + ": " + image.message);
  }
}

std::size_t count_numbered(const fs::path& dir, const char* prefix) {
  std::size_t n = 0;
  while (fs::exists(dir / numbered(prefix, n))) {
    ++n;
  }
  return n;
}

}  // namespace

std::string frame_filename(std::size_t index) { return numbered("frame", index); }
std::string mask_filename(std::size_t index) { return numbered("mask", index); }

Image read_png(const fs::path& path) {
  Size size;
  auto buffer = read_png_raw(path, PNG_FORMAT_RGB, size);
  return Image(size, std::move(buffer));
}

void write_png(const fs::path& path, const Image& image) {
  write_png_raw(path, image.size(), PNG_FORMAT_RGB, image.data().data());
}

Mask read_mask_png(const fs::path& path) {
  Size size;
  auto buffer = read_png_raw(path, PNG_FORMAT_GRAY, size);
  return Mask::from_values(size, std::move(buffer));
}

void write_mask_png(const fs::path& path, const Mask& mask) {
  write_png_raw(path, mask.size(), PNG_FORMAT_GRAY, mask.data().data());
}

std::size_t count_frames(const fs::path& dir) { return count_numbered(dir, "frame"); }
std::size_t count_masks(const fs::path& dir) { return count_numbered(dir, "mask"); }

FrameSequence load_frames(const fs::path& path, Rational fps, std::string source_id) {
  if (fs::is_regular_file(path)) {
    std::vector<Image> one;
    one.push_back(read_png(path));
    return FrameSequence(std::move(one), fps, std::move(source_id));
  }
  const std::size_t n = count_frames(path);
  if (n == 0) {
    throw Error(ErrorCode::kIo, "no frame_00000.png under " + path.string());
  }
  std::vector<Image> frames;
  frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    frames.push_back(read_png(path / frame_filename(i)));
  }
  return FrameSequence(std::move(frames), fps, std::move(source_id));
}

MaskSequence load_masks(const fs::path& dir) {
  const std::size_t n = count_masks(dir);
  if (n == 0) {
    throw Error(ErrorCode::kIo, "no mask_00000.png under " + dir.string());
  }
  std::vector<Mask> masks;
  masks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    masks.push_back(read_mask_png(dir / mask_filename(i)));
  }
  return MaskSequence(std::move(masks));
}

void save_frames(const fs::path& dir, const FrameSequence& frames) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < frames.length(); ++i) {
    write_png(dir / frame_filename(i), frames[i]);
  }
}

void save_masks(const fs::path& dir, const MaskSequence& masks) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < masks.length(); ++i) {
    write_mask_png(dir / mask_filename(i), masks[i]);
  }
}

}  // namespace vforge
