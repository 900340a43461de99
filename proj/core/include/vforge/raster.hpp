#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vforge {

struct Size {
  int width = 0;
  int height = 0;

  std::size_t pixels() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  bool operator==(const Size&) const = default;
};

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  std::size_t area() const {
    return empty() ? 0 : static_cast<std::size_t>(width()) * static_cast<std::size_t>(height());
  }
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  bool operator==(const Rect&) const = default;
};

Rect intersect(const Rect& a, const Rect& b);
Rect unite(const Rect& a, const Rect& b);

using Rgb = std::array<std::uint8_t, 3>;

// 8-bit interleaved RGB raster.
class Image {
 public:
  Image() = default;
  explicit Image(Size size, Rgb fill = {0, 0, 0});
  Image(Size size, std::vector<std::uint8_t> rgb);

  Size size() const { return size_; }
  int width() const { return size_.width; }
  int height() const { return size_.height; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < size_.width && y < size_.height;
  }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb value);
  void fill_rect(const Rect& rect, Rgb value);

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  Image crop(const Rect& rect) const;

  bool operator==(const Image&) const = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(size_.width) +
            static_cast<std::size_t>(x)) * 3U;
  }

  Size size_;
  std::vector<std::uint8_t> data_;
};

// Binary raster; every stored value is 0 or 255.
class Mask {
 public:
  static constexpr std::uint8_t kOff = 0;
  static constexpr std::uint8_t kOn = 255;

  Mask() = default;
  explicit Mask(Size size, bool value = false);

  // Throws ValidationFailure unless every value is 0 or 255.
  static Mask from_values(Size size, std::vector<std::uint8_t> values);
  // Values >= threshold become set.
  static Mask binarize(Size size, std::span<const std::uint8_t> values,
                       std::uint8_t threshold = 128);
  static Mask from_rect(Size size, const Rect& rect);

  Size size() const { return size_; }
  int width() const { return size_.width; }
  int height() const { return size_.height; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < size_.width && y < size_.height;
  }

  bool test(int x, int y) const { return data_[index(x, y)] != kOff; }
  // Out-of-bounds reads are false.
  bool test_clamped(int x, int y) const { return in_bounds(x, y) && test(x, y); }
  void set(int x, int y, bool on = true) { data_[index(x, y)] = on ? kOn : kOff; }

  std::size_t area() const;
  bool empty() const;
  std::optional<Rect> bounds() const;
  bool is_subset_of(const Mask& other) const;
  Mask crop(const Rect& rect) const;

  std::span<const std::uint8_t> data() const { return data_; }

  bool operator==(const Mask&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(size_.width) +
           static_cast<std::size_t>(x);
  }

  Size size_;
  std::vector<std::uint8_t> data_;
};

Mask mask_or(const Mask& a, const Mask& b);
Mask mask_and(const Mask& a, const Mask& b);
Mask mask_not(const Mask& a);
std::size_t intersection_area(const Mask& a, const Mask& b);
double iou(const Mask& a, const Mask& b);

}  // namespace vforge
