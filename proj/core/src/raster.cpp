#include "vforge/raster.hpp"

#include <algorithm>
#include <string>

#include "vforge/error.hpp"

namespace vforge {

Rect intersect(const Rect& a, const Rect& b) {
  Rect r{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1), std::min(a.y1, b.y1)};
  if (r.empty()) {
    return Rect{};
  }
  return r;
}

Rect unite(const Rect& a, const Rect& b) {
  if (a.empty()) {
    return b;
  }
  if (b.empty()) {
    return a;
  }
  return Rect{std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
              std::max(a.y1, b.y1)};
}

namespace {

void check_size(Size size) {
  if (size.width <= 0 || size.height <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "raster size must be positive, got " + std::to_string(size.width) + "x" +
                    std::to_string(size.height));
  }
}

void check_same_size(const Mask& a, const Mask& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kShapeMismatch, "mask sizes differ");
  }
}

}  // namespace

Image::Image(Size size, Rgb fill) : size_(size) {
  check_size(size);
  data_.resize(size.pixels() * 3U);
  for (std::size_t i = 0; i < size.pixels(); ++i) {
    std::copy(fill.begin(), fill.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * 3U));
  }
}

Image::Image(Size size, std::vector<std::uint8_t> rgb) : size_(size), data_(std::move(rgb)) {
  check_size(size);
  if (data_.size() != size.pixels() * 3U) {
    throw Error(ErrorCode::kInvalidArgument, "RGB buffer does not match image size");
  }
}

Rgb Image::at(int x, int y) const {
  const std::size_t o = offset(x, y);
  return {data_[o], data_[o + 1], data_[o + 2]};
}

void Image::set(int x, int y, Rgb value) {
  const std::size_t o = offset(x, y);
  data_[o] = value[0];
  data_[o + 1] = value[1];
  data_[o + 2] = value[2];
}

void Image::fill_rect(const Rect& rect, Rgb value) {
  const Rect r = intersect(rect, Rect{0, 0, width(), height()});
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) {
      set(x, y, value);
    }
  }
}

Image Image::crop(const Rect& rect) const {
  const Rect r = intersect(rect, Rect{0, 0, width(), height()});
  if (r.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "crop window lies outside the image");
  }
  Image out(Size{r.width(), r.height()});
  for (int y = r.y0; y < r.y1; ++y) {
    const auto src = data_.begin() + static_cast<std::ptrdiff_t>(offset(r.x0, y));
    std::copy(src, src + r.width() * 3,
              out.data_.begin() + static_cast<std::ptrdiff_t>(out.offset(0, y - r.y0)));
  }
  return out;
}

Mask::Mask(Size size, bool value) : size_(size) {
  check_size(size);
  data_.assign(size.pixels(), value ? kOn : kOff);
}

Mask Mask::from_values(Size size, std::vector<std::uint8_t> values) {
  check_size(size);
  if (values.size() != size.pixels()) {
    throw Error(ErrorCode::kValidationFailure, "mask buffer does not match mask size");
  }
  for (std::uint8_t v : values) {
    if (v != kOff && v != kOn) {
      throw Error(ErrorCode::kValidationFailure,
                  "mask value " + std::to_string(v) + " is not binary");
    }
  }
  Mask m;
  m.size_ = size;
  m.data_ = std::move(values);
  return m;
}

Mask Mask::binarize(Size size, std::span<const std::uint8_t> values, std::uint8_t threshold) {
  check_size(size);
  if (values.size() != size.pixels()) {
    throw Error(ErrorCode::kValidationFailure, "mask buffer does not match mask size");
  }
  Mask m(size);
  std::transform(values.begin(), values.end(), m.data_.begin(),
                 [threshold](std::uint8_t v) { return v >= threshold ? kOn : kOff; });
  return m;
}

Mask Mask::from_rect(Size size, const Rect& rect) {
  Mask m(size);
  const Rect r = intersect(rect, Rect{0, 0, size.width, size.height});
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) {
      m.set(x, y);
    }
  }
  return m;
}

std::size_t Mask::area() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), kOn));
}

bool Mask::empty() const {
  return std::none_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v != kOff; });
}

std::optional<Rect> Mask::bounds() const {
  Rect r{size_.width, size_.height, 0, 0};
  bool any = false;
  for (int y = 0; y < size_.height; ++y) {
    for (int x = 0; x < size_.width; ++x) {
      if (test(x, y)) {
        any = true;
        r.x0 = std::min(r.x0, x);
        r.y0 = std::min(r.y0, y);
        r.x1 = std::max(r.x1, x + 1);
        r.y1 = std::max(r.y1, y + 1);
      }
    }
  }
  if (!any) {
    return std::nullopt;
  }
  return r;
}

bool Mask::is_subset_of(const Mask& other) const {
  check_same_size(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (data_[i] != kOff && other.data_[i] == kOff) {
      return false;
    }
  }
  return true;
}

Mask Mask::crop(const Rect& rect) const {
  const Rect r = intersect(rect, Rect{0, 0, width(), height()});
  if (r.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "crop window lies outside the mask");
  }
  Mask out(Size{r.width(), r.height()});
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) {
      out.set(x - r.x0, y - r.y0, test(x, y));
    }
  }
  return out;
}

Mask mask_or(const Mask& a, const Mask& b) {
  check_same_size(a, b);
  std::vector<std::uint8_t> v(a.data().begin(), a.data().end());
  const auto bd = b.data();
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = (v[i] | bd[i]) != 0 ? Mask::kOn : Mask::kOff;
  }
  return Mask::from_values(a.size(), std::move(v));
}

Mask mask_and(const Mask& a, const Mask& b) {
  check_same_size(a, b);
  std::vector<std::uint8_t> v(a.data().begin(), a.data().end());
  const auto bd = b.data();
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = (v[i] != 0 && bd[i] != 0) ? Mask::kOn : Mask::kOff;
  }
  return Mask::from_values(a.size(), std::move(v));
}

Mask mask_not(const Mask& a) {
  std::vector<std::uint8_t> v(a.data().begin(), a.data().end());
  for (auto& x : v) {
    x = x != 0 ? Mask::kOff : Mask::kOn;
  }
  return Mask::from_values(a.size(), std::move(v));
}

std::size_t intersection_area(const Mask& a, const Mask& b) {
  check_same_size(a, b);
  const auto ad = a.data();
  const auto bd = b.data();
  std::size_t n = 0;
  for (std::size_t i = 0; i < ad.size(); ++i) {
    n += (ad[i] != 0 && bd[i] != 0) ? 1U : 0U;
  }
  return n;
}

double iou(const Mask& a, const Mask& b) {
  const std::size_t inter = intersection_area(a, b);
  const std::size_t uni = a.area() + b.area() - inter;
  if (uni == 0) {
    return 1.0;
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace vforge
