#include "vforge/mask_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "vforge/error.hpp"
#include "vforge/random.hpp"

namespace vforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_non_empty(const Mask& mask, const char* op) {
  if (mask.empty()) {
    throw Error(ErrorCode::kEmptyMask, std::string(op) + " needs a non-empty mask");
  }
}

// 1-D squared distance transform over the lower envelope of parabolas rooted at
// finite samples (Felzenszwalb & Huttenlocher).
void distance_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                 std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (!std::isfinite(f[q])) {
      continue;
    }
    const double fq = f[q] + static_cast<double>(q) * q;
    while (k >= 0) {
      const int p = v[k];
      const double s = (fq - (f[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        ++k;
        v[k] = q;
        z[k] = s;
        break;
      }
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
    }
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  z[k + 1] = kInf;
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) {
      ++j;
    }
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

// Squared Euclidean distance from every pixel to the nearest set pixel.
std::vector<double> squared_distance(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<double> grid(mask.size().pixels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      grid[static_cast<std::size_t>(y) * w + x] = mask.test(x, y) ? 0.0 : kInf;
    }
  }
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  f.resize(h);
  d.resize(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      f[y] = grid[static_cast<std::size_t>(y) * w + x];
    }
    distance_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) {
      grid[static_cast<std::size_t>(y) * w + x] = d[y];
    }
  }
  f.resize(w);
  d.resize(w);
  for (int y = 0; y < h; ++y) {
    std::copy_n(grid.begin() + static_cast<std::ptrdiff_t>(y) * w, w, f.begin());
    distance_1d(f, d, v, z);
    std::copy_n(d.begin(), w, grid.begin() + static_cast<std::ptrdiff_t>(y) * w);
  }
  return grid;
}

// Exact floor((q - top_left) / scale), shared by placement search and apply().
int source_offset(int t, double scale) {
  return static_cast<int>(std::floor(static_cast<double>(t) / scale));
}

struct Run {
  int y;
  int x0;
  int x1;  // exclusive
};

}  // namespace

void AreaFilterConfig::validate() const {
  if (!(min_fraction > 0.0 && max_fraction < 1.0 && min_fraction < max_fraction)) {
    throw Error(ErrorCode::kInvalidArgument,
                "area filter needs 0 < min_fraction < max_fraction < 1, got [" +
                    std::to_string(min_fraction) + ", " + std::to_string(max_fraction) + "]");
  }
}

Mask dilate_disk(const Mask& mask, int radius) {
  if (radius < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative dilation radius");
  }
  if (radius == 0 || mask.empty()) {
    return mask;
  }
  const auto dist = squared_distance(mask);
  const double r2 = static_cast<double>(radius) * radius;
  std::vector<std::uint8_t> out(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    out[i] = dist[i] <= r2 ? Mask::kOn : Mask::kOff;
  }
  return Mask::from_values(mask.size(), std::move(out));
}

Mask erode_disk(const Mask& mask, int radius) {
  return mask_not(dilate_disk(mask_not(mask), radius));
}

Mask close_disk(const Mask& mask, int radius) {
  return erode_disk(dilate_disk(mask, radius), radius);
}

int expand_radius(std::size_t area, std::uint64_t seed) {
  Rng rng(seed);
  const double u = rng.uniform(0.5, 1.5);
  const long r = std::lround(u * 0.2 * std::sqrt(static_cast<double>(area)));
  return static_cast<int>(std::max(2L, r));
}

Mask expand_by(const Mask& mask, int radius) {
  require_non_empty(mask, "expand");
  return dilate_disk(mask, radius);
}

Mask expand(const Mask& mask, std::uint64_t seed) {
  require_non_empty(mask, "expand");
  return dilate_disk(mask, expand_radius(mask.area(), seed));
}

Mask hull(const Mask& mask) {
  require_non_empty(mask, "hull");
  // Leftmost and rightmost set pixel per row span the same hull as all pixels.
  std::vector<Point> pts;
  for (int y = 0; y < mask.height(); ++y) {
    int lo = -1;
    int hi = -1;
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.test(x, y)) {
        if (lo < 0) {
          lo = x;
        }
        hi = x;
      }
    }
    if (lo >= 0) {
      pts.push_back({lo, y});
      if (hi != lo) {
        pts.push_back({hi, y});
      }
    }
  }
  std::sort(pts.begin(), pts.end(),
            [](const Point& a, const Point& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto cross = [](const Point& o, const Point& a, const Point& b) {
    return static_cast<std::int64_t>(a.x - o.x) * (b.y - o.y) -
           static_cast<std::int64_t>(a.y - o.y) * (b.x - o.x);
  };
  // Andrew's monotone chain; collinear points dropped.
  std::vector<Point> poly;
  if (pts.size() <= 2) {
    poly = pts;
  } else {
    std::vector<Point> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
      while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) {
        --k;
      }
      h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
      const auto& p = pts[i];
      while (k >= t && cross(h[k - 2], h[k - 1], p) <= 0) {
        --k;
      }
      h[k++] = p;
    }
    h.resize(k - 1);
    poly = std::move(h);
  }

  // Scanline fill: per row, the hull covers [ceil(min x), floor(max x)] over
  // its edge crossings, computed in exact integer arithmetic.
  auto floor_div = [](std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
      --q;
    }
    return q;
  };
  auto ceil_div = [&floor_div](std::int64_t a, std::int64_t b) { return -floor_div(-a, b); };

  Mask out(mask.size());
  int ymin = poly.front().y;
  int ymax = poly.front().y;
  for (const auto& p : poly) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const std::size_t n = poly.size();
  for (int y = ymin; y <= ymax; ++y) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = poly[i];
      const Point b = poly[(i + 1) % n];
      if (y < std::min(a.y, b.y) || y > std::max(a.y, b.y)) {
        continue;
      }
      if (a.y == b.y) {
        lo = std::min<std::int64_t>(lo, std::min(a.x, b.x));
        hi = std::max<std::int64_t>(hi, std::max(a.x, b.x));
        continue;
      }
      // x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y)
      std::int64_t num = static_cast<std::int64_t>(y - a.y) * (b.x - a.x);
      std::int64_t den = b.y - a.y;
      if (den < 0) {
        num = -num;
        den = -den;
      }
      lo = std::min(lo, a.x + ceil_div(num, den));
      hi = std::max(hi, a.x + floor_div(num, den));
    }
    for (std::int64_t x = std::max<std::int64_t>(lo, 0);
         x <= std::min<std::int64_t>(hi, mask.width() - 1); ++x) {
      out.set(static_cast<int>(x), y);
    }
  }
  return out;
}

Mask box(const Mask& mask) {
  require_non_empty(mask, "box");
  return Mask::from_rect(mask.size(), *mask.bounds());
}

MaskSequence augment(const MaskSequence& masks, AugmentationKind kind, std::uint64_t seed,
                     const AugmentOptions& options) {
  for (std::size_t i = 0; i < masks.length(); ++i) {
    if (masks[i].empty()) {
      throw Error(ErrorCode::kEmptyMask, "augment: mask " + std::to_string(i) + " is empty");
    }
  }
  std::vector<Mask> base;
  base.reserve(masks.length());
  switch (kind) {
    case AugmentationKind::kNone:
      return masks;
    case AugmentationKind::kExpand:
      base = masks.masks();
      break;
    case AugmentationKind::kHull:
    case AugmentationKind::kHullExpand:
      for (const auto& m : masks.masks()) {
        base.push_back(hull(m));
      }
      break;
    case AugmentationKind::kBox:
    case AugmentationKind::kBoxExpand:
      for (const auto& m : masks.masks()) {
        base.push_back(box(m));
      }
      break;
  }
  const bool expands = kind == AugmentationKind::kExpand || kind == AugmentationKind::kHullExpand ||
                       kind == AugmentationKind::kBoxExpand;
  if (expands) {
    const int radius = options.forced_radius.value_or(expand_radius(base.front().area(), seed));
    for (auto& m : base) {
      m = dilate_disk(m, radius);
    }
  }
  return MaskSequence(std::move(base));
}

bool area_filter(const Mask& mask, const AreaFilterConfig& config) {
  const double fraction =
      static_cast<double>(mask.area()) / static_cast<double>(mask.size().pixels());
  return fraction >= config.min_fraction && fraction <= config.max_fraction;
}

bool area_filter(const MaskSequence& masks, const AreaFilterConfig& config) {
  return std::all_of(masks.masks().begin(), masks.masks().end(),
                     [&config](const Mask& m) { return area_filter(m, config); });
}

Rect crop_window(const MaskSequence& masks, int padding) {
  Rect window;
  for (std::size_t i = 0; i < masks.length(); ++i) {
    const auto b = masks[i].bounds();
    if (!b) {
      throw Error(ErrorCode::kEmptyMask, "crop: mask " + std::to_string(i) + " is empty");
    }
    window = unite(window, *b);
  }
  const Size s = masks.size();
  return Rect{std::max(0, window.x0 - padding), std::max(0, window.y0 - padding),
              std::min(s.width, window.x1 + padding), std::min(s.height, window.y1 + padding)};
}

FrameSequence crop_entity(const FrameSequence& frames, const MaskSequence& masks) {
  check_aligned(frames, masks);
  const Rect window = crop_window(masks);
  std::vector<Image> out;
  out.reserve(frames.length());
  for (std::size_t i = 0; i < frames.length(); ++i) {
    // Keep the entity, erase everything else.
    out.push_back(apply_mask(frames[i], mask_not(masks[i])).crop(window));
  }
  return FrameSequence(std::move(out), frames.fps(), frames.source_id());
}

Mask PasteTransform::apply(const Mask& donor, Size target) const {
  Mask out(target);
  std::vector<int> src_x(static_cast<std::size_t>(target.width));
  for (int x = 0; x < target.width; ++x) {
    src_x[static_cast<std::size_t>(x)] = anchor.x + source_offset(x - top_left.x, scale);
  }
  for (int y = 0; y < target.height; ++y) {
    const int sy = anchor.y + source_offset(y - top_left.y, scale);
    if (sy < 0 || sy >= donor.height()) {
      continue;
    }
    for (int x = 0; x < target.width; ++x) {
      if (donor.test_clamped(src_x[static_cast<std::size_t>(x)], sy)) {
        out.set(x, y);
      }
    }
  }
  return out;
}

PasteResult paste_mask(const Mask& background, const Mask& donor, std::uint64_t seed) {
  require_non_empty(background, "paste_mask background");
  require_non_empty(donor, "paste_mask donor");
  const Rect b = *donor.bounds();
  const int w = background.width();
  const int h = background.height();
  const std::size_t bg_area = background.area();

  // prefix[y * (w + 1) + x] = background pixels in row y with column < x.
  std::vector<std::uint32_t> prefix(static_cast<std::size_t>(h) * (w + 1), 0);
  for (int y = 0; y < h; ++y) {
    std::uint32_t* row = &prefix[static_cast<std::size_t>(y) * (w + 1)];
    for (int x = 0; x < w; ++x) {
      row[x + 1] = row[x] + (background.test(x, y) ? 1U : 0U);
    }
  }

  Rng rng(seed);
  double scale = 1.0;
  for (int attempt = 0; attempt < kPasteMaxAttempts; ++attempt, scale *= kPasteScaleStep) {
    const int pw = static_cast<int>(std::ceil(b.width() * scale));
    const int ph = static_cast<int>(std::ceil(b.height() * scale));
    if (pw < 1 || ph < 1 || pw > w || ph > h) {
      continue;
    }
    // Runs of the scaled patch, relative to its top-left corner.
    std::vector<Run> runs;
    std::size_t set_pixels = 0;
    for (int ty = 0; ty < ph; ++ty) {
      const int sy = b.y0 + source_offset(ty, scale);
      int start = -1;
      for (int tx = 0; tx <= pw; ++tx) {
        const bool on = tx < pw && donor.test_clamped(b.x0 + source_offset(tx, scale), sy);
        if (on && start < 0) {
          start = tx;
        } else if (!on && start >= 0) {
          runs.push_back({ty, start, tx});
          set_pixels += static_cast<std::size_t>(tx - start);
          start = -1;
        }
      }
    }
    if (set_pixels == 0 ||
        static_cast<double>(bg_area) < kPasteInsideFraction * static_cast<double>(set_pixels)) {
      continue;
    }
    std::vector<Point> feasible;
    for (int oy = 0; oy + ph <= h; ++oy) {
      for (int ox = 0; ox + pw <= w; ++ox) {
        std::size_t inside = 0;
        for (const auto& r : runs) {
          const std::uint32_t* row = &prefix[static_cast<std::size_t>(oy + r.y) * (w + 1)];
          inside += row[ox + r.x1] - row[ox + r.x0];
        }
        // inside / set_pixels >= 0.95, in integers.
        if (inside * 100U >= set_pixels * 95U) {
          feasible.push_back({ox, oy});
        }
      }
    }
    if (feasible.empty()) {
      continue;
    }
    PasteResult result;
    result.transform.anchor = Point{b.x0, b.y0};
    result.transform.scale = scale;
    result.transform.top_left = feasible[rng.index(feasible.size())];
    result.mask = result.transform.apply(donor, background.size());
    result.attempt = attempt;
    return result;
  }
  throw Error(ErrorCode::kNoFeasiblePlacement,
              "no placement with " + std::to_string(static_cast<int>(kPasteInsideFraction * 100)) +
                  "% inside the background after " + std::to_string(kPasteMaxAttempts) +
                  " attempts");
}

}  // namespace vforge
