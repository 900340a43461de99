#include "vforge/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <limits>
#include <string>

#include "vforge/error.hpp"

namespace vforge {

namespace fs = std::filesystem;

namespace {

constexpr char kFlowMagic[8] = {'V', 'F', 'F', 'L', 'O', 'W', '0', '1'};

struct Gray {
  int width = 0;
  int height = 0;
  std::vector<int> px;

  int at_clamped(int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return px[static_cast<std::size_t>(y) * width + x];
  }
};

Gray to_gray(const Image& img) {
  Gray g{img.width(), img.height(), {}};
  g.px.resize(img.size().pixels());
  const auto d = img.data();
  for (std::size_t i = 0; i < g.px.size(); ++i) {
    g.px[i] = (299 * d[i * 3] + 587 * d[i * 3 + 1] + 114 * d[i * 3 + 2] + 500) / 1000;
  }
  return g;
}

Gray downsample(const Gray& g) {
  Gray out{std::max(1, g.width / 2), std::max(1, g.height / 2), {}};
  out.px.resize(static_cast<std::size_t>(out.width) * out.height);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const int sum = g.at_clamped(2 * x, 2 * y) + g.at_clamped(2 * x + 1, 2 * y) +
                      g.at_clamped(2 * x, 2 * y + 1) + g.at_clamped(2 * x + 1, 2 * y + 1);
      out.px[static_cast<std::size_t>(y) * out.width + x] = (sum + 2) / 4;
    }
  }
  return out;
}

// Per-block flow vectors on one pyramid level.
struct BlockField {
  int cols = 0;
  int rows = 0;
  std::vector<std::array<float, 2>> v;

  std::array<float, 2> at(int c, int r) const {
    c = std::clamp(c, 0, cols - 1);
    r = std::clamp(r, 0, rows - 1);
    return v[static_cast<std::size_t>(r) * cols + c];
  }

  // Bilinear sample at fractional block coordinates.
  std::array<float, 2> sample(double u, double w) const {
    u = std::clamp(u, 0.0, static_cast<double>(cols - 1));
    w = std::clamp(w, 0.0, static_cast<double>(rows - 1));
    const int c0 = static_cast<int>(std::floor(u));
    const int r0 = static_cast<int>(std::floor(w));
    const double fu = u - c0;
    const double fw = w - r0;
    std::array<float, 2> out{};
    for (int k = 0; k < 2; ++k) {
      const double top = (1 - fu) * at(c0, r0)[k] + fu * at(c0 + 1, r0)[k];
      const double bot = (1 - fu) * at(c0, r0 + 1)[k] + fu * at(c0 + 1, r0 + 1)[k];
      out[k] = static_cast<float>((1 - fw) * top + fw * bot);
    }
    return out;
  }
};

double block_center_coord(double pixel) {
  return (pixel - (kFlowBlockSize - 1) / 2.0) / kFlowBlockSize;
}

BlockField match_level(const Gray& a, const Gray& b, const BlockField* coarser) {
  BlockField f;
  f.cols = (a.width + kFlowBlockSize - 1) / kFlowBlockSize;
  f.rows = (a.height + kFlowBlockSize - 1) / kFlowBlockSize;
  f.v.resize(static_cast<std::size_t>(f.cols) * f.rows);
  for (int r = 0; r < f.rows; ++r) {
    for (int c = 0; c < f.cols; ++c) {
      const int x0 = c * kFlowBlockSize;
      const int y0 = r * kFlowBlockSize;
      const int x1 = std::min(a.width, x0 + kFlowBlockSize);
      const int y1 = std::min(a.height, y0 + kFlowBlockSize);
      int gx = 0;
      int gy = 0;
      if (coarser != nullptr) {
        // Block centre in this level's pixels, mapped to the coarser level.
        const double cx = x0 + (kFlowBlockSize - 1) / 2.0;
        const double cy = y0 + (kFlowBlockSize - 1) / 2.0;
        const auto g = coarser->sample(block_center_coord(cx / 2.0), block_center_coord(cy / 2.0));
        gx = static_cast<int>(std::lround(2.0 * g[0]));
        gy = static_cast<int>(std::lround(2.0 * g[1]));
      }
      long best_cost = std::numeric_limits<long>::max();
      int best_dx = gx;
      int best_dy = gy;
      long best_norm = std::numeric_limits<long>::max();
      for (int dy = gy - kFlowSearchRadius; dy <= gy + kFlowSearchRadius; ++dy) {
        for (int dx = gx - kFlowSearchRadius; dx <= gx + kFlowSearchRadius; ++dx) {
          long cost = 0;
          for (int y = y0; y < y1 && cost <= best_cost; ++y) {
            const int* row = &a.px[static_cast<std::size_t>(y) * a.width];
            for (int x = x0; x < x1; ++x) {
              cost += std::abs(row[x] - b.at_clamped(x + dx, y + dy));
            }
          }
          const long norm = static_cast<long>(dx) * dx + static_cast<long>(dy) * dy;
          if (cost < best_cost || (cost == best_cost && norm < best_norm)) {
            best_cost = cost;
            best_norm = norm;
            best_dx = dx;
            best_dy = dy;
          }
        }
      }
      f.v[static_cast<std::size_t>(r) * f.cols + c] = {static_cast<float>(best_dx),
                                                       static_cast<float>(best_dy)};
    }
  }
  return f;
}

void put_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::int16_t to_fixed(float v) {
  const double scaled = std::round(static_cast<double>(v) * kFlowFixedPointScale);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

}  // namespace

FlowField::FlowField(Size size) : size_(size) {
  if (size.width <= 0 || size.height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "flow field size must be positive");
  }
  data_.assign(size.pixels() * 2U, 0.0F);
}

void FlowField::validate() const {
  const double limit = std::max(size_.width, size_.height);
  for (std::size_t i = 0; i < data_.size(); i += 2) {
    const double x = data_[i];
    const double y = data_[i + 1];
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw Error(ErrorCode::kValidationFailure, "flow field holds a non-finite vector");
    }
    if (std::hypot(x, y) > limit) {
      throw Error(ErrorCode::kValidationFailure, "flow magnitude exceeds max(W, H)");
    }
  }
}

void write_flow_sidecar(const fs::path& path, const FlowField& flow) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write flow sidecar " + path.string());
  }
  out.write(kFlowMagic, sizeof(kFlowMagic));
  const Size s = flow.size();
  put_u32(out, static_cast<std::uint32_t>(s.width));
  put_u32(out, static_cast<std::uint32_t>(s.height));
  std::vector<unsigned char> buf(s.pixels() * 4U);
  std::size_t o = 0;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      for (float v : {flow.dx(x, y), flow.dy(x, y)}) {
        const auto u = static_cast<std::uint16_t>(to_fixed(v));
        buf[o++] = static_cast<unsigned char>(u & 0xFFU);
        buf[o++] = static_cast<unsigned char>(u >> 8);
      }
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw Error(ErrorCode::kIo, "short write to flow sidecar " + path.string());
  }
}

FlowField read_flow_sidecar(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open flow sidecar " + path.string());
  }
  unsigned char header[16];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || std::memcmp(header, kFlowMagic, sizeof(kFlowMagic)) != 0) {
    throw Error(ErrorCode::kValidationFailure, "not a flow sidecar: " + path.string());
  }
  const std::uint32_t w = get_u32(header + 8);
  const std::uint32_t h = get_u32(header + 12);
  if (w == 0 || h == 0 || w > 65536 || h > 65536) {
    throw Error(ErrorCode::kValidationFailure, "flow sidecar has invalid dimensions");
  }
  FlowField flow(Size{static_cast<int>(w), static_cast<int>(h)});
  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * 4U);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
    throw Error(ErrorCode::kValidationFailure, "flow sidecar is truncated");
  }
  std::size_t o = 0;
  auto next = [&buf, &o]() {
    const auto u = static_cast<std::uint16_t>(buf[o] | (buf[o + 1] << 8));
    o += 2;
    return static_cast<float>(static_cast<std::int16_t>(u)) / kFlowFixedPointScale;
  };
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const float dx = next();
      const float dy = next();
      flow.set(static_cast<int>(x), static_cast<int>(y), dx, dy);
    }
  }
  return flow;
}

FlowField block_match_flow(const Image& a, const Image& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kResolutionMismatch, "flow needs two frames of one resolution");
  }
  std::vector<Gray> pa{to_gray(a)};
  std::vector<Gray> pb{to_gray(b)};
  for (int l = 1; l < kFlowLevels; ++l) {
    pa.push_back(downsample(pa.back()));
    pb.push_back(downsample(pb.back()));
  }
  BlockField field;
  for (int l = kFlowLevels - 1; l >= 0; --l) {
    const BlockField* coarser = l == kFlowLevels - 1 ? nullptr : &field;
    BlockField next = match_level(pa[static_cast<std::size_t>(l)],
                                  pb[static_cast<std::size_t>(l)], coarser);
    field = std::move(next);
  }
  FlowField flow(a.size());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      const auto v = field.sample(block_center_coord(x), block_center_coord(y));
      flow.set(x, y, v[0], v[1]);
    }
  }
  return flow;
}

FlowEstimator builtin_flow_estimator() {
  return [](const Image& a, const Image& b) { return block_match_flow(a, b); };
}

Mask warp_mask(const Mask& mask, const FlowField& flow) {
  if (mask.size() != flow.size()) {
    throw Error(ErrorCode::kShapeMismatch, "mask and flow field sizes differ");
  }
  Mask out(mask.size());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.test(x, y)) {
        continue;
      }
      const int qx = x + static_cast<int>(std::lround(flow.dx(x, y)));
      const int qy = y + static_cast<int>(std::lround(flow.dy(x, y)));
      if (out.in_bounds(qx, qy)) {
        out.set(qx, qy);
      }
    }
  }
  return close_disk(out, 1);
}

std::vector<FlowField> estimate_flows(const FrameSequence& frames, const FlowEstimator& estimator,
                                      unsigned workers) {
  const std::size_t n = frames.length();
  std::vector<FlowField> flows(n > 0 ? n - 1 : 0);
  if (workers <= 1) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      flows[i] = estimator(frames[i], frames[i + 1]);
    }
    return flows;
  }
  // Pairs are independent; warping stays sequential.
  for (std::size_t base = 0; base + 1 < n; base += workers) {
    std::vector<std::future<FlowField>> jobs;
    for (std::size_t i = base; i + 1 < n && i < base + workers; ++i) {
      jobs.push_back(
          std::async(std::launch::async, [&, i] { return estimator(frames[i], frames[i + 1]); }));
    }
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      flows[base + k] = jobs[k].get();
    }
  }
  return flows;
}

MaskSequence propagate_by_flow(const std::vector<FlowField>& flows, const Mask& keyframe_mask) {
  if (keyframe_mask.empty()) {
    throw Error(ErrorCode::kEmptyMask, "keyframe mask is empty");
  }
  std::vector<Mask> masks{keyframe_mask};
  masks.reserve(flows.size() + 1);
  for (std::size_t i = 1; i <= flows.size(); ++i) {
    Mask next = warp_mask(masks.back(), flows[i - 1]);
    if (next.empty()) {
      throw Error(ErrorCode::kEmptyMask,
                  "mask left the frame at index " + std::to_string(i) + " during flow propagation");
    }
    masks.push_back(std::move(next));
  }
  return MaskSequence(std::move(masks));
}

MaskSequence propagate_by_flow(const FrameSequence& frames, const Mask& keyframe_mask,
                               const FlowEstimator& estimator, unsigned workers) {
  if (frames.size() != keyframe_mask.size()) {
    throw Error(ErrorCode::kShapeMismatch, "keyframe mask does not match frame resolution");
  }
  if (keyframe_mask.empty()) {
    throw Error(ErrorCode::kEmptyMask, "keyframe mask is empty");
  }
  return propagate_by_flow(estimate_flows(frames, estimator, workers), keyframe_mask);
}

MaskSequence propagate_by_copy(const MaskSequence& donor, const PasteTransform& transform,
                               std::size_t target_len, Size target_size) {
  if (donor.length() < target_len) {
    throw Error(ErrorCode::kDonorTooShort, "donor has " + std::to_string(donor.length()) +
                                               " masks, target needs " +
                                               std::to_string(target_len));
  }
  if (target_len == 0) {
    throw Error(ErrorCode::kInvalidArgument, "target length must be positive");
  }
  std::vector<Mask> out;
  out.reserve(target_len);
  for (std::size_t i = 0; i < target_len; ++i) {
    out.push_back(transform.apply(donor[i], target_size));
  }
  return MaskSequence(std::move(out));
}

}  // namespace vforge
