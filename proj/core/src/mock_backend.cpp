#include "vforge/mock_backend.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <queue>

#include "vforge/flow.hpp"
#include "vforge/image_io.hpp"
#include "vforge/metrics.hpp"
#include "wire.hpp"

namespace vforge {

using wire::json;

bool PaletteEntry::matches(Rgb p) const {
  for (std::size_t c = 0; c < 3; ++c) {
    if (std::abs(int{p[c]} - int{color[c]}) > tolerance) {
      return false;
    }
  }
  return true;
}

std::vector<PaletteEntry> MockBackendOptions::default_palette() {
  return {
      {"car", {220, 30, 30}, 60},
      {"sky", {40, 90, 230}, 60},
      {"dog", {230, 210, 40}, 60},
  };
}

MockBackendOptions MockBackendOptions::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open mock backend config " + path.string());
  }
  MockBackendOptions opts;
  try {
    const json j = json::parse(in);
    if (j.contains("palette")) {
      opts.palette.clear();
      for (const auto& e : j.at("palette")) {
        PaletteEntry p;
        p.label = e.at("label").get<std::string>();
        const auto c = e.at("color").get<std::vector<int>>();
        if (c.size() != 3) {
          throw Error(ErrorCode::kInvalidArgument, "palette colour needs 3 channels");
        }
        for (std::size_t i = 0; i < 3; ++i) {
          p.color[i] = static_cast<std::uint8_t>(std::clamp(c[i], 0, 255));
        }
        p.tolerance = e.value("tolerance", 60);
        opts.palette.push_back(std::move(p));
      }
    }
    opts.min_pixels = j.value("min_pixels", opts.min_pixels);
    opts.track_margin = j.value("track_margin", opts.track_margin);
    opts.text_score = j.value("text_score", opts.text_score);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
  return opts;
}

MockBackend::MockBackend(MockBackendOptions options) : options_(std::move(options)) {}

namespace {

Mask color_mask(const Image& img, const PaletteEntry& entry, const Rect& within) {
  Mask m(img.size());
  const Rect r = intersect(within, Rect{0, 0, img.width(), img.height()});
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) {
      if (entry.matches(img.at(x, y))) {
        m.set(x, y);
      }
    }
  }
  return m;
}

Rect full_frame(const Image& img) { return Rect{0, 0, img.width(), img.height()}; }

// 4-connected components, in raster order of their first pixel.
std::vector<Mask> components(const Mask& m) {
  std::vector<Mask> out;
  Mask seen(m.size());
  std::queue<Point> q;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.test(x, y) || seen.test(x, y)) {
        continue;
      }
      Mask comp(m.size());
      seen.set(x, y);
      q.push({x, y});
      while (!q.empty()) {
        const Point p = q.front();
        q.pop();
        comp.set(p.x, p.y);
        const Point next[4] = {{p.x + 1, p.y}, {p.x - 1, p.y}, {p.x, p.y + 1}, {p.x, p.y - 1}};
        for (const Point& n : next) {
          if (m.test_clamped(n.x, n.y) && !seen.test(n.x, n.y)) {
            seen.set(n.x, n.y);
            q.push(n);
          }
        }
      }
      out.push_back(std::move(comp));
    }
  }
  return out;
}

const PaletteEntry* dominant(const std::vector<PaletteEntry>& palette, const Image& img,
                             const Mask& region) {
  const PaletteEntry* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& entry : palette) {
    std::size_t count = 0;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (region.test(x, y) && entry.matches(img.at(x, y))) {
          ++count;
        }
      }
    }
    if (count > best_count) {
      best = &entry;
      best_count = count;
    }
  }
  return best;
}

Image load(const json& params, const char* key) { return read_png(wire::image_path(params.at(key))); }

Rect box_from(const json& j) {
  const auto b = j.get<std::vector<int>>();
  if (b.size() != 4) {
    throw Error(ErrorCode::kProtocolError, "box needs 4 coordinates");
  }
  return Rect{b[0], b[1], b[2], b[3]};
}

}  // namespace

std::string MockBackend::handle_line(const std::string& line) const {
  json id = nullptr;
  try {
    const json req = json::parse(line);
    id = req.value("id", json(nullptr));
    const std::string method = req.at("method").get<std::string>();
    const json params = req.value("params", json::object());

    if (method == method::kPing) {
      return wire::make_response(id, json{{"ok", true}});
    }
    if (method == method::kTag) {
      const Image img = load(params, "image");
      json labels = json::array();
      for (const auto& entry : options_.palette) {
        if (color_mask(img, entry, full_frame(img)).area() >=
            static_cast<std::size_t>(options_.min_pixels)) {
          labels.push_back(entry.label);
        }
      }
      return wire::make_response(id, json{{"labels", labels}});
    }
    if (method == method::kDetect) {
      const Image img = load(params, "image");
      const std::string label = params.at("label").get<std::string>();
      json dets = json::array();
      for (const auto& entry : options_.palette) {
        if (entry.label != label) {
          continue;
        }
        for (const Mask& comp : components(color_mask(img, entry, full_frame(img)))) {
          if (comp.area() < static_cast<std::size_t>(options_.min_pixels)) {
            continue;
          }
          const Rect box = *comp.bounds();
          const double score = static_cast<double>(comp.area()) / static_cast<double>(box.area());
          dets.push_back(wire::detection_to_json(Detection{label, box, score}));
        }
      }
      return wire::make_response(id, json{{"detections", dets}});
    }
    if (method == method::kSegment) {
      const Image img = load(params, "image");
      const Rect box = box_from(params.at("box"));
      const Mask inside = Mask::from_rect(img.size(), intersect(box, full_frame(img)));
      const PaletteEntry* entry = dominant(options_.palette, img, inside);
      const Mask m = entry ? color_mask(img, *entry, box) : Mask(img.size());
      return wire::make_response(id, json{{"mask", wire::mask_to_json(m)}});
    }
    if (method == method::kPropagate) {
      std::vector<Image> frames;
      for (const auto& f : params.at("frames")) {
        frames.push_back(read_png(wire::image_path(f)));
      }
      if (frames.empty()) {
        throw Error(ErrorCode::kProtocolError, "propagate needs frames");
      }
      Mask current = wire::mask_from_json(params.at("mask"));
      const PaletteEntry* entry = dominant(options_.palette, frames[0], current);
      json masks = json::array({wire::mask_to_json(current)});
      for (std::size_t i = 1; i < frames.size(); ++i) {
        Mask next(frames[i].size());
        if (entry != nullptr && !current.empty()) {
          const Rect prev = *current.bounds();
          const int g = options_.track_margin;
          next = color_mask(frames[i], *entry, Rect{prev.x0 - g, prev.y0 - g, prev.x1 + g, prev.y1 + g});
        }
        masks.push_back(wire::mask_to_json(next));
        current = std::move(next);
      }
      return wire::make_response(id, json{{"masks", masks}});
    }
    if (method == method::kCaption) {
      const std::string tag = params.at("tag").get<std::string>();
      const std::string prompt = params.at("prompt").get<std::string>();
      if (tag.empty() || prompt.find(tag) == std::string::npos) {
        return wire::make_error(id, "prompt does not mention the tag");
      }
      const auto& frames = params.at("frames");
      if (frames.empty()) {
        throw Error(ErrorCode::kProtocolError, "caption needs frames");
      }
      const Image first = read_png(wire::image_path(frames.at(0)));
      const std::string dims = std::to_string(first.width()) + "x" + std::to_string(first.height());
      const std::string text =
          "The video shows a " + tag + ".\n"
          "The video shows a " + tag + " filling a " + dims + " crop.\n"
          "The video shows a " + tag + " filling a " + dims + " crop over " +
          std::to_string(frames.size()) + " frames, with everything around it erased to black.";
      return wire::make_response(id, json{{"text", text}});
    }
    if (method == method::kFlow) {
      const Image a = load(params, "image_a");
      const Image b = load(params, "image_b");
      const std::string out = params.at("output_path").get<std::string>();
      write_flow_sidecar(out, block_match_flow(a, b));
      return wire::make_response(id, json{{"flow", wire::image_ref(out)}});
    }
    if (method == method::kEmbed) {
      const Image img = load(params, "image");
      return wire::make_response(id, json{{"embedding", builtin_embed(img)}});
    }
    if (method == method::kScore) {
      (void)params.at("text").get<std::string>();
      (void)load(params, "image");
      return wire::make_response(id, json{{"score", options_.text_score}});
    }
    return wire::make_error(id, "unknown method '" + method + "'");
  } catch (const std::exception& e) {
    return wire::make_error(id, e.what());
  }
}

void MockBackend::serve(std::istream& in, std::ostream& out) const {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    out << handle_line(line) << '\n' << std::flush;
  }
}

}  // namespace vforge
