#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "vforge/raster.hpp"

namespace vforge {

// A colour the mock perception models recognise as an entity label. A pixel
// matches when every channel is within `tolerance` of `color`.
struct PaletteEntry {
  std::string label;
  Rgb color{};
  int tolerance = 60;

  bool matches(Rgb p) const;
};

struct MockBackendOptions {
  std::vector<PaletteEntry> palette = default_palette();
  int min_pixels = 16;       // tag/detect ignore smaller regions
  int track_margin = 16;     // propagate searches the previous box grown by this much
  double text_score = 0.21;  // constant scorer output

  static std::vector<PaletteEntry> default_palette();
  // {"palette":[{"label":..,"color":[r,g,b],"tolerance":..}], "min_pixels":.., ...}
  static MockBackendOptions from_json_file(const std::filesystem::path& path);
};

// Deterministic colour-keyed stand-ins for every backend role, speaking the
// same line protocol as real model servers. Same request, same response.
class MockBackend {
 public:
  explicit MockBackend(MockBackendOptions options = {});

  std::string handle_line(const std::string& line) const;

  // Serves requests from `in` until EOF.
  void serve(std::istream& in, std::ostream& out) const;

 private:
  MockBackendOptions options_;
};

}  // namespace vforge
