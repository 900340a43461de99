#pragma once

// Synthetic scenes and corpora keyed to the mock backend palette.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vforge/manifest.hpp"
#include "vforge/raster.hpp"
#include "vforge/sequence.hpp"

namespace vforge::testing {

inline constexpr Rgb kCar{220, 30, 30};
inline constexpr Rgb kSky{40, 90, 230};
inline constexpr Rgb kDog{230, 210, 40};
inline constexpr Rgb kGround{128, 128, 128};

struct EntitySpec {
  Rgb color{};
  Rect rect;
  Point velocity{0, 0};  // pixels per frame
  int vanish_at = -1;    // first frame without the entity, -1 for never
};

struct SceneSpec {
  std::string id = "scene";
  Size size{96, 64};
  int frames = 1;
  Rgb background = kGround;
  std::optional<Rect> sky;
  std::vector<EntitySpec> entities;
  Rational fps{30, 1};
};

FrameSequence render_scene(const SceneSpec& spec);

// Self-cleaning scratch directory.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

// Three sources: a still with car+dog, a six-frame clip with a moving car under
// a sky band, and a still with a dog under a sky band. Writes frames and
// <dir>/corpus.txt and returns the listing path.
std::filesystem::path write_fixture_corpus(const std::filesystem::path& dir);
std::vector<SceneSpec> fixture_scenes();

// Deterministic random binary blob (union of a few rectangles and disks).
Mask random_blob(Size size, std::uint64_t seed);

// Minimal valid record with every optional field populated.
SampleRecord sample_record(const std::string& id, Task task = Task::kAdditionModification);

std::string read_file(const std::filesystem::path& p);

}  // namespace vforge::testing
