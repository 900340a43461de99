#include "fixtures.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <sstream>

#include "vforge/image_io.hpp"
#include "vforge/random.hpp"

namespace vforge::testing {

FrameSequence render_scene(const SceneSpec& spec) {
  std::vector<Image> frames;
  for (int i = 0; i < spec.frames; ++i) {
    Image img(spec.size, spec.background);
    if (spec.sky) {
      img.fill_rect(*spec.sky, kSky);
    }
    for (const auto& e : spec.entities) {
      if (e.vanish_at >= 0 && i >= e.vanish_at) {
        continue;
      }
      const Rect r{e.rect.x0 + e.velocity.x * i, e.rect.y0 + e.velocity.y * i,
                   e.rect.x1 + e.velocity.x * i, e.rect.y1 + e.velocity.y * i};
      img.fill_rect(intersect(r, Rect{0, 0, spec.size.width, spec.size.height}), e.color);
    }
    frames.push_back(std::move(img));
  }
  return FrameSequence(std::move(frames), spec.fps, spec.id);
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("vforge-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::vector<SceneSpec> fixture_scenes() {
  SceneSpec still;
  still.id = "still_pair";
  still.entities = {{kCar, Rect{8, 30, 28, 44}}, {kDog, Rect{56, 34, 72, 50}}};

  SceneSpec clip;
  clip.id = "clip_car";
  clip.frames = 6;
  clip.sky = Rect{0, 0, 96, 16};
  clip.entities = {{kCar, Rect{10, 34, 26, 46}, Point{2, 0}}};

  SceneSpec dog;
  dog.id = "still_dog";
  dog.sky = Rect{0, 0, 96, 18};
  dog.entities = {{kDog, Rect{40, 30, 58, 48}}};
  return {still, clip, dog};
}

std::filesystem::path write_fixture_corpus(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto listing = dir / "corpus.txt";
  std::ofstream out(listing);
  out << "# synthetic fixture corpus\n";
  for (const auto& spec : fixture_scenes()) {
    const FrameSequence seq = render_scene(spec);
    if (spec.frames == 1) {
      write_png(dir / (spec.id + ".png"), seq[0]);
      out << spec.id << ".png " << spec.fps.to_string() << '\n';
    } else {
      save_frames(dir / spec.id, seq);
      out << spec.id << ' ' << spec.fps.to_string() << '\n';
    }
  }
  return listing;
}

Mask random_blob(Size size, std::uint64_t seed) {
  Rng rng(seed);
  Mask m(size);
  const int parts = 1 + static_cast<int>(rng.index(4));
  for (int p = 0; p < parts; ++p) {
    const int cx = static_cast<int>(rng.index(static_cast<std::size_t>(size.width)));
    const int cy = static_cast<int>(rng.index(static_cast<std::size_t>(size.height)));
    const int r = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(std::max(2, size.width / 6))));
    const bool disk = rng.bernoulli(0.5);
    for (int y = cy - r; y <= cy + r; ++y) {
      for (int x = cx - r; x <= cx + r; ++x) {
        if (!m.in_bounds(x, y)) {
          continue;
        }
        if (!disk || (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) {
          m.set(x, y);
        }
      }
    }
  }
  return m;
}

SampleRecord sample_record(const std::string& id, Task task) {
  SampleRecord r;
  r.id = id;
  r.task = task;
  r.frames_ref = "frames/" + id;
  r.masks_ref = "masks/" + id;
  r.masked_ref = "masked/" + id;
  r.caption = task == Task::kDeletion ? std::string(kDeletionCaption)
                                      : "The video shows a dog running.";
  r.caption_length_class = CaptionLength::kMedium;
  r.augmentation = AugmentationKind::kHullExpand;
  r.propagation = Propagation::kTracked;
  if (task != Task::kDeletion) {
    r.entity_label = "dog";
  }
  r.fps = Rational(30000, 1001);
  r.resolution = Size{1280, 720};
  r.num_frames = 49;
  r.provenance = {{"source", "clip"}, {"entity", "0"}};
  return r;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace vforge::testing
