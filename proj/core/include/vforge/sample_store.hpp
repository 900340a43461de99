#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "vforge/sequence.hpp"

namespace vforge {

// Owns the per-sample directories under an output root (the manifest's
// directory) and hands back manifest-relative refs:
//   <root>/masks/<source>/<group>/mask_%05d.png
//   <root>/masked/<source>/<group>/frame_%05d.png
class SampleStore {
 public:
  explicit SampleStore(std::filesystem::path root, bool write_masked = true);

  const std::filesystem::path& root() const { return root_; }
  bool writes_masked() const { return write_masked_; }

  std::string ref(const std::filesystem::path& target) const;
  std::string put_masks(std::string_view source_id, std::string_view group,
                        const MaskSequence& masks) const;
  // Stores apply_mask(frames, masks); nullopt when masked output is disabled.
  std::optional<std::string> put_masked(std::string_view source_id, std::string_view group,
                                        const FrameSequence& frames,
                                        const MaskSequence& masks) const;

 private:
  std::filesystem::path root_;
  bool write_masked_;
};

// Keeps [A-Za-z0-9._-], replaces everything else with '_'.
std::string sanitize_id(std::string_view raw);

}  // namespace vforge
