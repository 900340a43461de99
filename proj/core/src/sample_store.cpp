#include "vforge/sample_store.hpp"

#include <algorithm>
#include <cctype>

#include "vforge/error.hpp"
#include "vforge/image_io.hpp"
#include "vforge/manifest.hpp"

namespace vforge {

namespace {

std::filesystem::path group_path(std::string_view group) {
  std::filesystem::path out;
  std::size_t start = 0;
  while (start <= group.size()) {
    const auto slash = std::min(group.find('/', start), group.size());
    out /= sanitize_id(group.substr(start, slash - start));
    start = slash + 1;
  }
  return out;
}

}  // namespace

SampleStore::SampleStore(std::filesystem::path root, bool write_masked)
    : root_(std::move(root)), write_masked_(write_masked) {
  std::filesystem::create_directories(root_);
}

std::string SampleStore::ref(const std::filesystem::path& target) const {
  return make_ref(root_, target);
}

std::string SampleStore::put_masks(std::string_view source_id, std::string_view group,
                                   const MaskSequence& masks) const {
  const auto dir = root_ / "masks" / sanitize_id(source_id) / group_path(group);
  save_masks(dir, masks);
  return ref(dir);
}

std::optional<std::string> SampleStore::put_masked(std::string_view source_id,
                                                   std::string_view group,
                                                   const FrameSequence& frames,
                                                   const MaskSequence& masks) const {
  if (!write_masked_) {
    return std::nullopt;
  }
  const auto dir = root_ / "masked" / sanitize_id(source_id) / group_path(group);
  save_frames(dir, apply_mask(frames, masks));
  return ref(dir);
}

std::string sanitize_id(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    const auto u = static_cast<unsigned char>(c);
    out.push_back(std::isalnum(u) || c == '.' || c == '_' || c == '-' ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") {
    throw Error(ErrorCode::kInvalidArgument, "identifier '" + std::string(raw) + "' is unusable");
  }
  return out;
}

}  // namespace vforge
