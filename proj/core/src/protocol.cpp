#include "vforge/protocol.hpp"

#include "vforge/error.hpp"

namespace vforge {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kTagger: return "tagger";
    case Role::kDetector: return "detector";
    case Role::kSegmenter: return "segmenter";
    case Role::kCaptioner: return "captioner";
    case Role::kFlow: return "flow";
    case Role::kEmbedder: return "embedder";
    case Role::kScorer: return "scorer";
  }
  return "";
}

Role parse_role(std::string_view name) {
  for (Role r : kAllRoles) {
    if (to_string(r) == name) {
      return r;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown backend role '" + std::string(name) + "'");
}

std::vector<std::uint32_t> encode_rle(const Mask& mask) {
  std::vector<std::uint32_t> runs;
  bool current = false;
  std::uint32_t length = 0;
  for (std::uint8_t v : mask.data()) {
    const bool on = v != Mask::kOff;
    if (on != current) {
      runs.push_back(length);
      length = 0;
      current = on;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

Mask decode_rle(Size size, std::span<const std::uint32_t> runs) {
  if (size.width <= 0 || size.height <= 0) {
    throw Error(ErrorCode::kValidationFailure, "RLE mask has non-positive size");
  }
  std::vector<std::uint8_t> values;
  values.reserve(size.pixels());
  bool on = false;
  for (std::uint32_t run : runs) {
    if (values.size() + run > size.pixels()) {
      throw Error(ErrorCode::kValidationFailure, "RLE runs overflow the mask");
    }
    values.insert(values.end(), run, on ? Mask::kOn : Mask::kOff);
    on = !on;
  }
  if (values.size() != size.pixels()) {
    throw Error(ErrorCode::kValidationFailure, "RLE runs cover " + std::to_string(values.size()) +
                                                   " of " + std::to_string(size.pixels()) +
                                                   " pixels");
  }
  return Mask::from_values(size, std::move(values));
}

}  // namespace vforge
