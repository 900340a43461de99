#pragma once

#include <array>
#include <string>
#include <string_view>

namespace vforge {

inline constexpr std::string_view kCaptionPrefix = "The video shows";
inline constexpr std::string_view kTagPlaceholder = "{tag}";

// The captioner instruction with every {tag} placeholder still in place.
std::string_view caption_prompt_template();

// Substitutes the entity label into the template. Throws EmptyTag.
std::string render_caption_prompt(std::string_view tag);

// Short, medium and long local captions, in that order.
using CaptionTriplet = std::array<std::string, 3>;

// Splits the reply on newlines (a literal backslash-n also counts), ignoring
// blank lines. Each of the three answers must start with "The video shows" and
// contain the tag. Throws CaptionError (WrongAnswerCount / MissingPrefix /
// MissingTag) naming the 1-based answer index.
CaptionTriplet parse_caption_triplet(std::string_view text, std::string_view tag);

}  // namespace vforge
