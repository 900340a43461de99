#include "vforge/caption.hpp"

#include <vector>

#include "vforge/error.hpp"

namespace vforge {

namespace {

constexpr std::string_view kTemplate =
    "Now you are the 'text prompt creator'.\n"
    "Let's think step by step, from simple to complex to describe the center object {tag}, "
    "your response should return three answers.\n"
    "Use \\n as a separator in the answerThe first answer is to describe the center object "
    "{tag} in two or three phrases.\n"
    "This answer must start with 'The video shows' and must contain {tag}.\n"
    "The second answer is to describe the center object {tag} in a clear and concise manner "
    "using two or three sentences.\n"
    "This answer must start with 'The video shows' and must contain {tag}.\n"
    "The third answer is to describe the center object {tag} in detail.\n"
    "This answer must start with 'The video shows' and must contain {tag}.";

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::string_view caption_prompt_template() { return kTemplate; }

std::string render_caption_prompt(std::string_view tag) {
  if (tag.empty()) {
    throw Error(ErrorCode::kEmptyTag, "caption prompt needs a non-empty tag");
  }
  std::string out;
  out.reserve(kTemplate.size() + 8 * tag.size());
  std::size_t pos = 0;
  while (true) {
    const auto hit = kTemplate.find(kTagPlaceholder, pos);
    if (hit == std::string_view::npos) {
      out.append(kTemplate.substr(pos));
      break;
    }
    out.append(kTemplate.substr(pos, hit - pos));
    out.append(tag);
    pos = hit + kTagPlaceholder.size();
  }
  return out;
}

CaptionTriplet parse_caption_triplet(std::string_view text, std::string_view tag) {
  std::string normalized;
  normalized.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size() && text[i + 1] == 'n') {
      normalized.push_back('\n');
      ++i;
    } else {
      normalized.push_back(text[i]);
    }
  }
  std::vector<std::string> answers;
  std::size_t start = 0;
  while (start <= normalized.size()) {
    auto end = normalized.find('\n', start);
    if (end == std::string::npos) {
      end = normalized.size();
    }
    std::string line = trim(std::string_view(normalized).substr(start, end - start));
    if (!line.empty()) {
      answers.push_back(std::move(line));
    }
    start = end + 1;
  }
  if (answers.size() != 3) {
    throw CaptionError(ErrorCode::kWrongAnswerCount, 0,
                       "expected 3 answers, got " + std::to_string(answers.size()));
  }
  CaptionTriplet out;
  for (std::size_t i = 0; i < 3; ++i) {
    const int index = static_cast<int>(i) + 1;
    if (answers[i].rfind(kCaptionPrefix, 0) != 0) {
      throw CaptionError(ErrorCode::kMissingPrefix, index,
                         "answer " + std::to_string(index) + " does not start with '" +
                             std::string(kCaptionPrefix) + "'");
    }
    if (tag.empty() || answers[i].find(tag) == std::string::npos) {
      throw CaptionError(ErrorCode::kMissingTag, index,
                         "answer " + std::to_string(index) + " does not mention '" +
                             std::string(tag) + "'");
    }
    out[i] = std::move(answers[i]);
  }
  return out;
}

}  // namespace vforge
