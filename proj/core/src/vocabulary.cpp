#include "vforge/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <json.hpp>
#include <unordered_set>

#include "vforge/error.hpp"

namespace vforge {

namespace {

const char* const kAdjectives[] = {
    "ancient", "athletic", "beautiful", "classic", "clean", "clear", "close-up",
    "crowded", "decorative", "dark", "empty", "fresh", "healthy", "high", "indoor",
    "light", "long", "modern", "narrow", "new", "old", "outdoor", "peaceful",
    "quiet", "rainy", "remote", "romantic", "sharp", "shiny", "short", "silent",
    "single", "small", "smooth", "soft", "spicy", "square", "strong", "stunning",
    "sweet", "tall", "tiny", "traditional", "warm", "wet", "wide", "wooden",
};

const char* const kVerbs[] = {
    "act", "add", "adjust", "aid", "appear", "applause", "approach", "archery",
    "arrest", "assemble", "attach", "attend", "auction", "back", "baking",
    "balance", "bend", "blow", "boil", "bounce", "build", "burn", "buy", "call",
    "carry", "carve", "catch", "celebrate", "cheer", "climb", "close", "cook",
    "cool", "cover", "create", "crochet", "crush", "cry", "cut", "dance", "decorate",
    "deliver", "dive", "dribble", "drift", "drink", "drive", "drop", "eat",
    "exercise", "feed", "fight", "fill", "find", "fit", "float", "fly", "fold",
    "freeze", "fry", "gather", "give", "glow", "glue", "go", "graze", "greet",
    "grow", "guard", "guide", "hang", "harvest", "hide", "hike", "hit", "hold",
    "hug", "hunt", "illuminate", "install", "jog", "jump", "kick", "knit",
    "laugh", "launch", "lay", "lead", "lean", "learn", "leave", "lie", "lift",
    "load", "locate", "lock", "look", "lose", "make", "measure", "milk", "mix",
    "move", "open", "pack", "paint", "peel", "perform", "pick", "plant", "play",
    "plow", "pour", "practice", "prepare", "press", "print", "pull", "punch",
    "push", "put", "read", "receive", "reflect", "relax", "release", "remove",
    "repair", "rescue", "reveal", "ride", "rise", "roll", "rub", "run", "sail",
    "scatter", "see", "sell", "send", "serve", "sew", "shake", "shape", "shear",
    "shine", "shoot", "shout", "show", "shovel", "sing", "sip", "sit", "skate",
    "ski", "sleep", "slice", "slide", "smell", "smile", "smoke", "snap",
    "snow", "soak", "sort", "sow", "speak", "spill", "spin", "splash", "split",
    "spread", "spring", "sprinkle", "squeeze", "stab", "stand", "start",
    "stare", "steam", "stir", "stitch", "stop", "store", "stretch", "strike",
    "stroll", "study", "stuff", "swirl", "swing", "take", "talk", "teach",
    "tear", "tell", "think", "throw", "tick", "tie", "toast", "touch", "tour",
    "tow", "train", "trim", "trip", "type", "unlock", "use", "vacuum", "walk",
    "wash", "watch", "wave", "wear", "weave", "weld", "widen", "wipe", "write",
    "zip", "kiss",
};

const char* const kColors[] = {
    "aqua", "amber", "beige", "black", "blue", "bronze", "brown", "gold",
    "gray", "green", "lilac", "orange", "pink", "purple", "red", "silver",
    "teal", "violet", "white", "yellow",
};

const char* const kRepeatedCharacters[] = {
    "person man", "person woman", "person girl", "person boy",
    "man person", "woman person", "girl person", "boy person",
    "girl woman", "boy man", "woman girl", "boy man",
};

const char* const kBackground[] = {
    "sky", "water", "ocean", "sea", "river", "lake", "forest", "mountain",
    "desert", "field", "city", "cityscape", "city skyline", "night sky",
    "evening sky", "snow", "snowfield", "iceberg", "beach", "sand",
    "grassland", "grassy", "meadow", "garden", "park", "jungle",
    "island", "cave", "mountain range", "valley", "dune", "hill",
    "hillside", "horizon", "skyline", "background", "scenery",
    "landscape", "countryside", "farmland", "village", "road",
    "road trip", "street", "street corner", "street scene", "path",
    "trail", "outdoor", "outcrop", "rocky", "coast", "coastline",
    "shore", "shoreline", "riverbank", "river valley", "mountain lake",
    "riverbed", "mountain stream", "mountain pass", "mountain village",
    "mountaineer", "mountain view", "mountain snowy", "waterfall", "cascade",
};

template <std::size_t N>
std::vector<std::string> to_vector(const char* const (&words)[N]) {
  return std::vector<std::string>(std::begin(words), std::end(words));
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

void normalize_list(std::vector<std::string>& words) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& w : words) {
    std::string lw = to_lower(trim(w));
    if (!lw.empty() && seen.insert(lw).second) {
      out.push_back(std::move(lw));
    }
  }
  words = std::move(out);
}

bool contains(const std::vector<std::string>& words, std::string_view w) {
  return std::find(words.begin(), words.end(), w) != words.end();
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

VocabularyConfig VocabularyConfig::defaults() {
  VocabularyConfig v;
  v.adjectives = to_vector(kAdjectives);
  v.verbs = to_vector(kVerbs);
  v.colors = to_vector(kColors);
  v.repeated_character_descriptions = to_vector(kRepeatedCharacters);
  v.background_allowlist = to_vector(kBackground);
  v.normalize();
  return v;
}

VocabularyConfig VocabularyConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open vocabulary file " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "malformed vocabulary file: " + std::string(e.what()));
  }
  VocabularyConfig v = defaults();
  auto load = [&j](const char* key, std::vector<std::string>& dst) {
    if (j.contains(key)) {
      dst = j.at(key).get<std::vector<std::string>>();
    }
  };
  load("adjectives", v.adjectives);
  load("verbs", v.verbs);
  load("colors", v.colors);
  load("repeated_character_descriptions", v.repeated_character_descriptions);
  load("background_allowlist", v.background_allowlist);
  v.normalize();
  return v;
}

void VocabularyConfig::normalize() {
  normalize_list(adjectives);
  normalize_list(verbs);
  normalize_list(colors);
  normalize_list(repeated_character_descriptions);
  normalize_list(background_allowlist);
}

bool VocabularyConfig::is_stopword(std::string_view w) const {
  return contains(adjectives, w) || contains(verbs, w) || contains(colors, w) ||
         contains(repeated_character_descriptions, w);
}

bool VocabularyConfig::is_background(std::string_view w) const {
  return contains(background_allowlist, w);
}

std::vector<std::string> filter_labels(const std::vector<std::string>& labels, LabelMode mode,
                                       const VocabularyConfig& vocab) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& raw : labels) {
    std::string label = to_lower(trim(raw));
    if (label.empty() || seen.count(label) != 0) {
      continue;
    }
    const bool keep =
        mode == LabelMode::kForeground ? !vocab.is_stopword(label) : vocab.is_background(label);
    if (keep) {
      seen.insert(label);
      out.push_back(std::move(label));
    }
  }
  return out;
}

}  // namespace vforge
