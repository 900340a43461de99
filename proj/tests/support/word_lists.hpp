#pragma once

#include <sstream>
#include <string>
#include <vector>

namespace vforge::testing {

// Stock filter word lists, typed out independently of the library defaults.
inline constexpr const char* kAdjectiveText =
    "ancient, athletic, beautiful, classic, clean, clear, close-up, crowded, decorative, dark, "
    "empty, fresh, healthy, high, indoor, light, long, modern, narrow, new, old, outdoor, "
    "peaceful, quiet, rainy, remote, romantic, sharp, shiny, short, silent, single, small, "
    "smooth, soft, spicy, square, strong, stunning, sweet, tall, tiny, traditional, warm, wet, "
    "wide, wooden";

inline constexpr const char* kVerbText =
    "act, add, adjust, aid, appear, applause, approach, archery, arrest, assemble, attach, "
    "attend, auction, back, baking, balance, bend, blow, boil, bounce, build, burn, buy, call, "
    "carry, carve, catch, celebrate, cheer, climb, close, cook, cool, cover, create, crochet, "
    "crush, cry, cut, dance, decorate, deliver, dive, dribble, drift, drink, drive, drop, eat, "
    "exercise, feed, fight, fill, find, fit, float, fly, fold, freeze, fry, gather, give, glow, "
    "glue, go, graze, greet, grow, guard, guide, hang, harvest, hide, hike, hit, hold, hug, "
    "hunt, illuminate, install, jog, jump, kick, knit, laugh, launch, lay, lead, lean, learn, "
    "leave, lie, lift, load, locate, lock, look, lose, make, measure, milk, mix, move, open, "
    "pack, paint, peel, perform, pick, plant, play, plow, pour, practice, prepare, press, "
    "print, pull, punch, push, put, read, receive, reflect, relax, release, remove, repair, "
    "rescue, reveal, ride, rise, roll, rub, run, sail, scatter, see, sell, send, serve, sew, "
    "shake, shape, shear, shine, shoot, shout, show, shovel, sing, sip, sit, skate, ski, "
    "sleep, slice, slide, smell, smile, smoke, snap, snow, soak, sort, sow, speak, spill, "
    "spin, splash, split, spread, spring, sprinkle, squeeze, stab, stand, start, stare, "
    "steam, stir, stitch, stop, store, stretch, strike, stroll, study, stuff, swirl, swing, "
    "take, talk, teach, tear, tell, think, throw, tick, tie, toast, touch, tour, tow, train, "
    "trim, trip, type, unlock, use, vacuum, walk, wash, watch, wave, wear, weave, weld, widen, "
    "wipe, write, zip, kiss";

inline constexpr const char* kColorText =
    "aqua, amber, beige, black, blue, bronze, brown, gold, gray, green, lilac, orange, pink, "
    "purple, red, silver, teal, violet, white, yellow";

inline constexpr const char* kRepeatedText =
    "person man, person woman, person girl, person boy, man person, woman person, "
    "girl person, boy person, girl woman, boy man, woman girl, boy man";

inline constexpr const char* kBackgroundText =
    "sky, water, ocean, sea, river, lake, forest, mountain, desert, field, city, cityscape, "
    "city skyline, night sky, evening sky, snow, snowfield, iceberg, beach, sand, grassland, "
    "grassy, meadow, garden, park, jungle, island, cave, mountain range, valley, dune, hill, "
    "hillside, horizon, skyline, background, scenery, landscape, countryside, farmland, "
    "village, road, road trip, street, street corner, street scene, path, trail, outdoor, "
    "outcrop, rocky, coast, coastline, shore, shoreline, riverbank, river valley, "
    "mountain lake, riverbed, mountain stream, mountain pass, mountain village, mountaineer, "
    "mountain view, mountain snowy, waterfall, cascade";

inline std::vector<std::string> split_words(const char* text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(' ');
    out.push_back(item.substr(a));
  }
  return out;
}

}  // namespace vforge::testing
