#pragma once

// JSON encoding shared by the gateway client and the mock backend server.

#include <json.hpp>
#include <string>

#include "vforge/error.hpp"
#include "vforge/protocol.hpp"
#include "vforge/raster.hpp"

namespace vforge::wire {

using json = nlohmann::json;

inline json mask_to_json(const Mask& mask) {
  return json{{"width", mask.width()}, {"height", mask.height()}, {"rle", encode_rle(mask)}};
}

// Accepts {"width","height","rle":[...]} or {"width","height","values":[...]}
// (raw 0..255 values, binarized at 128).
inline Mask mask_from_json(const json& j) {
  try {
    const Size size{j.at("width").get<int>(), j.at("height").get<int>()};
    if (j.contains("rle")) {
      const auto runs = j.at("rle").get<std::vector<std::uint32_t>>();
      return decode_rle(size, runs);
    }
    const auto values = j.at("values").get<std::vector<std::uint8_t>>();
    return Mask::binarize(size, values);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidationFailure, std::string("malformed mask: ") + e.what());
  }
}

inline json detection_to_json(const Detection& d) {
  return json{{"label", d.label}, {"box", {d.box.x0, d.box.y0, d.box.x1, d.box.y1}}, {"score", d.score}};
}

inline Detection detection_from_json(const json& j) {
  try {
    Detection d;
    d.label = j.at("label").get<std::string>();
    const auto b = j.at("box").get<std::vector<int>>();
    if (b.size() != 4) {
      throw Error(ErrorCode::kValidationFailure, "detection box needs 4 coordinates");
    }
    d.box = Rect{b[0], b[1], b[2], b[3]};
    d.score = j.at("score").get<double>();
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidationFailure, std::string("malformed detection: ") + e.what());
  }
}

inline json box_to_json(const Rect& r) { return json{r.x0, r.y0, r.x1, r.y1}; }

inline json image_ref(const std::string& path) { return json{{"path", path}}; }

inline std::string image_path(const json& j) {
  try {
    return j.at("path").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProtocolError, std::string("image reference needs a path: ") + e.what());
  }
}

inline std::string make_response(const json& id, const json& result) {
  return json{{"id", id}, {"result", result}}.dump();
}

inline std::string make_error(const json& id, const std::string& message) {
  return json{{"id", id}, {"error", {{"message", message}}}}.dump();
}

}  // namespace vforge::wire
