#pragma once

// Internal JSON helpers shared by modules whose file formats nest each other
// (scene.json embeds rig.json).

#include <json.hpp>

#include <string>

#include "procam/error.hpp"
#include "procam/geometry.hpp"

namespace procam::detail {

geom::StereoRig rig_from_json(const nlohmann::json& doc);
nlohmann::json rig_to_json_value(const geom::StereoRig& rig);

template <typename T>
T json_get(const nlohmann::json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace procam::detail
