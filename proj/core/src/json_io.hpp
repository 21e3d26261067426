#pragma once

// Internal JSON helpers shared by the serialization translation units.
// Not installed; public headers stay free of the JSON dependency.

#include <json.hpp>

#include "vargram/context_tree.hpp"
#include "vargram/errors.hpp"

namespace vargram::detail {

nlohmann::json tree_to_json(const ContextTree& tree);
ContextTree tree_from_json(const nlohmann::json& j, int alphabet_size);

// Field access that reports which key is missing instead of a bare throw.
template <typename T>
T require(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("field '") + key + "': " + e.what());
  }
}

nlohmann::json parse_json(std::istream& in, const char* what);

}  // namespace vargram::detail
