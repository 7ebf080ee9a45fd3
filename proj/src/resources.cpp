#include "filmset/resources.hpp"

#include "filmset/error.hpp"

#include <string>

namespace filmset::resources {

std::string_view demo_catalog() {
  return lookup("data/demo/catalog.json");
}

std::string_view demo_fixtures(std::string_view scene) {
  const auto text = lookup("data/demo/fixtures_" + std::string(scene) + ".json");
  if (text.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no demo scene named '" + std::string(scene) + "'");
  }
  return text;
}

} // namespace filmset::resources
