#pragma once

// Files compiled into the library: role schemas and the demo data set.

#include <string_view>

namespace filmset::resources {

/// Contents of an embedded file by repository-relative path, empty if absent.
std::string_view lookup(std::string_view path);

/// The 12-asset demo catalog.
std::string_view demo_catalog();

/// Scripted fixtures of a demo scene ("western_guestroom" or
/// "chinese_residence"). Throws InvalidArgument for other names.
std::string_view demo_fixtures(std::string_view scene);

} // namespace filmset::resources
