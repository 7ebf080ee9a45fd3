#pragma once

// Structured parameters: the typed sections agents emit and every
// procedural stage consumes.

#include "filmset/column_grid.hpp"
#include "filmset/floorplan.hpp"
#include "filmset/layout.hpp"
#include "filmset/materials.hpp"
#include "filmset/openings.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace filmset {

inline constexpr int kParamsSchemaVersion = 1;

/// Agent roles that emit a section, in chain order.
inline constexpr std::array<std::string_view, 7> kSectionNames{
    "manager", "allocation", "adjacency", "shape", "material", "door_window", "object"};

/// Schema id of a section, e.g. ("shape", wall) -> "shape_wall".
/// Throws InvalidArgument for sections that do not exist for `kind`.
std::string section_schema_id(std::string_view section, StructureKind kind);

/// Sections required for a structure kind (no shape on the column path).
std::vector<std::string> required_sections(StructureKind kind);

struct RoomInfo {
  std::string name;
  std::string function;
};

struct StableRequest {
  std::string query;
  Slot slot = Slot::center;
  int index = 0;
};

struct WallObjectRequest {
  std::string wall;
  std::string query;
};

struct RegionObjects {
  std::string region; ///< room name
  std::vector<StableRequest> stable;
  std::vector<LayoutTriplet> relative;
  std::vector<WallObjectRequest> wall;
};

/// Openings as emitted, before defaults are filled in from the wall length.
struct OpeningRequest {
  std::string target;
  OpeningKind kind = OpeningKind::door;
  std::optional<double> width;
  std::optional<double> height;
  std::optional<double> offset;
  std::string query;
};

struct StructuredParams {
  StructureKind structure_kind = StructureKind::wall;
  std::string scene_name;
  /// Raw validated sections keyed by name.
  std::map<std::string, nlohmann::json> sections;

  std::vector<RoomInfo> room_info;
  // wall path
  std::vector<RoomSpec> rooms;
  AdjacencySpec adjacency;
  std::vector<OpeningRequest> openings;
  // column path
  ColumnGridSpec grid;
  CellAssignment cells;
  ColumnOpeningQueries opening_styles;

  std::vector<MaterialEntry> materials;
  std::vector<RegionObjects> objects;

  bool has(std::string_view section) const { return sections.contains(std::string(section)); }
  /// Every required section present.
  bool complete() const;
  /// Names of required sections still missing.
  std::vector<std::string> missing() const;

  /// Validates `body` against the section schema and decodes it. A section
  /// may be set once, except `adjacency` which is replaced on retries.
  /// Throws SchemaViolation, InvalidArgument.
  void set_section(const std::string& section, const nlohmann::json& body);

  /// {"schema_version", "structure_kind", "scene_name", "sections"}.
  nlohmann::json to_json() const;
  /// Throws SchemaViolation, ConfigError.
  static StructuredParams from_json(const nlohmann::json& j);
  static StructuredParams load(const std::filesystem::path& path);
};

/// Decoders shared with the agent chain.
std::vector<RoomSpec> decode_shape(const nlohmann::json& body);
AdjacencySpec decode_adjacency(const nlohmann::json& body);
CellAssignment decode_cells(const nlohmann::json& body);

} // namespace filmset
