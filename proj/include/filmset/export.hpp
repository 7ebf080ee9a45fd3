#pragma once

// Scene exporters: canonical scene JSON, Wavefront OBJ/MTL and an SVG plan
// drawing.

#include "filmset/column_grid.hpp"
#include "filmset/layout.hpp"
#include "filmset/openings.hpp"
#include "filmset/scene.hpp"
#include "filmset/walls.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace filmset {

inline constexpr int kSceneSchemaVersion = 1;

/// Canonical JSON text: object keys sorted, floats in shortest round-trip
/// form, -0 written as 0, two-space indent, trailing newline.
std::string canonical_dump(const nlohmann::json& value);

nlohmann::json scene_to_json(const SceneGraph& graph);
/// Throws SchemaViolation with the path of the offending field.
SceneGraph scene_from_json(const nlohmann::json& j);

/// {"schema_version", "structure_kind", "elements": [...]} in canonical form.
std::string export_json(const SceneGraph& graph);
SceneGraph import_json(std::string_view text);

struct ObjExport {
  std::string obj;
  std::string mtl;
};

/// Transforms are baked. Each element with geometry becomes one `g` group
/// named by its attribute id with a `usemtl` line; texture coordinates are
/// box-mapped and multiplied by the material's uv scale.
ObjExport export_obj(const SceneGraph& graph, std::string_view mtl_file_name = "scene.mtl",
                     const std::map<std::string, double>& uv_scales = {});

/// Flat diffuse color of a material id, each channel in [0.2, 0.9].
Vec3 material_color(std::string_view material_id);

/// Door or window symbol on the plan: `hinge` and `strike` are the hole
/// ends on the room-side face, `into` points into the room.
struct OpeningMark {
  OpeningKind kind = OpeningKind::door;
  Vec2 hinge = Vec2::Zero();
  Vec2 strike = Vec2::Zero();
  Vec2 into = Vec2::UnitY();
};

struct RoomLabel {
  std::string name;
  std::string function;
  Vec2 position = Vec2::Zero();
};

struct Drawing {
  std::string title;
  std::optional<WallSet> walls;
  std::optional<ColumnGridSpec> grid;
  std::vector<OpeningMark> openings;
  std::vector<Placement> placements;
  std::vector<RoomLabel> rooms;
};

/// Millimetres on paper per meter at 1:50.
inline constexpr double kDrawingScale = 20.0;

/// Plan view at 1:50 with a 1 m grid. Walls are drawn as pairs of lines
/// (class `wall`) broken at holes, doors get quarter-circle swings (two
/// leaves above 1.5 m), windows a glazing line, objects labeled footprint
/// rectangles, columns circles.
std::string export_svg(const Drawing& drawing);

} // namespace filmset
