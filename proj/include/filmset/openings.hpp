#pragma once

// Doors and windows: holes cut into wall sides, asset fitting, and the gap
// fills of column-structure scenes.

#include "filmset/column_grid.hpp"
#include "filmset/retrieval.hpp"
#include "filmset/scene.hpp"
#include "filmset/walls.hpp"

#include <string>
#include <vector>

namespace filmset {

inline constexpr double kDefaultDoorWidth = 1.0;
inline constexpr double kDefaultDoorHeight = 2.1;
inline constexpr double kDefaultWindowWidth = 1.2;
inline constexpr double kDefaultWindowHeight = 1.0;
/// Minimum solid wall left above a window.
inline constexpr double kMinLintel = 0.3;
/// Minimum solid wall between two holes.
inline constexpr double kMinMullion = 0.1;

struct OpeningSpec {
  std::string target; ///< `room<N>_id<Y>`
  OpeningKind kind = OpeningKind::door;
  double width = kDefaultDoorWidth;
  double height = kDefaultDoorHeight;
  /// Distance from the wall's left end as seen from inside the room.
  double horizontal_offset = 0.0;
  std::string asset_query;
};

/// Where a fitted asset goes: the hole's bottom-center on the wall's middle
/// plane, the direction the asset front faces and the hole size.
struct OpeningFrame {
  Vec3 base_center = Vec3::Zero();
  Vec2 facing = Vec2::UnitY();
  double width = 0.0;
  double height = 0.0;
  double thickness = 0.0;

  /// World AABB of the hole volume through the wall.
  Box3 hole_bounds() const;
};

struct OpenedWall {
  SceneElement wall; ///< rebuilt `room<N>_id<Y>` element
  OpeningFrame frame;
};

/// Cuts a rectangular hole through every prism on the target side (both
/// halves of an internal wall). Doors start at the floor, windows are
/// centered vertically; window height is capped so a lintel remains.
/// Throws UnknownAttribute, OpeningOnArc, OpeningTooLarge,
/// OverlapWithExistingOpening, InvalidArgument.
OpenedWall open_wall(WallSet& walls, const OpeningSpec& spec);

/// Yaw that turns an asset's native front (-y) toward `facing`.
double yaw_facing(const Vec2& facing);

/// Rotates, scales and translates an asset so its box fills the opening.
/// Throws DegenerateAsset.
SceneElement fit_asset(const OpeningFrame& frame, const Mesh& asset_mesh);

enum class GapFill { door, long_window, short_window, partition_short_window };

std::string_view to_string(GapFill fill);

struct ColumnSlot {
  ColumnGap gap;
  GapFill fill = GapFill::short_window;
  std::string asset_query;
};

struct ColumnOpeningPlan {
  std::vector<ColumnSlot> slots;
};

struct ColumnOpeningQueries {
  std::string door = "door";
  std::string window = "window";
};

/// Rules in order: doors at the middle gap of the first and last rows,
/// long windows at the middle gap of the first and last columns, short
/// windows in every other perimeter gap, short windows in each partition gap.
/// The middle of an even gap count is the lower one.
/// Throws PartitionOnPerimeter, InvalidArgument.
ColumnOpeningPlan plan_column_openings(const ColumnGridSpec& grid,
                                       const std::vector<ColumnGap>& partitions,
                                       const ColumnOpeningQueries& queries = {});

/// Every perimeter gap: rows first (row 0, then the last row), then columns.
std::vector<ColumnGap> perimeter_gaps(const ColumnGridSpec& grid);

/// Fill geometry of a column gap. Perimeter fills face into the scene;
/// partition fills face +y for gaps along x and +x for gaps along y.
OpeningFrame gap_frame(const ColumnGridSpec& grid, const ColumnSlot& slot);

} // namespace filmset
