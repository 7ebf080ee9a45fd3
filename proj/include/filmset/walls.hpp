#pragma once

// Wall prisms for wall-structure scenes.
//
// External walls are offset outward from the room boundary so interiors keep
// their declared size; internal walls are centered on the shared boundary and
// split into one half per room. Each `room<N>_id<Y>` element gathers every
// prism facing into room N from side Y, `arc<N>` holds a curved wall and
// `outer` is the exterior facade skin.

#include "filmset/floorplan.hpp"
#include "filmset/scene.hpp"

#include <span>
#include <utility>
#include <vector>

namespace filmset {

inline constexpr double kMinWallThickness = 0.05;
inline constexpr double kMaxWallThickness = 0.6;
inline constexpr double kMinWallHeight = 2.2;
inline constexpr double kMaxWallHeight = 8.0;
/// Gap between an external wall face and its facade skin.
inline constexpr double kFacadeOffset = 0.002;

enum class OpeningKind { door, window };

std::string_view to_string(OpeningKind kind);
OpeningKind opening_kind_from_string(std::string_view text);

/// Rectangular hole in segment coordinates (s along the segment from its
/// start, z up from the floor).
struct WallHole {
  OpeningKind kind = OpeningKind::door;
  double s0 = 0.0;
  double s1 = 0.0;
  double z0 = 0.0;
  double z1 = 0.0;
};

struct WallSegment {
  Vec2 start = Vec2::Zero();
  Vec2 end = Vec2::Zero();
  EdgeClass classification = EdgeClass::external;
  std::vector<EdgeOwner> owners;
  /// Extra length past each end at convex building corners.
  double extend_start = 0.0;
  double extend_end = 0.0;
  std::vector<WallHole> holes;

  double length() const { return (end - start).norm(); }
  Vec2 direction() const { return (end - start).normalized(); }
};

struct ArcWall {
  AttributeId id = AttributeId::arc(1);
  std::string room;
  WallSide side = WallSide::south;
  Vec2 start = Vec2::Zero();
  Vec2 end = Vec2::Zero();
  double h_chord = 0.0;
  std::vector<Vec2> points; ///< room boundary, start to end
};

/// One straight room side that can be addressed as `room<N>_id<Y>`.
/// The u axis runs left to right as seen from inside the room.
struct RoomSide {
  AttributeId id = AttributeId::room_wall(1, WallSide::west);
  std::string room;
  WallSide side = WallSide::west;
  Vec2 left_end = Vec2::Zero();
  Vec2 u_axis = Vec2::UnitX();
  double length = 0.0;

  Vec2 inward() const { return inward_normal(side); }
  Vec2 point(double u) const { return left_end + u * u_axis; }
};

struct WallSet {
  double thickness = 0.2;
  double height = 3.0;
  std::vector<WallSegment> segments;
  std::vector<ArcWall> arcs;
  std::vector<RoomSide> sides;

  const RoomSide* find_side(std::string_view id) const;
  /// Offset of the room-facing surface from the boundary line along the
  /// owner's inward normal.
  double inner_face_offset(const WallSegment& segment) const;
};

/// Throws ThicknessOutOfRange, InvalidArgument.
WallSet build_walls(const PlacedFloorplan& plan, const std::vector<Edge>& edges, double thickness,
                    double height, int arc_segments);

/// Closed mesh for every prism facing into `room` from `side`.
Mesh side_mesh(const WallSet& walls, std::string_view room, WallSide side);
Mesh arc_mesh(const WallSet& walls, const ArcWall& arc);
Mesh facade_mesh(const WallSet& walls);

/// Wall elements in a stable order: room sides (rooms in declaration order,
/// sides by index), arcs, then `outer`.
std::vector<SceneElement> wall_elements(const WallSet& walls);

/// Parameters of an axis-aligned slab, possibly perforated by holes.
struct PanelFrame {
  Vec2 origin = Vec2::Zero();
  Vec2 direction = Vec2::UnitX();
  Vec2 normal = Vec2::UnitY();
  double s_begin = 0.0;
  double s_end = 1.0;
  double w_begin = 0.0;
  double w_end = 0.1;
  double height = 1.0;
};

/// Watertight slab with rectangular holes cut through its thickness.
Mesh extrude_panel(const PanelFrame& frame, std::span<const WallHole> holes);

} // namespace filmset
