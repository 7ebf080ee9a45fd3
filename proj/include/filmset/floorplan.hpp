#pragma once

// Wall-structure floorplans: room placement from an adjacency graph, boundary
// edge extraction and floor tessellation.

#include "filmset/geometry.hpp"
#include "filmset/scene.hpp"

#include <map>
#include <string>
#include <vector>

namespace filmset {

enum class Direction { east, west, north, south };

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view text);

inline constexpr double kMinRoomSize = 1.0;
inline constexpr double kMaxRoomSize = 50.0;
/// Rooms that share a relation must touch along at least this length.
inline constexpr double kMinSharedLength = 0.9;

/// Rectangle edges are indexed counter-clockwise starting at the south edge.
enum class RectEdge : int { south = 0, east = 1, north = 2, west = 3 };

WallSide wall_side(RectEdge edge);

struct ArcEdgeSpec {
  int edge_index = 0;
  /// Sagitta in meters; positive bulges away from the room.
  double h_chord = 0.0;
};

struct RoomSpec {
  std::string name;
  double width = 0.0; ///< x extent
  double depth = 0.0; ///< y extent
  std::vector<ArcEdgeSpec> arc_edges;
};

struct AdjacencyRelation {
  std::string room_a;
  std::string room_b;
  /// room_b lies `relation` of room_a.
  Direction relation = Direction::east;
};

struct AdjacencySpec {
  std::vector<AdjacencyRelation> relations;
};

struct PlacedRoom {
  RoomSpec spec;
  Vec2 origin = Vec2::Zero();

  Vec2 min() const { return origin; }
  Vec2 max() const { return origin + Vec2(spec.width, spec.depth); }
  Box2 box() const { return {min(), max()}; }
  /// Counter-clockwise corners starting at (min x, min y).
  std::array<Vec2, 4> corners() const;
};

struct PlacedFloorplan {
  std::vector<PlacedRoom> rooms; ///< in declaration order
  double wall_thickness = 0.2;
  double wall_height = 3.0;

  const PlacedRoom& room(std::string_view name) const;
  const PlacedRoom* find(std::string_view name) const;
};

/// Breadth-first placement from room1 at the origin.
/// East/west neighbours align their min y with the reference, north/south
/// neighbours align their min x.
/// Throws UnplaceableRoom, DisconnectedGraph, InvalidArgument.
PlacedFloorplan place_rooms(const std::vector<RoomSpec>& rooms, const AdjacencySpec& adjacency);

enum class EdgeKind { line, arc };
enum class EdgeClass { external, internal };

struct EdgeOwner {
  std::string room;
  WallSide side;
};

struct Edge {
  EdgeKind kind = EdgeKind::line;
  /// Oriented counter-clockwise for owners.front().
  Vec2 start = Vec2::Zero();
  Vec2 end = Vec2::Zero();
  double h_chord = 0.0;
  EdgeClass classification = EdgeClass::external;
  std::vector<EdgeOwner> owners;

  double length() const { return (end - start).norm(); }
};

/// Each boundary segment exactly once. Shared segments are split out and
/// classified internal; arcs are only applied to fully external sides.
/// Throws ArcOnInternalEdge, InvalidArgument.
std::vector<Edge> parse_edge(const PlacedFloorplan& plan);

struct FloorFace {
  std::string room;
  std::vector<Vec2> polygon; ///< counter-clockwise, arcs discretized
  Mesh mesh;                 ///< triangulated at z = 0
};

/// Chains each room's edges into a closed loop and triangulates the floor.
/// Throws OpenLoop, SelfIntersection.
std::vector<FloorFace> tessellate(const std::vector<Edge>& edges, int arc_segments);

} // namespace filmset
