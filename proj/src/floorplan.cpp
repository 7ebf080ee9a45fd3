#include "filmset/floorplan.hpp"

#include "filmset/error.hpp"

#include <cmath>
#include <deque>
#include <set>

namespace filmset {

namespace {

constexpr double kEps = 1e-9;

std::string relation_text(const AdjacencyRelation& r) {
  return "(" + r.room_a + ", " + r.room_b + ", " + std::string(to_string(r.relation)) + ")";
}

/// Origin of `room` when it sits `dir` of `reference`.
Vec2 origin_beside(const PlacedRoom& reference, const RoomSpec& room, Direction dir) {
  switch (dir) {
  case Direction::east: return {reference.max().x(), reference.min().y()};
  case Direction::west: return {reference.min().x() - room.width, reference.min().y()};
  case Direction::north: return {reference.min().x(), reference.max().y()};
  case Direction::south: return {reference.min().x(), reference.min().y() - room.depth};
  }
  return Vec2::Zero();
}

Direction opposite(Direction d) {
  switch (d) {
  case Direction::east: return Direction::west;
  case Direction::west: return Direction::east;
  case Direction::north: return Direction::south;
  case Direction::south: return Direction::north;
  }
  return d;
}

/// Length along which b touches a on a's `dir` side; negative when it does not.
double shared_length(const PlacedRoom& a, const PlacedRoom& b, Direction dir) {
  switch (dir) {
  case Direction::east:
    if (std::abs(b.min().x() - a.max().x()) > kEps) return -1;
    return std::min(a.max().y(), b.max().y()) - std::max(a.min().y(), b.min().y());
  case Direction::west:
    if (std::abs(b.max().x() - a.min().x()) > kEps) return -1;
    return std::min(a.max().y(), b.max().y()) - std::max(a.min().y(), b.min().y());
  case Direction::north:
    if (std::abs(b.min().y() - a.max().y()) > kEps) return -1;
    return std::min(a.max().x(), b.max().x()) - std::max(a.min().x(), b.min().x());
  case Direction::south:
    if (std::abs(b.max().y() - a.min().y()) > kEps) return -1;
    return std::min(a.max().x(), b.max().x()) - std::max(a.min().x(), b.min().x());
  }
  return -1;
}

bool interiors_overlap(const PlacedRoom& a, const PlacedRoom& b) {
  const double ox = std::min(a.max().x(), b.max().x()) - std::max(a.min().x(), b.min().x());
  const double oy = std::min(a.max().y(), b.max().y()) - std::max(a.min().y(), b.min().y());
  return ox > kEps && oy > kEps;
}

void check_room(const RoomSpec& room, std::size_t index) {
  const std::string path = "rooms[" + std::to_string(index) + "]";
  room_number(room.name);
  if (!(room.width >= kMinRoomSize && room.width <= kMaxRoomSize)) {
    throw Error(ErrorCode::InvalidArgument, "width must be in [1, 50] m", path + ".width");
  }
  if (!(room.depth >= kMinRoomSize && room.depth <= kMaxRoomSize)) {
    throw Error(ErrorCode::InvalidArgument, "depth must be in [1, 50] m", path + ".depth");
  }
  std::set<int> seen;
  for (std::size_t k = 0; k < room.arc_edges.size(); ++k) {
    const auto& arc = room.arc_edges[k];
    const std::string arc_path = path + ".arc_edges[" + std::to_string(k) + "]";
    if (arc.edge_index < 0 || arc.edge_index > 3 || !seen.insert(arc.edge_index).second) {
      throw Error(ErrorCode::InvalidArgument, "edge_index must be a distinct value in 0..3",
                  arc_path + ".edge_index");
    }
    const double chord = (arc.edge_index % 2 == 0) ? room.width : room.depth;
    if (!(std::abs(arc.h_chord) < chord / 2)) {
      throw Error(ErrorCode::InvalidArgument, "|h_chord| must stay below half the chord",
                  arc_path + ".h_chord");
    }
  }
}

} // namespace

std::string_view to_string(Direction d) {
  switch (d) {
  case Direction::east: return "east";
  case Direction::west: return "west";
  case Direction::north: return "north";
  case Direction::south: return "south";
  }
  return "";
}

Direction direction_from_string(std::string_view text) {
  if (text == "east") return Direction::east;
  if (text == "west") return Direction::west;
  if (text == "north") return Direction::north;
  if (text == "south") return Direction::south;
  throw Error(ErrorCode::InvalidArgument, "unknown relation '" + std::string(text) + "'");
}

WallSide wall_side(RectEdge edge) {
  switch (edge) {
  case RectEdge::south: return WallSide::south;
  case RectEdge::east: return WallSide::east;
  case RectEdge::north: return WallSide::north;
  case RectEdge::west: return WallSide::west;
  }
  return WallSide::south;
}

std::array<Vec2, 4> PlacedRoom::corners() const {
  const Vec2 lo = min();
  const Vec2 hi = max();
  return {lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())};
}

const PlacedRoom* PlacedFloorplan::find(std::string_view name) const {
  for (const auto& r : rooms) {
    if (r.spec.name == name) {
      return &r;
    }
  }
  return nullptr;
}

const PlacedRoom& PlacedFloorplan::room(std::string_view name) const {
  if (const auto* r = find(name)) {
    return *r;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown room '" + std::string(name) + "'");
}

PlacedFloorplan place_rooms(const std::vector<RoomSpec>& rooms, const AdjacencySpec& adjacency) {
  if (rooms.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no rooms to place", "rooms");
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    check_room(rooms[i], i);
    if (!index.emplace(rooms[i].name, i).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate room name '" + rooms[i].name + "'",
                  "rooms[" + std::to_string(i) + "].name");
    }
  }
  for (std::size_t k = 0; k < adjacency.relations.size(); ++k) {
    const auto& r = adjacency.relations[k];
    const std::string path = "adjacency[" + std::to_string(k) + "]";
    if (!index.contains(r.room_a) || !index.contains(r.room_b)) {
      throw Error(ErrorCode::InvalidArgument, "relation references an undeclared room", path);
    }
    if (r.room_a == r.room_b) {
      throw Error(ErrorCode::InvalidArgument, "a room cannot be adjacent to itself", path);
    }
  }

  const std::size_t root = index.contains("room1") ? index.at("room1") : 0;
  std::vector<std::optional<Vec2>> origin(rooms.size());
  origin[root] = Vec2::Zero();
  std::deque<std::size_t> queue{root};
  std::vector<PlacedRoom> placed(rooms.size());
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    placed[i].spec = rooms[i];
  }

  while (!queue.empty()) {
    const std::size_t current = queue.front();
    queue.pop_front();
    placed[current].origin = *origin[current];
    for (const auto& r : adjacency.relations) {
      const std::size_t a = index.at(r.room_a);
      const std::size_t b = index.at(r.room_b);
      std::size_t other;
      Direction dir;
      if (a == current) {
        other = b;
        dir = r.relation;
      } else if (b == current) {
        other = a;
        dir = opposite(r.relation);
      } else {
        continue;
      }
      if (origin[other]) {
        continue;
      }
      origin[other] = origin_beside(placed[current], rooms[other], dir);
      placed[other].origin = *origin[other];
      queue.push_back(other);
    }
  }

  for (std::size_t i = 0; i < rooms.size(); ++i) {
    if (!origin[i]) {
      throw Error(ErrorCode::DisconnectedGraph,
                  "'" + rooms[i].name + "' is unreachable from " + rooms[root].name);
    }
  }

  PlacedFloorplan plan;
  plan.rooms = std::move(placed);

  for (std::size_t k = 0; k < adjacency.relations.size(); ++k) {
    const auto& r = adjacency.relations[k];
    const auto& a = plan.rooms[index.at(r.room_a)];
    const auto& b = plan.rooms[index.at(r.room_b)];
    if (shared_length(a, b, r.relation) < kMinSharedLength - kEps) {
      throw Error(ErrorCode::UnplaceableRoom, "relation " + relation_text(r) + " cannot be met",
                  "adjacency[" + std::to_string(k) + "]");
    }
  }
  for (std::size_t i = 0; i < plan.rooms.size(); ++i) {
    for (std::size_t j = i + 1; j < plan.rooms.size(); ++j) {
      if (interiors_overlap(plan.rooms[i], plan.rooms[j])) {
        throw Error(ErrorCode::UnplaceableRoom,
                    "'" + plan.rooms[i].spec.name + "' and '" + plan.rooms[j].spec.name +
                        "' overlap");
      }
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// parse_edge

namespace {

struct SideGeometry {
  Vec2 start;
  Vec2 end;
  bool horizontal;
  double coordinate; ///< fixed coordinate of the side line
  double lo;         ///< parameter range along the free axis
  double hi;
};

SideGeometry side_geometry(const PlacedRoom& room, RectEdge edge) {
  const auto c = room.corners();
  const int e = static_cast<int>(edge);
  SideGeometry g{c[e], c[(e + 1) % 4], e % 2 == 0, 0, 0, 0};
  if (g.horizontal) {
    g.coordinate = g.start.y();
    g.lo = std::min(g.start.x(), g.end.x());
    g.hi = std::max(g.start.x(), g.end.x());
  } else {
    g.coordinate = g.start.x();
    g.lo = std::min(g.start.y(), g.end.y());
    g.hi = std::max(g.start.y(), g.end.y());
  }
  return g;
}

RectEdge facing_edge(RectEdge edge) {
  return static_cast<RectEdge>((static_cast<int>(edge) + 2) % 4);
}

struct Overlap {
  double lo;
  double hi;
  std::size_t other;
};

} // namespace

std::vector<Edge> parse_edge(const PlacedFloorplan& plan) {
  std::vector<Edge> edges;
  const auto& rooms = plan.rooms;
  for (std::size_t r = 0; r < rooms.size(); ++r) {
    for (int e = 0; e < 4; ++e) {
      const auto edge = static_cast<RectEdge>(e);
      const SideGeometry side = side_geometry(rooms[r], edge);

      std::vector<Overlap> overlaps;
      for (std::size_t q = 0; q < rooms.size(); ++q) {
        if (q == r) {
          continue;
        }
        const SideGeometry other = side_geometry(rooms[q], facing_edge(edge));
        if (std::abs(other.coordinate - side.coordinate) > kEps) {
          continue;
        }
        const double lo = std::max(side.lo, other.lo);
        const double hi = std::min(side.hi, other.hi);
        if (hi - lo > kEps) {
          overlaps.push_back({lo, hi, q});
        }
      }

      const ArcEdgeSpec* arc = nullptr;
      for (const auto& a : rooms[r].spec.arc_edges) {
        if (a.edge_index == e) {
          arc = &a;
        }
      }
      if (arc && !overlaps.empty() && arc->h_chord != 0.0) {
        throw Error(ErrorCode::ArcOnInternalEdge,
                    rooms[r].spec.name + " edge " + std::to_string(e) + " is shared with " +
                        rooms[overlaps.front().other].spec.name);
      }

      std::vector<double> breaks{side.lo, side.hi};
      for (const auto& o : overlaps) {
        breaks.push_back(o.lo);
        breaks.push_back(o.hi);
      }
      std::sort(breaks.begin(), breaks.end());
      breaks.erase(std::unique(breaks.begin(), breaks.end(),
                               [](double a, double b) { return std::abs(a - b) <= kEps; }),
                   breaks.end());

      // Counter-clockwise traversal: south and east increase, north and west decrease.
      const bool forward = e == 0 || e == 1;
      std::vector<std::pair<double, double>> pieces;
      for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        pieces.emplace_back(breaks[k], breaks[k + 1]);
      }
      if (!forward) {
        std::reverse(pieces.begin(), pieces.end());
      }

      for (auto [lo, hi] : pieces) {
        const double mid = (lo + hi) / 2;
        const Overlap* shared = nullptr;
        for (const auto& o : overlaps) {
          if (mid > o.lo && mid < o.hi) {
            shared = &o;
          }
        }
        if (shared && shared->other < r) {
          continue; // emitted from the other room
        }
        const auto point = [&](double t) {
          return side.horizontal ? Vec2(t, side.coordinate) : Vec2(side.coordinate, t);
        };
        Edge out;
        out.start = point(forward ? lo : hi);
        out.end = point(forward ? hi : lo);
        out.owners.push_back({rooms[r].spec.name, wall_side(edge)});
        if (shared) {
          out.classification = EdgeClass::internal;
          out.owners.push_back({rooms[shared->other].spec.name, wall_side(facing_edge(edge))});
        } else if (arc && arc->h_chord != 0.0) {
          out.kind = EdgeKind::arc;
          out.h_chord = arc->h_chord;
        }
        edges.push_back(std::move(out));
      }
    }
  }
  return edges;
}

// ---------------------------------------------------------------------------
// tessellate

namespace {

using PointKey = std::pair<long long, long long>;

PointKey key_of(const Vec2& p) {
  return {std::llround(p.x() * 1e6), std::llround(p.y() * 1e6)};
}

} // namespace

std::vector<FloorFace> tessellate(const std::vector<Edge>& edges, int arc_segments) {
  if (arc_segments < 1) {
    throw Error(ErrorCode::InvalidArgument, "arc_segments must be >= 1", "arc_segments");
  }
  std::vector<std::string> order;
  for (const auto& e : edges) {
    for (const auto& o : e.owners) {
      if (std::find(order.begin(), order.end(), o.room) == order.end()) {
        order.push_back(o.room);
      }
    }
  }

  std::vector<FloorFace> faces;
  for (const auto& room : order) {
    struct Oriented {
      Vec2 start;
      Vec2 end;
      const Edge* edge;
      bool reversed;
    };
    std::vector<Oriented> loop;
    for (const auto& e : edges) {
      for (std::size_t k = 0; k < e.owners.size(); ++k) {
        if (e.owners[k].room != room) {
          continue;
        }
        const bool reversed = k != 0;
        loop.push_back({reversed ? e.end : e.start, reversed ? e.start : e.end, &e, reversed});
      }
    }

    std::map<PointKey, std::size_t> by_start;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      if (!by_start.emplace(key_of(loop[i].start), i).second) {
        throw Error(ErrorCode::OpenLoop, room + " has a vertex of degree > 2");
      }
    }
    std::vector<std::size_t> chain;
    std::vector<bool> used(loop.size(), false);
    std::size_t current = 0;
    while (!used[current]) {
      used[current] = true;
      chain.push_back(current);
      const auto next = by_start.find(key_of(loop[current].end));
      if (next == by_start.end()) {
        throw Error(ErrorCode::OpenLoop, room + " boundary does not close");
      }
      current = next->second;
    }
    if (current != 0 || chain.size() != loop.size()) {
      throw Error(ErrorCode::OpenLoop, room + " boundary is not a single loop");
    }

    FloorFace face;
    face.room = room;
    for (const auto i : chain) {
      const auto& o = loop[i];
      if (o.edge->kind == EdgeKind::arc && o.edge->h_chord != 0.0) {
        auto pts = geometry::arc_points<double>(o.edge->start, o.edge->end, o.edge->h_chord,
                                                arc_segments);
        if (o.reversed) {
          std::reverse(pts.begin(), pts.end());
        }
        face.polygon.insert(face.polygon.end(), pts.begin(), pts.end() - 1);
      } else {
        face.polygon.push_back(o.start);
      }
    }
    const std::span<const Vec2> poly(face.polygon);
    if (!geometry::is_simple<double>(poly)) {
      throw Error(ErrorCode::SelfIntersection, room + " floor polygon self-intersects");
    }
    if (geometry::signed_area<double>(poly) < 0) {
      std::reverse(face.polygon.begin(), face.polygon.end());
    }
    const auto triangles = geometry::triangulate<double>(std::span<const Vec2>(face.polygon));
    if (!triangles) {
      throw Error(ErrorCode::SelfIntersection, room + " floor polygon cannot be triangulated");
    }
    for (const auto& p : face.polygon) {
      face.mesh.vertices.emplace_back(p.x(), p.y(), 0.0);
    }
    face.mesh.faces = *triangles;
    faces.push_back(std::move(face));
  }
  return faces;
}

} // namespace filmset
