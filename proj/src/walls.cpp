#include "filmset/walls.hpp"

#include "filmset/error.hpp"

#include <cmath>
#include <map>

namespace filmset {

namespace {

constexpr double kEps = 1e-9;

Vec3 lift(const Vec2& p, double z) {
  return {p.x(), p.y(), z};
}

/// Appends quad a-b-c-d (cyclic) as two triangles whose normal agrees with
/// `outward`.
void add_quad(Mesh& mesh, std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d,
              const Vec3& outward) {
  const Vec3& pa = mesh.vertices[a];
  const Vec3 n = (mesh.vertices[b] - pa).cross(mesh.vertices[c] - pa);
  if (n.dot(outward) >= 0) {
    mesh.faces.push_back({a, b, c});
    mesh.faces.push_back({a, c, d});
  } else {
    mesh.faces.push_back({a, c, b});
    mesh.faces.push_back({a, d, c});
  }
}

std::vector<double> breakpoints(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end(),
                           [](double a, double b) { return std::abs(a - b) <= kEps; }),
               values.end());
  return values;
}

/// Cell grid over (s, z) with hole cells removed.
struct PanelGrid {
  std::vector<double> s;
  std::vector<double> z;
  std::vector<bool> solid; ///< (ns x nz), row-major in s

  PanelGrid(double s_begin, double s_end, double height, std::span<const WallHole> holes) {
    std::vector<double> sv{s_begin, s_end};
    std::vector<double> zv{0.0, height};
    for (const auto& h : holes) {
      sv.push_back(std::clamp(h.s0, s_begin, s_end));
      sv.push_back(std::clamp(h.s1, s_begin, s_end));
      zv.push_back(std::clamp(h.z0, 0.0, height));
      zv.push_back(std::clamp(h.z1, 0.0, height));
    }
    s = breakpoints(std::move(sv));
    z = breakpoints(std::move(zv));
    solid.assign(ns() * nz(), true);
    for (std::size_t i = 0; i < ns(); ++i) {
      const double sc = (s[i] + s[i + 1]) / 2;
      for (std::size_t k = 0; k < nz(); ++k) {
        const double zc = (z[k] + z[k + 1]) / 2;
        for (const auto& h : holes) {
          if (sc > h.s0 && sc < h.s1 && zc > h.z0 && zc < h.z1) {
            solid[i * nz() + k] = false;
          }
        }
      }
    }
  }

  std::size_t ns() const { return s.size() - 1; }
  std::size_t nz() const { return z.size() - 1; }
  bool is_solid(long i, long k) const {
    if (i < 0 || k < 0 || i >= static_cast<long>(ns()) || k >= static_cast<long>(nz())) {
      return false;
    }
    return solid[static_cast<std::size_t>(i) * nz() + static_cast<std::size_t>(k)];
  }
};

class VertexCache {
public:
  VertexCache(Mesh& mesh, const PanelFrame& frame, const PanelGrid& grid)
      : mesh_(mesh), frame_(frame), grid_(grid) {}

  std::uint32_t at(std::size_t i, std::size_t k, int layer) {
    const auto key = std::make_tuple(i, k, layer);
    if (const auto it = index_.find(key); it != index_.end()) {
      return it->second;
    }
    const double w = layer == 0 ? frame_.w_begin : frame_.w_end;
    const Vec2 p = frame_.origin + frame_.direction * grid_.s[i] + frame_.normal * w;
    const auto id = static_cast<std::uint32_t>(mesh_.vertices.size());
    mesh_.vertices.push_back(lift(p, grid_.z[k]));
    index_.emplace(key, id);
    return id;
  }

private:
  Mesh& mesh_;
  const PanelFrame& frame_;
  const PanelGrid& grid_;
  std::map<std::tuple<std::size_t, std::size_t, int>, std::uint32_t> index_;
};

/// Single-sided perforated surface at w = frame.w_begin.
Mesh skin_panel(const PanelFrame& frame, std::span<const WallHole> holes, const Vec3& outward) {
  Mesh mesh;
  const PanelGrid grid(frame.s_begin, frame.s_end, frame.height, holes);
  VertexCache v(mesh, frame, grid);
  for (std::size_t i = 0; i < grid.ns(); ++i) {
    for (std::size_t k = 0; k < grid.nz(); ++k) {
      if (grid.is_solid(static_cast<long>(i), static_cast<long>(k))) {
        add_quad(mesh, v.at(i, k, 0), v.at(i + 1, k, 0), v.at(i + 1, k + 1, 0), v.at(i, k + 1, 0),
                 outward);
      }
    }
  }
  return mesh;
}

bool inside_any_room(const PlacedFloorplan& plan, const Vec2& p) {
  for (const auto& r : plan.rooms) {
    const Vec2 lo = r.min();
    const Vec2 hi = r.max();
    if (p.x() >= lo.x() - kEps && p.x() <= hi.x() + kEps && p.y() >= lo.y() - kEps &&
        p.y() <= hi.y() + kEps) {
      return true;
    }
  }
  return false;
}

/// Another external segment continues straight on from `point` with the same
/// outward side.
bool continues_collinear(const std::vector<WallSegment>& segments, std::size_t self,
                         const Vec2& point) {
  const Vec2 dir = segments[self].direction();
  const Vec2 normal = inward_normal(segments[self].owners.front().side);
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& s = segments[k];
    if (k == self || s.classification != EdgeClass::external) {
      continue;
    }
    const bool touches = (s.start - point).norm() <= kEps || (s.end - point).norm() <= kEps;
    const bool parallel = std::abs(geometry::cross<double>(s.direction(), dir)) <= kEps;
    const bool same_side = (inward_normal(s.owners.front().side) - normal).norm() <= kEps;
    if (touches && parallel && same_side) {
      return true;
    }
  }
  return false;
}

/// Boundary offset band [w_begin, w_end] along the owner's inward normal.
std::pair<double, double> band(const WallSet& walls, const WallSegment& s) {
  if (s.classification == EdgeClass::external) {
    return {-walls.thickness, 0.0};
  }
  return {0.0, walls.thickness / 2};
}

} // namespace

std::string_view to_string(OpeningKind kind) {
  return kind == OpeningKind::door ? "door" : "window";
}

OpeningKind opening_kind_from_string(std::string_view text) {
  if (text == "door") return OpeningKind::door;
  if (text == "window") return OpeningKind::window;
  throw Error(ErrorCode::InvalidArgument, "unknown opening kind '" + std::string(text) + "'");
}

const RoomSide* WallSet::find_side(std::string_view id) const {
  for (const auto& s : sides) {
    if (s.id.str() == id) {
      return &s;
    }
  }
  return nullptr;
}

double WallSet::inner_face_offset(const WallSegment& segment) const {
  return segment.classification == EdgeClass::external ? 0.0 : thickness / 2;
}

Mesh extrude_panel(const PanelFrame& frame, std::span<const WallHole> holes) {
  Mesh mesh;
  const PanelGrid grid(frame.s_begin, frame.s_end, frame.height, holes);
  VertexCache v(mesh, frame, grid);
  const Vec3 dir = lift(frame.direction, 0.0);
  const Vec3 normal = lift(frame.normal, 0.0);
  const Vec3 up = Vec3::UnitZ();
  for (std::size_t i = 0; i < grid.ns(); ++i) {
    for (std::size_t k = 0; k < grid.nz(); ++k) {
      const long li = static_cast<long>(i);
      const long lk = static_cast<long>(k);
      if (!grid.is_solid(li, lk)) {
        continue;
      }
      add_quad(mesh, v.at(i, k, 0), v.at(i + 1, k, 0), v.at(i + 1, k + 1, 0), v.at(i, k + 1, 0),
               -normal);
      add_quad(mesh, v.at(i, k, 1), v.at(i + 1, k, 1), v.at(i + 1, k + 1, 1), v.at(i, k + 1, 1),
               normal);
      if (!grid.is_solid(li - 1, lk)) {
        add_quad(mesh, v.at(i, k, 0), v.at(i, k + 1, 0), v.at(i, k + 1, 1), v.at(i, k, 1), -dir);
      }
      if (!grid.is_solid(li + 1, lk)) {
        add_quad(mesh, v.at(i + 1, k, 0), v.at(i + 1, k + 1, 0), v.at(i + 1, k + 1, 1),
                 v.at(i + 1, k, 1), dir);
      }
      if (!grid.is_solid(li, lk - 1)) {
        add_quad(mesh, v.at(i, k, 0), v.at(i + 1, k, 0), v.at(i + 1, k, 1), v.at(i, k, 1), -up);
      }
      if (!grid.is_solid(li, lk + 1)) {
        add_quad(mesh, v.at(i, k + 1, 0), v.at(i + 1, k + 1, 0), v.at(i + 1, k + 1, 1),
                 v.at(i, k + 1, 1), up);
      }
    }
  }
  return mesh;
}

WallSet build_walls(const PlacedFloorplan& plan, const std::vector<Edge>& edges, double thickness,
                    double height, int arc_segments) {
  if (!(thickness >= kMinWallThickness && thickness <= kMaxWallThickness)) {
    throw Error(ErrorCode::ThicknessOutOfRange, "wall thickness must be in [0.05, 0.6] m",
                "wall_thickness");
  }
  if (!(height >= kMinWallHeight && height <= kMaxWallHeight)) {
    throw Error(ErrorCode::InvalidArgument, "wall height must be in [2.2, 8.0] m", "wall_height");
  }
  if (arc_segments < 1) {
    throw Error(ErrorCode::InvalidArgument, "arc_segments must be >= 1", "arc_segments");
  }

  WallSet walls;
  walls.thickness = thickness;
  walls.height = height;

  int arc_number = 0;
  for (const auto& e : edges) {
    if (e.kind == EdgeKind::arc && e.h_chord != 0.0) {
      ArcWall arc;
      arc.id = AttributeId::arc(++arc_number);
      arc.room = e.owners.front().room;
      arc.side = e.owners.front().side;
      arc.start = e.start;
      arc.end = e.end;
      arc.h_chord = e.h_chord;
      arc.points = geometry::arc_points<double>(e.start, e.end, e.h_chord, arc_segments);
      walls.arcs.push_back(std::move(arc));
      continue;
    }
    WallSegment s;
    s.start = e.start;
    s.end = e.end;
    s.classification = e.classification;
    s.owners = e.owners;
    walls.segments.push_back(std::move(s));
  }

  for (std::size_t k = 0; k < walls.segments.size(); ++k) {
    auto& s = walls.segments[k];
    if (s.classification != EdgeClass::external) {
      continue;
    }
    const Vec2 out = -inward_normal(s.owners.front().side);
    const Vec2 dir = s.direction();
    const auto corner_is_convex = [&](const Vec2& p, const Vec2& away) {
      const Vec2 probe = p + (thickness / 2) * (out + away);
      return !continues_collinear(walls.segments, k, p) && !inside_any_room(plan, probe);
    };
    s.extend_start = corner_is_convex(s.start, -dir) ? thickness : 0.0;
    s.extend_end = corner_is_convex(s.end, dir) ? thickness : 0.0;
  }

  for (const auto& room : plan.rooms) {
    const int n = room_number(room.spec.name);
    const auto corners = room.corners();
    for (int e = 0; e < 4; ++e) {
      const WallSide side = wall_side(static_cast<RectEdge>(e));
      const bool is_arc = std::any_of(walls.arcs.begin(), walls.arcs.end(), [&](const ArcWall& a) {
        return a.room == room.spec.name && a.side == side;
      });
      if (is_arc) {
        continue;
      }
      RoomSide rs;
      rs.id = AttributeId::room_wall(n, side);
      rs.room = room.spec.name;
      rs.side = side;
      rs.u_axis = geometry::perp<double>(inward_normal(side));
      const Vec2 a = corners[static_cast<std::size_t>(e)];
      const Vec2 b = corners[static_cast<std::size_t>((e + 1) % 4)];
      rs.left_end = a.dot(rs.u_axis) <= b.dot(rs.u_axis) ? a : b;
      rs.length = (b - a).norm();
      walls.sides.push_back(rs);
    }
  }
  return walls;
}

Mesh side_mesh(const WallSet& walls, std::string_view room, WallSide side) {
  Mesh mesh;
  for (const auto& s : walls.segments) {
    for (const auto& owner : s.owners) {
      if (owner.room != room || owner.side != side) {
        continue;
      }
      const auto [w0, w1] = band(walls, s);
      PanelFrame frame;
      frame.origin = s.start;
      frame.direction = s.direction();
      frame.normal = inward_normal(owner.side);
      frame.s_begin = -s.extend_start;
      frame.s_end = s.length() + s.extend_end;
      frame.w_begin = w0;
      frame.w_end = w1;
      frame.height = walls.height;
      mesh.append(extrude_panel(frame, s.holes));
    }
  }
  return mesh;
}

namespace {

std::vector<Vec2> arc_normals(const ArcWall& arc) {
  const auto circle = geometry::arc_circle<double>(arc.start, arc.end, arc.h_chord);
  std::vector<Vec2> normals;
  for (const auto& p : arc.points) {
    const Vec2 radial = (p - circle.center).normalized();
    normals.push_back(arc.h_chord > 0 ? radial : Vec2(-radial));
  }
  return normals;
}

} // namespace

Mesh arc_mesh(const WallSet& walls, const ArcWall& arc) {
  Mesh mesh;
  const auto normals = arc_normals(arc);
  const double t = walls.thickness;
  const double h = walls.height;
  const std::size_t n = arc.points.size();
  // Vertex layout per point k: inner bottom, inner top, outer bottom, outer top.
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 inner = arc.points[k];
    const Vec2 outer = inner + t * normals[k];
    mesh.vertices.push_back(lift(inner, 0.0));
    mesh.vertices.push_back(lift(inner, h));
    mesh.vertices.push_back(lift(outer, 0.0));
    mesh.vertices.push_back(lift(outer, h));
  }
  const auto ib = [](std::size_t k) { return static_cast<std::uint32_t>(4 * k); };
  const auto it = [](std::size_t k) { return static_cast<std::uint32_t>(4 * k + 1); };
  const auto ob = [](std::size_t k) { return static_cast<std::uint32_t>(4 * k + 2); };
  const auto ot = [](std::size_t k) { return static_cast<std::uint32_t>(4 * k + 3); };
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Vec3 out = lift((normals[k] + normals[k + 1]).normalized(), 0.0);
    add_quad(mesh, ib(k), ib(k + 1), it(k + 1), it(k), -out);
    add_quad(mesh, ob(k), ob(k + 1), ot(k + 1), ot(k), out);
    add_quad(mesh, ib(k), ib(k + 1), ob(k + 1), ob(k), -Vec3::UnitZ());
    add_quad(mesh, it(k), it(k + 1), ot(k + 1), ot(k), Vec3::UnitZ());
  }
  const Vec3 t0 = lift((arc.points[1] - arc.points[0]).normalized(), 0.0);
  const Vec3 t1 = lift((arc.points[n - 1] - arc.points[n - 2]).normalized(), 0.0);
  add_quad(mesh, ib(0), ob(0), ot(0), it(0), -t0);
  add_quad(mesh, ib(n - 1), ob(n - 1), ot(n - 1), it(n - 1), t1);
  return mesh;
}

Mesh facade_mesh(const WallSet& walls) {
  Mesh mesh;
  for (const auto& s : walls.segments) {
    if (s.classification != EdgeClass::external) {
      continue;
    }
    const Vec2 inward = inward_normal(s.owners.front().side);
    PanelFrame frame;
    frame.origin = s.start;
    frame.direction = s.direction();
    frame.normal = inward;
    frame.s_begin = -s.extend_start;
    frame.s_end = s.length() + s.extend_end;
    frame.w_begin = -walls.thickness - kFacadeOffset;
    frame.w_end = frame.w_begin;
    frame.height = walls.height;
    mesh.append(skin_panel(frame, s.holes, lift(-inward, 0.0)));
  }
  for (const auto& arc : walls.arcs) {
    const auto normals = arc_normals(arc);
    Mesh strip;
    const double w = walls.thickness + kFacadeOffset;
    for (std::size_t k = 0; k < arc.points.size(); ++k) {
      const Vec2 p = arc.points[k] + w * normals[k];
      strip.vertices.push_back(lift(p, 0.0));
      strip.vertices.push_back(lift(p, walls.height));
    }
    for (std::uint32_t k = 0; k + 1 < arc.points.size(); ++k) {
      const Vec3 out = lift((normals[k] + normals[k + 1]).normalized(), 0.0);
      add_quad(strip, 2 * k, 2 * k + 2, 2 * k + 3, 2 * k + 1, out);
    }
    mesh.append(strip);
  }
  return mesh;
}

std::vector<SceneElement> wall_elements(const WallSet& walls) {
  std::vector<SceneElement> out;
  for (const auto& side : walls.sides) {
    SceneElement e;
    e.attribute_id = side.id.str();
    e.mesh = side_mesh(walls, side.room, side.side);
    out.push_back(std::move(e));
  }
  for (const auto& arc : walls.arcs) {
    SceneElement e;
    e.attribute_id = arc.id.str();
    e.mesh = arc_mesh(walls, arc);
    out.push_back(std::move(e));
  }
  SceneElement facade;
  facade.attribute_id = AttributeId::outer().str();
  facade.mesh = facade_mesh(walls);
  out.push_back(std::move(facade));
  return out;
}

} // namespace filmset
