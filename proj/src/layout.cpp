#include "filmset/layout.hpp"

#include "filmset/error.hpp"
#include "filmset/openings.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace filmset {

PlacementRegion room_region(const PlacedRoom& room, std::vector<Vec2> floor_polygon) {
  PlacementRegion region;
  region.kind = RegionKind::room;
  region.id = room.spec.name;
  region.polygon = std::move(floor_polygon);
  Vec2 lo = room.min();
  Vec2 hi = room.max();
  for (const auto& arc : room.spec.arc_edges) {
    if (arc.h_chord >= 0) {
      continue;
    }
    const double h = -arc.h_chord;
    switch (static_cast<RectEdge>(arc.edge_index)) {
    case RectEdge::south: lo.y() += h; break;
    case RectEdge::east: hi.x() -= h; break;
    case RectEdge::north: hi.y() -= h; break;
    case RectEdge::west: lo.x() += h; break;
    }
  }
  region.interior = Box2(lo, hi);
  return region;
}

PlacementRegion unit_region(const ColumnGridSpec& grid, const UnitRegion& unit) {
  PlacementRegion region;
  region.kind = RegionKind::unit;
  region.id = unit.id();
  region.polygon = unit.polygon(grid);
  const double keep_out = std::max(grid.column_radius, grid.beam_width / 2);
  const Vec2 lo = grid.center(unit.i1, unit.j1) + Vec2(keep_out, keep_out);
  const Vec2 hi = grid.center(unit.i2, unit.j2) - Vec2(keep_out, keep_out);
  region.interior = Box2(lo, hi);
  return region;
}

std::string_view to_string(Slot s) {
  switch (s) {
  case Slot::corner: return "corner";
  case Slot::edge: return "edge";
  case Slot::center: return "center";
  case Slot::relative: return "relative";
  case Slot::wall: return "wall";
  }
  return "";
}

Slot slot_from_string(std::string_view text) {
  for (const Slot s : {Slot::corner, Slot::edge, Slot::center, Slot::relative, Slot::wall}) {
    if (to_string(s) == text) {
      return s;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown slot '" + std::string(text) + "'");
}

std::string_view to_string(SpatialRelation r) {
  switch (r) {
  case SpatialRelation::left: return "left";
  case SpatialRelation::right: return "right";
  case SpatialRelation::in_front_of: return "in_front_of";
  case SpatialRelation::behind: return "behind";
  case SpatialRelation::above: return "above";
  }
  return "";
}

SpatialRelation spatial_relation_from_string(std::string_view text) {
  for (const auto r : {SpatialRelation::left, SpatialRelation::right, SpatialRelation::in_front_of,
                       SpatialRelation::behind, SpatialRelation::above}) {
    if (to_string(r) == text) {
      return r;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown spatial relation '" + std::string(text) + "'");
}

std::string_view to_string(DistanceLevel d) {
  return d == DistanceLevel::near ? "near" : "far";
}

DistanceLevel distance_level_from_string(std::string_view text) {
  if (text == "near") return DistanceLevel::near;
  if (text == "far") return DistanceLevel::far;
  throw Error(ErrorCode::InvalidArgument, "unknown distance level '" + std::string(text) + "'");
}

void PlacementConfig::validate() const {
  if (!(lambda_near > 0) || !(lambda_near < lambda_far)) {
    throw Error(ErrorCode::ConfigError, "need 0 < lambda(near) < lambda(far)", "placement.lambda");
  }
  for (const auto r : {SpatialRelation::left, SpatialRelation::right, SpatialRelation::in_front_of,
                       SpatialRelation::behind, SpatialRelation::above}) {
    const auto it = basis.find(r);
    if (it == basis.end() || std::abs(it->second.norm() - 1.0) > 1e-9) {
      throw Error(ErrorCode::ConfigError, "basis vectors must be unit length",
                  "placement.basis." + std::string(to_string(r)));
    }
  }
  if (collision_max_iters < 1 || !(collision_step > 0)) {
    throw Error(ErrorCode::ConfigError, "collision_max_iters and collision_step must be positive",
                "placement.collision");
  }
}

Box2 Placement::footprint() const {
  const double c = std::abs(std::cos(yaw));
  const double s = std::abs(std::sin(yaw));
  const Vec2 half(c * size.x() / 2 + s * size.y() / 2, s * size.x() / 2 + c * size.y() / 2);
  const Vec2 p = position.head<2>();
  return {p - half, p + half};
}

Box3 Placement::bounds() const {
  const Box2 f = footprint();
  return {Vec3(f.min().x(), f.min().y(), position.z()),
          Vec3(f.max().x(), f.max().y(), position.z() + size.z())};
}

std::string AnchorTable::issue(const std::string& region) {
  return region + "_a" + std::to_string(++counters_[region]);
}

void AnchorTable::add(const Placement& anchor) {
  anchors_[*anchor.anchor_id] = anchor;
}

const Placement* AnchorTable::find(const std::string& id) const {
  const auto it = anchors_.find(id);
  return it == anchors_.end() ? nullptr : &it->second;
}

void AnchorTable::update(const std::vector<Placement>& placements) {
  for (const auto& p : placements) {
    if (p.anchor_id && anchors_.contains(*p.anchor_id)) {
      anchors_[*p.anchor_id] = p;
    }
  }
}

namespace {

bool inside(const Box2& inner, const Box2& outer, double eps = 1e-9) {
  return (inner.min().array() >= outer.min().array() - eps).all() &&
         (inner.max().array() <= outer.max().array() + eps).all();
}

bool fits(const Box2& footprint, const Box2& interior) {
  return (footprint.sizes().array() <= interior.sizes().array() + 1e-9).all();
}

/// Shifts `p` so its footprint lies in `interior`; returns whether it moved.
bool clamp_into(Placement& p, const Box2& interior) {
  const Box2 f = p.footprint();
  Vec2 shift = Vec2::Zero();
  for (int a = 0; a < 2; ++a) {
    if (f.min()[a] < interior.min()[a] - 1e-12) {
      shift[a] = interior.min()[a] - f.min()[a];
    } else if (f.max()[a] > interior.max()[a] + 1e-12) {
      shift[a] = interior.max()[a] - f.max()[a];
    }
  }
  if (shift.isZero(0.0)) {
    return false;
  }
  p.position.head<2>() += shift;
  return true;
}

bool boxes_overlap(const Box2& a, const Box2& b, double tolerance) {
  return a.min().x() < b.max().x() - tolerance && b.min().x() < a.max().x() - tolerance &&
         a.min().y() < b.max().y() - tolerance && b.min().y() < a.max().y() - tolerance;
}

bool on_floor(const Placement& p) {
  return p.slot != Slot::wall && !p.is_above();
}

double snap_quarter(double yaw) {
  const double q = std::numbers::pi / 2;
  return geometry::wrap_angle(std::round(yaw / q) * q);
}

} // namespace

Placement place_stable(const PlacementRegion& region, const std::string& object, const Vec3& size,
                       Slot slot, int slot_index, AnchorTable& anchors) {
  if ((size.array() <= 0).any()) {
    throw Error(ErrorCode::InvalidArgument, "object size must be positive", object);
  }
  if ((slot == Slot::corner || slot == Slot::edge) && (slot_index < 0 || slot_index > 3)) {
    throw Error(ErrorCode::InvalidArgument, "slot index must be in 0..3", object);
  }
  Placement p;
  p.object = object;
  p.size = size;
  p.slot = slot;
  p.region = region.id;
  const Box2& box = region.interior;
  const Vec2 lo = box.min();
  const Vec2 hi = box.max();

  switch (slot) {
  case Slot::corner: {
    static constexpr std::array<std::array<int, 2>, 4> kSigns{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
    const auto [sx, sy] = kSigns[static_cast<std::size_t>(slot_index)];
    const Vec2 corner(sx > 0 ? lo.x() : hi.x(), sy > 0 ? lo.y() : hi.y());
    p.yaw = yaw_facing(Vec2(sx, sy));
    const Vec2 half = p.footprint().sizes() / 2;
    p.position.head<2>() = corner + Vec2(sx * (kWallClearance + half.x()),
                                         sy * (kWallClearance + half.y()));
    break;
  }
  case Slot::edge: {
    static constexpr std::array<std::array<int, 2>, 4> kInward{{{0, 1}, {-1, 0}, {0, -1}, {1, 0}}};
    const auto [ix, iy] = kInward[static_cast<std::size_t>(slot_index)];
    const Vec2 inward(ix, iy);
    Vec2 mid = box.center();
    if (ix != 0) {
      mid.x() = ix > 0 ? lo.x() : hi.x();
    } else {
      mid.y() = iy > 0 ? lo.y() : hi.y();
    }
    p.yaw = yaw_facing(inward);
    const Vec2 half = p.footprint().sizes() / 2;
    const double back = ix != 0 ? half.x() : half.y();
    p.position.head<2>() = mid + inward * (kWallClearance + back);
    break;
  }
  case Slot::center: {
    p.yaw = 0.0;
    p.position.head<2>() = geometry::centroid<double>(region.polygon);
    if (fits(p.footprint(), box)) {
      clamp_into(p, box);
    }
    break;
  }
  default:
    throw Error(ErrorCode::InvalidArgument, "place_stable takes corner, edge or center slots",
                object);
  }
  if (!inside(p.footprint(), box)) {
    throw Error(ErrorCode::ObjectLargerThanRegion,
                "'" + object + "' does not fit in " + region.id, object);
  }
  if (slot == Slot::edge || slot == Slot::center) {
    p.anchor_id = anchors.issue(region.id);
    anchors.add(p);
  }
  return p;
}

Vec3 relative_position(const Placement& anchor, SpatialRelation relation, DistanceLevel distance,
                       const PlacementConfig& cfg) {
  const double lambda = relation == SpatialRelation::above ? anchor.size.z() : cfg.lambda(distance);
  const Eigen::Matrix3d r = Eigen::AngleAxisd(anchor.yaw, Vec3::UnitZ()).toRotationMatrix();
  return anchor.position + lambda * (r * cfg.basis.at(relation));
}

Placement place_relative(const PlacementRegion& region, const LayoutTriplet& triplet,
                         const std::string& object, const Vec3& size, const AnchorTable& anchors,
                         const PlacementConfig& cfg, bool clamp) {
  const Placement* anchor = anchors.find(triplet.anchor);
  if (!anchor) {
    throw Error(ErrorCode::UnknownAnchor, "no anchor '" + triplet.anchor + "'", triplet.anchor);
  }
  if (anchor->region != region.id) {
    throw Error(ErrorCode::UnknownAnchor,
                "anchor '" + triplet.anchor + "' belongs to " + anchor->region, triplet.anchor);
  }
  Placement p;
  p.object = object;
  p.size = size;
  p.slot = Slot::relative;
  p.region = region.id;
  p.target = triplet.anchor;
  p.relation = triplet.relation;
  p.yaw = anchor->yaw;
  p.position = relative_position(*anchor, triplet.relation, triplet.distance, cfg);
  if (!fits(p.footprint(), region.interior)) {
    throw Error(ErrorCode::ObjectLargerThanRegion,
                "'" + object + "' does not fit in " + region.id, object);
  }
  if (!inside(p.footprint(), region.interior)) {
    if (!clamp) {
      throw Error(ErrorCode::ResultOutsideRegion,
                  "'" + object + "' lands outside " + region.id, triplet.anchor);
    }
    clamp_into(p, region.interior);
    p.clamped = true;
  }
  return p;
}

int slot_priority(Slot slot) {
  switch (slot) {
  case Slot::corner: return 4;
  case Slot::edge: return 3;
  case Slot::center: return 2;
  case Slot::relative: return 1;
  case Slot::wall: return 0;
  }
  return 0;
}

std::vector<std::pair<std::size_t, std::size_t>> overlapping_pairs(
    const std::vector<Placement>& placements, double tolerance) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < placements.size(); ++i) {
    if (!on_floor(placements[i])) {
      continue;
    }
    const Box2 a = placements[i].footprint();
    for (std::size_t j = i + 1; j < placements.size(); ++j) {
      if (on_floor(placements[j]) && boxes_overlap(a, placements[j].footprint(), tolerance)) {
        pairs.emplace_back(i, j);
      }
    }
  }
  return pairs;
}

namespace {

struct Move {
  Vec2 delta;
  bool collides;
  double cost;
};

/// Cheapest shift of `m` that clears `o` and stays inside; prefers shifts
/// that create no new overlap.
std::optional<Vec2> separating_move(const std::vector<Placement>& all, std::size_t m,
                                    std::size_t o, const Box2& interior, double step) {
  const Box2 fm = all[m].footprint();
  const Box2 fo = all[o].footprint();
  const std::array<Vec2, 4> deltas{
      Vec2(fo.max().x() - fm.min().x() + step, 0), Vec2(-(fm.max().x() - fo.min().x() + step), 0),
      Vec2(0, fo.max().y() - fm.min().y() + step), Vec2(0, -(fm.max().y() - fo.min().y() + step))};
  std::optional<Move> best;
  for (const auto& d : deltas) {
    const Box2 moved(fm.min() + d, fm.max() + d);
    if (!inside(moved, interior)) {
      continue;
    }
    bool collides = false;
    for (std::size_t k = 0; k < all.size() && !collides; ++k) {
      collides = k != m && on_floor(all[k]) && boxes_overlap(moved, all[k].footprint(), 1e-9);
    }
    const Move candidate{d, collides, d.norm()};
    if (!best || std::tie(candidate.collides, candidate.cost) < std::tie(best->collides, best->cost)) {
      best = candidate;
    }
  }
  if (!best) {
    return std::nullopt;
  }
  return best->delta;
}

void follow_anchors(std::vector<Placement>& placements, const Box2& interior) {
  for (auto& p : placements) {
    if (!p.is_above()) {
      continue;
    }
    for (const auto& a : placements) {
      if (a.anchor_id && *a.anchor_id == p.target) {
        p.position.head<2>() = a.position.head<2>();
        p.position.z() = a.position.z() + a.size.z();
        break;
      }
    }
    clamp_into(p, interior);
  }
}

} // namespace

std::vector<Placement> avoid_collision(std::vector<Placement> placements,
                                       const PlacementRegion& region, const PlacementConfig& cfg) {
  cfg.validate();
  const Box2& interior = region.interior;
  for (auto& p : placements) {
    if (!on_floor(p)) {
      continue;
    }
    if (!fits(p.footprint(), interior)) {
      throw Error(ErrorCode::ObjectLargerThanRegion,
                  "'" + p.object + "' does not fit in " + region.id, p.label);
    }
    clamp_into(p, interior);
  }

  for (int iter = 0;; ++iter) {
    const auto pairs = overlapping_pairs(placements);
    if (pairs.empty()) {
      break;
    }
    auto [i, j] = pairs.front();
    std::size_t mover = j;
    std::size_t other = i;
    if (slot_priority(placements[i].slot) < slot_priority(placements[j].slot)) {
      std::swap(mover, other);
    }
    if (iter >= cfg.collision_max_iters) {
      throw Error(ErrorCode::Unresolvable,
                  "overlaps remain after " + std::to_string(cfg.collision_max_iters) +
                      " iterations",
                  placements[mover].label);
    }
    if (auto d = separating_move(placements, mover, other, interior, cfg.collision_step)) {
      placements[mover].position.head<2>() += *d;
    } else if (auto d2 = separating_move(placements, other, mover, interior, cfg.collision_step)) {
      placements[other].position.head<2>() += *d2;
    } else {
      throw Error(ErrorCode::Unresolvable,
                  "no room to separate '" + placements[mover].label + "' and '" +
                      placements[other].label + "'",
                  placements[mover].label);
    }
  }
  follow_anchors(placements, interior);
  return placements;
}

std::vector<Placement> refine_orientation(std::vector<Placement> placements,
                                          const PlacementRegion& region) {
  const Box2& box = region.interior;
  for (auto& p : placements) {
    if (p.slot == Slot::corner || p.slot == Slot::wall || p.is_above()) {
      continue;
    }
    if (p.slot == Slot::relative) {
      const auto anchor = std::find_if(placements.begin(), placements.end(), [&](const Placement& a) {
        return a.anchor_id && *a.anchor_id == p.target;
      });
      if (anchor != placements.end()) {
        const Vec2 d = anchor->position.head<2>() - p.position.head<2>();
        if (d.norm() <= 1.5 && d.norm() > 1e-9) {
          p.yaw = snap_quarter(yaw_facing(d));
          continue;
        }
      }
    }
    const Box2 f = p.footprint();
    const std::array<double, 4> gaps{f.min().y() - box.min().y(), box.max().x() - f.max().x(),
                                     box.max().y() - f.max().y(), f.min().x() - box.min().x()};
    static const std::array<Vec2, 4> kInward{Vec2(0, 1), Vec2(-1, 0), Vec2(0, -1), Vec2(1, 0)};
    int near_wall = -1;
    int count = 0;
    for (int k = 0; k < 4; ++k) {
      if (gaps[static_cast<std::size_t>(k)] <= 0.1) {
        near_wall = k;
        ++count;
      }
    }
    if (count == 1) {
      p.yaw = yaw_facing(kInward[static_cast<std::size_t>(near_wall)]);
    }
  }
  return placements;
}

std::vector<Placement> settle_layout(std::vector<Placement> placements, const PlacementRegion& region,
                                     const PlacementConfig& cfg, std::vector<std::string>* dropped) {
  const auto resolve = [&] {
    for (;;) {
      try {
        placements = avoid_collision(placements, region, cfg);
        return;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Unresolvable) {
          throw;
        }
        const auto it = std::find_if(placements.begin(), placements.end(),
                                     [&](const Placement& p) { return p.label == e.path(); });
        if (it == placements.end()) {
          throw;
        }
        if (dropped) {
          dropped->push_back(it->label);
        }
        placements.erase(it);
      }
    }
  };
  resolve();
  placements = refine_orientation(std::move(placements), region);
  resolve();
  return placements;
}

Placement place_wall_object(const WallSet& walls, const std::string& wall_id,
                            const std::string& object, const Vec3& native_size,
                            const std::vector<Placement>& occupied) {
  const RoomSide* side = walls.find_side(wall_id);
  if (!side) {
    throw Error(ErrorCode::UnknownAttribute, "no wall '" + wall_id + "' in the scene", wall_id);
  }
  if ((native_size.array() <= 0).any()) {
    throw Error(ErrorCode::InvalidArgument, "object size must be positive", object);
  }
  const double length = side->length;
  const double top_room = 2 * (walls.height - kHangHeight) - 0.1;
  const double s = std::min({1.0, kWallObjectMaxFraction * length / native_size.x(),
                             top_room / native_size.z()});
  if (!(s > 0)) {
    throw Error(ErrorCode::InvalidArgument, "wall is too low to hang objects", wall_id);
  }
  const Vec3 size = native_size * s;
  const double z0 = kHangHeight - size.z() / 2;
  const double z1 = kHangHeight + size.z() / 2;

  std::vector<std::pair<double, double>> blocked;
  for (const auto& seg : walls.segments) {
    const bool owned = std::any_of(seg.owners.begin(), seg.owners.end(), [&](const EdgeOwner& o) {
      return o.room == side->room && o.side == side->side;
    });
    if (!owned) {
      continue;
    }
    for (const auto& h : seg.holes) {
      if (h.z0 >= z1 || h.z1 <= z0) {
        continue;
      }
      const double ua = (seg.start + h.s0 * seg.direction() - side->left_end).dot(side->u_axis);
      const double ub = (seg.start + h.s1 * seg.direction() - side->left_end).dot(side->u_axis);
      blocked.emplace_back(std::min(ua, ub), std::max(ua, ub));
    }
  }
  for (const auto& p : occupied) {
    if (p.slot != Slot::wall || p.wall != wall_id) {
      continue;
    }
    const double u = (p.position.head<2>() - side->left_end).dot(side->u_axis);
    blocked.emplace_back(u - p.size.x() / 2, u + p.size.x() / 2);
  }

  const double half = size.x() / 2;
  std::vector<double> candidates{length / 2};
  for (const auto& [a, b] : blocked) {
    candidates.push_back(b + kWallClearance + half);
    candidates.push_back(a - kWallClearance - half);
  }
  std::optional<double> best;
  for (const double c : candidates) {
    if (c - half < -1e-9 || c + half > length + 1e-9) {
      continue;
    }
    const bool clear = std::all_of(blocked.begin(), blocked.end(), [&](const auto& iv) {
      return c + half <= iv.first + 1e-9 || c - half >= iv.second - 1e-9;
    });
    if (!clear) {
      continue;
    }
    const double dist = std::abs(c - length / 2);
    if (!best || dist < std::abs(*best - length / 2) - 1e-12 ||
        (std::abs(dist - std::abs(*best - length / 2)) <= 1e-12 && c < *best)) {
      best = c;
    }
  }
  if (!best) {
    throw Error(ErrorCode::WallFullyOccupied, "no free span for '" + object + "'", wall_id);
  }

  double face = 0.0;
  for (const auto& seg : walls.segments) {
    const bool owned = std::any_of(seg.owners.begin(), seg.owners.end(), [&](const EdgeOwner& o) {
      return o.room == side->room && o.side == side->side;
    });
    if (!owned) {
      continue;
    }
    const double sc = (side->point(*best) - seg.start).dot(seg.direction());
    if (sc >= -1e-9 && sc <= seg.length() + 1e-9) {
      face = walls.inner_face_offset(seg);
      break;
    }
  }

  Placement p;
  p.object = object;
  p.size = size;
  p.scale = Vec3::Constant(s);
  p.slot = Slot::wall;
  p.wall = wall_id;
  p.region = side->room;
  p.yaw = yaw_facing(side->inward());
  const Vec2 xy = side->point(*best) + side->inward() * (face + size.y() / 2);
  p.position = {xy.x(), xy.y(), z0};
  return p;
}

} // namespace filmset
