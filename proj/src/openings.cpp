#include "filmset/openings.hpp"

#include "filmset/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace filmset {

Box3 OpeningFrame::hole_bounds() const {
  const Vec2 across = geometry::perp<double>(facing) * (width / 2);
  const Vec2 through = facing * (thickness / 2);
  const Vec2 c = base_center.head<2>();
  Box3 box;
  for (const double a : {-1.0, 1.0}) {
    for (const double b : {-1.0, 1.0}) {
      const Vec2 p = c + a * across + b * through;
      box.extend(Vec3(p.x(), p.y(), base_center.z()));
      box.extend(Vec3(p.x(), p.y(), base_center.z() + height));
    }
  }
  return box;
}

namespace {

const RoomSide& target_side(const WallSet& walls, const std::string& target) {
  if (const auto* side = walls.find_side(target)) {
    return *side;
  }
  if (AttributeId::is_valid(target)) {
    const auto id = AttributeId::parse(target);
    if (id.kind() == AttributeId::Kind::arc) {
      throw Error(ErrorCode::OpeningOnArc, "openings on curved walls are not supported", target);
    }
    if (id.kind() == AttributeId::Kind::room_wall) {
      const std::string room = "room" + std::to_string(id.primary());
      for (const auto& arc : walls.arcs) {
        if (arc.room == room && arc.side == id.side()) {
          throw Error(ErrorCode::OpeningOnArc, "openings on curved walls are not supported",
                      target);
        }
      }
    }
  }
  throw Error(ErrorCode::UnknownAttribute, "no wall '" + target + "' in the scene", target);
}

bool owns(const WallSegment& s, const RoomSide& side) {
  return std::any_of(s.owners.begin(), s.owners.end(), [&](const EdgeOwner& o) {
    return o.room == side.room && o.side == side.side;
  });
}

} // namespace

OpenedWall open_wall(WallSet& walls, const OpeningSpec& spec) {
  const RoomSide& side = target_side(walls, spec.target);
  if (!(spec.width > 0) || !(spec.height > 0)) {
    throw Error(ErrorCode::InvalidArgument, "opening size must be positive", spec.target);
  }
  if (!(spec.horizontal_offset >= 0)) {
    throw Error(ErrorCode::InvalidArgument, "horizontal_offset must be >= 0", spec.target);
  }
  if (spec.horizontal_offset + spec.width > side.length + 1e-9) {
    throw Error(ErrorCode::OpeningTooLarge,
                "opening runs past the end of a " + std::to_string(side.length) + " m wall",
                spec.target);
  }
  double height = spec.height;
  double z0 = 0.0;
  if (spec.kind == OpeningKind::door) {
    if (height > walls.height) {
      throw Error(ErrorCode::OpeningTooLarge, "door is taller than the wall", spec.target);
    }
  } else {
    height = std::min(height, walls.height - kMinLintel);
    z0 = (walls.height - height) / 2;
  }
  const double u0 = spec.horizontal_offset;
  const double u1 = spec.horizontal_offset + spec.width;
  const double u_mid = (u0 + u1) / 2;

  struct Cut {
    WallSegment* segment;
    WallHole hole;
  };
  std::vector<Cut> cuts;
  double center_offset = -walls.thickness / 2;
  for (auto& s : walls.segments) {
    if (!owns(s, side)) {
      continue;
    }
    const Vec2 dir = s.direction();
    const double sa = (side.point(u0) - s.start).dot(dir);
    const double sb = (side.point(u1) - s.start).dot(dir);
    const double s0 = std::max(std::min(sa, sb), 0.0);
    const double s1 = std::min(std::max(sa, sb), s.length());
    if (s1 - s0 <= 1e-9) {
      continue;
    }
    for (const auto& h : s.holes) {
      const double gap = std::max(h.s0 - s1, s0 - h.s1);
      if (gap < kMinMullion - 1e-9) {
        throw Error(ErrorCode::OverlapWithExistingOpening,
                    "holes must be at least 0.1 m apart on one wall", spec.target);
      }
    }
    const double sm = (side.point(u_mid) - s.start).dot(dir);
    if (sm >= -1e-9 && sm <= s.length() + 1e-9) {
      center_offset = s.classification == EdgeClass::internal ? 0.0 : -walls.thickness / 2;
    }
    cuts.push_back({&s, {spec.kind, s0, s1, z0, z0 + height}});
  }
  for (auto& cut : cuts) {
    cut.segment->holes.push_back(cut.hole);
    std::sort(cut.segment->holes.begin(), cut.segment->holes.end(),
              [](const WallHole& a, const WallHole& b) { return a.s0 < b.s0; });
  }

  OpenedWall out;
  out.wall.attribute_id = spec.target;
  out.wall.mesh = side_mesh(walls, side.room, side.side);
  const Vec2 base = side.point(u_mid) + center_offset * side.inward();
  out.frame.base_center = {base.x(), base.y(), z0};
  out.frame.facing = side.inward();
  out.frame.width = spec.width;
  out.frame.height = height;
  out.frame.thickness = walls.thickness;
  return out;
}

double yaw_facing(const Vec2& facing) {
  return geometry::wrap_angle(std::atan2(facing.y(), facing.x()) + std::numbers::pi / 2);
}

SceneElement fit_asset(const OpeningFrame& frame, const Mesh& asset_mesh) {
  const Box3 box = asset_mesh.bounds();
  const Vec3 extent = box.sizes();
  if (box.isEmpty() || (extent.array() <= 1e-12).any()) {
    throw Error(ErrorCode::DegenerateAsset, "asset has a zero-extent bounding box");
  }
  SceneElement e;
  e.mesh = asset_mesh;
  e.transform.yaw = yaw_facing(frame.facing);
  e.transform.scale = {frame.width / extent.x(), frame.thickness / extent.y(),
                       frame.height / extent.z()};
  const Vec3 pivot(box.center().x(), box.center().y(), box.min().z());
  Transform no_shift = e.transform;
  e.transform.translation = frame.base_center - no_shift.apply(pivot);
  return e;
}

std::string_view to_string(GapFill fill) {
  switch (fill) {
  case GapFill::door: return "door";
  case GapFill::long_window: return "long_window";
  case GapFill::short_window: return "short_window";
  case GapFill::partition_short_window: return "partition_short_window";
  }
  return "";
}

std::vector<ColumnGap> perimeter_gaps(const ColumnGridSpec& grid) {
  std::vector<ColumnGap> gaps;
  for (const int i : {0, grid.rows - 1}) {
    for (int j = 0; j + 1 < grid.cols; ++j) {
      gaps.push_back({i, j, i, j + 1});
    }
  }
  for (const int j : {0, grid.cols - 1}) {
    for (int i = 0; i + 1 < grid.rows; ++i) {
      gaps.push_back({i, j, i + 1, j});
    }
  }
  return gaps;
}

ColumnOpeningPlan plan_column_openings(const ColumnGridSpec& grid,
                                       const std::vector<ColumnGap>& partitions,
                                       const ColumnOpeningQueries& queries) {
  grid.validate();
  ColumnOpeningPlan plan;
  const int door_index = (grid.cols - 2) / 2;
  const int long_index = (grid.rows - 2) / 2;
  for (const auto& gap : perimeter_gaps(grid)) {
    GapFill fill = GapFill::short_window;
    if (gap.along_x() && gap.j0 == door_index) {
      fill = GapFill::door;
    } else if (!gap.along_x() && gap.i0 == long_index) {
      fill = GapFill::long_window;
    }
    plan.slots.push_back({gap, fill, fill == GapFill::door ? queries.door : queries.window});
  }
  std::set<ColumnGap> seen;
  for (std::size_t k = 0; k < partitions.size(); ++k) {
    const auto& gap = partitions[k];
    const std::string path = "partitions[" + std::to_string(k) + "]";
    const bool adjacent = (gap.i0 == gap.i1 && gap.j1 == gap.j0 + 1) ||
                          (gap.j0 == gap.j1 && gap.i1 == gap.i0 + 1);
    const bool in_grid = gap.i0 >= 0 && gap.j0 >= 0 && gap.i1 < grid.rows && gap.j1 < grid.cols;
    if (!adjacent || !in_grid) {
      throw Error(ErrorCode::InvalidArgument, "gap " + gap.str() + " is not between adjacent columns",
                  path);
    }
    if (gap.on_perimeter(grid)) {
      throw Error(ErrorCode::PartitionOnPerimeter, "gap " + gap.str() + " lies on the perimeter",
                  path);
    }
    if (!seen.insert(gap).second) {
      throw Error(ErrorCode::InvalidArgument, "gap " + gap.str() + " listed twice", path);
    }
    plan.slots.push_back({gap, GapFill::partition_short_window, queries.window});
  }
  return plan;
}

OpeningFrame gap_frame(const ColumnGridSpec& grid, const ColumnSlot& slot) {
  const auto& gap = slot.gap;
  const Vec2 mid = (grid.center(gap.i0, gap.j0) + grid.center(gap.i1, gap.j1)) / 2;
  Vec2 facing;
  if (gap.along_x()) {
    facing = gap.i0 == grid.rows - 1 && gap.on_perimeter(grid) ? Vec2(0, -1) : Vec2(0, 1);
  } else {
    facing = gap.j0 == grid.cols - 1 && gap.on_perimeter(grid) ? Vec2(-1, 0) : Vec2(1, 0);
  }
  const double clear = grid.column_height - grid.beam_height;
  double height = 0.0;
  double sill = 0.0;
  switch (slot.fill) {
  case GapFill::door:
    height = std::min(2.4, clear);
    break;
  case GapFill::long_window:
    height = 0.5 * clear;
    sill = (clear - height) / 2;
    break;
  case GapFill::short_window:
  case GapFill::partition_short_window:
    height = 0.3 * clear;
    sill = (clear - height) / 2;
    break;
  }
  OpeningFrame frame;
  frame.base_center = {mid.x(), mid.y(), sill};
  frame.facing = facing;
  frame.width = grid.spacing - 2 * grid.column_radius;
  frame.height = height;
  frame.thickness = grid.beam_width;
  return frame;
}

} // namespace filmset
