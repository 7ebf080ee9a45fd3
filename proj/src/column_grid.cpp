#include "filmset/column_grid.hpp"

#include "filmset/error.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace filmset {

void ColumnGridSpec::validate() const {
  if (rows < 2 || cols < 2) {
    throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 rows and 2 columns", "grid");
  }
  if (!(column_radius > 0) || !(spacing > 2 * column_radius)) {
    throw Error(ErrorCode::InvalidArgument, "spacing must exceed the column diameter",
                "grid.spacing");
  }
  if (!(column_height > beam_height) || !(beam_height > 0) || !(beam_width > 0)) {
    throw Error(ErrorCode::InvalidArgument, "beam section must be positive and below the column top",
                "grid.beam_section");
  }
}

namespace {

Mesh column_prism(const Vec2& center, double radius, double height) {
  Mesh m;
  for (int k = 0; k < kColumnSides; ++k) {
    const double a = 2 * std::numbers::pi * k / kColumnSides;
    const Vec2 p = center + radius * Vec2(std::cos(a), std::sin(a));
    m.vertices.emplace_back(p.x(), p.y(), 0.0);
    m.vertices.emplace_back(p.x(), p.y(), height);
  }
  const auto n = static_cast<std::uint32_t>(kColumnSides);
  for (std::uint32_t k = 0; k < n; ++k) {
    const std::uint32_t next = (k + 1) % n;
    const std::uint32_t b0 = 2 * k, t0 = 2 * k + 1, b1 = 2 * next, t1 = 2 * next + 1;
    m.faces.push_back({b0, b1, t1});
    m.faces.push_back({b0, t1, t0});
  }
  for (std::uint32_t k = 1; k + 1 < n; ++k) {
    m.faces.push_back({0, 2 * (k + 1), 2 * k});         // bottom, facing -z
    m.faces.push_back({1, 2 * k + 1, 2 * (k + 1) + 1}); // top, facing +z
  }
  return m;
}

Mesh beam_box(const Vec2& a, const Vec2& b, double width, double height, double top) {
  Mesh box = make_box({(b - a).norm(), width, height});
  const Vec2 mid = (a + b) / 2;
  const double yaw = std::atan2(b.y() - a.y(), b.x() - a.x());
  Transform t;
  t.translation = {mid.x(), mid.y(), top - height};
  t.yaw = yaw;
  for (auto& v : box.vertices) {
    v = t.apply(v);
  }
  return box;
}

} // namespace

std::vector<SceneElement> build_column_grid(const ColumnGridSpec& spec, double margin) {
  spec.validate();
  if (!(margin >= 0)) {
    throw Error(ErrorCode::InvalidArgument, "margin must be >= 0", "column_margin");
  }
  std::vector<SceneElement> out;

  SceneElement floor;
  floor.attribute_id = AttributeId::floor().str();
  const double x1 = (spec.cols - 1) * spec.spacing + margin;
  const double y1 = (spec.rows - 1) * spec.spacing + margin;
  floor.mesh.vertices = {{-margin, -margin, 0}, {x1, -margin, 0}, {x1, y1, 0}, {-margin, y1, 0}};
  floor.mesh.faces = {{0, 1, 2}, {0, 2, 3}};
  out.push_back(std::move(floor));

  for (int i = 0; i < spec.rows; ++i) {
    for (int j = 0; j < spec.cols; ++j) {
      SceneElement c;
      c.attribute_id = AttributeId::column(i, j).str();
      c.mesh = column_prism(spec.center(i, j), spec.column_radius, spec.column_height);
      out.push_back(std::move(c));
    }
  }

  int k = 0;
  const auto add_beam = [&](Vec2 a, Vec2 b) {
    SceneElement beam;
    beam.attribute_id = AttributeId::beam(k++).str();
    beam.mesh = beam_box(a, b, spec.beam_width, spec.beam_height, spec.column_height);
    out.push_back(std::move(beam));
  };
  for (int i = 0; i < spec.rows; ++i) {
    for (int j = 0; j + 1 < spec.cols; ++j) {
      add_beam(spec.center(i, j), spec.center(i, j + 1));
    }
  }
  for (int i = 0; i + 1 < spec.rows; ++i) {
    for (int j = 0; j < spec.cols; ++j) {
      add_beam(spec.center(i, j), spec.center(i + 1, j));
    }
  }
  return out;
}

std::string UnitRegion::id() const {
  return "unit_" + std::to_string(i1) + "_" + std::to_string(j1);
}

std::vector<Vec2> UnitRegion::polygon(const ColumnGridSpec& spec) const {
  return {spec.center(i1, j1), spec.center(i1, j2), spec.center(i2, j2), spec.center(i2, j1)};
}

std::vector<UnitRegion> unit_regions(const ColumnGridSpec& spec) {
  std::vector<UnitRegion> units;
  for (int i = 0; i + 1 < spec.rows; ++i) {
    for (int j = 0; j + 1 < spec.cols; ++j) {
      units.push_back({i, j, i + 1, j + 1});
    }
  }
  return units;
}

std::string CellAssignment::owner(GridCell cell) const {
  for (const auto& r : rooms) {
    for (const auto& c : r.cells) {
      if (c == cell) {
        return r.room;
      }
    }
  }
  return {};
}

std::vector<std::string> validate_cell_assignment(const ColumnGridSpec& spec,
                                                  const CellAssignment& assignment) {
  std::vector<std::string> violations;
  std::map<GridCell, std::string> claimed;
  for (const auto& r : assignment.rooms) {
    if (r.cells.empty()) {
      violations.push_back(r.room + " has no cells");
      continue;
    }
    int i_lo = r.cells.front().i, i_hi = i_lo, j_lo = r.cells.front().j, j_hi = j_lo;
    std::set<GridCell> own;
    for (const auto& c : r.cells) {
      if (c.i < 0 || c.j < 0 || c.i >= spec.rows - 1 || c.j >= spec.cols - 1) {
        violations.push_back(r.room + " cell (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                             ") is outside the grid");
        continue;
      }
      const auto [it, fresh] = claimed.emplace(c, r.room);
      if (!fresh && it->second != r.room) {
        violations.push_back(r.room + " cell (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                             ") already belongs to " + it->second);
      }
      own.insert(c);
      i_lo = std::min(i_lo, c.i);
      i_hi = std::max(i_hi, c.i);
      j_lo = std::min(j_lo, c.j);
      j_hi = std::max(j_hi, c.j);
    }
    const auto expected = static_cast<std::size_t>((i_hi - i_lo + 1) * (j_hi - j_lo + 1));
    if (own.size() != expected) {
      violations.push_back(r.room + " cells do not form one axis-aligned rectangle");
    }
  }
  return violations;
}

bool ColumnGap::on_perimeter(const ColumnGridSpec& spec) const {
  if (along_x()) {
    return i0 == 0 || i0 == spec.rows - 1;
  }
  return j0 == 0 || j0 == spec.cols - 1;
}

std::string ColumnGap::str() const {
  return "(" + std::to_string(i0) + "," + std::to_string(j0) + ")-(" + std::to_string(i1) + "," +
         std::to_string(j1) + ")";
}

std::vector<ColumnGap> partition_gaps(const ColumnGridSpec& spec,
                                      const CellAssignment& assignment) {
  std::vector<ColumnGap> gaps;
  // Gaps along x on interior rows separate cell (i-1, j) from cell (i, j).
  for (int i = 1; i + 1 < spec.rows; ++i) {
    for (int j = 0; j + 1 < spec.cols; ++j) {
      if (assignment.owner({i - 1, j}) != assignment.owner({i, j})) {
        gaps.push_back({i, j, i, j + 1});
      }
    }
  }
  // Gaps along y on interior columns separate cell (i, j-1) from cell (i, j).
  for (int j = 1; j + 1 < spec.cols; ++j) {
    for (int i = 0; i + 1 < spec.rows; ++i) {
      if (assignment.owner({i, j - 1}) != assignment.owner({i, j})) {
        gaps.push_back({i, j, i + 1, j});
      }
    }
  }
  return gaps;
}

} // namespace filmset
