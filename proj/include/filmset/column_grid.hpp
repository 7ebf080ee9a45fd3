#pragma once

// Column-structure scenes: a rows x cols grid of columns joined by beams.
// Column C(i, j) stands at (j * spacing, i * spacing); rows run along y.

#include "filmset/geometry.hpp"
#include "filmset/scene.hpp"

#include <string>
#include <vector>

namespace filmset {

struct ColumnGridSpec {
  int rows = 2;
  int cols = 2;
  double spacing = 4.0;
  double column_radius = 0.2;
  double column_height = 3.5;
  double beam_width = 0.25;
  double beam_height = 0.3;

  /// Throws InvalidArgument.
  void validate() const;
  Vec2 center(int i, int j) const { return {j * spacing, i * spacing}; }
};

inline constexpr int kColumnSides = 16;

/// Elements in order: `floor`, columns row-major, then beams (all beams along
/// x row-major, then all beams along y row-major).
std::vector<SceneElement> build_column_grid(const ColumnGridSpec& spec, double margin);

/// Rectangle enclosed by four columns (i1, j1), (i1, j2), (i2, j1), (i2, j2).
struct UnitRegion {
  int i1 = 0;
  int j1 = 0;
  int i2 = 1;
  int j2 = 1;

  std::string id() const;
  std::vector<Vec2> polygon(const ColumnGridSpec& spec) const;
};

/// All unit regions between adjacent columns, row-major.
std::vector<UnitRegion> unit_regions(const ColumnGridSpec& spec);

/// A cell (i, j) is the unit between columns (i, j) and (i + 1, j + 1).
struct GridCell {
  int i = 0;
  int j = 0;
  auto operator<=>(const GridCell&) const = default;
};

struct RoomCells {
  std::string room;
  std::vector<GridCell> cells;
};

struct CellAssignment {
  std::vector<RoomCells> rooms;
  /// Owning room of a cell or empty.
  std::string owner(GridCell cell) const;
};

/// Violations of the room-to-cell assignment: out-of-grid cells, cells
/// claimed twice, rooms whose cells are not one full rectangle.
std::vector<std::string> validate_cell_assignment(const ColumnGridSpec& spec,
                                                  const CellAssignment& assignment);

/// Gap between two adjacent columns (i0, j0) -> (i1, j1), with i1 >= i0 and
/// j1 >= j0.
struct ColumnGap {
  int i0 = 0;
  int j0 = 0;
  int i1 = 0;
  int j1 = 0;

  bool along_x() const { return i0 == i1; }
  bool on_perimeter(const ColumnGridSpec& spec) const;
  std::string str() const;
  auto operator<=>(const ColumnGap&) const = default;
};

/// Interior gaps separating cells of different owners.
std::vector<ColumnGap> partition_gaps(const ColumnGridSpec& spec, const CellAssignment& assignment);

} // namespace filmset
