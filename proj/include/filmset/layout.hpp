#pragma once

// Object layout inside rooms and column units: stable slots, anchor-relative
// placement, collision separation and orientation refinement, plus objects
// hung on walls.

#include "filmset/column_grid.hpp"
#include "filmset/walls.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace filmset {

enum class RegionKind { room, unit };

struct PlacementRegion {
  RegionKind kind = RegionKind::room;
  std::string id;            ///< room name or `unit_<i>_<j>`
  std::vector<Vec2> polygon; ///< floor polygon or unit rectangle
  /// Axis-aligned box inside `polygon` where objects may stand.
  Box2 interior;
};

/// Region for a room: the floor polygon, with the usable box shrunk away
/// from inward-bulging arcs.
PlacementRegion room_region(const PlacedRoom& room, std::vector<Vec2> floor_polygon);
/// Region for a column unit: the rectangle of four column centers, usable
/// box kept clear of the columns.
PlacementRegion unit_region(const ColumnGridSpec& grid, const UnitRegion& unit);

enum class Slot { corner, edge, center, relative, wall };
enum class SpatialRelation { left, right, in_front_of, behind, above };
enum class DistanceLevel { near, far };

std::string_view to_string(Slot s);
Slot slot_from_string(std::string_view text);
std::string_view to_string(SpatialRelation r);
SpatialRelation spatial_relation_from_string(std::string_view text);
std::string_view to_string(DistanceLevel d);
DistanceLevel distance_level_from_string(std::string_view text);

struct LayoutTriplet {
  std::string anchor; ///< anchor id `<region>_a<K>`
  SpatialRelation relation = SpatialRelation::right;
  DistanceLevel distance = DistanceLevel::near;
  std::string object_query;
};

struct PlacementConfig {
  double lambda_near = 0.6;
  double lambda_far = 1.8;
  std::map<SpatialRelation, Vec3> basis{
      {SpatialRelation::right, {1, 0, 0}},
      {SpatialRelation::left, {-1, 0, 0}},
      {SpatialRelation::in_front_of, {0, -1, 0}},
      {SpatialRelation::behind, {0, 1, 0}},
      {SpatialRelation::above, {0, 0, 1}},
  };
  int collision_max_iters = 64;
  double collision_step = 0.02;

  double lambda(DistanceLevel d) const { return d == DistanceLevel::near ? lambda_near : lambda_far; }
  /// Throws ConfigError.
  void validate() const;
};

inline constexpr double kWallClearance = 0.05;
inline constexpr double kHangHeight = 1.5;
inline constexpr double kWallObjectMaxFraction = 0.6;

struct Placement {
  std::string label;  ///< unique within a layout run, e.g. `object_3`
  std::string object; ///< asset id
  Vec3 size = Vec3::Ones(); ///< native size times scale, in the object frame
  Vec3 position = Vec3::Zero(); ///< base center
  double yaw = 0.0;
  Vec3 scale = Vec3::Ones();
  Slot slot = Slot::center;
  std::optional<std::string> anchor_id; ///< issued to edge and center slots
  std::string region;

  // Relative placements only.
  std::string target;
  SpatialRelation relation = SpatialRelation::right;
  bool clamped = false;

  // Wall placements only.
  std::string wall;

  /// World xy-AABB of the rotated footprint.
  Box2 footprint() const;
  /// World AABB.
  Box3 bounds() const;
  bool is_above() const { return slot == Slot::relative && relation == SpatialRelation::above; }
};

/// Anchors issued so far, keyed by anchor id.
class AnchorTable {
public:
  /// Next id `<region>_a<K>`, K counting from 1 per region.
  std::string issue(const std::string& region);
  void add(const Placement& anchor);
  const Placement* find(const std::string& id) const;
  /// Overwrites stored anchor poses with those in `placements`.
  void update(const std::vector<Placement>& placements);

private:
  std::map<std::string, Placement> anchors_;
  std::map<std::string, int> counters_;
};

/// Corner slots count counter-clockwise from (min x, min y); edge slots are
/// 0 south, 1 east, 2 north, 3 west. Edge and center placements are issued
/// an anchor id and registered. Throws ObjectLargerThanRegion,
/// InvalidArgument.
Placement place_stable(const PlacementRegion& region, const std::string& object, const Vec3& size,
                       Slot slot, int slot_index, AnchorTable& anchors);

/// p(anchor) + lambda(d) * Rz(anchor yaw) * basis(relation); `above` uses
/// the anchor's height instead of lambda.
Vec3 relative_position(const Placement& anchor, SpatialRelation relation, DistanceLevel distance,
                       const PlacementConfig& cfg);

/// Places an object relative to an anchor in the same region. Positions
/// outside the usable box are clamped and flagged when `clamp` is set,
/// otherwise rejected. Throws UnknownAnchor, ResultOutsideRegion,
/// ObjectLargerThanRegion.
Placement place_relative(const PlacementRegion& region, const LayoutTriplet& triplet,
                         const std::string& object, const Vec3& size, const AnchorTable& anchors,
                         const PlacementConfig& cfg, bool clamp = true);

/// Slot priority used when separating objects; higher stays put.
int slot_priority(Slot slot);

/// Pulls every footprint into the region, then repeatedly pushes the
/// lower-priority object of the first overlapping pair out along the
/// cheapest axis. `above` objects follow their anchor.
/// Throws Unresolvable (path = label of the object to drop).
std::vector<Placement> avoid_collision(std::vector<Placement> placements,
                                       const PlacementRegion& region, const PlacementConfig& cfg);

/// Relative objects near their anchor turn to face it (snapped to quarter
/// turns); objects backed against one wall face the interior.
std::vector<Placement> refine_orientation(std::vector<Placement> placements,
                                          const PlacementRegion& region);

/// Hangs an object on a wall side, centered if possible, clear of every hole
/// and of `occupied` placements on the same wall. Throws UnknownAttribute,
/// WallFullyOccupied, InvalidArgument.
/// avoid_collision, refine_orientation, avoid_collision. On Unresolvable the
/// reported offender is removed and the pass restarts; removed labels are
/// appended to `dropped`.
std::vector<Placement> settle_layout(std::vector<Placement> placements, const PlacementRegion& region,
                                     const PlacementConfig& cfg,
                                     std::vector<std::string>* dropped = nullptr);

Placement place_wall_object(const WallSet& walls, const std::string& wall_id,
                            const std::string& object, const Vec3& native_size,
                            const std::vector<Placement>& occupied = {});

/// Pairs (i, j), i < j, whose xy footprints overlap with positive area,
/// ignoring `above` objects.
std::vector<std::pair<std::size_t, std::size_t>> overlapping_pairs(
    const std::vector<Placement>& placements, double tolerance = 1e-9);

} // namespace filmset
