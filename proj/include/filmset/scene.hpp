#pragma once

// Scene model shared by every stage: attribute ids, meshes, lazy rigid
// transforms and the scene graph the exporters serialize.
//
// Units are meters in a right-handed, z-up frame. Rotation is yaw only.

#include "filmset/geometry.hpp"

#include <Eigen/Geometry>

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace filmset {

enum class StructureKind { wall, column };

std::string_view to_string(StructureKind kind);
StructureKind structure_kind_from_string(std::string_view text);

/// Wall orientation index Y of `room<N>_id<Y>`.
enum class WallSide : int { west = 1, south = 2, north = 3, east = 4 };

/// Unit normal pointing from a wall on `side` into its room.
Vec2 inward_normal(WallSide side);

/// Structural identifier. Grammar:
///   room<N> | room<N>_floor | room<N>_id<Y> (Y in 1..4) | arc<N> | outer
///   | floor | column_<i>_<j> | beam_<k>
class AttributeId {
public:
  enum class Kind { room, room_floor, room_wall, arc, outer, floor, column, beam };

  /// Throws Error{MalformedAttribute}.
  static AttributeId parse(std::string_view text);
  static bool is_valid(std::string_view text);

  static AttributeId room(int n);
  static AttributeId room_floor(int n);
  static AttributeId room_wall(int n, WallSide side);
  static AttributeId arc(int n);
  static AttributeId outer();
  static AttributeId floor();
  static AttributeId column(int i, int j);
  static AttributeId beam(int k);

  Kind kind() const noexcept { return kind_; }
  /// Room number for room kinds, arc number for arcs, row for columns,
  /// beam index for beams.
  int primary() const noexcept { return a_; }
  /// Column index for columns.
  int secondary() const noexcept { return b_; }
  WallSide side() const noexcept { return static_cast<WallSide>(b_); }

  const std::string& str() const noexcept { return raw_; }
  friend bool operator==(const AttributeId& x, const AttributeId& y) { return x.raw_ == y.raw_; }
  friend auto operator<=>(const AttributeId& x, const AttributeId& y) { return x.raw_ <=> y.raw_; }

private:
  AttributeId(Kind kind, int a, int b, std::string raw)
      : kind_(kind), a_(a), b_(b), raw_(std::move(raw)) {}

  Kind kind_;
  int a_ = 0;
  int b_ = 0;
  std::string raw_;
};

/// Room number N parsed from a room name `room<N>`; throws MalformedAttribute.
int room_number(std::string_view room_name);

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> faces;

  bool empty() const noexcept { return faces.empty(); }
  void append(const Mesh& other);
  Box3 bounds() const;
  /// Every index in range.
  bool indices_valid() const;
};

/// Closed axis-aligned box with its base at z = 0 and centered in x/y.
Mesh make_box(const Vec3& size);

/// Number of undirected edges not shared by exactly two triangles.
std::size_t boundary_edge_count(const Mesh& mesh);

/// Stored as translation, yaw about z and per-axis scale; applied to a point
/// as scale, then yaw, then translation.
struct Transform {
  Vec3 translation = Vec3::Zero();
  double yaw = 0.0;
  Vec3 scale = Vec3::Ones();

  Eigen::Affine3d affine() const;
  Vec3 apply(const Vec3& point) const { return affine() * point; }
  bool operator==(const Transform&) const = default;
};

/// Yaw increment about the element's own pivot (its translation point).
struct Rotate {
  double yaw;
};
/// Scale along the element's local axes.
struct Scale {
  Vec3 factors;
};
/// World-space translation.
struct Translate {
  Vec3 offset;
};
using TransformOp = std::variant<Rotate, Scale, Translate>;

/// Composes `op` onto `transform`. Throws NonPositiveScale.
Transform compose(Transform transform, const TransformOp& op);

struct SceneElement {
  std::string attribute_id;
  Mesh mesh;
  Transform transform;
  std::optional<std::string> material_ref;
  std::vector<SceneElement> children;

  bool operator==(const SceneElement& other) const;
};

/// Tracks attribute ids claimed within one graph.
class AttributeRegistry {
public:
  AttributeRegistry() = default;
  explicit AttributeRegistry(const class SceneGraph& graph);

  /// Throws DuplicateAttribute.
  void claim(const std::string& id);
  bool contains(const std::string& id) const { return ids_.contains(id); }
  const std::set<std::string>& ids() const noexcept { return ids_; }

private:
  std::set<std::string> ids_;
};

/// Tags a structural element. Throws MalformedAttribute / DuplicateAttribute.
SceneElement set_attribute(SceneElement element, std::string_view id, AttributeRegistry& registry);

/// Asset instances (doors, windows, objects) carry `<kind>_<n>` ids outside
/// the structural grammar; they still share the graph's uniqueness registry.
SceneElement set_instance_id(SceneElement element, std::string id, AttributeRegistry& registry);

/// Lazily composes `op` onto the element transform; mesh vertices are kept.
SceneElement apply_transform(SceneElement element, const TransformOp& op);

/// World-space bounds of an element and all its descendants.
Box3 world_bounds(const SceneElement& element,
                  const Eigen::Affine3d& parent = Eigen::Affine3d::Identity());

/// Mesh with the element transform (and `parent`) baked into the vertices.
Mesh baked_mesh(const SceneElement& element,
                const Eigen::Affine3d& parent = Eigen::Affine3d::Identity());

class SceneGraph {
public:
  StructureKind structure_kind = StructureKind::wall;
  std::vector<SceneElement> elements;

  Box3 bounding_box() const;
  /// All attribute ids, depth-first, duplicates preserved.
  std::vector<std::string> attribute_ids() const;
  SceneElement* find(std::string_view id);
  const SceneElement* find(std::string_view id) const;

  /// Visits every element depth-first with its parent's world transform.
  template <typename F>
  void visit(F&& f) const {
    for (const auto& e : elements) {
      visit_impl(e, Eigen::Affine3d::Identity(), f);
    }
  }
  template <typename F>
  void visit_mut(F&& f) {
    for (auto& e : elements) {
      visit_mut_impl(e, f);
    }
  }

  /// Registry pass: unique ids, valid indices, positive scales.
  /// Throws DuplicateAttribute / InvalidArgument / NonPositiveScale.
  void validate() const;

  bool operator==(const SceneGraph&) const = default;

private:
  template <typename F>
  static void visit_impl(const SceneElement& e, const Eigen::Affine3d& parent, F& f) {
    f(e, parent);
    const Eigen::Affine3d world = parent * e.transform.affine();
    for (const auto& child : e.children) {
      visit_impl(child, world, f);
    }
  }
  template <typename F>
  static void visit_mut_impl(SceneElement& e, F& f) {
    f(e);
    for (auto& child : e.children) {
      visit_mut_impl(child, f);
    }
  }
};

} // namespace filmset
