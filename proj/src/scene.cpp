#include "filmset/scene.hpp"

#include "filmset/error.hpp"

#include <charconv>
#include <map>
#include <utility>

namespace filmset {

std::string_view to_string(StructureKind kind) {
  return kind == StructureKind::wall ? "wall" : "column";
}

StructureKind structure_kind_from_string(std::string_view text) {
  if (text == "wall") {
    return StructureKind::wall;
  }
  if (text == "column") {
    return StructureKind::column;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown structure kind '" + std::string(text) + "'");
}

Vec2 inward_normal(WallSide side) {
  switch (side) {
  case WallSide::west: return {1.0, 0.0};
  case WallSide::south: return {0.0, 1.0};
  case WallSide::north: return {0.0, -1.0};
  case WallSide::east: return {-1.0, 0.0};
  }
  return Vec2::Zero();
}

// ---------------------------------------------------------------------------
// AttributeId

namespace {

/// Parses a non-negative decimal without sign or leading zeros.
std::optional<int> parse_index(std::string_view text) {
  if (text.empty() || text.size() > 6 || (text.size() > 1 && text.front() == '0')) {
    return std::nullopt;
  }
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

bool consume(std::string_view& text, std::string_view prefix) {
  if (text.starts_with(prefix)) {
    text.remove_prefix(prefix.size());
    return true;
  }
  return false;
}

[[noreturn]] void malformed(std::string_view text, std::string_view why) {
  throw Error(ErrorCode::MalformedAttribute,
              "'" + std::string(text) + "' " + std::string(why));
}

} // namespace

AttributeId AttributeId::parse(std::string_view text) {
  std::string_view rest = text;
  if (text == "outer") {
    return outer();
  }
  if (text == "floor") {
    return floor();
  }
  if (consume(rest, "room")) {
    const auto sep = rest.find('_');
    const auto n = parse_index(rest.substr(0, sep));
    if (!n || *n < 1) {
      malformed(text, "needs a room number >= 1");
    }
    if (sep == std::string_view::npos) {
      return room(*n);
    }
    std::string_view suffix = rest.substr(sep + 1);
    if (suffix == "floor") {
      return room_floor(*n);
    }
    if (consume(suffix, "id")) {
      const auto y = parse_index(suffix);
      if (!y || *y < 1 || *y > 4) {
        malformed(text, "wall index must be 1 (west), 2 (south), 3 (north) or 4 (east)");
      }
      return room_wall(*n, static_cast<WallSide>(*y));
    }
    malformed(text, "unknown room suffix");
  }
  if (consume(rest, "arc")) {
    const auto n = parse_index(rest);
    if (!n || *n < 1) {
      malformed(text, "needs an arc number >= 1");
    }
    return arc(*n);
  }
  if (consume(rest, "column_")) {
    const auto sep = rest.find('_');
    if (sep == std::string_view::npos) {
      malformed(text, "expects column_<i>_<j>");
    }
    const auto i = parse_index(rest.substr(0, sep));
    const auto j = parse_index(rest.substr(sep + 1));
    if (!i || !j) {
      malformed(text, "expects column_<i>_<j>");
    }
    return column(*i, *j);
  }
  if (consume(rest, "beam_")) {
    const auto k = parse_index(rest);
    if (!k) {
      malformed(text, "expects beam_<k>");
    }
    return beam(*k);
  }
  malformed(text, "does not match the attribute grammar");
}

bool AttributeId::is_valid(std::string_view text) {
  try {
    parse(text);
    return true;
  } catch (const Error&) {
    return false;
  }
}

AttributeId AttributeId::room(int n) {
  return {Kind::room, n, 0, "room" + std::to_string(n)};
}
AttributeId AttributeId::room_floor(int n) {
  return {Kind::room_floor, n, 0, "room" + std::to_string(n) + "_floor"};
}
AttributeId AttributeId::room_wall(int n, WallSide side) {
  const int y = static_cast<int>(side);
  return {Kind::room_wall, n, y, "room" + std::to_string(n) + "_id" + std::to_string(y)};
}
AttributeId AttributeId::arc(int n) {
  return {Kind::arc, n, 0, "arc" + std::to_string(n)};
}
AttributeId AttributeId::outer() {
  return {Kind::outer, 0, 0, "outer"};
}
AttributeId AttributeId::floor() {
  return {Kind::floor, 0, 0, "floor"};
}
AttributeId AttributeId::column(int i, int j) {
  return {Kind::column, i, j, "column_" + std::to_string(i) + "_" + std::to_string(j)};
}
AttributeId AttributeId::beam(int k) {
  return {Kind::beam, k, 0, "beam_" + std::to_string(k)};
}

int room_number(std::string_view room_name) {
  const auto id = AttributeId::parse(room_name);
  if (id.kind() != AttributeId::Kind::room) {
    throw Error(ErrorCode::MalformedAttribute,
                "'" + std::string(room_name) + "' is not a room name");
  }
  return id.primary();
}

// ---------------------------------------------------------------------------
// Mesh

void Mesh::append(const Mesh& other) {
  const auto offset = static_cast<std::uint32_t>(vertices.size());
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  for (const auto& f : other.faces) {
    faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
  }
}

Box3 Mesh::bounds() const {
  Box3 box;
  for (const auto& v : vertices) {
    box.extend(v);
  }
  return box;
}

bool Mesh::indices_valid() const {
  for (const auto& f : faces) {
    for (const auto i : f) {
      if (i >= vertices.size()) {
        return false;
      }
    }
  }
  return true;
}

Mesh make_box(const Vec3& size) {
  const double hx = size.x() / 2;
  const double hy = size.y() / 2;
  const double h = size.z();
  Mesh m;
  m.vertices = {{-hx, -hy, 0}, {hx, -hy, 0}, {hx, hy, 0}, {-hx, hy, 0},
                {-hx, -hy, h}, {hx, -hy, h}, {hx, hy, h}, {-hx, hy, h}};
  m.faces = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
             {1, 2, 6}, {1, 6, 5}, {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
  return m;
}

std::size_t boundary_edge_count(const Mesh& mesh) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> uses;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      auto a = f[k];
      auto b = f[(k + 1) % 3];
      if (a > b) {
        std::swap(a, b);
      }
      ++uses[{a, b}];
    }
  }
  std::size_t bad = 0;
  for (const auto& [edge, count] : uses) {
    if (count != 2) {
      ++bad;
    }
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Transform

Eigen::Affine3d Transform::affine() const {
  Eigen::Affine3d m = Eigen::Affine3d::Identity();
  m.translate(translation);
  m.rotate(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
  m.scale(scale);
  return m;
}

Transform compose(Transform transform, const TransformOp& op) {
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Rotate>) {
          transform.yaw = geometry::wrap_angle(transform.yaw + o.yaw);
        } else if constexpr (std::is_same_v<T, Scale>) {
          if ((o.factors.array() <= 0.0).any()) {
            throw Error(ErrorCode::NonPositiveScale, "scale factors must be > 0");
          }
          transform.scale = transform.scale.cwiseProduct(o.factors);
        } else {
          transform.translation += o.offset;
        }
      },
      op);
  return transform;
}

// ---------------------------------------------------------------------------
// SceneElement / registry

bool SceneElement::operator==(const SceneElement& other) const {
  return attribute_id == other.attribute_id && mesh.vertices == other.mesh.vertices &&
         mesh.faces == other.mesh.faces && transform == other.transform &&
         material_ref == other.material_ref && children == other.children;
}

AttributeRegistry::AttributeRegistry(const SceneGraph& graph) {
  for (const auto& id : graph.attribute_ids()) {
    claim(id);
  }
}

void AttributeRegistry::claim(const std::string& id) {
  if (!ids_.insert(id).second) {
    throw Error(ErrorCode::DuplicateAttribute, "'" + id + "' is already registered");
  }
}

SceneElement set_attribute(SceneElement element, std::string_view id, AttributeRegistry& registry) {
  const auto parsed = AttributeId::parse(id);
  registry.claim(parsed.str());
  element.attribute_id = parsed.str();
  return element;
}

SceneElement set_instance_id(SceneElement element, std::string id, AttributeRegistry& registry) {
  registry.claim(id);
  element.attribute_id = std::move(id);
  return element;
}

SceneElement apply_transform(SceneElement element, const TransformOp& op) {
  element.transform = compose(element.transform, op);
  return element;
}

Box3 world_bounds(const SceneElement& element, const Eigen::Affine3d& parent) {
  const Eigen::Affine3d world = parent * element.transform.affine();
  Box3 box;
  for (const auto& v : element.mesh.vertices) {
    box.extend(world * v);
  }
  for (const auto& child : element.children) {
    box.extend(world_bounds(child, world));
  }
  return box;
}

Mesh baked_mesh(const SceneElement& element, const Eigen::Affine3d& parent) {
  const Eigen::Affine3d world = parent * element.transform.affine();
  Mesh out = element.mesh;
  for (auto& v : out.vertices) {
    v = world * v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// SceneGraph

Box3 SceneGraph::bounding_box() const {
  Box3 box;
  for (const auto& e : elements) {
    box.extend(world_bounds(e));
  }
  return box;
}

std::vector<std::string> SceneGraph::attribute_ids() const {
  std::vector<std::string> ids;
  visit([&](const SceneElement& e, const Eigen::Affine3d&) { ids.push_back(e.attribute_id); });
  return ids;
}

namespace {

template <typename Element>
Element* find_in(std::vector<Element>& elements, std::string_view id) {
  for (auto& e : elements) {
    if (e.attribute_id == id) {
      return &e;
    }
    if (auto* hit = find_in(e.children, id)) {
      return hit;
    }
  }
  return nullptr;
}

template <typename Element>
const Element* find_in(const std::vector<Element>& elements, std::string_view id) {
  for (const auto& e : elements) {
    if (e.attribute_id == id) {
      return &e;
    }
    if (const auto* hit = find_in(e.children, id)) {
      return hit;
    }
  }
  return nullptr;
}

} // namespace

SceneElement* SceneGraph::find(std::string_view id) {
  return find_in(elements, id);
}

const SceneElement* SceneGraph::find(std::string_view id) const {
  return find_in(elements, id);
}

void SceneGraph::validate() const {
  AttributeRegistry registry(*this);
  visit([](const SceneElement& e, const Eigen::Affine3d&) {
    if (e.attribute_id.empty()) {
      throw Error(ErrorCode::InvalidArgument, "element without attribute id");
    }
    if (!e.mesh.indices_valid()) {
      throw Error(ErrorCode::InvalidArgument, "triangle index out of range", e.attribute_id);
    }
    if ((e.transform.scale.array() <= 0.0).any()) {
      throw Error(ErrorCode::NonPositiveScale, "non-positive scale", e.attribute_id);
    }
  });
}

} // namespace filmset
