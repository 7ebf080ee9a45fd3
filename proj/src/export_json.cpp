#include "filmset/error.hpp"
#include "filmset/export.hpp"

#include <charconv>
#include <cmath>

namespace filmset {

namespace {

std::string format_float(double v) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, "non-finite number in scene");
  }
  if (v == 0.0) {
    return "0";
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool scalar_array(const nlohmann::json& j) {
  for (const auto& v : j) {
    if (v.is_structured()) {
      return false;
    }
  }
  return true;
}

void dump(const nlohmann::json& j, int depth, std::string& out) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (j.type()) {
  case nlohmann::json::value_t::object: {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) {
        out += ",\n";
      }
      first = false;
      out += pad + nlohmann::json(key).dump() + ": ";
      dump(value, depth + 1, out);
    }
    out += "\n" + close + "}";
    return;
  }
  case nlohmann::json::value_t::array: {
    if (j.empty()) {
      out += "[]";
      return;
    }
    if (scalar_array(j)) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) {
          out += ", ";
        }
        dump(j[i], depth + 1, out);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) {
        out += ",\n";
      }
      out += pad;
      dump(j[i], depth + 1, out);
    }
    out += "\n" + close + "]";
    return;
  }
  case nlohmann::json::value_t::number_float:
    out += format_float(j.get<double>());
    return;
  default:
    out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
  }
}

nlohmann::json vec3(const Vec3& v) {
  return nlohmann::json::array({v.x(), v.y(), v.z()});
}

nlohmann::json element_to_json(const SceneElement& e) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const auto& v : e.mesh.vertices) {
    vertices.push_back(vec3(v));
  }
  nlohmann::json faces = nlohmann::json::array();
  for (const auto& f : e.mesh.faces) {
    faces.push_back({f[0], f[1], f[2]});
  }
  nlohmann::json children = nlohmann::json::array();
  for (const auto& c : e.children) {
    children.push_back(element_to_json(c));
  }
  return {{"attribute_id", e.attribute_id},
          {"vertices", vertices},
          {"faces", faces},
          {"transform",
           {{"t", vec3(e.transform.translation)},
            {"yaw", e.transform.yaw},
            {"s", vec3(e.transform.scale)}}},
          {"material_ref", e.material_ref ? nlohmann::json(*e.material_ref) : nlohmann::json()},
          {"children", children}};
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, what, path);
}

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) {
    bad(path + "." + key, "missing");
  }
  return j.at(key);
}

double number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) {
    bad(path, "expected a number");
  }
  return j.get<double>();
}

Vec3 vec3_from(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) {
    bad(path, "expected [x, y, z]");
  }
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]"), number(j[2], path + "[2]")};
}

SceneElement element_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) {
    bad(path, "expected an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "attribute_id" && key != "vertices" && key != "faces" && key != "transform" &&
        key != "material_ref" && key != "children") {
      bad(path + "." + key, "unknown field");
    }
  }
  SceneElement e;
  const auto& id = field(j, "attribute_id", path);
  if (!id.is_string()) {
    bad(path + ".attribute_id", "expected a string");
  }
  e.attribute_id = id.get<std::string>();

  const auto& vertices = field(j, "vertices", path);
  if (!vertices.is_array()) {
    bad(path + ".vertices", "expected an array");
  }
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    e.mesh.vertices.push_back(vec3_from(vertices[i], path + ".vertices[" + std::to_string(i) + "]"));
  }
  const auto& faces = field(j, "faces", path);
  if (!faces.is_array()) {
    bad(path + ".faces", "expected an array");
  }
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto where = path + ".faces[" + std::to_string(i) + "]";
    const auto& f = faces[i];
    if (!f.is_array() || f.size() != 3) {
      bad(where, "expected three indices");
    }
    Triangle t{};
    for (int k = 0; k < 3; ++k) {
      if (!f[k].is_number_unsigned()) {
        bad(where, "expected a non-negative integer index");
      }
      t[k] = f[k].get<std::uint32_t>();
    }
    e.mesh.faces.push_back(t);
  }
  if (!e.mesh.indices_valid()) {
    bad(path + ".faces", "index out of range");
  }

  const auto& tr = field(j, "transform", path);
  e.transform.translation = vec3_from(field(tr, "t", path + ".transform"), path + ".transform.t");
  e.transform.yaw = number(field(tr, "yaw", path + ".transform"), path + ".transform.yaw");
  e.transform.scale = vec3_from(field(tr, "s", path + ".transform"), path + ".transform.s");
  if ((e.transform.scale.array() <= 0.0).any()) {
    bad(path + ".transform.s", "scale must be positive");
  }

  if (j.contains("material_ref") && !j.at("material_ref").is_null()) {
    if (!j.at("material_ref").is_string()) {
      bad(path + ".material_ref", "expected a string or null");
    }
    e.material_ref = j.at("material_ref").get<std::string>();
  }
  if (j.contains("children")) {
    const auto& children = j.at("children");
    if (!children.is_array()) {
      bad(path + ".children", "expected an array");
    }
    for (std::size_t i = 0; i < children.size(); ++i) {
      e.children.push_back(
          element_from_json(children[i], path + ".children[" + std::to_string(i) + "]"));
    }
  }
  return e;
}

} // namespace

std::string canonical_dump(const nlohmann::json& value) {
  std::string out;
  dump(value, 0, out);
  out += "\n";
  return out;
}

nlohmann::json scene_to_json(const SceneGraph& graph) {
  nlohmann::json elements = nlohmann::json::array();
  for (const auto& e : graph.elements) {
    elements.push_back(element_to_json(e));
  }
  return {{"schema_version", kSceneSchemaVersion},
          {"structure_kind", to_string(graph.structure_kind)},
          {"elements", elements}};
}

SceneGraph scene_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    bad("$", "expected an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "schema_version" && key != "structure_kind" && key != "elements") {
      bad(key, "unknown field");
    }
  }
  if (j.value("schema_version", 0) != kSceneSchemaVersion) {
    bad("schema_version", "unsupported scene schema version");
  }
  SceneGraph graph;
  const auto& kind = field(j, "structure_kind", "$");
  try {
    graph.structure_kind = structure_kind_from_string(kind.get<std::string>());
  } catch (const std::exception&) {
    bad("structure_kind", "expected \"wall\" or \"column\"");
  }
  const auto& elements = field(j, "elements", "$");
  if (!elements.is_array()) {
    bad("elements", "expected an array");
  }
  for (std::size_t i = 0; i < elements.size(); ++i) {
    graph.elements.push_back(element_from_json(elements[i], "elements[" + std::to_string(i) + "]"));
  }
  return graph;
}

std::string export_json(const SceneGraph& graph) {
  return canonical_dump(scene_to_json(graph));
}

SceneGraph import_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, e.what(), "$");
  }
  return scene_from_json(j);
}

} // namespace filmset
