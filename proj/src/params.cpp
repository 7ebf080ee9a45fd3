#include "filmset/params.hpp"

#include "filmset/error.hpp"
#include "filmset/schema.hpp"

#include <fstream>

namespace filmset {

std::string section_schema_id(std::string_view section, StructureKind kind) {
  if (section == "manager") {
    return "manager";
  }
  if (section == "shape" && kind == StructureKind::column) {
    throw Error(ErrorCode::InvalidArgument, "column scenes have no shape section", "shape");
  }
  for (const auto name : kSectionNames) {
    if (name == section) {
      return std::string(section) + "_" + std::string(to_string(kind));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown section '" + std::string(section) + "'");
}

std::vector<std::string> required_sections(StructureKind kind) {
  std::vector<std::string> out;
  for (const auto name : kSectionNames) {
    if (name == "shape" && kind == StructureKind::column) {
      continue;
    }
    out.emplace_back(name);
  }
  return out;
}

bool StructuredParams::complete() const {
  return missing().empty();
}

std::vector<std::string> StructuredParams::missing() const {
  std::vector<std::string> out;
  for (const auto& name : required_sections(structure_kind)) {
    if (!has(name)) {
      out.push_back(name);
    }
  }
  return out;
}

std::vector<RoomSpec> decode_shape(const nlohmann::json& body) {
  std::vector<RoomSpec> rooms;
  for (const auto& r : body.at("rooms")) {
    RoomSpec spec;
    spec.name = r.at("name").get<std::string>();
    spec.width = r.at("width").get<double>();
    spec.depth = r.at("depth").get<double>();
    for (const auto& a : r.value("arc_edges", nlohmann::json::array())) {
      spec.arc_edges.push_back({a.at("edge").get<int>(), a.at("h_chord").get<double>()});
    }
    rooms.push_back(std::move(spec));
  }
  return rooms;
}

AdjacencySpec decode_adjacency(const nlohmann::json& body) {
  AdjacencySpec adj;
  for (const auto& r : body.at("relations")) {
    adj.relations.push_back({r.at("room_a").get<std::string>(), r.at("room_b").get<std::string>(),
                             direction_from_string(r.at("relation").get<std::string>())});
  }
  return adj;
}

CellAssignment decode_cells(const nlohmann::json& body) {
  CellAssignment cells;
  for (const auto& a : body.at("assignments")) {
    RoomCells rc;
    rc.room = a.at("room").get<std::string>();
    for (const auto& c : a.at("cells")) {
      rc.cells.push_back({c[0].get<int>(), c[1].get<int>()});
    }
    cells.rooms.push_back(std::move(rc));
  }
  return cells;
}

namespace {

std::vector<RoomInfo> decode_room_info(const nlohmann::json& body) {
  std::vector<RoomInfo> out;
  for (const auto& r : body.at("rooms")) {
    out.push_back({r.at("name").get<std::string>(), r.at("function").get<std::string>()});
  }
  return out;
}

std::vector<RegionObjects> decode_objects(const nlohmann::json& body) {
  std::vector<RegionObjects> out;
  for (const auto& r : body.at("regions")) {
    RegionObjects region;
    region.region = r.at("region").get<std::string>();
    for (const auto& s : r.value("stable", nlohmann::json::array())) {
      region.stable.push_back({s.at("query").get<std::string>(),
                               slot_from_string(s.at("slot").get<std::string>()),
                               s.value("index", 0)});
    }
    for (const auto& t : r.value("relative", nlohmann::json::array())) {
      region.relative.push_back({t.at("anchor").get<std::string>(),
                                 spatial_relation_from_string(t.at("relation").get<std::string>()),
                                 distance_level_from_string(t.at("distance").get<std::string>()),
                                 t.at("query").get<std::string>()});
    }
    for (const auto& w : r.value("wall", nlohmann::json::array())) {
      region.wall.push_back({w.at("wall").get<std::string>(), w.at("query").get<std::string>()});
    }
    out.push_back(std::move(region));
  }
  return out;
}

std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    return std::nullopt;
  }
  return j.at(key).get<double>();
}

} // namespace

void StructuredParams::set_section(const std::string& section, const nlohmann::json& body) {
  if (section != "manager" && !has("manager")) {
    throw Error(ErrorCode::InvalidArgument, "the manager section must come first", section);
  }
  if (has(section) && section != "adjacency") {
    throw Error(ErrorCode::InvalidArgument, "section '" + section + "' was already set", section);
  }
  StructureKind kind = structure_kind;
  const auto validate = [&](const std::string& schema_id) {
    try {
      validate_json(builtin_schema(schema_id), body);
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), e.path()).with_context(section);
    }
  };
  if (section == "manager") {
    validate("manager");
    kind = structure_kind_from_string(body.at("structure_kind").get<std::string>());
  } else {
    validate(section_schema_id(section, kind));
  }

  if (section == "manager") {
    structure_kind = kind;
    scene_name = body.at("scene_name").get<std::string>();
  } else if (section == "allocation") {
    room_info = decode_room_info(body);
    if (structure_kind == StructureKind::column) {
      const auto& g = body.at("grid");
      grid = ColumnGridSpec{};
      grid.rows = g.at("rows").get<int>();
      grid.cols = g.at("cols").get<int>();
      grid.spacing = g.value("spacing", grid.spacing);
      grid.column_radius = g.value("column_radius", grid.column_radius);
      grid.column_height = g.value("column_height", grid.column_height);
      grid.beam_width = g.value("beam_width", grid.beam_width);
      grid.beam_height = g.value("beam_height", grid.beam_height);
      grid.validate();
    }
  } else if (section == "adjacency") {
    if (structure_kind == StructureKind::wall) {
      adjacency = decode_adjacency(body);
    } else {
      cells = decode_cells(body);
    }
  } else if (section == "shape") {
    rooms = decode_shape(body);
  } else if (section == "material") {
    materials.clear();
    for (const auto& m : body.at("materials")) {
      materials.push_back({m.at("target").get<std::string>(), m.at("query").get<std::string>()});
    }
  } else if (section == "door_window") {
    if (structure_kind == StructureKind::wall) {
      for (const auto& o : body.at("openings")) {
        OpeningRequest req;
        req.target = o.at("target").get<std::string>();
        req.kind = opening_kind_from_string(o.at("kind").get<std::string>());
        req.width = optional_number(o, "width");
        req.height = optional_number(o, "height");
        req.offset = optional_number(o, "offset");
        req.query = o.at("query").get<std::string>();
        openings.push_back(std::move(req));
      }
    } else {
      opening_styles.door = body.at("door_query").get<std::string>();
      opening_styles.window = body.at("window_query").get<std::string>();
    }
  } else if (section == "object") {
    objects = decode_objects(body);
  }
  sections[section] = body;
}

nlohmann::json StructuredParams::to_json() const {
  nlohmann::json s = nlohmann::json::object();
  for (const auto& [name, body] : sections) {
    s[name] = body;
  }
  return {{"schema_version", kParamsSchemaVersion},
          {"structure_kind", to_string(structure_kind)},
          {"scene_name", scene_name},
          {"sections", s}};
}

StructuredParams StructuredParams::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema_version", 0) != kParamsSchemaVersion) {
    throw Error(ErrorCode::ConfigError, "params need schema_version 1", "schema_version");
  }
  if (!j.contains("sections") || !j.at("sections").is_object()) {
    throw Error(ErrorCode::SchemaViolation, "missing sections object", "sections");
  }
  const auto& sections = j.at("sections");
  for (const auto& [key, value] : sections.items()) {
    if (std::find(kSectionNames.begin(), kSectionNames.end(), key) == kSectionNames.end()) {
      throw Error(ErrorCode::SchemaViolation, "unknown section", "sections." + key);
    }
  }
  StructuredParams p;
  for (const auto name : kSectionNames) {
    const std::string key(name);
    if (!sections.contains(key)) {
      continue;
    }
    try {
      p.set_section(key, sections.at(key));
    } catch (const Error& e) {
      const std::string where = e.path().empty() || e.path() == "$" || e.path() == key
                                    ? "sections." + key
                                    : "sections." + key + "." + e.path();
      throw Error(e.code(), e.detail(), where).with_context(key);
    }
  }
  if (j.contains("structure_kind") &&
      j.at("structure_kind") != std::string(to_string(p.structure_kind))) {
    throw Error(ErrorCode::SchemaViolation, "does not match the manager section", "structure_kind");
  }
  const auto missing = p.missing();
  if (!missing.empty()) {
    throw Error(ErrorCode::SchemaViolation, "missing section", "sections." + missing.front());
  }
  return p;
}

StructuredParams StructuredParams::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot read params '" + path.string() + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, e.what(), "$");
  }
  return from_json(j);
}

} // namespace filmset
