#include "filmset/pipeline.hpp"

#include "filmset/error.hpp"
#include "filmset/resources.hpp"

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <fstream>

namespace filmset {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, what, path);
}

void check_keys(const nlohmann::json& j, const std::string& where,
                std::initializer_list<std::string_view> known) {
  if (!j.is_object()) {
    config_error(where, "expected an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      config_error(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) {
    return;
  }
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    config_error(where.empty() ? key : where + "." + key, "wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& value) {
  const fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

} // namespace

void PipelineConfig::validate() const {
  if (!catalog_path.empty() && !fs::is_regular_file(catalog_path)) {
    config_error("catalog", "catalog '" + catalog_path.string() + "' does not exist");
  }
  if (!embeddings_path.empty() && !fs::is_regular_file(embeddings_path)) {
    config_error("embeddings", "embedding file '" + embeddings_path.string() + "' does not exist");
  }
  if (formats.empty()) {
    config_error("formats", "at least one export format is required");
  }
  for (const auto& f : formats) {
    if (f != "json" && f != "obj" && f != "svg") {
      config_error("formats", "unknown format '" + f + "'");
    }
  }
  if (output_dir.empty()) {
    config_error("output_dir", "output directory is required");
  }
  if (max_retries < 1) {
    config_error("max_retries", "must be at least 1");
  }
  if (!(structure.wall_thickness >= kMinWallThickness && structure.wall_thickness <= kMaxWallThickness)) {
    config_error("structure.wall_thickness", "must be within [" + std::to_string(kMinWallThickness) + ", " +
                                                 std::to_string(kMaxWallThickness) + "]");
  }
  if (!(structure.wall_height >= kMinWallHeight && structure.wall_height <= kMaxWallHeight)) {
    config_error("structure.wall_height", "must be within [" + std::to_string(kMinWallHeight) + ", " +
                                              std::to_string(kMaxWallHeight) + "]");
  }
  if (structure.arc_segments < 1) {
    config_error("structure.arc_segments", "must be at least 1");
  }
  if (!(structure.column_margin >= 0)) {
    config_error("structure.column_margin", "must be non-negative");
  }
  placement.validate();
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  check_keys(j, "",
             {"catalog", "embeddings", "backend", "embedder", "structure", "placement",
              "max_retries", "output_dir", "seed", "formats"});
  PipelineConfig c;
  std::string text;
  if (j.contains("catalog")) {
    read(j, "catalog", text, "");
    c.catalog_path = resolve(base_dir, text);
  }
  if (j.contains("embeddings")) {
    read(j, "embeddings", text, "");
    c.embeddings_path = resolve(base_dir, text);
  }
  if (j.contains("backend")) {
    const auto& b = j.at("backend");
    check_keys(b, "backend",
               {"kind", "fixtures", "endpoint", "model", "api_key_env", "temperature",
                "timeout_s", "retries"});
    std::string kind = "scripted";
    read(b, "kind", kind, "backend");
    if (kind != "scripted" && kind != "remote") {
      config_error("backend.kind", "expected scripted or remote");
    }
    c.backend = kind == "remote" ? BackendKind::remote : BackendKind::scripted;
    if (b.contains("fixtures")) {
      read(b, "fixtures", text, "backend");
      c.fixtures_path = resolve(base_dir, text);
    }
    read(b, "endpoint", c.remote.endpoint, "backend");
    read(b, "model", c.remote.model, "backend");
    read(b, "api_key_env", c.remote.api_key_env, "backend");
    read(b, "temperature", c.remote.temperature, "backend");
    int timeout = static_cast<int>(c.remote.timeout.count());
    read(b, "timeout_s", timeout, "backend");
    c.remote.timeout = std::chrono::seconds(timeout);
    read(b, "retries", c.remote.retries, "backend");
  }
  if (j.contains("embedder")) {
    const auto& e = j.at("embedder");
    check_keys(e, "embedder",
               {"kind", "endpoint", "model", "dimension", "api_key_env", "timeout_s", "retries"});
    std::string kind = "mock";
    read(e, "kind", kind, "embedder");
    if (kind != "mock" && kind != "remote") {
      config_error("embedder.kind", "expected mock or remote");
    }
    c.embedder = kind == "remote" ? EmbedderKind::remote : EmbedderKind::mock;
    read(e, "endpoint", c.remote_embedder.endpoint, "embedder");
    read(e, "model", c.remote_embedder.model, "embedder");
    read(e, "dimension", c.remote_embedder.dimension, "embedder");
    read(e, "api_key_env", c.remote_embedder.api_key_env, "embedder");
    int timeout = static_cast<int>(c.remote_embedder.timeout.count());
    read(e, "timeout_s", timeout, "embedder");
    c.remote_embedder.timeout = std::chrono::seconds(timeout);
    read(e, "retries", c.remote_embedder.retries, "embedder");
  }
  if (j.contains("structure")) {
    const auto& s = j.at("structure");
    check_keys(s, "structure", {"wall_thickness", "wall_height", "arc_segments", "column_margin"});
    read(s, "wall_thickness", c.structure.wall_thickness, "structure");
    read(s, "wall_height", c.structure.wall_height, "structure");
    read(s, "arc_segments", c.structure.arc_segments, "structure");
    read(s, "column_margin", c.structure.column_margin, "structure");
  }
  if (j.contains("placement")) {
    const auto& p = j.at("placement");
    check_keys(p, "placement", {"lambda_near", "lambda_far", "collision_max_iters", "collision_step"});
    read(p, "lambda_near", c.placement.lambda_near, "placement");
    read(p, "lambda_far", c.placement.lambda_far, "placement");
    read(p, "collision_max_iters", c.placement.collision_max_iters, "placement");
    read(p, "collision_step", c.placement.collision_step, "placement");
  }
  read(j, "max_retries", c.max_retries, "");
  if (j.contains("output_dir")) {
    read(j, "output_dir", text, "");
    c.output_dir = resolve(base_dir, text);
  }
  read(j, "seed", c.seed, "");
  if (j.contains("formats")) {
    std::vector<std::string> formats;
    read(j, "formats", formats, "");
    c.formats = {formats.begin(), formats.end()};
  }
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    config_error("", "cannot read config '" + path.string() + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    config_error("", e.what());
  }
  return from_json(j, path.parent_path());
}

namespace {

template <typename F>
auto at_param(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    std::string detail = e.detail();
    if (!e.path().empty() && e.path() != path) {
      detail += " (" + e.path() + ")";
    }
    throw Error(e.code(), detail, path);
  }
}

template <typename F>
void run_stage(std::string_view name, std::vector<std::string>& log, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    throw e.with_context(std::string(name));
  }
  log.emplace_back(name);
  spdlog::debug("stage {} done", name);
}

std::string idx(std::string prefix, std::size_t k) {
  return prefix + "[" + std::to_string(k) + "]";
}

const AssetRecord& pick(const Catalog& catalog, const EmbeddingIndex& index,
                        const TextEmbedder& embedder, const std::string& query,
                        AssetCategory category, std::optional<Mount> mount = std::nullopt) {
  const auto hits = search(index, embedder, query, category, index.partition(category).size());
  for (const auto& hit : hits) {
    const auto& record = catalog.at(hit.id);
    if (!mount || record.mount == *mount) {
      return record;
    }
  }
  throw Error(ErrorCode::EmptyCategory,
              "no " + std::string(mount == Mount::wall ? "wall-mounted " : "floor-standing ") +
                  std::string(to_string(category)) + " for '" + query + "'");
}

SceneElement asset_element(const Catalog& catalog, const AssetRecord& record,
                           const Placement& p) {
  SceneElement e;
  e.mesh = catalog.load_mesh(record);
  e.transform.translation = p.position;
  e.transform.yaw = p.yaw;
  e.transform.scale = p.scale;
  e.material_ref = record.id;
  return e;
}

struct SceneState {
  const StructuredParams& params;
  const Catalog& catalog;
  const EmbeddingIndex& index;
  const TextEmbedder& embedder;
  const PipelineConfig& config;

  BuiltScene out;
  AttributeRegistry registry;
  std::optional<PlacedFloorplan> plan;
  std::vector<FloorFace> floors;
  int doors = 0;
  int windows = 0;
  int objects = 0;

  void add_opening(const OpeningFrame& frame, OpeningKind kind, const std::string& query,
                   const Vec2& u_axis) {
    const auto& asset = pick(catalog, index, embedder, query,
                             kind == OpeningKind::door ? AssetCategory::door : AssetCategory::window);
    SceneElement e = fit_asset(frame, catalog.load_mesh(asset));
    e.material_ref = asset.id;
    const std::string id = kind == OpeningKind::door ? "door_" + std::to_string(++doors)
                                                     : "window_" + std::to_string(++windows);
    out.graph.elements.push_back(set_instance_id(std::move(e), id, registry));

    const Vec2 center = frame.base_center.head<2>() + 0.5 * frame.thickness * frame.facing;
    OpeningMark mark;
    mark.kind = kind;
    mark.hinge = center - 0.5 * frame.width * u_axis;
    mark.strike = center + 0.5 * frame.width * u_axis;
    mark.into = frame.facing;
    out.drawing.openings.push_back(mark);
  }

  void floorplan_wall() {
    const auto& s = config.structure;
    plan = at_param("sections.shape", [&] { return place_rooms(params.rooms, params.adjacency); });
    plan->wall_thickness = s.wall_thickness;
    plan->wall_height = s.wall_height;
    const auto edges = at_param("sections.shape", [&] { return parse_edge(*plan); });
    floors = tessellate(edges, s.arc_segments);
    out.drawing.walls =
        build_walls(*plan, edges, s.wall_thickness, s.wall_height, s.arc_segments);
    const WallSet& walls = *out.drawing.walls;

    auto structural = wall_elements(walls);
    for (const auto& room : plan->rooms) {
      const int n = room_number(room.spec.name);
      SceneElement container =
          set_attribute(SceneElement{}, AttributeId::room(n).str(), registry);
      for (const auto& f : floors) {
        if (f.room == room.spec.name) {
          SceneElement floor;
          floor.mesh = f.mesh;
          container.children.push_back(
              set_attribute(std::move(floor), AttributeId::room_floor(n).str(), registry));
        }
      }
      for (const auto& side : walls.sides) {
        if (side.room != room.spec.name) {
          continue;
        }
        for (auto& e : structural) {
          if (e.attribute_id == side.id.str()) {
            container.children.push_back(set_attribute(e, e.attribute_id, registry));
          }
        }
      }
      for (const auto& arc : walls.arcs) {
        if (arc.room != room.spec.name) {
          continue;
        }
        for (auto& e : structural) {
          if (e.attribute_id == arc.id.str()) {
            container.children.push_back(set_attribute(e, e.attribute_id, registry));
          }
        }
      }
      out.graph.elements.push_back(std::move(container));

      std::string function;
      for (const auto& info : params.room_info) {
        if (info.name == room.spec.name) {
          function = info.function;
        }
      }
      out.drawing.rooms.push_back({room.spec.name, function, room.box().center()});
    }
    out.graph.elements.push_back(
        set_attribute(structural.back(), AttributeId::outer().str(), registry));
  }

  void floorplan_column() {
    const auto& grid = params.grid;
    at_param("sections.allocation.grid", [&] {
      grid.validate();
      return 0;
    });
    at_param("sections.adjacency", [&] {
      const auto report = validate_cells(grid, params.room_info, params.cells);
      if (!report.ok()) {
        throw Error(ErrorCode::InvalidArgument, "invalid cell assignment: " + report.str());
      }
      return 0;
    });
    for (auto& e : build_column_grid(grid, config.structure.column_margin)) {
      const std::string id = e.attribute_id;
      out.graph.elements.push_back(set_attribute(std::move(e), id, registry));
    }
    out.drawing.grid = grid;
    for (const auto& r : params.cells.rooms) {
      Box2 box;
      for (const auto& c : r.cells) {
        box.extend(grid.center(c.i, c.j));
        box.extend(grid.center(c.i + 1, c.j + 1));
      }
      std::string function;
      for (const auto& info : params.room_info) {
        if (info.name == r.room) {
          function = info.function;
        }
      }
      out.drawing.rooms.push_back({r.room, function, box.center()});
    }
  }

  void materials() {
    const auto ids = out.graph.attribute_ids();
    const auto assignment = at_param("sections.material", [&] {
      return resolve_materials(params.materials, ids, index, embedder);
    });
    at_param("sections.material", [&] {
      apply_material(out.graph, assignment);
      return 0;
    });
    out.graph.visit([&](const SceneElement& e, const Eigen::Affine3d&) {
      if (e.material_ref) {
        if (const auto* rec = catalog.find(*e.material_ref)) {
          out.uv_scales[rec->id] = rec->uv_scale;
        }
      }
    });
  }

  void openings_wall() {
    WallSet& walls = *out.drawing.walls;
    for (std::size_t k = 0; k < params.openings.size(); ++k) {
      const auto& req = params.openings[k];
      at_param(idx("sections.door_window.openings", k), [&] {
        const RoomSide* side = walls.find_side(req.target);
        if (!side) {
          throw Error(ErrorCode::UnknownAttribute, "no straight wall '" + req.target + "'",
                      req.target);
        }
        const bool door = req.kind == OpeningKind::door;
        OpeningSpec spec;
        spec.target = req.target;
        spec.kind = req.kind;
        spec.width = req.width.value_or(door ? kDefaultDoorWidth : kDefaultWindowWidth);
        spec.height = req.height.value_or(door ? kDefaultDoorHeight : kDefaultWindowHeight);
        spec.horizontal_offset = req.offset.value_or(std::max(0.0, (side->length - spec.width) / 2));
        spec.asset_query = req.query;
        const Vec2 u_axis = side->u_axis;
        const auto opened = open_wall(walls, spec);
        add_opening(opened.frame, req.kind, req.query, u_axis);
        return 0;
      });
    }
    for (const auto& side : walls.sides) {
      if (auto* e = out.graph.find(side.id.str())) {
        e->mesh = side_mesh(walls, side.room, side.side);
      }
    }
    if (auto* e = out.graph.find(AttributeId::outer().str())) {
      e->mesh = facade_mesh(walls);
    }
  }

  void openings_column() {
    const auto& grid = params.grid;
    const auto plan_slots = at_param("sections.door_window", [&] {
      return plan_column_openings(grid, partition_gaps(grid, params.cells), params.opening_styles);
    });
    for (std::size_t k = 0; k < plan_slots.slots.size(); ++k) {
      const auto& slot = plan_slots.slots[k];
      at_param("sections.door_window", [&] {
        const OpeningFrame frame = gap_frame(grid, slot);
        const auto kind = slot.fill == GapFill::door ? OpeningKind::door : OpeningKind::window;
        add_opening(frame, kind, slot.asset_query, -geometry::perp<double>(frame.facing));
        return 0;
      });
    }
  }

  PlacementRegion region_for(const std::string& name) {
    if (params.structure_kind == StructureKind::wall) {
      const PlacedRoom* room = plan->find(name);
      if (!room) {
        throw Error(ErrorCode::UnknownAttribute, "no room '" + name + "'", name);
      }
      for (const auto& f : floors) {
        if (f.room == name) {
          return room_region(*room, f.polygon);
        }
      }
      throw Error(ErrorCode::UnknownAttribute, "room '" + name + "' has no floor", name);
    }
    for (const auto& r : params.cells.rooms) {
      if (r.room != name) {
        continue;
      }
      UnitRegion unit{r.cells.front().i, r.cells.front().j, r.cells.front().i + 1,
                      r.cells.front().j + 1};
      for (const auto& c : r.cells) {
        unit.i1 = std::min(unit.i1, c.i);
        unit.j1 = std::min(unit.j1, c.j);
        unit.i2 = std::max(unit.i2, c.i + 1);
        unit.j2 = std::max(unit.j2, c.j + 1);
      }
      PlacementRegion region = unit_region(params.grid, unit);
      region.id = name;
      return region;
    }
    throw Error(ErrorCode::UnknownAttribute, "no room '" + name + "'", name);
  }

  void layout() {
    const auto& cfg = config.placement;
    AnchorTable anchors;
    std::vector<Placement> wall_placed;
    for (std::size_t k = 0; k < params.objects.size(); ++k) {
      const auto& req = params.objects[k];
      const std::string base = idx("sections.object.regions", k);
      const PlacementRegion region = at_param(base + ".region", [&] { return region_for(req.region); });

      std::vector<Placement> placed;
      for (std::size_t s = 0; s < req.stable.size(); ++s) {
        const auto& st = req.stable[s];
        placed.push_back(at_param(idx(base + ".stable", s), [&] {
          const auto& asset = pick(catalog, index, embedder, st.query, AssetCategory::object, Mount::floor);
          Placement p = place_stable(region, asset.id, asset.native_size, st.slot, st.index, anchors);
          p.label = "object_" + std::to_string(++objects);
          return p;
        }));
      }
      for (std::size_t r = 0; r < req.relative.size(); ++r) {
        const auto& t = req.relative[r];
        placed.push_back(at_param(idx(base + ".relative", r), [&] {
          const auto& asset = pick(catalog, index, embedder, t.object_query, AssetCategory::object, Mount::floor);
          Placement p = place_relative(region, t, asset.id, asset.native_size, anchors, cfg);
          p.label = "object_" + std::to_string(++objects);
          return p;
        }));
      }
      std::vector<std::string> dropped;
      placed = at_param(base, [&] { return settle_layout(placed, region, cfg, &dropped); });
      for (const auto& label : dropped) {
        spdlog::warn("{}: dropped {} after unresolvable overlap", req.region, label);
      }
      anchors.update(placed);

      for (std::size_t w = 0; w < req.wall.size(); ++w) {
        const auto& wr = req.wall[w];
        placed.push_back(at_param(idx(base + ".wall", w), [&] {
          if (!out.drawing.walls) {
            throw Error(ErrorCode::InvalidArgument, "wall objects need a wall-structure scene");
          }
          const RoomSide* side = out.drawing.walls->find_side(wr.wall);
          if (!side || side->room != req.region) {
            throw Error(ErrorCode::UnknownAttribute,
                        "'" + wr.wall + "' is not a straight wall of " + req.region, wr.wall);
          }
          const auto& asset = pick(catalog, index, embedder, wr.query, AssetCategory::object, Mount::wall);
          Placement p = place_wall_object(*out.drawing.walls, wr.wall, asset.id, asset.native_size,
                                          wall_placed);
          p.label = "object_" + std::to_string(++objects);
          p.region = req.region;
          wall_placed.push_back(p);
          return p;
        }));
      }

      for (const auto& p : placed) {
        SceneElement e = asset_element(catalog, catalog.at(p.object), p);
        out.graph.elements.push_back(set_instance_id(std::move(e), p.label, registry));
        out.placements.push_back(p);
      }
    }
    out.drawing.placements = out.placements;
  }
};

} // namespace

BuiltScene build_scene(const StructuredParams& params, const Catalog& catalog,
                       const EmbeddingIndex& index, const TextEmbedder& embedder,
                       const PipelineConfig& config) {
  if (!params.complete()) {
    throw Error(ErrorCode::SchemaViolation, "params are incomplete",
                "sections." + params.missing().front());
  }
  SceneState st{params, catalog, index, embedder, config, {}, {}, {}, {}};
  st.out.graph.structure_kind = params.structure_kind;
  st.out.drawing.title = params.scene_name;
  const bool wall = params.structure_kind == StructureKind::wall;

  run_stage("floorplan", st.out.stage_log, [&] {
    if (wall) {
      st.floorplan_wall();
    } else {
      st.floorplan_column();
    }
  });
  run_stage("materials", st.out.stage_log, [&] { st.materials(); });
  run_stage("openings", st.out.stage_log, [&] {
    if (wall) {
      st.openings_wall();
    } else {
      st.openings_column();
    }
  });
  run_stage("layout", st.out.stage_log, [&] { st.layout(); });
  st.out.graph.validate();
  return std::move(st.out);
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : this->files) {
    files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  return {{"schema_version", 1},
          {"scene_name", scene_name},
          {"structure_kind", to_string(structure_kind)},
          {"stages", stages},
          {"files", files}};
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

Catalog load_catalog(const PipelineConfig& config) {
  if (config.catalog_path.empty()) {
    return Catalog::parse(resources::demo_catalog());
  }
  if (!fs::is_regular_file(config.catalog_path)) {
    config_error("catalog", "catalog '" + config.catalog_path.string() + "' does not exist");
  }
  return Catalog::load(config.catalog_path);
}

std::unique_ptr<TextEmbedder> make_embedder(const PipelineConfig& config) {
  if (config.embedder == EmbedderKind::remote) {
    return std::make_unique<RemoteEmbedder>(config.remote_embedder);
  }
  return std::make_unique<HashingEmbedder>();
}

std::unique_ptr<AgentBackend> make_backend(const PipelineConfig& config) {
  if (config.backend == BackendKind::remote) {
    return std::make_unique<RemoteBackend>(config.remote);
  }
  if (config.fixtures_path.empty()) {
    config_error("backend.fixtures", "the scripted backend needs a fixtures file");
  }
  return std::make_unique<ScriptedBackend>(ScriptedBackend::load(config.fixtures_path));
}

std::vector<std::pair<std::string, std::string>> render_outputs(const BuiltScene& scene,
                                                                const StructuredParams& params,
                                                                const std::set<std::string>& formats) {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("params.json", canonical_dump(params.to_json()));
  if (formats.contains("json")) {
    out.emplace_back("scene.json", export_json(scene.graph));
  }
  if (formats.contains("obj")) {
    auto obj = export_obj(scene.graph, "scene.mtl", scene.uv_scales);
    out.emplace_back("scene.obj", std::move(obj.obj));
    out.emplace_back("scene.mtl", std::move(obj.mtl));
  }
  if (formats.contains("svg")) {
    out.emplace_back("floorplan.svg", export_svg(scene.drawing));
  }
  return out;
}

namespace {

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  }
}

void write_outputs(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  std::vector<fs::path> temps;
  std::vector<fs::path> placed;
  const auto cleanup = [&] {
    std::error_code ec;
    for (const auto& p : temps) {
      fs::remove(p, ec);
    }
    for (const auto& p : placed) {
      fs::remove(p, ec);
    }
  };
  try {
    for (const auto& [name, bytes] : files) {
      const fs::path tmp = dir / ("." + name + ".tmp");
      temps.push_back(tmp);
      write_file(tmp, bytes);
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
      const fs::path dst = dir / files[i].first;
      fs::rename(temps[i], dst);
      placed.push_back(dst);
    }
  } catch (const fs::filesystem_error& e) {
    cleanup();
    throw Error(ErrorCode::IoError, e.what());
  } catch (...) {
    cleanup();
    throw;
  }
}

} // namespace

Manifest generate(const PipelineConfig& config, const GenerateInput& input, AgentBackend* backend) {
  config.validate();
  const Catalog catalog = load_catalog(config);
  const auto embedder = make_embedder(config);
  std::optional<EmbeddingSidecar> sidecar;
  if (!config.embeddings_path.empty()) {
    sidecar = EmbeddingSidecar::load(config.embeddings_path);
  }
  const EmbeddingIndex index =
      EmbeddingIndex::build(catalog.records(), *embedder, sidecar ? &*sidecar : nullptr);

  StructuredParams params;
  if (input.params) {
    params = *input.params;
  } else if (!input.params_path.empty()) {
    params = StructuredParams::load(input.params_path);
  } else {
    if (input.description.empty()) {
      throw Error(ErrorCode::ConfigError, "need a description or a params file", "input");
    }
    std::unique_ptr<AgentBackend> owned;
    if (!backend) {
      owned = make_backend(config);
      backend = owned.get();
    }
    ChainOptions options;
    options.max_retries = config.max_retries;
    options.hooks.push_back([&](Role role, const std::string& section, const nlohmann::json& body) {
      const auto probe = [&](const std::string& query, AssetCategory category) {
        const auto hits = search(index, *embedder, query, category, 1);
        spdlog::info("{}: '{}' -> {} ({:.3f})", to_string(role), query, hits.front().id,
                     hits.front().score);
      };
      if (section == "material") {
        for (const auto& m : body.at("materials")) {
          probe(m.at("query").get<std::string>(), AssetCategory::material);
        }
      } else if (section == "door_window") {
        if (body.contains("openings")) {
          for (const auto& o : body.at("openings")) {
            probe(o.at("query").get<std::string>(), o.at("kind") == "door" ? AssetCategory::door
                                                                            : AssetCategory::window);
          }
        } else {
          probe(body.at("door_query").get<std::string>(), AssetCategory::door);
          probe(body.at("window_query").get<std::string>(), AssetCategory::window);
        }
      } else if (section == "object") {
        for (const auto& r : body.at("regions")) {
          for (const char* group : {"stable", "relative", "wall"}) {
            for (const auto& o : r.value(group, nlohmann::json::array())) {
              probe(o.at("query").get<std::string>(), AssetCategory::object);
            }
          }
        }
      }
    });
    params = run_chain(input.description, *backend, options).params;
  }

  const BuiltScene scene = build_scene(params, catalog, index, *embedder, config);
  const auto files = render_outputs(scene, params, config.formats);

  Manifest manifest;
  manifest.scene_name = params.scene_name;
  manifest.structure_kind = params.structure_kind;
  manifest.stages = scene.stage_log;
  for (const auto& [name, bytes] : files) {
    manifest.files.push_back({name, sha256_hex(bytes), bytes.size()});
  }
  auto all = files;
  all.emplace_back(std::string(kManifestFile), canonical_dump(manifest.to_json()));

  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) {
    throw Error(ErrorCode::IoError, "cannot create '" + config.output_dir.string() + "': " + ec.message());
  }
  write_outputs(config.output_dir, all);
  return manifest;
}

} // namespace filmset
