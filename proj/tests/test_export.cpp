#include "oracles.hpp"

#include "filmset/error.hpp"
#include "filmset/export.hpp"
#include "filmset/materials.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

using namespace filmset;
using boost::property_tree::ptree;

namespace {

struct Line {
  double x1, y1, x2, y2;
};

std::vector<Line> lines_with_class(const ptree& node, const std::string& cls) {
  std::vector<Line> out;
  for (const auto& [tag, child] : node) {
    if (tag == "line" && child.get<std::string>("<xmlattr>.class", "") == cls) {
      out.push_back({child.get<double>("<xmlattr>.x1"), child.get<double>("<xmlattr>.y1"),
                     child.get<double>("<xmlattr>.x2"), child.get<double>("<xmlattr>.y2")});
    }
    if (tag != "<xmlattr>") {
      const auto nested = lines_with_class(child, cls);
      out.insert(out.end(), nested.begin(), nested.end());
    }
  }
  return out;
}

std::size_t count_tag(const ptree& node, const std::string& want, const std::string& cls = {}) {
  std::size_t n = 0;
  for (const auto& [tag, child] : node) {
    if (tag == want && (cls.empty() || child.get<std::string>("<xmlattr>.class", "") == cls)) {
      ++n;
    }
    if (tag != "<xmlattr>") {
      n += count_tag(child, want, cls);
    }
  }
  return n;
}

// Number of closed loops if every endpoint joins exactly two lines, else -1.
int closed_loops(const std::vector<Line>& lines) {
  using Key = std::pair<long, long>;
  const auto key = [](double x, double y) { return Key{std::lround(x * 1000), std::lround(y * 1000)}; };
  std::map<Key, std::vector<std::size_t>> at;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    at[key(lines[i].x1, lines[i].y1)].push_back(i);
    at[key(lines[i].x2, lines[i].y2)].push_back(i);
  }
  for (const auto& [k, v] : at) {
    if (v.size() != 2) {
      return -1;
    }
  }
  std::vector<int> comp(lines.size(), -1);
  int loops = 0;
  for (std::size_t s = 0; s < lines.size(); ++s) {
    if (comp[s] >= 0) {
      continue;
    }
    std::vector<std::size_t> stack{s};
    comp[s] = loops;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (const auto& k : {key(lines[i].x1, lines[i].y1), key(lines[i].x2, lines[i].y2)}) {
        for (const auto j : at[k]) {
          if (comp[j] < 0) {
            comp[j] = loops;
            stack.push_back(j);
          }
        }
      }
    }
    ++loops;
  }
  return loops;
}

SceneGraph one_room_scene() {
  const auto plan = place_rooms({{"room1", 4, 3, {{2, 0.5}}}}, {});
  const auto edges = parse_edge(plan);
  const auto walls = build_walls(plan, edges, 0.2, 3.0, 8);
  SceneGraph g;
  SceneElement room;
  room.attribute_id = "room1";
  SceneElement floor;
  floor.attribute_id = "room1_floor";
  floor.mesh = tessellate(edges, 8)[0].mesh;
  floor.material_ref = "oak";
  room.children.push_back(floor);
  for (auto& e : wall_elements(walls)) {
    room.children.push_back(e);
  }
  g.elements.push_back(room);
  SceneElement chair;
  chair.attribute_id = "object_1";
  chair.mesh = make_box({0.6, 0.6, 0.9});
  chair.transform = {{1.3, 0.7, 0}, 0.7, {1.1, 0.9, 1.2}};
  g.elements.push_back(chair);
  return g;
}

Drawing one_room_drawing(bool door) {
  const auto plan = place_rooms({{"room1", 4, 3, {}}}, {});
  WallSet walls = build_walls(plan, parse_edge(plan), 0.2, 3.0, 8);
  Drawing d;
  d.title = "test";
  if (door) {
    open_wall(walls, {"room1_id2", OpeningKind::door, 1.0, 2.1, 1.5, "door"});
    d.openings.push_back({OpeningKind::door, {2.5, 0}, {1.5, 0}, {0, 1}});
  }
  d.walls = walls;
  d.rooms.push_back({"room1", "bedroom", {2, 1.5}});
  return d;
}

} // namespace

TEST_CASE("empty scene json") {
  SceneGraph g;
  const auto text = export_json(g);
  const auto j = nlohmann::json::parse(text);
  CHECK(j.at("structure_kind") == "wall");
  CHECK(j.at("elements") == nlohmann::json::array());
  CHECK(j.at("schema_version") == kSceneSchemaVersion);
  CHECK(text.back() == '\n');
  CHECK(import_json(text) == g);
}

TEST_CASE("scene json round trip") {
  const SceneGraph g = one_room_scene();
  const auto text = export_json(g);
  const SceneGraph back = import_json(text);
  CHECK(export_json(back) == text);
  CHECK(back == g);
  double worst = 0;
  const auto* a = g.find("arc1");
  const auto* b = back.find("arc1");
  REQUIRE(a != nullptr);
  REQUIRE(b != nullptr);
  for (std::size_t i = 0; i < a->mesh.vertices.size(); ++i) {
    worst = std::max(worst, (a->mesh.vertices[i] - b->mesh.vertices[i]).norm());
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("canonical dump") {
  const auto j = nlohmann::json::parse(R"({"b": [1, 0.1, -0.0], "a": {"z": null, "y": "s"}})");
  CHECK(canonical_dump(j) == "{\n  \"a\": {\n    \"y\": \"s\",\n    \"z\": null\n  },\n  \"b\": [1, 0.1, 0]\n}\n");
}

TEST_CASE("scene json import errors") {
  auto j = scene_to_json(one_room_scene());
  j["elements"][0]["children"][0]["faces"][2] = nlohmann::json::array({0, 1});
  try {
    scene_from_json(j);
    FAIL("expected SchemaViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
    CHECK(e.path() == "elements[0].children[0].faces[2]");
  }
  CHECK_THROWS_AS(import_json("{"), Error);
  auto extra = scene_to_json(SceneGraph{});
  extra["unexpected"] = 1;
  CHECK_THROWS_AS(scene_from_json(extra), Error);
}

TEST_CASE("obj export") {
  SceneGraph cube;
  SceneElement e;
  e.attribute_id = "room1_floor";
  e.mesh = make_box(Vec3::Ones());
  cube.elements.push_back(e);
  const auto out = export_obj(cube);
  const auto st = oracle::parse_obj(out.obj);
  CHECK(st.vertices == 8);
  CHECK(st.faces == 12);
  CHECK(st.groups == std::vector<std::string>{"room1_floor"});
  CHECK(st.indices_valid);
  CHECK(st.materials == std::vector<std::string>{std::string(kDefaultMaterial)});
  CHECK(out.obj.find("\nmtllib scene.mtl\n") < out.obj.find("\nv "));
  CHECK(out.mtl.find("newmtl default_plaster") != std::string::npos);

  SceneElement f = e;
  f.attribute_id = "object_1";
  f.material_ref = "oak";
  cube.elements.push_back(f);
  const auto two = oracle::parse_obj(export_obj(cube).obj);
  CHECK(two.groups == std::vector<std::string>{"room1_floor", "object_1"});
  CHECK(export_obj(cube).mtl.find("newmtl oak") != std::string::npos);

  const SceneGraph g = one_room_scene();
  std::size_t baked = 0, faces = 0;
  g.visit([&](const SceneElement& el, const Eigen::Affine3d& parent) {
    const Mesh m = baked_mesh(el, parent);
    baked += m.vertices.size();
    faces += m.faces.size();
  });
  const auto full = oracle::parse_obj(export_obj(g).obj);
  CHECK(full.vertices == baked);
  CHECK(full.faces == faces);
  CHECK(full.indices_valid);
  CHECK(full.error.empty());
}

TEST_CASE("material colors are stable") {
  const Vec3 c = material_color("oak");
  CHECK(c == material_color("oak"));
  CHECK((c.array() >= 0.2).all());
  CHECK((c.array() <= 0.9).all());
}

TEST_CASE("svg single room") {
  const auto svg = export_svg(one_room_drawing(false));
  REQUIRE(oracle::xml_error(svg).empty());
  const auto tree = oracle::read_xml(svg);
  CHECK(tree.get<std::string>("svg.<xmlattr>.version") == "1.1");
  const auto walls = lines_with_class(tree, "wall");
  CHECK(walls.size() == 8);
  CHECK(closed_loops(walls) == 2);
  CHECK(count_tag(tree, "text") >= 2);
}

TEST_CASE("svg door breaks the wall lines") {
  const auto svg = export_svg(one_room_drawing(true));
  REQUIRE(oracle::xml_error(svg).empty());
  const auto walls = lines_with_class(oracle::read_xml(svg), "wall");
  std::map<long, std::vector<std::pair<double, double>>> rows;
  for (const auto& l : walls) {
    if (std::abs(l.y1 - l.y2) < 1e-9) {
      rows[std::lround(l.y1 * 1000)].emplace_back(std::min(l.x1, l.x2), std::max(l.x1, l.x2));
    }
  }
  int broken = 0;
  for (auto& [y, spans] : rows) {
    if (spans.size() != 2) {
      continue;
    }
    ++broken;
    std::sort(spans.begin(), spans.end());
    CHECK(spans[1].first - spans[0].second == doctest::Approx(1.0 * kDrawingScale));
  }
  CHECK(broken == 2);
  CHECK(svg.find("swing") != std::string::npos);
}

TEST_CASE("svg column grid") {
  Drawing d;
  d.title = "grid";
  d.grid = ColumnGridSpec{3, 4, 4.0, 0.2, 3.5, 0.25, 0.3};
  const auto svg = export_svg(d);
  REQUIRE(oracle::xml_error(svg).empty());
  CHECK(count_tag(oracle::read_xml(svg), "circle", "column") == 12);
}

TEST_CASE("svg escapes text") {
  Drawing d = one_room_drawing(false);
  d.title = "Tom & Jerry <house>";
  d.rooms[0].function = "\"study\"";
  CHECK(oracle::xml_error(export_svg(d)).empty());
}
