#include "oracles.hpp"

#include "filmset/error.hpp"
#include "filmset/scene.hpp"

#include <doctest.h>

#include <numbers>

using namespace filmset;

namespace {

Box3 oracle_bounds(const Mesh& mesh, const oracle::M4& m) {
  Box3 box;
  for (const auto& v : mesh.vertices) {
    const auto p = m.apply(v.x(), v.y(), v.z());
    box.extend(Vec3(p[0], p[1], p[2]));
  }
  return box;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

} // namespace

TEST_CASE("attribute id grammar") {
  CHECK(AttributeId::parse("room2_floor").kind() == AttributeId::Kind::room_floor);
  CHECK(AttributeId::room_floor(2).str() == "room2_floor");
  CHECK(AttributeId::room_wall(1, WallSide::east).str() == "room1_id4");
  CHECK(AttributeId::parse("column_2_3").secondary() == 3);
  CHECK(AttributeId::parse("beam_16").primary() == 16);
  for (const char* ok : {"room1", "room12_id3", "arc4", "outer", "floor", "column_0_0", "beam_0"}) {
    CAPTURE(ok);
    CHECK(AttributeId::is_valid(ok));
  }
  for (const char* bad : {"room1_id5", "room1_id0", "room0", "room", "room1_", "arc", "column_1",
                          "beam_x", "Room1", "room1_floor2", ""}) {
    CAPTURE(bad);
    CHECK_FALSE(AttributeId::is_valid(bad));
  }
  CHECK(code_of([] { AttributeId::parse("room1_id5"); }) == ErrorCode::MalformedAttribute);
  CHECK(room_number("room7") == 7);
}

TEST_CASE("attribute ids are unique per registry") {
  AttributeRegistry reg;
  SceneElement a;
  a = set_attribute(a, "room1_id4", reg);
  CHECK(a.attribute_id == "room1_id4");
  CHECK(code_of([&] { set_attribute(SceneElement{}, "room1_id4", reg); }) ==
        ErrorCode::DuplicateAttribute);
  CHECK(code_of([&] { set_instance_id(SceneElement{}, "room1_id4", reg); }) ==
        ErrorCode::DuplicateAttribute);
  set_instance_id(SceneElement{}, "door_1", reg);
  CHECK(reg.contains("door_1"));
}

TEST_CASE("rotate then translate matches matrix composition") {
  SceneElement cube;
  cube.mesh = make_box(Vec3::Ones());
  const double yaw = std::numbers::pi / 2;
  cube = apply_transform(cube, Rotate{yaw});
  cube = apply_transform(cube, Translate{{1, 0, 0}});

  const oracle::M4 m = oracle::M4::translation(1, 0, 0) * oracle::M4::rot_z(yaw);
  const Box3 expected = oracle_bounds(cube.mesh, m);
  const Box3 got = world_bounds(cube);
  CHECK((got.min() - expected.min()).norm() < 1e-12);
  CHECK((got.max() - expected.max()).norm() < 1e-12);
  CHECK(got.min().x() == doctest::Approx(0.5));
  CHECK(got.min().y() == doctest::Approx(-0.5));

  const Mesh baked = baked_mesh(cube);
  for (std::size_t i = 0; i < baked.vertices.size(); ++i) {
    const auto& v = cube.mesh.vertices[i];
    const auto p = m.apply(v.x(), v.y(), v.z());
    CHECK((baked.vertices[i] - Vec3(p[0], p[1], p[2])).norm() < 1e-12);
  }
}

TEST_CASE("transform chains agree with the matrix oracle") {
  SceneElement e;
  e.mesh = make_box({0.7, 1.3, 2.0});
  e = apply_transform(e, Translate{{2, -1, 0.5}});
  e = apply_transform(e, Rotate{0.4});
  e = apply_transform(e, Scale{{1.5, 0.5, 2}});
  e = apply_transform(e, Rotate{-1.1});
  e = apply_transform(e, Translate{{0, 3, 0}});
  // Rotate and scale act about the pivot; scale is local.
  const oracle::M4 m = oracle::M4::translation(2, 2, 0.5) * oracle::M4::rot_z(0.4 - 1.1) *
                       oracle::M4::scale(1.5, 0.5, 2);
  const Box3 expected = oracle_bounds(e.mesh, m);
  const Box3 got = world_bounds(e);
  CHECK((got.min() - expected.min()).norm() < 1e-12);
  CHECK((got.max() - expected.max()).norm() < 1e-12);
}

TEST_CASE("scale and identity") {
  SceneElement cube;
  cube.mesh = make_box(Vec3::Ones());
  const SceneElement same = apply_transform(cube, Translate{Vec3::Zero()});
  CHECK(same == cube);
  const Box3 b = world_bounds(apply_transform(cube, Scale{{2, 1, 1}}));
  CHECK((b.sizes() - Vec3(2, 1, 1)).norm() < 1e-12);
  CHECK(code_of([&] { apply_transform(cube, Scale{{1, 0, 1}}); }) == ErrorCode::NonPositiveScale);
  CHECK(code_of([&] { apply_transform(cube, Scale{{1, -1, 1}}); }) == ErrorCode::NonPositiveScale);
}

TEST_CASE("box mesh is closed") {
  const Mesh box = make_box({1, 2, 3});
  CHECK(box.vertices.size() == 8);
  CHECK(box.faces.size() == 12);
  CHECK(boundary_edge_count(box) == 0);
  CHECK(oracle::closed_manifold(box.faces));
  CHECK(box.indices_valid());
  Mesh open = box;
  open.faces.pop_back();
  CHECK(boundary_edge_count(open) == 3);
}

TEST_CASE("scene graph validation and lookup") {
  SceneGraph g;
  SceneElement room;
  room.attribute_id = "room1";
  SceneElement floor;
  floor.attribute_id = "room1_floor";
  floor.mesh = make_box(Vec3::Ones());
  room.children.push_back(floor);
  g.elements.push_back(room);
  CHECK_NOTHROW(g.validate());
  REQUIRE(g.find("room1_floor") != nullptr);
  CHECK(g.attribute_ids() == std::vector<std::string>{"room1", "room1_floor"});

  g.elements.push_back(floor);
  CHECK(code_of([&] { g.validate(); }) == ErrorCode::DuplicateAttribute);
  g.elements.pop_back();
  g.elements[0].children[0].mesh.faces.push_back({0, 1, 99});
  CHECK(code_of([&] { g.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("errors carry path and context") {
  const Error e(ErrorCode::SchemaViolation, "must be positive", "rooms[0].width");
  CHECK(e.path() == "rooms[0].width");
  CHECK(e.detail() == "must be positive");
  const Error c = e.with_context("Shape");
  CHECK(c.context() == "Shape");
  CHECK(c.code() == ErrorCode::SchemaViolation);
  CHECK(std::string(c.what()).find("rooms[0].width") != std::string::npos);
}
