#include "filmset/agents.hpp"
#include "filmset/backends.hpp"
#include "filmset/error.hpp"
#include "filmset/resources.hpp"
#include "filmset/schema.hpp"

#include <doctest.h>

using namespace filmset;
using nlohmann::json;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

std::string msg(const json& body) {
  return "Here is my answer.\n```json\n" + body.dump(2) + "\n```\n";
}

json relations(std::initializer_list<std::array<const char*, 3>> rels) {
  json arr = json::array();
  for (const auto& r : rels) {
    arr.push_back({{"room_a", r[0]}, {"room_b", r[1]}, {"relation", r[2]}});
  }
  return {{"relations", arr}};
}

std::vector<RoomSpec> rooms3() {
  return {{"room1", 4, 3, {}}, {"room2", 4, 3, {}}, {"room3", 4, 3, {}}};
}

bool mentions(const CheckReport& r, const std::string& word) {
  for (const auto& v : r.violations) {
    if (v.find(word) != std::string::npos) {
      return true;
    }
  }
  return false;
}

json demo_fixtures(const char* scene) {
  return json::parse(resources::demo_fixtures(scene));
}

class RecordingBackend final : public AgentBackend {
public:
  explicit RecordingBackend(ScriptedBackend inner) : inner_(std::move(inner)) {}
  std::string respond(Role role, const AgentContext& context) override {
    feedback.push_back(context.feedback);
    return inner_.respond(role, context);
  }
  std::vector<std::string> feedback;

private:
  ScriptedBackend inner_;
};

} // namespace

TEST_CASE("turn table examples") {
  CHECK(successor(StructureKind::wall, Role::Check, Outcome::fail) == Role::Adjacency);
  CHECK(successor(StructureKind::wall, Role::Object, Outcome::ok) == Role::Done);
  CHECK_FALSE(successor(StructureKind::column, Role::Check, Outcome::ok).has_value());
  TurnFSM fsm(StructureKind::wall);
  fsm.request(Role::Allocation);
  CHECK(code_of([&] { fsm.request(Role::Material); }) == ErrorCode::IllegalTransition);
  CHECK(fsm.current() == Role::Allocation);
  CHECK(fsm.next_speaker(Outcome::ok) == Role::Adjacency);
  CHECK(code_of([&] { fsm.next_speaker(Outcome::fail); }) == ErrorCode::IllegalTransition);

  for (const auto role : kAllRoles) {
    CHECK(role_from_string(to_string(role)) == role);
  }
  CHECK(role_description(Role::Check, StructureKind::wall).find("Adjacency") != std::string::npos);
  CHECK(section_of(Role::Door_Window) == "door_window");
  CHECK(section_of(Role::Check).empty());
}

TEST_CASE("adjacency validation") {
  const auto contradictory = validate_adjacency(
      {{"room1", 4, 3, {}}, {"room2", 4, 3, {}}}, decode_adjacency(relations({{"room1", "room2", "east"},
                                                                              {"room2", "room1", "east"}})));
  CHECK_FALSE(contradictory.ok());
  CHECK(mentions(contradictory, "contradictory"));

  const auto both_ways = validate_adjacency(
      {{"room1", 4, 3, {}}, {"room2", 4, 3, {}}}, decode_adjacency(relations({{"room1", "room2", "east"},
                                                                              {"room1", "room2", "west"}})));
  CHECK(mentions(both_ways, "contradictory"));

  CHECK(validate_adjacency(rooms3(), decode_adjacency(relations({{"room1", "room2", "east"},
                                                                 {"room2", "room3", "east"}})))
            .ok());
  const auto lonely = validate_adjacency(rooms3(), decode_adjacency(relations({{"room1", "room2", "east"}})));
  CHECK(mentions(lonely, "disconnected"));
  const auto unknown = validate_adjacency(rooms3(), decode_adjacency(relations({{"room1", "room7", "east"}})));
  CHECK(mentions(unknown, "room7"));
  const auto stacked = validate_adjacency(
      rooms3(), decode_adjacency(relations({{"room1", "room2", "east"}, {"room1", "room3", "east"}})));
  CHECK(mentions(stacked, "not realizable"));
  CHECK(stacked.str().find("- ") == 0);
}

TEST_CASE("check loop") {
  const json bad = relations({{"room1", "room2", "east"}, {"room2", "room1", "east"}});
  const json good = relations({{"room1", "room2", "east"}});
  const std::vector<RoomSpec> rooms{{"room1", 4, 3, {}}, {"room2", 4, 3, {}}};

  SUBCASE("second attempt passes") {
    RecordingBackend backend(ScriptedBackend({{Role::Adjacency, {msg(bad), msg(good)}}}));
    AgentContext ctx;
    std::vector<Role> trace;
    const auto r = check_loop(backend, ctx, rooms, 3, nullptr, &trace);
    CHECK(r.attempts == 2);
    CHECK(r.section == good);
    REQUIRE(backend.feedback.size() == 2);
    CHECK(backend.feedback[0].empty());
    CHECK(backend.feedback[1].find("contradictory") != std::string::npos);
    CHECK(trace == std::vector<Role>{Role::Adjacency, Role::Check, Role::Adjacency, Role::Check});
  }
  SUBCASE("first attempt passes") {
    ScriptedBackend backend({{Role::Adjacency, {msg(good)}}});
    AgentContext ctx;
    CHECK(check_loop(backend, ctx, rooms, 3).attempts == 1);
  }
  SUBCASE("exhausted") {
    ScriptedBackend backend({{Role::Adjacency, {msg(bad), msg(bad), msg(bad), msg(good)}}});
    AgentContext ctx;
    try {
      check_loop(backend, ctx, rooms, 3);
      FAIL("expected AdjacencyExhausted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::AdjacencyExhausted);
    }
    CHECK(backend.consumed(Role::Adjacency) == 3);
  }
}

TEST_CASE("parameter extraction") {
  const auto shape = extract_params(msg({{"rooms", {{{"name", "room1"}, {"width", 4}, {"depth", 3}}}}}),
                                    "shape_wall");
  const auto rooms = decode_shape(shape);
  REQUIRE(rooms.size() == 1);
  CHECK(rooms[0].name == "room1");
  CHECK(rooms[0].width == 4.0);
  CHECK(rooms[0].depth == 3.0);

  CHECK(code_of([] { extract_params("Just prose, no data.", "shape_wall"); }) == ErrorCode::NoJsonBlock);
  CHECK(code_of([] { extract_params("```python\nprint(1)\n```", "manager"); }) == ErrorCode::NoJsonBlock);
  CHECK(code_of([] {
          extract_params("```json\n{}\n```\nand\n```\n{}\n```", "manager");
        }) == ErrorCode::MultipleJsonBlocks);
  try {
    extract_params(msg({{"rooms", {{{"name", "room1"}, {"width", -2}, {"depth", 3}}}}}), "shape_wall");
    FAIL("expected SchemaViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
    CHECK(e.path() == "rooms[0].width");
  }
  try {
    extract_params(msg({{"rooms", {{{"name", "room1"}, {"width", 4}, {"depth", 3}, {"color", "red"}}}}}),
                   "shape_wall");
    FAIL("expected SchemaViolation");
  } catch (const Error& e) {
    CHECK(e.path() == "rooms[0].color");
  }
  CHECK(code_of([] { extract_params("```json\n{\"rooms\": [\n```", "shape_wall"); }) ==
        ErrorCode::SchemaViolation);
}

TEST_CASE("schema validator subset") {
  const json schema = json::parse(R"({
    "type": "object", "required": ["n", "tags"], "additionalProperties": false,
    "properties": {
      "n": {"type": "integer", "minimum": 1, "maximum": 5},
      "x": {"type": "number", "exclusiveMinimum": 0},
      "tags": {"type": "array", "minItems": 1, "maxItems": 2, "items": {"type": "string", "minLength": 2}},
      "kind": {"enum": ["a", "b"]},
      "id": {"type": "string", "pattern": "^room[0-9]+$"}
    }})");
  const auto path_of = [&](const json& j) -> std::string {
    try {
      validate_json(schema, j);
      return "ok";
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SchemaViolation);
      return e.path();
    }
  };
  CHECK(path_of({{"n", 2}, {"tags", {"ab"}}}) == "ok");
  CHECK(path_of({{"n", 2.5}, {"tags", {"ab"}}}) == "n");
  CHECK(path_of({{"n", 9}, {"tags", {"ab"}}}) == "n");
  CHECK(path_of({{"tags", {"ab"}}}) == "n");
  CHECK(path_of({{"n", 1}, {"tags", json::array()}}) == "tags");
  CHECK(path_of({{"n", 1}, {"tags", {"ab", "a"}}}) == "tags[1]");
  CHECK(path_of({{"n", 1}, {"tags", {"ab"}}, {"x", 0}}) == "x");
  CHECK(path_of({{"n", 1}, {"tags", {"ab"}}, {"kind", "c"}}) == "kind");
  CHECK(path_of({{"n", 1}, {"tags", {"ab"}}, {"id", "hall"}}) == "id");
  CHECK(path_of({{"n", 1}, {"tags", {"ab"}}, {"extra", 1}}) == "extra");
  CHECK(code_of([] { builtin_schema("nope"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("structured params sections") {
  StructuredParams p;
  p.set_section("manager", {{"structure_kind", "wall"}, {"scene_name", "test"}});
  p.set_section("allocation", {{"rooms", {{{"name", "room1"}, {"function", "bedroom"}}}}});
  CHECK_FALSE(p.complete());
  CHECK(p.missing() ==
        std::vector<std::string>{"adjacency", "shape", "material", "door_window", "object"});
  CHECK(code_of([&] {
          p.set_section("allocation", {{"rooms", {{{"name", "room1"}, {"function", "x"}}}}});
        }) == ErrorCode::InvalidArgument);
  p.set_section("adjacency", relations({}));
  p.set_section("adjacency", relations({}));
  p.set_section("shape", {{"rooms", {{{"name", "room1"}, {"width", 4}, {"depth", 3}}}}});
  p.set_section("material", {{"materials", json::array()}});
  p.set_section("door_window", {{"openings", json::array()}});
  p.set_section("object", {{"regions", json::array()}});
  CHECK(p.complete());
  const auto copy = StructuredParams::from_json(p.to_json());
  CHECK(copy.to_json() == p.to_json());
  CHECK(copy.rooms.size() == 1);

  json wrong = p.to_json();
  wrong["schema_version"] = 7;
  CHECK(code_of([&] { StructuredParams::from_json(wrong); }) == ErrorCode::ConfigError);
  CHECK(required_sections(StructureKind::column).size() == 6);
  CHECK(code_of([] { section_schema_id("shape", StructureKind::column); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("demo chains") {
  SUBCASE("western guestroom") {
    ScriptedBackend backend = ScriptedBackend::from_json(demo_fixtures("western_guestroom"));
    std::vector<std::string> hooked;
    ChainOptions opts;
    opts.hooks.push_back([&](Role, const std::string& section, const json&) { hooked.push_back(section); });
    const auto r = run_chain("A western guestroom", backend, opts);
    CHECK(r.params.structure_kind == StructureKind::wall);
    CHECK(r.params.complete());
    CHECK(r.turns() == 8);
    CHECK(r.adjacency_attempts == 1);
    CHECK(r.trace == std::vector<Role>{Role::Manager, Role::Allocation, Role::Adjacency, Role::Check,
                                       Role::Shape, Role::Material, Role::Door_Window, Role::Object});
    CHECK(r.params.scene_name == "western guestroom");
    for (const char* s : {"material", "door_window", "object"}) {
      CHECK(std::find(hooked.begin(), hooked.end(), s) != hooked.end());
    }
  }
  SUBCASE("chinese residence") {
    ScriptedBackend backend = ScriptedBackend::from_json(demo_fixtures("chinese_residence"));
    const auto r = run_chain("A chinese residence", backend);
    CHECK(r.params.structure_kind == StructureKind::column);
    CHECK(r.params.complete());
    CHECK(r.turns() == 6);
    CHECK(r.trace == std::vector<Role>{Role::Manager, Role::Allocation, Role::Adjacency, Role::Material,
                                       Role::Door_Window, Role::Object});
  }
  SUBCASE("one failed check adds two turns") {
    json fx = demo_fixtures("western_guestroom");
    fx["Adjacency"].insert(fx["Adjacency"].begin(),
                           msg(relations({{"room1", "room2", "east"}, {"room2", "room1", "east"}})));
    ScriptedBackend backend = ScriptedBackend::from_json(fx);
    const auto r = run_chain("A western guestroom", backend);
    CHECK(r.turns() == 10);
    CHECK(r.adjacency_attempts == 2);
  }
  SUBCASE("missing object fixture") {
    json fx = demo_fixtures("western_guestroom");
    fx.erase("Object");
    ScriptedBackend backend = ScriptedBackend::from_json(fx);
    try {
      run_chain("A western guestroom", backend);
      FAIL("expected MissingFixture");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingFixture);
      CHECK(e.context() == "Object");
    }
  }
  SUBCASE("bad shape answer names the role") {
    json fx = demo_fixtures("western_guestroom");
    fx["Shape"] = json::array({msg({{"rooms", {{{"name", "room1"}, {"width", -2}, {"depth", 3}}}}})});
    ScriptedBackend backend = ScriptedBackend::from_json(fx);
    try {
      run_chain("A western guestroom", backend);
      FAIL("expected SchemaViolation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SchemaViolation);
      CHECK(e.context() == "Shape");
      CHECK(e.path() == "rooms[0].width");
    }
  }
}

TEST_CASE("backends") {
  CHECK(code_of([] { ScriptedBackend::from_json(json::array()); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { ScriptedBackend::from_json({{"Nobody", {"x"}}}); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { ScriptedBackend::load("/nonexistent/fixtures.json"); }) == ErrorCode::IoError);

  const auto dw = system_prompt(Role::Door_Window, StructureKind::wall);
  CHECK(dw.find("step by step") != std::string::npos);
  CHECK(dw.find("door_window_wall") != std::string::npos);
  CHECK(dw.find("```json") != std::string::npos);
  CHECK(system_prompt(Role::Shape, StructureKind::wall).find("step by step") == std::string::npos);

  AgentContext ctx;
  ctx.description = "A tiny cottage";
  ctx.feedback = "- room3 is disconnected from room1";
  const auto user = user_prompt(Role::Adjacency, ctx);
  CHECK(user.find("A tiny cottage") != std::string::npos);
  CHECK(user.find("room3 is disconnected") != std::string::npos);

  RemoteBackendConfig cfg;
  cfg.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  cfg.timeout = std::chrono::seconds(1);
  cfg.retries = 0;
  RemoteBackend remote(cfg);
  CHECK(code_of([&] { remote.respond(Role::Manager, ctx); }) == ErrorCode::BackendUnavailable);
}
