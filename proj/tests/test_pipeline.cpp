#include "oracles.hpp"

#include "filmset/error.hpp"
#include "filmset/pipeline.hpp"
#include "filmset/resources.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace filmset;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("filmset_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Manifest run_demo(const std::string& scene, const fs::path& out) {
  PipelineConfig cfg;
  cfg.output_dir = out;
  ScriptedBackend backend = ScriptedBackend::from_json(json::parse(resources::demo_fixtures(scene)));
  GenerateInput in;
  in.description = "demo " + scene;
  return generate(cfg, in, &backend);
}

} // namespace

TEST_CASE("demo outputs are complete and deterministic") {
  for (const std::string scene : {"western_guestroom", "chinese_residence"}) {
    CAPTURE(scene);
    TempDir a("det_a_" + scene), b("det_b_" + scene);
    const auto m1 = run_demo(scene, a.path);
    const auto m2 = run_demo(scene, b.path);
    CHECK(m1.stages == std::vector<std::string>{"floorplan", "materials", "openings", "layout"});
    std::set<std::string> names;
    for (const auto& f : m1.files) {
      names.insert(f.path);
      CHECK(sha256_hex(slurp(a.path / f.path)) == f.sha256);
      CHECK(fs::file_size(a.path / f.path) == f.bytes);
    }
    CHECK(names == std::set<std::string>{"params.json", "scene.json", "scene.obj", "scene.mtl",
                                         "floorplan.svg"});
    REQUIRE(m1.files.size() == m2.files.size());
    for (std::size_t k = 0; k < m1.files.size(); ++k) {
      CHECK(m1.files[k].sha256 == m2.files[k].sha256);
    }
    CHECK(slurp(a.path / "manifest.json") == slurp(b.path / "manifest.json"));
    for (const auto& entry : fs::directory_iterator(a.path)) {
      CHECK(entry.path().filename().string().front() != '.');
    }
    CHECK(oracle::xml_error(slurp(a.path / "floorplan.svg")).empty());
    CHECK(oracle::parse_obj(slurp(a.path / "scene.obj")).indices_valid);
  }
}

TEST_CASE("params file reproduces the chain run") {
  TempDir chain("chain"), replay("replay");
  run_demo("western_guestroom", chain.path);
  PipelineConfig cfg;
  cfg.output_dir = replay.path;
  GenerateInput in;
  in.params_path = chain.path / "params.json";
  generate(cfg, in);
  for (const char* f : {"scene.json", "scene.obj", "scene.mtl", "floorplan.svg", "params.json"}) {
    CAPTURE(f);
    CHECK(slurp(chain.path / f) == slurp(replay.path / f));
  }
}

TEST_CASE("missing catalog is a config error and writes nothing") {
  TempDir out("nocatalog");
  PipelineConfig cfg;
  cfg.output_dir = out.path;
  cfg.catalog_path = "/nonexistent/catalog.json";
  GenerateInput in;
  in.params_path = "/nonexistent/params.json";
  try {
    generate(cfg, in);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
  CHECK_FALSE(fs::exists(out.path));
}

TEST_CASE("format selection") {
  TempDir out("formats");
  PipelineConfig cfg;
  cfg.output_dir = out.path;
  cfg.formats = {"svg"};
  ScriptedBackend backend =
      ScriptedBackend::from_json(json::parse(resources::demo_fixtures("chinese_residence")));
  GenerateInput in;
  in.description = "chinese residence";
  const auto m = generate(cfg, in, &backend);
  CHECK(m.files.size() == 2);
  CHECK(fs::exists(out.path / "floorplan.svg"));
  CHECK_FALSE(fs::exists(out.path / "scene.obj"));
  cfg.formats = {"svg", "png"};
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
}

TEST_CASE("pipeline config parsing") {
  const auto cfg = PipelineConfig::from_json(
      json::parse(R"({"catalog": "cat.json", "backend": {"kind": "remote", "model": "m", "timeout_s": 5},
                      "structure": {"wall_height": 3.5}, "placement": {"lambda_near": 0.4},
                      "formats": ["json"], "seed": 3})"),
      "/base");
  CHECK(cfg.catalog_path == fs::path("/base/cat.json"));
  CHECK(cfg.backend == BackendKind::remote);
  CHECK(cfg.remote.model == "m");
  CHECK(cfg.remote.timeout == std::chrono::seconds(5));
  CHECK(cfg.structure.wall_height == 3.5);
  CHECK(cfg.placement.lambda_near == 0.4);
  CHECK(cfg.formats == std::set<std::string>{"json"});
  CHECK(cfg.seed == 3);
  for (const char* bad : {R"({"colour": 1})", R"({"backend": {"kind": "magic"}})",
                          R"({"structure": {"wall_height": "tall"}})", R"({"placement": {"extra": 1}})"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(bad)), Error);
  }
  PipelineConfig thin;
  thin.structure.wall_thickness = 2.0;
  CHECK_THROWS_AS(thin.validate(), Error);
}

TEST_CASE("stage errors name the stage and the parameter") {
  ScriptedBackend backend =
      ScriptedBackend::from_json(json::parse(resources::demo_fixtures("western_guestroom")));
  auto params = run_chain("western guestroom", backend).params;
  auto dw = params.sections.at("door_window");
  dw["openings"][0]["width"] = 40.0;
  StructuredParams broken;
  for (const auto& name : kSectionNames) {
    if (params.has(name)) {
      broken.set_section(std::string(name), name == "door_window" ? dw : params.sections.at(std::string(name)));
    }
  }
  const Catalog catalog = load_catalog(PipelineConfig{});
  const HashingEmbedder embedder;
  const auto index = EmbeddingIndex::build(catalog.records(), embedder);
  try {
    build_scene(broken, catalog, index, embedder, PipelineConfig{});
    FAIL("expected OpeningTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OpeningTooLarge);
    CHECK(e.context() == "openings");
    CHECK(e.path() == "sections.door_window.openings[0]");
  }
}

TEST_CASE("built demo scene") {
  ScriptedBackend backend =
      ScriptedBackend::from_json(json::parse(resources::demo_fixtures("western_guestroom")));
  const auto params = run_chain("western guestroom", backend).params;
  const Catalog catalog = load_catalog(PipelineConfig{});
  const HashingEmbedder embedder;
  const auto index = EmbeddingIndex::build(catalog.records(), embedder);
  const auto scene = build_scene(params, catalog, index, embedder, PipelineConfig{});
  CHECK_NOTHROW(scene.graph.validate());
  for (const char* id : {"room1", "room1_floor", "room1_id1", "room2_id3", "arc1", "outer", "door_1",
                         "window_1", "object_1"}) {
    const std::string name = id;
    CAPTURE(name);
    CHECK(scene.graph.find(id) != nullptr);
  }
  CHECK(scene.graph.find("room1_floor")->material_ref == "oak_parquet");
  CHECK(scene.uv_scales.at("oak_parquet") == 0.5);
  const auto overlaps = overlapping_pairs(scene.placements);
  CHECK(overlaps.empty());
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
