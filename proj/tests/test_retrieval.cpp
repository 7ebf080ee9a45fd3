#include "oracles.hpp"

#include "filmset/error.hpp"
#include "filmset/resources.hpp"
#include "filmset/retrieval.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace filmset;

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

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ 0x66696c6d73657431ull;
  for (const unsigned char c : s) {
    h = (h ^ c) * 0x100000001b3ull;
  }
  return h;
}

std::vector<double> bag(const std::vector<std::string>& tokens) {
  std::vector<double> v(256, 0.0);
  for (const auto& t : tokens) {
    v[fnv1a(t) % 256] += 1;
  }
  return v;
}

AssetRecord record(const std::string& id, AssetCategory cat, const std::string& label,
                   const std::string& style = {}, const std::string& era = {}) {
  AssetRecord r;
  r.id = id;
  r.category = cat;
  r.annotations.category_label = label;
  r.annotations.style = style;
  r.annotations.era = era;
  return r;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

} // namespace

TEST_CASE("mock embedder") {
  const HashingEmbedder e;
  CHECK(HashingEmbedder::tokenize("Red-brick, WALL!") == std::vector<std::string>{"red", "brick", "wall"});
  for (const char* t : {"red", "brick", "wall", "armchair"}) {
    CHECK(HashingEmbedder::bucket(t) == fnv1a(t) % 256);
  }
  CHECK(e.embed("red brick") == e.embed("brick red"));
  CHECK(e.embed("red brick").norm() == doctest::Approx(1.0));

  // Distinct buckets make the cosine a pure token-overlap count.
  std::set<std::uint64_t> buckets{fnv1a("red") % 256, fnv1a("brick") % 256, fnv1a("wall") % 256};
  REQUIRE(buckets.size() == 3);
  const auto a = bag({"red", "brick"});
  const auto b = bag({"red", "brick", "wall"});
  const auto ranked = oracle::brute_force_rank(a, {{"x", b}});
  CHECK(ranked[0].score == doctest::Approx(2.0 / std::sqrt(6.0)));
  CHECK(e.embed("red brick").dot(e.embed("red brick wall")) == doctest::Approx(0.8165).epsilon(1e-4));
  CHECK(code_of([&] { e.embed(""); }) == ErrorCode::EmptyText);
  CHECK(code_of([&] { e.embed(" -- "); }) == ErrorCode::EmptyText);
}

TEST_CASE("record descriptions") {
  AssetRecord r = record("chair", AssetCategory::object, "armchair", "art deco", "1920s");
  CHECK(r.description() == "armchair art deco 1920s");
  r.annotations.cultural_origin = "french";
  r.annotations.tags = {"velvet", "green"};
  CHECK(r.description() == "armchair art deco french 1920s velvet green");
}

TEST_CASE("index partitions and search") {
  const HashingEmbedder e;
  const auto index = EmbeddingIndex::build(
      {record("oak_door", AssetCategory::door, "door", "oak panel"),
       record("chair", AssetCategory::object, "armchair", "art deco", "1920s"),
       record("table", AssetCategory::object, "table", "oak"),
       record("sofa", AssetCategory::object, "sofa", "leather")},
      e);
  CHECK(index.size() == 4);
  const auto& doors = index.partition(AssetCategory::door);
  REQUIRE(doors.size() == 1);
  CHECK(doors[0].id == "oak_door");
  for (const auto& entry : index.partition(AssetCategory::object)) {
    CHECK(entry.id != "oak_door");
    CHECK(entry.vector.norm() == doctest::Approx(1.0));
  }
  const auto hits = search(index, e, "armchair art deco 1920s", AssetCategory::object, 2);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].id == "chair");
  CHECK(hits[0].score == doctest::Approx(1.0));
  CHECK(search(index, e, "table", AssetCategory::object, 50).size() == 3);
  CHECK(code_of([&] { search(index, e, "table", AssetCategory::material, 1); }) == ErrorCode::EmptyCategory);
  CHECK(code_of([&] { search(index, e, "table", AssetCategory::object, 0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { index.search(Eigen::VectorXd::Ones(3), AssetCategory::object, 1); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("ties break by id") {
  const HashingEmbedder e;
  const auto index = EmbeddingIndex::build({record("b_chair", AssetCategory::object, "chair"),
                                            record("a_chair", AssetCategory::object, "chair"),
                                            record("c_chair", AssetCategory::object, "chair")},
                                           e);
  const auto hits = search(index, e, "chair", AssetCategory::object, 3);
  CHECK(hits[0].id == "a_chair");
  CHECK(hits[1].id == "b_chair");
  CHECK(hits[2].id == "c_chair");
}

TEST_CASE("search equals brute force on random catalogs") {
  const std::vector<std::string> vocab{"oak",  "pine",  "red",   "lacquer", "chair", "table", "bed",
                                       "ming", "qing",  "art",   "deco",    "sofa",  "lamp",  "stone",
                                       "grey", "white", "brass", "velvet",  "1920s", "modern"};
  std::mt19937_64 rng(99);
  const HashingEmbedder e;
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> count(1, 60);
    std::uniform_int_distribution<int> word(0, static_cast<int>(vocab.size()) - 1);
    std::uniform_int_distribution<int> len(1, 4);
    std::vector<AssetRecord> records;
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
      std::string label;
      for (int w = len(rng); w > 0; --w) {
        label += (label.empty() ? "" : " ") + vocab[static_cast<std::size_t>(word(rng))];
      }
      records.push_back(record("asset_" + std::to_string(k), AssetCategory::object, label));
    }
    const auto index = EmbeddingIndex::build(records, e);
    std::vector<std::pair<std::string, std::vector<double>>> candidates;
    for (const auto& r : records) {
      candidates.emplace_back(r.id, bag(HashingEmbedder::tokenize(r.description())));
    }
    const std::string query = vocab[static_cast<std::size_t>(word(rng))] + " " +
                              vocab[static_cast<std::size_t>(word(rng))];
    const auto want = oracle::brute_force_rank(bag(HashingEmbedder::tokenize(query)), candidates);
    const auto got = search(index, e, query, AssetCategory::object, records.size());
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CAPTURE(trial);
      CAPTURE(k);
      CHECK(got[k].id == want[k].id);
      CHECK(got[k].score == doctest::Approx(want[k].score).epsilon(1e-12));
    }
  }
}

TEST_CASE("catalog parsing") {
  const auto demo = Catalog::parse(resources::demo_catalog());
  CHECK(demo.records().size() == 12);
  CHECK(demo.at("sash_window").category == AssetCategory::window);
  const Mesh proxy = demo.load_mesh(demo.at("four_poster_bed"));
  CHECK((proxy.bounds().sizes() - Vec3(1.8, 2.2, 2.1)).norm() < 1e-12);
  CHECK(proxy.bounds().min().z() == 0.0);

  try {
    Catalog::parse(R"([{"id":"x","category":"object","annotations":{"category_label":"chair"},
                        "native_size":[1,-1,1]}])");
    FAIL("expected CatalogFormat");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::CatalogFormat);
    CHECK(err.path().find("native_size") != std::string::npos);
  }
  CHECK(code_of([] { Catalog::parse("{}"); }) == ErrorCode::CatalogFormat);
  CHECK(code_of([] {
          Catalog::parse(R"([{"id":"x","category":"material","annotations":{"category_label":"a"}},
                             {"id":"x","category":"material","annotations":{"category_label":"b"}}])");
        }) == ErrorCode::CatalogFormat);
  CHECK(code_of([] { Catalog::load("/nonexistent/catalog.json"); }) == ErrorCode::IoError);
}

TEST_CASE("obj mesh loading") {
  const Mesh quad = read_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1 2/2 3/3 4/4\n");
  CHECK(quad.vertices.size() == 4);
  CHECK(quad.faces.size() == 2);
  CHECK(code_of([] { read_obj("v 0 0 0\nf 1 2 3\n"); }) == ErrorCode::CatalogFormat);

  const auto dir = std::filesystem::temp_directory_path() / "filmset_obj_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "tri.obj") << "v 0 0 0\nv 2 0 0\nv 0 4 1\nf 1 2 3\n";
  AssetRecord r = record("tri", AssetCategory::object, "tri");
  r.mesh_path = "tri.obj";
  r.native_size = {1, 1, 1};
  const Catalog cat({r}, dir);
  const Box3 b = cat.load_mesh(r).bounds();
  CHECK((b.sizes() - Vec3(1, 1, 1)).norm() < 1e-12);
  CHECK(b.center().head<2>().norm() < 1e-12);
  CHECK(b.min().z() == 0.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sidecar reuse") {
  const HashingEmbedder e;
  const std::vector<AssetRecord> records{record("a", AssetCategory::object, "chair"),
                                         record("b", AssetCategory::object, "table")};
  const auto index = EmbeddingIndex::build(records, e);
  auto sidecar = index.sidecar(e.version());
  CHECK(sidecar.embeddings.size() == 2);
  CHECK(to_std(index.partition(AssetCategory::object)[0].vector) == sidecar.embeddings.at("a"));
  const auto reused = EmbeddingIndex::build(records, e, &sidecar);
  CHECK(search(reused, e, "chair", AssetCategory::object, 1)[0].id == "a");
  sidecar.dimension = 3;
  sidecar.embeddings["a"] = {1, 0, 0};
  CHECK(code_of([&] { EmbeddingIndex::build(records, e, &sidecar); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("remote embedder reports an unreachable service") {
  RemoteEmbedderConfig cfg;
  cfg.endpoint = "http://127.0.0.1:9/embed";
  cfg.timeout = std::chrono::seconds(1);
  cfg.retries = 0;
  const RemoteEmbedder remote(cfg);
  CHECK(code_of([&] { remote.embed("chair"); }) == ErrorCode::BackendUnavailable);
  CHECK(code_of([&] { remote.embed(""); }) == ErrorCode::EmptyText);
}
