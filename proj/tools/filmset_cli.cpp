#include "filmset/error.hpp"
#include "filmset/pipeline.hpp"
#include "filmset/resources.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace filmset;

namespace {

struct DemoScene {
  std::string name;
  std::string description;
};

const std::vector<DemoScene> kDemoScenes{
    {"western_guestroom",
     "A western guestroom: a Victorian guest bedroom with a four-poster bed and a small sitting "
     "room next door."},
    {"chinese_residence",
     "A chinese residence: a Ming-dynasty timber hall with red lacquered columns and a side "
     "study."},
};

std::vector<std::string> split_formats(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

void print_manifest(const Manifest& m, const fs::path& dir) {
  std::cout << m.scene_name << " (" << to_string(m.structure_kind) << ") -> " << dir.string()
            << "\n";
  for (const auto& f : m.files) {
    std::cout << "  " << f.path << "  " << f.sha256 << "  " << f.bytes << " bytes\n";
  }
}

int report(const Error& e) {
  std::cerr << "error";
  if (!e.context().empty()) {
    std::cerr << " in " << e.context();
  }
  std::cerr << ": " << to_string(e.code());
  if (!e.path().empty()) {
    std::cerr << " at " << e.path();
  }
  std::cerr << ": " << e.detail() << "\n";
  return 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procedural film set generator"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log retrieval and stage progress");

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a scene from a description or params file");
  std::string config_path, input, params_path, backend, fixtures, catalog, embeddings, out_dir,
      formats;
  std::uint64_t seed = 0;
  gen->add_option("--config", config_path, "Pipeline config JSON")->check(CLI::ExistingFile);
  auto* in_opt = gen->add_option("--input", input, "Scene description for the agent chain");
  auto* params_opt = gen->add_option("--params", params_path, "Prebuilt structured params (skips agents)");
  in_opt->excludes(params_opt);
  gen->add_option("--backend", backend, "Agent backend")->check(CLI::IsMember({"scripted", "remote"}));
  gen->add_option("--fixtures", fixtures, "Scripted backend fixtures JSON");
  gen->add_option("--catalog", catalog, "Asset catalog JSON (default: built-in demo catalog)");
  gen->add_option("--embeddings", embeddings, "Precomputed embedding sidecar");
  gen->add_option("--out", out_dir, "Output directory");
  gen->add_option("--formats", formats, "Comma-separated subset of json,obj,svg");
  auto* seed_opt = gen->add_option("--seed", seed, "Reserved random seed");

  // validate-params
  auto* val = app.add_subcommand("validate-params", "Check a structured params file");
  std::string val_path;
  val->add_option("file", val_path, "Params JSON")->required();

  // index-catalog
  auto* idx = app.add_subcommand("index-catalog", "Precompute catalog embeddings");
  std::string idx_catalog, idx_out, idx_config;
  idx->add_option("--catalog", idx_catalog, "Asset catalog JSON")->required();
  idx->add_option("--out", idx_out, "Sidecar output file")->required();
  idx->add_option("--config", idx_config, "Pipeline config selecting the embedder")
      ->check(CLI::ExistingFile);

  // demo
  auto* demo = app.add_subcommand("demo", "Run the built-in demo scenes");
  std::string demo_scene = "all";
  std::string demo_out = "demo_out";
  demo->add_option("--scene", demo_scene, "western_guestroom, chinese_residence or all")
      ->check(CLI::IsMember({"all", "western_guestroom", "chinese_residence"}));
  demo->add_option("--out", demo_out, "Output directory");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (*gen) {
      PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : PipelineConfig::load(config_path);
      if (!backend.empty()) {
        cfg.backend = backend == "remote" ? BackendKind::remote : BackendKind::scripted;
      }
      if (!fixtures.empty()) {
        cfg.fixtures_path = fixtures;
      }
      if (!catalog.empty()) {
        cfg.catalog_path = catalog;
      }
      if (!embeddings.empty()) {
        cfg.embeddings_path = embeddings;
      }
      if (!out_dir.empty()) {
        cfg.output_dir = out_dir;
      }
      if (!formats.empty()) {
        const auto list = split_formats(formats);
        cfg.formats = {list.begin(), list.end()};
      }
      if (*seed_opt) {
        cfg.seed = seed;
      }
      GenerateInput gi;
      gi.params_path = params_path;
      gi.description = input;
      if (params_path.empty() && input.empty()) {
        std::cerr << "generate needs --input or --params\n";
        return 2;
      }
      print_manifest(generate(cfg, gi), cfg.output_dir);
    } else if (*val) {
      const auto params = StructuredParams::load(val_path);
      std::cout << "ok: " << params.scene_name << " (" << to_string(params.structure_kind)
                << "), sections:";
      for (const auto& [name, body] : params.sections) {
        std::cout << " " << name;
      }
      std::cout << "\n";
    } else if (*idx) {
      PipelineConfig cfg = idx_config.empty() ? PipelineConfig{} : PipelineConfig::load(idx_config);
      const Catalog cat = Catalog::load(idx_catalog);
      const auto embedder = make_embedder(cfg);
      const auto index = EmbeddingIndex::build(cat.records(), *embedder);
      std::ofstream out(idx_out, std::ios::binary);
      out << canonical_dump(index.sidecar(embedder->version()).to_json());
      if (!out) {
        throw Error(ErrorCode::IoError, "cannot write '" + idx_out + "'");
      }
      std::cout << "indexed " << index.size() << " assets (dimension " << index.dimension()
                << ") -> " << idx_out << "\n";
    } else if (*demo) {
      for (const auto& scene : kDemoScenes) {
        if (demo_scene != "all" && demo_scene != scene.name) {
          continue;
        }
        PipelineConfig cfg;
        cfg.output_dir = demo_scene == "all" ? fs::path(demo_out) / scene.name : fs::path(demo_out);
        ScriptedBackend scripted =
            ScriptedBackend::from_json(nlohmann::json::parse(resources::demo_fixtures(scene.name)));
        GenerateInput gi;
        gi.description = scene.description;
        print_manifest(generate(cfg, gi, &scripted), cfg.output_dir);
      }
    }
  } catch (const Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
