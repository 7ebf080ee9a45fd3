#pragma once

// End-to-end driver: structured parameters (from the agent chain or a file)
// through floorplan, materials, openings and layout, then export.

#include "filmset/agents.hpp"
#include "filmset/backends.hpp"
#include "filmset/export.hpp"
#include "filmset/params.hpp"
#include "filmset/retrieval.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace filmset {

struct StructureDefaults {
  double wall_thickness = 0.2;
  double wall_height = 3.0;
  int arc_segments = 16;
  double column_margin = 1.0;
};

enum class BackendKind { scripted, remote };
enum class EmbedderKind { mock, remote };

struct PipelineConfig {
  /// Empty selects the built-in demo catalog.
  std::filesystem::path catalog_path;
  /// Optional precomputed embedding sidecar.
  std::filesystem::path embeddings_path;
  BackendKind backend = BackendKind::scripted;
  std::filesystem::path fixtures_path;
  RemoteBackendConfig remote;
  EmbedderKind embedder = EmbedderKind::mock;
  RemoteEmbedderConfig remote_embedder;
  StructureDefaults structure;
  PlacementConfig placement;
  int max_retries = 3;
  std::filesystem::path output_dir = "out";
  /// Reserved; every stage is deterministic.
  std::uint64_t seed = 0;
  std::set<std::string> formats{"json", "obj", "svg"};

  /// Throws ConfigError.
  void validate() const;
  /// Relative paths are resolved against `base_dir`. Throws ConfigError.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);
};

inline constexpr std::array<std::string_view, 4> kStageNames{"floorplan", "materials", "openings",
                                                            "layout"};

struct BuiltScene {
  SceneGraph graph;
  Drawing drawing;
  std::vector<Placement> placements;
  std::map<std::string, double> uv_scales; ///< material id -> uv scale
  std::vector<std::string> stage_log;      ///< stages in the order they completed
};

/// Runs the four procedural stages. Errors carry the stage name as context
/// and the parameter path that caused them.
BuiltScene build_scene(const StructuredParams& params, const Catalog& catalog,
                       const EmbeddingIndex& index, const TextEmbedder& embedder,
                       const PipelineConfig& config);

struct ManifestEntry {
  std::string path; ///< relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct Manifest {
  std::string scene_name;
  StructureKind structure_kind = StructureKind::wall;
  std::vector<std::string> stages;
  std::vector<ManifestEntry> files;

  nlohmann::json to_json() const;
};

inline constexpr std::string_view kManifestFile = "manifest.json";

/// Exactly one of the fields is used, checked in the order params,
/// params_path, description.
struct GenerateInput {
  std::optional<StructuredParams> params;
  std::filesystem::path params_path;
  std::string description;
};

std::string sha256_hex(std::string_view bytes);

Catalog load_catalog(const PipelineConfig& config);
std::unique_ptr<TextEmbedder> make_embedder(const PipelineConfig& config);
std::unique_ptr<AgentBackend> make_backend(const PipelineConfig& config);

/// In-memory artifacts keyed by file name, in write order.
std::vector<std::pair<std::string, std::string>> render_outputs(const BuiltScene& scene,
                                                                const StructuredParams& params,
                                                                const std::set<std::string>& formats);

/// Full run. Files are written to temporaries and renamed into place; on
/// failure nothing from this run is left behind. `backend` overrides the
/// configured one. Throws Error.
Manifest generate(const PipelineConfig& config, const GenerateInput& input,
                  AgentBackend* backend = nullptr);

} // namespace filmset
