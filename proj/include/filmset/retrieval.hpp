#pragma once

// Asset catalog, text embedders and the exhaustive cosine index.

#include "filmset/geometry.hpp"
#include "filmset/scene.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace filmset {

enum class AssetCategory { object, door, window, material };

std::string_view to_string(AssetCategory c);
AssetCategory asset_category_from_string(std::string_view text);

enum class Mount { floor, wall };

struct Annotations {
  std::string category_label;
  std::string style;
  std::string cultural_origin;
  std::string era;
  std::vector<std::string> tags;
};

struct AssetRecord {
  std::string id;
  AssetCategory category = AssetCategory::object;
  Annotations annotations;
  Vec3 native_size = Vec3::Ones(); ///< x width, y depth, z height (meters)
  std::string mesh_path;           ///< relative to the catalog root; empty = box proxy
  double uv_scale = 1.0;           ///< materials only
  Mount mount = Mount::floor;      ///< objects only
  std::optional<Eigen::VectorXd> embedding;

  /// Annotation fields joined by single spaces in the order category_label,
  /// style, cultural_origin, era, tags. Empty fields are skipped.
  std::string description() const;
  bool geometric() const { return category != AssetCategory::material; }
};

nlohmann::json to_json(const AssetRecord& record);
/// Throws CatalogFormat with the JSON path of the offending field.
AssetRecord asset_from_json(const nlohmann::json& j, const std::string& path = "$");

class Catalog {
public:
  Catalog() = default;
  Catalog(std::vector<AssetRecord> records, std::filesystem::path root = {});

  /// Reads a JSON array of asset records. Throws IoError / CatalogFormat.
  static Catalog load(const std::filesystem::path& path);
  static Catalog parse(std::string_view json_text, std::filesystem::path root = {});

  const std::vector<AssetRecord>& records() const noexcept { return records_; }
  const std::filesystem::path& root() const noexcept { return root_; }
  const AssetRecord* find(std::string_view id) const;
  const AssetRecord& at(std::string_view id) const;

  /// Mesh in the asset's native frame: centered in x/y, base at z = 0 and
  /// scaled to `native_size`. Front faces -y.
  Mesh load_mesh(const AssetRecord& record) const;

private:
  std::vector<AssetRecord> records_;
  std::filesystem::path root_;
};

/// Minimal Wavefront OBJ reader (v and f records, polygons fan-triangulated).
Mesh read_obj(std::string_view text);

class TextEmbedder {
public:
  virtual ~TextEmbedder() = default;
  /// Unit-norm embedding. Throws EmptyText, BackendUnavailable.
  virtual Eigen::VectorXd embed(std::string_view text) const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::string version() const = 0;
};

/// Offline bag-of-tokens embedder: lowercase, split on non-alphanumerics,
/// hash each token into 256 buckets with a fixed seeded FNV-1a, L2-normalize.
class HashingEmbedder final : public TextEmbedder {
public:
  static constexpr std::size_t kDimension = 256;

  static std::vector<std::string> tokenize(std::string_view text);
  static std::size_t bucket(std::string_view token);

  Eigen::VectorXd embed(std::string_view text) const override;
  std::size_t dimension() const override { return kDimension; }
  std::string version() const override { return "hashing-fnv1a-256-v1"; }
};

struct RemoteEmbedderConfig {
  std::string endpoint; ///< e.g. http://localhost:8080/embed
  std::string model;
  std::size_t dimension = 768;
  std::string api_key_env; ///< name of the environment variable; may be empty
  std::chrono::seconds timeout{60};
  int retries = 2;
};

/// Sentence-embedding service client. POSTs {"model", "input"} and expects
/// {"embedding": [...]} (or OpenAI-style {"data": [{"embedding": [...]}]}).
class RemoteEmbedder final : public TextEmbedder {
public:
  explicit RemoteEmbedder(RemoteEmbedderConfig config);

  Eigen::VectorXd embed(std::string_view text) const override;
  std::size_t dimension() const override { return config_.dimension; }
  std::string version() const override { return "remote:" + config_.model; }

private:
  RemoteEmbedderConfig config_;
};

struct SearchHit {
  std::string id;
  double score = 0.0;
  bool operator==(const SearchHit&) const = default;
};

/// Precomputed embeddings on disk: {embedder_version, dimension, embeddings: {id: [...]}}.
struct EmbeddingSidecar {
  std::string embedder_version;
  std::size_t dimension = 0;
  std::map<std::string, std::vector<double>> embeddings;

  static EmbeddingSidecar load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

class EmbeddingIndex {
public:
  struct Entry {
    std::string id;
    Eigen::VectorXd vector;
  };

  /// Embeds every record description (or reuses record/sidecar vectors when
  /// the embedder version matches). Throws DimensionMismatch.
  static EmbeddingIndex build(const std::vector<AssetRecord>& catalog, const TextEmbedder& embedder,
                              const EmbeddingSidecar* sidecar = nullptr);

  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<Entry>& partition(AssetCategory category) const;
  std::size_t size() const;

  /// Exhaustive cosine ranking within one category partition: scores
  /// descending, ties (scores equal at 1e-9 resolution) by ascending id.
  /// Throws EmptyCategory, DimensionMismatch, InvalidArgument (k == 0).
  std::vector<SearchHit> search(const Eigen::VectorXd& query, AssetCategory category,
                                std::size_t k) const;

  EmbeddingSidecar sidecar(const std::string& embedder_version) const;

private:
  std::size_t dimension_ = 0;
  std::map<AssetCategory, std::vector<Entry>> partitions_;
};

/// Embeds `query` and searches. Throws EmptyText plus the index errors.
std::vector<SearchHit> search(const EmbeddingIndex& index, const TextEmbedder& embedder,
                              std::string_view query, AssetCategory category, std::size_t k);

} // namespace filmset
