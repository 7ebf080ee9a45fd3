#include "filmset/retrieval.hpp"

#include "filmset/error.hpp"
#include "internal/http.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace filmset {

std::string_view to_string(AssetCategory c) {
  switch (c) {
  case AssetCategory::object: return "object";
  case AssetCategory::door: return "door";
  case AssetCategory::window: return "window";
  case AssetCategory::material: return "material";
  }
  return "";
}

AssetCategory asset_category_from_string(std::string_view text) {
  if (text == "object") return AssetCategory::object;
  if (text == "door") return AssetCategory::door;
  if (text == "window") return AssetCategory::window;
  if (text == "material") return AssetCategory::material;
  throw Error(ErrorCode::InvalidArgument, "unknown asset category '" + std::string(text) + "'");
}

std::string AssetRecord::description() const {
  std::string out;
  const auto add = [&out](const std::string& field) {
    if (field.empty()) {
      return;
    }
    if (!out.empty()) {
      out += ' ';
    }
    out += field;
  };
  add(annotations.category_label);
  add(annotations.style);
  add(annotations.cultural_origin);
  add(annotations.era);
  for (const auto& tag : annotations.tags) {
    add(tag);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const AssetRecord& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["category"] = to_string(r.category);
  j["annotations"] = {{"category_label", r.annotations.category_label},
                      {"style", r.annotations.style},
                      {"cultural_origin", r.annotations.cultural_origin},
                      {"era", r.annotations.era},
                      {"tags", r.annotations.tags}};
  if (r.geometric()) {
    j["native_size"] = {r.native_size.x(), r.native_size.y(), r.native_size.z()};
    j["mesh_path"] = r.mesh_path;
  } else {
    j["uv_scale"] = r.uv_scale;
  }
  if (r.category == AssetCategory::object) {
    j["mount"] = r.mount == Mount::wall ? "wall" : "floor";
  }
  if (r.embedding) {
    j["embedding"] = std::vector<double>(r.embedding->data(),
                                         r.embedding->data() + r.embedding->size());
  }
  return j;
}

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::CatalogFormat, what, path);
}

std::string string_field(const nlohmann::json& j, const char* key, const std::string& path,
                         bool required) {
  if (!j.contains(key)) {
    if (required) {
      bad_field(path + "." + key, "missing");
    }
    return {};
  }
  if (!j.at(key).is_string()) {
    bad_field(path + "." + key, "expected a string");
  }
  return j.at(key).get<std::string>();
}

} // namespace

AssetRecord asset_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) {
    bad_field(path, "expected an object");
  }
  static const std::set<std::string> known{"id",        "category", "annotations", "native_size",
                                           "mesh_path", "uv_scale", "mount",       "embedding"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      bad_field(path + "." + key, "unknown field");
    }
  }
  AssetRecord r;
  r.id = string_field(j, "id", path, true);
  if (r.id.empty()) {
    bad_field(path + ".id", "must not be empty");
  }
  try {
    r.category = asset_category_from_string(string_field(j, "category", path, true));
  } catch (const Error& e) {
    bad_field(path + ".category", e.detail());
  }
  if (j.contains("annotations")) {
    const auto& a = j.at("annotations");
    const std::string apath = path + ".annotations";
    if (!a.is_object()) {
      bad_field(apath, "expected an object");
    }
    r.annotations.category_label = string_field(a, "category_label", apath, false);
    r.annotations.style = string_field(a, "style", apath, false);
    r.annotations.cultural_origin = string_field(a, "cultural_origin", apath, false);
    r.annotations.era = string_field(a, "era", apath, false);
    if (a.contains("tags")) {
      if (!a.at("tags").is_array()) {
        bad_field(apath + ".tags", "expected an array of strings");
      }
      for (const auto& t : a.at("tags")) {
        if (!t.is_string()) {
          bad_field(apath + ".tags", "expected an array of strings");
        }
        r.annotations.tags.push_back(t.get<std::string>());
      }
    }
  }
  if (r.geometric()) {
    const auto& s = j.contains("native_size") ? j.at("native_size") : nlohmann::json();
    if (!s.is_array() || s.size() != 3 ||
        !std::all_of(s.begin(), s.end(), [](const auto& v) { return v.is_number(); })) {
      bad_field(path + ".native_size", "expected [x, y, z] in meters");
    }
    r.native_size = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
    if ((r.native_size.array() <= 0.0).any()) {
      bad_field(path + ".native_size", "components must be > 0");
    }
    r.mesh_path = string_field(j, "mesh_path", path, false);
  }
  if (j.contains("uv_scale")) {
    if (!j.at("uv_scale").is_number() || !(j.at("uv_scale").get<double>() > 0)) {
      bad_field(path + ".uv_scale", "must be a number > 0");
    }
    r.uv_scale = j.at("uv_scale").get<double>();
  }
  if (j.contains("mount")) {
    const auto mount = string_field(j, "mount", path, false);
    if (mount != "floor" && mount != "wall") {
      bad_field(path + ".mount", "must be 'floor' or 'wall'");
    }
    r.mount = mount == "wall" ? Mount::wall : Mount::floor;
  }
  if (j.contains("embedding")) {
    const auto& e = j.at("embedding");
    if (!e.is_array() || e.empty()) {
      bad_field(path + ".embedding", "expected a non-empty number array");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(e.size()));
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (!e[k].is_number()) {
        bad_field(path + ".embedding", "expected a non-empty number array");
      }
      v[static_cast<Eigen::Index>(k)] = e[k].get<double>();
    }
    if (std::abs(v.norm() - 1.0) > 1e-6) {
      bad_field(path + ".embedding", "must have unit L2 norm");
    }
    r.embedding = std::move(v);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Catalog

Catalog::Catalog(std::vector<AssetRecord> records, std::filesystem::path root)
    : records_(std::move(records)), root_(std::move(root)) {
  std::set<std::string> ids;
  for (const auto& r : records_) {
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCode::CatalogFormat, "duplicate asset id '" + r.id + "'");
    }
  }
}

Catalog Catalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot read catalog '" + path.string() + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.parent_path());
}

Catalog Catalog::parse(std::string_view json_text, std::filesystem::path root) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::CatalogFormat, e.what());
  }
  if (!j.is_array()) {
    throw Error(ErrorCode::CatalogFormat, "catalog must be a JSON array", "$");
  }
  std::vector<AssetRecord> records;
  for (std::size_t k = 0; k < j.size(); ++k) {
    records.push_back(asset_from_json(j[k], "$[" + std::to_string(k) + "]"));
  }
  return Catalog(std::move(records), std::move(root));
}

const AssetRecord* Catalog::find(std::string_view id) const {
  for (const auto& r : records_) {
    if (r.id == id) {
      return &r;
    }
  }
  return nullptr;
}

const AssetRecord& Catalog::at(std::string_view id) const {
  if (const auto* r = find(id)) {
    return *r;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown asset '" + std::string(id) + "'");
}

Mesh read_obj(std::string_view text) {
  Mesh mesh;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      double x = 0, y = 0, z = 0;
      ls >> x >> y >> z;
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<long> idx;
      std::string token;
      while (ls >> token) {
        const long v = std::stol(token.substr(0, token.find('/')));
        idx.push_back(v > 0 ? v - 1 : static_cast<long>(mesh.vertices.size()) + v);
      }
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        mesh.faces.push_back({static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[k]),
                              static_cast<std::uint32_t>(idx[k + 1])});
      }
    }
  }
  if (!mesh.indices_valid()) {
    throw Error(ErrorCode::CatalogFormat, "OBJ face index out of range");
  }
  return mesh;
}

Mesh Catalog::load_mesh(const AssetRecord& record) const {
  if (!record.geometric()) {
    throw Error(ErrorCode::InvalidArgument, "'" + record.id + "' is a material");
  }
  if (record.mesh_path.empty()) {
    return make_box(record.native_size);
  }
  const auto path = root_ / record.mesh_path;
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot read mesh '" + path.string() + "'", record.id);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  Mesh mesh = read_obj(buffer.str());
  const Box3 box = mesh.bounds();
  const Vec3 extent = box.sizes();
  if (box.isEmpty() || (extent.array() <= 1e-12).any()) {
    throw Error(ErrorCode::DegenerateAsset, "mesh has a zero-extent bounding box", record.id);
  }
  const Vec3 pivot(box.center().x(), box.center().y(), box.min().z());
  const Vec3 factors = record.native_size.cwiseQuotient(extent);
  for (auto& v : mesh.vertices) {
    v = (v - pivot).cwiseProduct(factors);
  }
  return mesh;
}

// ---------------------------------------------------------------------------
// Embedders

std::vector<std::string> HashingEmbedder::tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) {
    tokens.push_back(std::move(current));
  }
  return tokens;
}

std::size_t HashingEmbedder::bucket(std::string_view token) {
  constexpr std::uint64_t kOffset = 14695981039346656037ull;
  constexpr std::uint64_t kPrime = 1099511628211ull;
  constexpr std::uint64_t kSeed = 0x66696c6d73657431ull; // "filmset1"
  std::uint64_t h = kOffset ^ kSeed;
  for (const char ch : token) {
    h ^= static_cast<unsigned char>(ch);
    h *= kPrime;
  }
  return static_cast<std::size_t>(h % kDimension);
}

Eigen::VectorXd HashingEmbedder::embed(std::string_view text) const {
  const auto tokens = tokenize(text);
  if (tokens.empty()) {
    throw Error(ErrorCode::EmptyText, "nothing to embed");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kDimension));
  for (const auto& t : tokens) {
    v[static_cast<Eigen::Index>(bucket(t))] += 1.0;
  }
  return v / v.norm();
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig config) : config_(std::move(config)) {}

Eigen::VectorXd RemoteEmbedder::embed(std::string_view text) const {
  if (HashingEmbedder::tokenize(text).empty()) {
    throw Error(ErrorCode::EmptyText, "nothing to embed");
  }
  internal::HttpRequest request;
  request.url = config_.endpoint;
  request.body = {{"model", config_.model}, {"input", std::string(text)}};
  request.bearer_token = internal::env_or_empty(config_.api_key_env);
  request.timeout = config_.timeout;
  request.retries = config_.retries;
  const auto response = internal::post_json(request);

  const nlohmann::json* values = nullptr;
  if (response.contains("embedding")) {
    values = &response.at("embedding");
  } else if (response.contains("data") && response.at("data").is_array() &&
             !response.at("data").empty() && response.at("data")[0].contains("embedding")) {
    values = &response.at("data")[0].at("embedding");
  }
  if (!values || !values->is_array()) {
    throw Error(ErrorCode::BackendUnavailable, "response carries no embedding");
  }
  if (values->size() != config_.dimension) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(config_.dimension) + " values, got " +
                    std::to_string(values->size()));
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(values->size()));
  for (std::size_t k = 0; k < values->size(); ++k) {
    v[static_cast<Eigen::Index>(k)] = (*values)[k].get<double>();
  }
  const double norm = v.norm();
  if (!(norm > 0)) {
    throw Error(ErrorCode::BackendUnavailable, "service returned a zero vector");
  }
  return v / norm;
}

// ---------------------------------------------------------------------------
// Index

EmbeddingSidecar EmbeddingSidecar::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot read embeddings '" + path.string() + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
    EmbeddingSidecar s;
    s.embedder_version = j.at("embedder_version").get<std::string>();
    s.dimension = j.at("dimension").get<std::size_t>();
    s.embeddings = j.at("embeddings").get<std::map<std::string, std::vector<double>>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CatalogFormat, std::string("embedding sidecar: ") + e.what());
  }
}

nlohmann::json EmbeddingSidecar::to_json() const {
  return {{"embedder_version", embedder_version},
          {"dimension", dimension},
          {"embeddings", embeddings}};
}

EmbeddingIndex EmbeddingIndex::build(const std::vector<AssetRecord>& catalog,
                                     const TextEmbedder& embedder, const EmbeddingSidecar* sidecar) {
  EmbeddingIndex index;
  index.dimension_ = embedder.dimension();
  const bool sidecar_usable = sidecar && sidecar->embedder_version == embedder.version();
  for (const auto& record : catalog) {
    Eigen::VectorXd v;
    if (sidecar_usable && sidecar->embeddings.contains(record.id)) {
      const auto& values = sidecar->embeddings.at(record.id);
      v = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    } else if (record.embedding) {
      v = *record.embedding;
    } else {
      v = embedder.embed(record.description());
    }
    if (static_cast<std::size_t>(v.size()) != index.dimension_) {
      throw Error(ErrorCode::DimensionMismatch,
                  "'" + record.id + "' has dimension " + std::to_string(v.size()) + ", index uses " +
                      std::to_string(index.dimension_));
    }
    index.partitions_[record.category].push_back({record.id, std::move(v)});
  }
  for (auto& [category, entries] : index.partitions_) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.id < b.id; });
  }
  return index;
}

const std::vector<EmbeddingIndex::Entry>& EmbeddingIndex::partition(AssetCategory category) const {
  static const std::vector<Entry> empty;
  const auto it = partitions_.find(category);
  return it == partitions_.end() ? empty : it->second;
}

std::size_t EmbeddingIndex::size() const {
  std::size_t n = 0;
  for (const auto& [category, entries] : partitions_) {
    n += entries.size();
  }
  return n;
}

std::vector<SearchHit> EmbeddingIndex::search(const Eigen::VectorXd& query, AssetCategory category,
                                              std::size_t k) const {
  if (k == 0) {
    throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  }
  const auto& entries = partition(category);
  if (entries.empty()) {
    throw Error(ErrorCode::EmptyCategory,
                "no '" + std::string(to_string(category)) + "' assets in the index");
  }
  if (static_cast<std::size_t>(query.size()) != dimension_) {
    throw Error(ErrorCode::DimensionMismatch, "query dimension differs from the index");
  }
  struct Scored {
    long long key;
    double score;
    const std::string* id;
  };
  std::vector<Scored> scored;
  scored.reserve(entries.size());
  for (const auto& e : entries) {
    const double s = e.vector.dot(query);
    scored.push_back({std::llround(s * 1e9), s, &e.id});
  }
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [](const Scored& a, const Scored& b) {
                      return a.key != b.key ? a.key > b.key : *a.id < *b.id;
                    });
  std::vector<SearchHit> hits;
  hits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    hits.push_back({*scored[i].id, scored[i].score});
  }
  return hits;
}

EmbeddingSidecar EmbeddingIndex::sidecar(const std::string& embedder_version) const {
  EmbeddingSidecar s;
  s.embedder_version = embedder_version;
  s.dimension = dimension_;
  for (const auto& [category, entries] : partitions_) {
    for (const auto& e : entries) {
      s.embeddings[e.id] = std::vector<double>(e.vector.data(), e.vector.data() + e.vector.size());
    }
  }
  return s;
}

std::vector<SearchHit> search(const EmbeddingIndex& index, const TextEmbedder& embedder,
                              std::string_view query, AssetCategory category, std::size_t k) {
  return index.search(embedder.embed(query), category, k);
}

} // namespace filmset
