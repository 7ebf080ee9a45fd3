#pragma once

// Two-phase material assignment: patterns over attribute ids are resolved to
// catalog materials by text retrieval, then applied in one batch.

#include "filmset/retrieval.hpp"
#include "filmset/scene.hpp"

#include <map>
#include <string>
#include <vector>

namespace filmset {

inline constexpr std::string_view kDefaultMaterial = "default_plaster";

/// `pattern` is an exact attribute id, a glob where `*` matches any run of
/// characters (`room2_id*`), or one of the class names `column`, `beam`,
/// `arc` standing for every id of that class.
struct MaterialEntry {
  std::string pattern;
  std::string query;
};

struct MaterialAssignment {
  std::vector<MaterialEntry> entries;
  std::map<std::string, std::string> resolved; ///< attribute id -> material id
};

/// Attribute ids matched by `pattern` among `ids`, in input order.
std::vector<std::string> expand_pattern(const std::string& pattern,
                                        const std::vector<std::string>& ids);

/// Resolves each query to the top-1 `material` asset. Exact ids are kept even
/// when absent from `ids` so apply_material can report them.
/// Throws EmptyCatalogCategory, AmbiguousPattern, UnknownAttribute, EmptyText.
MaterialAssignment resolve_materials(const std::vector<MaterialEntry>& entries,
                                     const std::vector<std::string>& ids,
                                     const EmbeddingIndex& index, const TextEmbedder& embedder);

/// Sets material_ref on every targeted element and fills unset refs with
/// `default_material`. Idempotent. Throws UnknownAttribute.
void apply_material(SceneGraph& graph, const MaterialAssignment& assignment,
                    const std::string& default_material = std::string(kDefaultMaterial));

} // namespace filmset
