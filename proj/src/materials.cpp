#include "filmset/materials.hpp"

#include "filmset/error.hpp"

#include <set>

namespace filmset {

namespace {

bool glob_match(std::string_view pattern, std::string_view text) {
  std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && pattern[p] == text[t]) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') {
    ++p;
  }
  return p == pattern.size();
}

bool class_match(const std::string& pattern, const std::string& id) {
  if (!AttributeId::is_valid(id)) {
    return false;
  }
  const auto kind = AttributeId::parse(id).kind();
  return (pattern == "column" && kind == AttributeId::Kind::column) ||
         (pattern == "beam" && kind == AttributeId::Kind::beam) ||
         (pattern == "arc" && kind == AttributeId::Kind::arc);
}

} // namespace

std::vector<std::string> expand_pattern(const std::string& pattern,
                                        const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  const bool is_class = pattern == "column" || pattern == "beam" || pattern == "arc";
  for (const auto& id : ids) {
    if (is_class ? class_match(pattern, id) : glob_match(pattern, id)) {
      out.push_back(id);
    }
  }
  return out;
}

MaterialAssignment resolve_materials(const std::vector<MaterialEntry>& entries,
                                     const std::vector<std::string>& ids,
                                     const EmbeddingIndex& index, const TextEmbedder& embedder) {
  if (index.partition(AssetCategory::material).empty()) {
    throw Error(ErrorCode::EmptyCatalogCategory, "the catalog has no materials");
  }
  MaterialAssignment out;
  out.entries = entries;
  std::map<std::string, std::size_t> claimed_by;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& entry = entries[k];
    const std::string path = "materials[" + std::to_string(k) + "]";
    std::vector<std::string> targets;
    const bool literal = entry.pattern.find('*') == std::string::npos &&
                         entry.pattern != "column" && entry.pattern != "beam" &&
                         entry.pattern != "arc";
    if (literal) {
      targets.push_back(entry.pattern);
    } else {
      targets = expand_pattern(entry.pattern, ids);
      if (targets.empty()) {
        throw Error(ErrorCode::UnknownAttribute,
                    "pattern '" + entry.pattern + "' matches no element", path + ".target");
      }
    }
    if (entry.query.empty()) {
      throw Error(ErrorCode::EmptyText, "material query is empty", path + ".query");
    }
    const auto hits = search(index, embedder, entry.query, AssetCategory::material, 1);
    for (const auto& id : targets) {
      const auto [it, fresh] = claimed_by.emplace(id, k);
      if (!fresh) {
        throw Error(ErrorCode::AmbiguousPattern,
                    "'" + id + "' is matched by materials[" + std::to_string(it->second) +
                        "] and materials[" + std::to_string(k) + "]",
                    path + ".target");
      }
      out.resolved[id] = hits.front().id;
    }
  }
  return out;
}

void apply_material(SceneGraph& graph, const MaterialAssignment& assignment,
                    const std::string& default_material) {
  for (const auto& [id, material] : assignment.resolved) {
    SceneElement* e = graph.find(id);
    if (!e) {
      throw Error(ErrorCode::UnknownAttribute, "no element '" + id + "' in the scene", id);
    }
    e->material_ref = material;
  }
  graph.visit_mut([&](SceneElement& e) {
    if (!e.material_ref) {
      e.material_ref = default_material;
    }
  });
}

} // namespace filmset
