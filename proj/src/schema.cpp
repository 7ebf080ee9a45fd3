#include "filmset/schema.hpp"

#include "filmset/error.hpp"
#include "filmset/resources.hpp"

#include <map>
#include <mutex>
#include <regex>

namespace filmset {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void violation(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, what, path.empty() ? "$" : path);
}

bool type_matches(const std::string& type, const nlohmann::json& v) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) {
      return true;
    }
    return v.is_number_float() && v.get<double>() == static_cast<double>(v.get<long long>());
  }
  return false;
}

void check(const nlohmann::json& schema, const nlohmann::json& v, const std::string& path) {
  if (schema.contains("type")) {
    const auto& t = schema.at("type");
    bool ok = false;
    if (t.is_array()) {
      for (const auto& option : t) {
        ok = ok || type_matches(option.get<std::string>(), v);
      }
    } else {
      ok = type_matches(t.get<std::string>(), v);
    }
    if (!ok) {
      violation(path, "expected type " + t.dump());
    }
  }
  if (schema.contains("enum")) {
    const auto& options = schema.at("enum");
    if (std::find(options.begin(), options.end(), v) == options.end()) {
      violation(path, "must be one of " + options.dump());
    }
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (schema.contains("minimum") && x < schema.at("minimum").get<double>()) {
      violation(path, "must be >= " + schema.at("minimum").dump());
    }
    if (schema.contains("maximum") && x > schema.at("maximum").get<double>()) {
      violation(path, "must be <= " + schema.at("maximum").dump());
    }
    if (schema.contains("exclusiveMinimum") && x <= schema.at("exclusiveMinimum").get<double>()) {
      violation(path, "must be > " + schema.at("exclusiveMinimum").dump());
    }
  }
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (schema.contains("minLength") && s.size() < schema.at("minLength").get<std::size_t>()) {
      violation(path, "string is too short");
    }
    if (schema.contains("pattern") &&
        !std::regex_search(s, std::regex(schema.at("pattern").get<std::string>()))) {
      violation(path, "does not match " + schema.at("pattern").get<std::string>());
    }
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema.at("minItems").get<std::size_t>()) {
      violation(path, "needs at least " + schema.at("minItems").dump() + " items");
    }
    if (schema.contains("maxItems") && v.size() > schema.at("maxItems").get<std::size_t>()) {
      violation(path, "allows at most " + schema.at("maxItems").dump() + " items");
    }
    if (schema.contains("items")) {
      for (std::size_t k = 0; k < v.size(); ++k) {
        check(schema.at("items"), v[k], path + "[" + std::to_string(k) + "]");
      }
    }
  }
  if (v.is_object()) {
    const auto props = schema.value("properties", nlohmann::json::object());
    if (schema.contains("required")) {
      for (const auto& key : schema.at("required")) {
        if (!v.contains(key.get<std::string>())) {
          violation(join(path, key.get<std::string>()), "is required");
        }
      }
    }
    const bool closed = schema.contains("additionalProperties") &&
                        schema.at("additionalProperties") == false;
    for (const auto& [key, value] : v.items()) {
      if (props.contains(key)) {
        check(props.at(key), value, join(path, key));
      } else if (closed) {
        violation(join(path, key), "unknown field");
      }
    }
  }
}

} // namespace

void validate_json(const nlohmann::json& schema, const nlohmann::json& instance) {
  check(schema, instance, "");
}

const nlohmann::json& builtin_schema(std::string_view id) {
  static std::mutex mutex;
  static std::map<std::string, nlohmann::json, std::less<>> cache;
  const std::lock_guard lock(mutex);
  if (const auto it = cache.find(id); it != cache.end()) {
    return it->second;
  }
  const auto text = resources::lookup("schemas/v1/" + std::string(id) + ".json");
  if (text.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no schema '" + std::string(id) + "'");
  }
  return cache.emplace(std::string(id), nlohmann::json::parse(text)).first->second;
}

} // namespace filmset
