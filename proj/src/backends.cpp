#include "filmset/backends.hpp"

#include "filmset/error.hpp"
#include "filmset/params.hpp"
#include "filmset/resources.hpp"
#include "filmset/schema.hpp"
#include "internal/http.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

namespace filmset {

namespace internal {

std::string env_or_empty(const std::string& name) {
  const char* value = std::getenv(name.c_str());
  return value ? std::string(value) : std::string();
}

nlohmann::json post_json(const HttpRequest& request) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(request.url, m, url_re)) {
    throw Error(ErrorCode::BackendUnavailable, "malformed endpoint URL '" + request.url + "'");
  }
  const std::string base = m[1].str();
  const std::string path = m[2].matched ? m[2].str() : "/";

  httplib::Client client(base);
  const auto secs = static_cast<time_t>(request.timeout.count());
  client.set_connection_timeout(secs);
  client.set_read_timeout(secs);
  client.set_write_timeout(secs);
  if (!request.bearer_token.empty()) {
    client.set_bearer_token_auth(request.bearer_token);
  }

  const std::string body = request.body.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= request.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(250 << attempt));
    }
    auto res = client.Post(path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      spdlog::warn("POST {} failed: {} (attempt {})", request.url, last_error, attempt + 1);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw Error(ErrorCode::BackendUnavailable,
                  "HTTP " + std::to_string(res->status) + " from " + request.url);
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::BackendUnavailable, std::string("unparsable response: ") + e.what());
    }
  }
  throw Error(ErrorCode::BackendUnavailable, "cannot reach " + request.url + ": " + last_error);
}

} // namespace internal

ScriptedBackend::ScriptedBackend(std::map<Role, std::vector<std::string>> fixtures)
    : fixtures_(std::move(fixtures)) {}

ScriptedBackend ScriptedBackend::from_json(const nlohmann::json& fixtures) {
  if (!fixtures.is_object()) {
    throw Error(ErrorCode::ConfigError, "fixtures must be an object of role -> responses", "$");
  }
  std::map<Role, std::vector<std::string>> out;
  for (const auto& [key, value] : fixtures.items()) {
    Role role;
    try {
      role = role_from_string(key);
    } catch (const Error&) {
      throw Error(ErrorCode::ConfigError, "unknown role", key);
    }
    if (!value.is_array()) {
      throw Error(ErrorCode::ConfigError, "responses must be an array of strings", key);
    }
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (!value[i].is_string()) {
        throw Error(ErrorCode::ConfigError, "response is not a string",
                    key + "[" + std::to_string(i) + "]");
      }
      out[role].push_back(value[i].get<std::string>());
    }
  }
  return ScriptedBackend(std::move(out));
}

ScriptedBackend ScriptedBackend::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot read fixtures '" + path.string() + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, e.what(), "$");
  }
  return from_json(j);
}

std::string ScriptedBackend::respond(Role role, const AgentContext&) {
  auto& cursor = cursor_[role];
  const auto it = fixtures_.find(role);
  if (it == fixtures_.end() || cursor >= it->second.size()) {
    throw Error(ErrorCode::MissingFixture,
                "no scripted response left for " + std::string(to_string(role)));
  }
  return it->second[cursor++];
}

std::size_t ScriptedBackend::consumed(Role role) const {
  const auto it = cursor_.find(role);
  return it == cursor_.end() ? 0 : it->second;
}

namespace {

std::string example_for(Role role, StructureKind kind) {
  const auto text = resources::demo_fixtures(kind == StructureKind::wall ? "western_guestroom"
                                                                          : "chinese_residence");
  const auto fixtures = nlohmann::json::parse(text);
  const std::string key(to_string(role));
  if (!fixtures.contains(key) || fixtures.at(key).empty()) {
    return {};
  }
  return fixtures.at(key).back().get<std::string>();
}

} // namespace

std::string system_prompt(Role role, StructureKind kind) {
  std::string out;
  out += "You are the " + std::string(to_string(role)) +
         " agent of a film set design team. Your duty: " + role_duty(role, kind) + "\n";
  out += "Turn rule: " + role_description(role, kind) + "\n";
  out += "This is a " + std::string(to_string(kind)) + "-structure scene.\n\n";
  const auto section = section_of(role);
  if (section.empty()) {
    return out;
  }
  if (role == Role::Manager) {
    out += "You must choose exactly one of \"wall\" or \"column\" for structure_kind, even when "
           "the description is ambiguous.\n";
  }
  if (role == Role::Door_Window) {
    out += "Think step by step: first list the walls that need a door or window and why, then "
           "decide sizes and positions, then describe the styles. Put that reasoning in the "
           "\"reasoning\" field.\n";
  }
  const auto schema_id = section_schema_id(section, kind);
  out += "End your reply with exactly one fenced ```json block that satisfies this JSON schema. "
         "Do not emit any other fenced block.\n";
  out += builtin_schema(schema_id).dump(2) + "\n";
  const auto example = example_for(role, kind);
  if (!example.empty()) {
    out += "\nExample reply:\n" + example + "\n";
  }
  return out;
}

std::string user_prompt(Role role, const AgentContext& context) {
  std::string out = "Scene description: " + context.description + "\n";
  for (const auto& msg : context.history) {
    out += "\n[" + std::string(to_string(msg.role)) + "]\n" + msg.content + "\n";
  }
  if (role == Role::Adjacency && !context.feedback.empty()) {
    out += "\nThe Check agent rejected your previous adjacency:\n" + context.feedback +
           "Revise it so every violation is fixed.\n";
  }
  out += "\nIt is now the " + std::string(to_string(role)) + " agent's turn.";
  return out;
}

RemoteBackend::RemoteBackend(RemoteBackendConfig config) : config_(std::move(config)) {}

std::string RemoteBackend::respond(Role role, const AgentContext& context) {
  const StructureKind kind = context.kind.value_or(StructureKind::wall);
  internal::HttpRequest request;
  request.url = config_.endpoint;
  request.timeout = config_.timeout;
  request.retries = config_.retries;
  request.bearer_token = internal::env_or_empty(config_.api_key_env);
  const std::string system = system_prompt(role, kind);
  request.body = {{"model", config_.model},
                  {"temperature", config_.temperature},
                  {"messages",
                   {{{"role", "system"}, {"content", system}},
                    {{"role", "user"}, {"content", user_prompt(role, context)}}}}};
  const auto response = internal::post_json(request);
  try {
    return response.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::BackendUnavailable, "response has no choices[0].message.content");
  }
}

} // namespace filmset
