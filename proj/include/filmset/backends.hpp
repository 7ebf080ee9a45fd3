#pragma once

// Agent backends: fixture-driven scripted responses for offline runs and an
// OpenAI-style chat-completions client.

#include "filmset/agents.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace filmset {

/// Replays fixture responses per role, in order. Fixture file format:
/// {"Manager": ["..."], "Allocation": ["...", "..."], ...}.
class ScriptedBackend final : public AgentBackend {
public:
  explicit ScriptedBackend(std::map<Role, std::vector<std::string>> fixtures);

  /// Throws ConfigError, IoError.
  static ScriptedBackend from_json(const nlohmann::json& fixtures);
  static ScriptedBackend load(const std::filesystem::path& path);

  /// Throws MissingFixture when the role has no response left.
  std::string respond(Role role, const AgentContext& context) override;

  /// Number of responses consumed for `role`.
  std::size_t consumed(Role role) const;

private:
  std::map<Role, std::vector<std::string>> fixtures_;
  std::map<Role, std::size_t> cursor_;
};

struct RemoteBackendConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string api_key_env = "FILMSET_API_KEY";
  double temperature = 0.7;
  std::chrono::seconds timeout{60};
  int retries = 2;
};

/// System prompt of a role: role-play preamble, speaking constraint, output
/// contract with the section schema, one worked example, and for Door_Window
/// a step-by-step reasoning directive.
std::string system_prompt(Role role, StructureKind kind);
/// User turn: the scene description, earlier agent outputs and any Check
/// feedback.
std::string user_prompt(Role role, const AgentContext& context);

class RemoteBackend final : public AgentBackend {
public:
  explicit RemoteBackend(RemoteBackendConfig config);

  /// Throws BackendUnavailable.
  std::string respond(Role role, const AgentContext& context) override;

private:
  RemoteBackendConfig config_;
};

} // namespace filmset
