#pragma once

// Set-design agent chain: turn control, the adjacency check loop, parameter
// extraction from agent text and the chain driver.

#include "filmset/floorplan.hpp"
#include "filmset/params.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace filmset {

enum class Role { Manager, Allocation, Adjacency, Check, Shape, Material, Door_Window, Object, Done };
enum class Outcome { ok, fail };

inline constexpr std::array<Role, 8> kAllRoles{Role::Manager,  Role::Allocation, Role::Adjacency,
                                               Role::Check,    Role::Shape,      Role::Material,
                                               Role::Door_Window, Role::Object};

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);
std::string_view to_string(Outcome outcome);

/// Section a role's response fills, empty for Check and Done.
std::string_view section_of(Role role);

/// Speaking constraint carried as metadata and quoted in remote prompts.
std::string role_description(Role role, StructureKind kind);
/// Duty line for the role-play preamble.
std::string role_duty(Role role, StructureKind kind);

/// Transition table. Wall: Manager, Allocation, Adjacency, Check (fail goes
/// back to Adjacency), Shape, Material, Door_Window, Object. Column: Manager,
/// Allocation, Adjacency, Material, Door_Window, Object.
std::optional<Role> successor(StructureKind kind, Role role, Outcome outcome);

class TurnFSM {
public:
  explicit TurnFSM(StructureKind kind) : kind_(kind) {}

  StructureKind kind() const noexcept { return kind_; }
  Role current() const noexcept { return current_; }

  /// Moves to the table successor. Throws IllegalTransition.
  Role next_speaker(Outcome outcome);
  /// Moves to `requested` if it is the table successor. Throws IllegalTransition.
  Role request(Role requested, Outcome outcome = Outcome::ok);

private:
  StructureKind kind_;
  Role current_ = Role::Manager;
};

struct CheckReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string str() const;
};

/// (a) rooms exist and differ, (b) connected from room1, (c) no
/// contradictory pair, (d) place_rooms succeeds on `rooms`.
CheckReport validate_adjacency(const std::vector<RoomSpec>& rooms, const AdjacencySpec& adjacency);

/// Room sizes used to check an adjacency graph before the Shape agent has
/// produced real sizes.
std::vector<RoomSpec> provisional_rooms(const std::vector<RoomInfo>& rooms, double size = 4.0);

/// Column-path counterpart: cell assignment against the grid plus room names.
CheckReport validate_cells(const ColumnGridSpec& grid, const std::vector<RoomInfo>& rooms,
                           const CellAssignment& cells);

/// The single fenced JSON block of an agent message, validated against a
/// built-in schema. Throws NoJsonBlock, MultipleJsonBlocks, SchemaViolation.
nlohmann::json extract_params(std::string_view message, std::string_view schema_id);

struct AgentMessage {
  Role role = Role::Manager;
  std::string content;
};

struct AgentContext {
  std::string description;
  std::optional<StructureKind> kind;
  std::vector<AgentMessage> history;
  /// Check report of the previous Adjacency attempt, if it failed.
  std::string feedback;
};

class AgentBackend {
public:
  virtual ~AgentBackend() = default;
  /// Response text of `role` given the conversation so far.
  virtual std::string respond(Role role, const AgentContext& context) = 0;
};

/// Called with (role, section name, validated section) whenever a hook has
/// extracted parameters.
using Hook = std::function<void(Role, const std::string&, const nlohmann::json&)>;

struct ChainOptions {
  int max_retries = 3;
  std::vector<Hook> hooks;
};

struct ChainResult {
  StructuredParams params;
  std::vector<Role> trace; ///< every turn taken, Check included
  int adjacency_attempts = 0;
  std::size_t turns() const { return trace.size(); }
};

/// Adjacency turns validated by Check until one passes.
struct CheckLoopResult {
  AdjacencySpec adjacency;
  nlohmann::json section;
  int attempts = 0;
};

/// Throws AdjacencyExhausted after `max_retries` failed attempts. When `fsm`
/// is given every turn is checked against it.
CheckLoopResult check_loop(AgentBackend& backend, AgentContext& context,
                           const std::vector<RoomSpec>& rooms, int max_retries,
                           TurnFSM* fsm = nullptr, std::vector<Role>* trace = nullptr);

/// Walks the FSM to Done. Errors carry the failing role as context.
ChainResult run_chain(const std::string& description, AgentBackend& backend,
                      const ChainOptions& options = {});

} // namespace filmset
