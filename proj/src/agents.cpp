#include "filmset/agents.hpp"

#include "filmset/error.hpp"
#include "filmset/schema.hpp"

#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace filmset {

std::string_view to_string(Role role) {
  switch (role) {
  case Role::Manager: return "Manager";
  case Role::Allocation: return "Allocation";
  case Role::Adjacency: return "Adjacency";
  case Role::Check: return "Check";
  case Role::Shape: return "Shape";
  case Role::Material: return "Material";
  case Role::Door_Window: return "Door_Window";
  case Role::Object: return "Object";
  case Role::Done: return "Done";
  }
  return "";
}

Role role_from_string(std::string_view text) {
  for (const Role r : kAllRoles) {
    if (to_string(r) == text) {
      return r;
    }
  }
  if (text == "Done") {
    return Role::Done;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown role '" + std::string(text) + "'");
}

std::string_view to_string(Outcome outcome) {
  return outcome == Outcome::ok ? "ok" : "fail";
}

std::string_view section_of(Role role) {
  switch (role) {
  case Role::Manager: return "manager";
  case Role::Allocation: return "allocation";
  case Role::Adjacency: return "adjacency";
  case Role::Shape: return "shape";
  case Role::Material: return "material";
  case Role::Door_Window: return "door_window";
  case Role::Object: return "object";
  case Role::Check:
  case Role::Done: return "";
  }
  return "";
}

std::optional<Role> successor(StructureKind kind, Role role, Outcome outcome) {
  using Key = std::pair<Role, Outcome>;
  static const std::map<Key, Role> wall{
      {{Role::Manager, Outcome::ok}, Role::Allocation},
      {{Role::Allocation, Outcome::ok}, Role::Adjacency},
      {{Role::Adjacency, Outcome::ok}, Role::Check},
      {{Role::Check, Outcome::fail}, Role::Adjacency},
      {{Role::Check, Outcome::ok}, Role::Shape},
      {{Role::Shape, Outcome::ok}, Role::Material},
      {{Role::Material, Outcome::ok}, Role::Door_Window},
      {{Role::Door_Window, Outcome::ok}, Role::Object},
      {{Role::Object, Outcome::ok}, Role::Done},
  };
  static const std::map<Key, Role> column{
      {{Role::Manager, Outcome::ok}, Role::Allocation},
      {{Role::Allocation, Outcome::ok}, Role::Adjacency},
      {{Role::Adjacency, Outcome::ok}, Role::Material},
      {{Role::Material, Outcome::ok}, Role::Door_Window},
      {{Role::Door_Window, Outcome::ok}, Role::Object},
      {{Role::Object, Outcome::ok}, Role::Done},
  };
  const auto& table = kind == StructureKind::wall ? wall : column;
  const auto it = table.find({role, outcome});
  if (it == table.end()) {
    return std::nullopt;
  }
  return it->second;
}

namespace {

[[noreturn]] void illegal(StructureKind kind, Role from, Outcome outcome, std::string_view to) {
  throw Error(ErrorCode::IllegalTransition,
              std::string(to_string(from)) + " (" + std::string(to_string(outcome)) + ") cannot hand over to " +
                  std::string(to) + " in a " + std::string(to_string(kind)) + " scene");
}

} // namespace

Role TurnFSM::next_speaker(Outcome outcome) {
  const auto next = successor(kind_, current_, outcome);
  if (!next) {
    illegal(kind_, current_, outcome, "anyone");
  }
  current_ = *next;
  return current_;
}

Role TurnFSM::request(Role requested, Outcome outcome) {
  const auto next = successor(kind_, current_, outcome);
  if (!next || *next != requested) {
    illegal(kind_, current_, outcome, to_string(requested));
  }
  current_ = requested;
  return current_;
}

std::string role_duty(Role role, StructureKind kind) {
  const bool wall = kind == StructureKind::wall;
  switch (role) {
  case Role::Manager: return "Choose wall-structure or column-structure according to the user input.";
  case Role::Allocation:
    return wall ? "Assign the number and functions of rooms." : "Define the column grid and the room count.";
  case Role::Adjacency:
    return wall ? "Define the spatial adjacency between rooms."
                : "Assign rooms to occupied grid cells.";
  case Role::Check: return "Validate the adjacency logic and return to Adjacency if constraints are violated.";
  case Role::Shape: return "Generate room sizes and decide whether to add arc walls.";
  case Role::Material:
    return wall ? "Select materials for floors and walls."
                : "Select materials for the floor, columns and beams.";
  case Role::Door_Window:
    return wall ? "Select walls, plan opening sizes and describe door and window styles."
                : "Describe door and window styles.";
  case Role::Object:
    return wall ? "Select floor objects (stable and relative) and wall objects."
                : "Select floor objects (stable and relative).";
  case Role::Done: return "";
  }
  return "";
}

std::string role_description(Role role, StructureKind kind) {
  std::string before;
  for (const Role r : kAllRoles) {
    for (const Outcome o : {Outcome::ok, Outcome::fail}) {
      if (successor(kind, r, o) == role && before.empty()) {
        before = std::string(to_string(r));
      }
    }
  }
  const auto next = successor(kind, role, Outcome::ok);
  std::string text = before.empty() ? "I speak first" : "I can only speak after " + before;
  if (next) {
    text += ", and the next speaker is " + std::string(to_string(*next));
  }
  return text + ".";
}

std::string CheckReport::str() const {
  std::string out;
  for (const auto& v : violations) {
    out += "- " + v + "\n";
  }
  return out;
}

namespace {

std::string relation_text(const AdjacencyRelation& r) {
  return "(" + r.room_a + ", " + r.room_b + ", " + std::string(to_string(r.relation)) + ")";
}

Direction opposite(Direction d) {
  switch (d) {
  case Direction::east: return Direction::west;
  case Direction::west: return Direction::east;
  case Direction::north: return Direction::south;
  case Direction::south: return Direction::north;
  }
  return d;
}

} // namespace

CheckReport validate_adjacency(const std::vector<RoomSpec>& rooms, const AdjacencySpec& adjacency) {
  CheckReport report;
  std::set<std::string> names;
  for (const auto& r : rooms) {
    names.insert(r.name);
  }
  if (!names.contains("room1")) {
    report.violations.push_back("room1 is not declared");
  }

  std::map<std::string, std::set<std::string>> graph;
  std::map<std::pair<std::string, std::string>, std::pair<Direction, const AdjacencyRelation*>>
      normalized;
  for (const auto& rel : adjacency.relations) {
    if (!names.contains(rel.room_a) || !names.contains(rel.room_b)) {
      report.violations.push_back("unknown room in " + relation_text(rel));
      continue;
    }
    if (rel.room_a == rel.room_b) {
      report.violations.push_back("room related to itself in " + relation_text(rel));
      continue;
    }
    graph[rel.room_a].insert(rel.room_b);
    graph[rel.room_b].insert(rel.room_a);
    const bool forward = rel.room_a < rel.room_b;
    const auto key = forward ? std::make_pair(rel.room_a, rel.room_b)
                             : std::make_pair(rel.room_b, rel.room_a);
    const Direction d = forward ? rel.relation : opposite(rel.relation);
    const auto [it, fresh] = normalized.emplace(key, std::make_pair(d, &rel));
    if (!fresh && it->second.first != d) {
      report.violations.push_back("contradictory pair " + relation_text(*it->second.second) +
                                  " and " + relation_text(rel));
    }
  }

  if (names.contains("room1")) {
    std::set<std::string> seen{"room1"};
    std::queue<std::string> frontier;
    frontier.push("room1");
    while (!frontier.empty()) {
      const auto cur = frontier.front();
      frontier.pop();
      for (const auto& next : graph[cur]) {
        if (seen.insert(next).second) {
          frontier.push(next);
        }
      }
    }
    for (const auto& r : rooms) {
      if (!seen.contains(r.name)) {
        report.violations.push_back(r.name + " is disconnected from room1");
      }
    }
  }

  if (report.ok()) {
    try {
      place_rooms(rooms, adjacency);
    } catch (const Error& e) {
      report.violations.push_back("not realizable: " + e.detail() +
                                  (e.path().empty() ? "" : " (" + e.path() + ")"));
    }
  }
  return report;
}

std::vector<RoomSpec> provisional_rooms(const std::vector<RoomInfo>& rooms, double size) {
  std::vector<RoomSpec> out;
  for (const auto& r : rooms) {
    out.push_back({r.name, size, size, {}});
  }
  return out;
}

CheckReport validate_cells(const ColumnGridSpec& grid, const std::vector<RoomInfo>& rooms,
                           const CellAssignment& cells) {
  CheckReport report;
  report.violations = validate_cell_assignment(grid, cells);
  std::set<std::string> declared;
  for (const auto& r : rooms) {
    declared.insert(r.name);
  }
  std::set<std::string> assigned;
  for (const auto& r : cells.rooms) {
    if (!declared.contains(r.room)) {
      report.violations.push_back(r.room + " is not an allocated room");
    }
    if (!assigned.insert(r.room).second) {
      report.violations.push_back(r.room + " is assigned twice");
    }
  }
  for (const auto& name : declared) {
    if (!assigned.contains(name)) {
      report.violations.push_back(name + " has no cells");
    }
  }
  return report;
}

nlohmann::json extract_params(std::string_view message, std::string_view schema_id) {
  std::vector<std::string> blocks;
  std::istringstream in{std::string(message)};
  std::string line;
  bool open = false;
  bool capture = false;
  std::string current;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    const bool fence = first != std::string::npos && line.compare(first, 3, "```") == 0;
    if (!fence) {
      if (open && capture) {
        current += line + "\n";
      }
      continue;
    }
    if (!open) {
      std::string info = line.substr(first + 3);
      info.erase(0, info.find_first_not_of(" \t"));
      info.erase(info.find_last_not_of(" \t\r") + 1);
      open = true;
      capture = info.empty() || info == "json" || info == "JSON";
      current.clear();
    } else {
      if (capture) {
        blocks.push_back(current);
      }
      open = false;
    }
  }
  if (blocks.empty()) {
    throw Error(ErrorCode::NoJsonBlock, "response has no fenced JSON block");
  }
  if (blocks.size() > 1) {
    throw Error(ErrorCode::MultipleJsonBlocks,
                "response has " + std::to_string(blocks.size()) + " fenced JSON blocks");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(blocks.front());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("invalid JSON: ") + e.what(), "$");
  }
  validate_json(builtin_schema(schema_id), j);
  return j;
}

namespace {

std::string take_turn(AgentBackend& backend, Role role, AgentContext& context) {
  std::string text = backend.respond(role, context);
  context.history.push_back({role, text});
  return text;
}

template <typename F>
auto as_role(Role role, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw e.with_context(std::string(to_string(role)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, e.what()).with_context(std::string(to_string(role)));
  }
}

} // namespace

CheckLoopResult check_loop(AgentBackend& backend, AgentContext& context,
                           const std::vector<RoomSpec>& rooms, int max_retries, TurnFSM* fsm,
                           std::vector<Role>* trace) {
  CheckReport last;
  for (int attempt = 1; attempt <= max_retries; ++attempt) {
    if (fsm) {
      fsm->request(Role::Adjacency, attempt == 1 ? Outcome::ok : Outcome::fail);
    }
    if (trace) {
      trace->push_back(Role::Adjacency);
    }
    const auto section = as_role(Role::Adjacency, [&] {
      return extract_params(take_turn(backend, Role::Adjacency, context), "adjacency_wall");
    });
    const AdjacencySpec adjacency = decode_adjacency(section);

    if (fsm) {
      fsm->request(Role::Check);
    }
    if (trace) {
      trace->push_back(Role::Check);
    }
    last = validate_adjacency(rooms, adjacency);
    context.history.push_back({Role::Check, last.ok() ? "ok" : last.str()});
    if (last.ok()) {
      context.feedback.clear();
      return {adjacency, section, attempt};
    }
    context.feedback = last.str();
  }
  throw Error(ErrorCode::AdjacencyExhausted,
              "no valid adjacency after " + std::to_string(max_retries) + " attempts:\n" +
                  last.str())
      .with_context("Check");
}

ChainResult run_chain(const std::string& description, AgentBackend& backend,
                      const ChainOptions& options) {
  ChainResult result;
  AgentContext context;
  context.description = description;
  StructuredParams& params = result.params;

  const auto publish = [&](Role role, const nlohmann::json& section) {
    const std::string name(section_of(role));
    as_role(role, [&] {
      params.set_section(name, section);
      return 0;
    });
    for (const auto& hook : options.hooks) {
      as_role(role, [&] {
        hook(role, name, section);
        return 0;
      });
    }
  };
  const auto speak = [&](Role role) {
    result.trace.push_back(role);
    const auto schema = section_schema_id(section_of(role), params.structure_kind);
    const auto section =
        as_role(role, [&] { return extract_params(take_turn(backend, role, context), schema); });
    publish(role, section);
  };

  speak(Role::Manager);
  context.kind = params.structure_kind;
  TurnFSM fsm(params.structure_kind);

  fsm.request(Role::Allocation);
  speak(Role::Allocation);

  if (params.structure_kind == StructureKind::wall) {
    const auto loop = check_loop(backend, context, provisional_rooms(params.room_info),
                                 options.max_retries, &fsm, &result.trace);
    result.adjacency_attempts = loop.attempts;
    publish(Role::Adjacency, loop.section);

    fsm.request(Role::Shape);
    speak(Role::Shape);
    as_role(Role::Shape, [&] {
      std::set<std::string> allocated;
      for (const auto& r : params.room_info) {
        allocated.insert(r.name);
      }
      std::set<std::string> shaped;
      for (const auto& r : params.rooms) {
        shaped.insert(r.name);
      }
      if (allocated != shaped) {
        throw Error(ErrorCode::SchemaViolation, "shaped rooms differ from the allocated rooms",
                    "rooms");
      }
      return 0;
    });
  } else {
    fsm.request(Role::Adjacency);
    speak(Role::Adjacency);
    result.adjacency_attempts = 1;
    as_role(Role::Adjacency, [&] {
      const auto report = validate_cells(params.grid, params.room_info, params.cells);
      if (!report.ok()) {
        throw Error(ErrorCode::InvalidArgument, "invalid cell assignment:\n" + report.str(),
                    "assignments");
      }
      return 0;
    });
  }

  for (const Role role : {Role::Material, Role::Door_Window, Role::Object}) {
    fsm.request(role);
    speak(role);
  }
  fsm.next_speaker(Outcome::ok);
  return result;
}

} // namespace filmset
