#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hjplan/replanner.hpp"

namespace hjplan {

/// Invalid scenario document. key() is the dotted path of the offending
/// entry, e.g. "solver.k_max" or "obstacles".
class ScenarioError : public std::runtime_error
{
public:
  ScenarioError(std::string key, const std::string& message);
  const std::string& key() const { return myKey; }

private:
  std::string myKey;
};

/// Parse and validate a scenario document, filling in defaults. Unknown
/// keys are rejected.
ScenarioSpec parse_scenario(const nlohmann::json& doc);
ScenarioSpec parse_scenario_text(const std::string& text);
ScenarioSpec load_scenario(const std::filesystem::path& path);

/// Full document with every key spelled out; parse_scenario inverts it.
nlohmann::json scenario_to_json(const ScenarioSpec& spec);

inline constexpr const char* kTrajectoryHeader = "node_index,time,x,y,phase,replan_id";

/// Rows ordered by (replan_id, node_index); planned before traveled on ties.
std::string trajectory_csv(const ReplanTrace& trace, const ScenarioSpec& spec);

nlohmann::json events_json(const ReplanTrace& trace);

/// Wrap a single solve as a one-plan trace with nothing traveled.
ReplanTrace single_plan_trace(const SolveResult& result, std::vector<std::size_t> known);

/// Writes trajectory.csv, events.json and frame_<k>.svg (one per discovery
/// event plus a final one). Returns the written paths. Throws
/// std::runtime_error with the path on I/O failure.
std::vector<std::filesystem::path> emit_outputs(const ReplanTrace& trace, const ScenarioSpec& spec,
                                                const std::filesystem::path& outdir);

} // namespace hjplan
