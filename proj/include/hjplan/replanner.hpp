#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "hjplan/splitting_solver.hpp"

namespace hjplan {

inline constexpr double kGoalTolerance = 1e-2;

struct ScenarioSpec
{
  StateVector start;
  GoalSpec goal;
  VelocityField field;
  ObstacleSet true_obstacles;
  double discovery_radius = 0.1;
  SolverParams solver;
  double sharpness_B = kDefaultSharpness;
  int max_replans = 20;
  // Keep driving on a plan whose solve hit k_max instead of aborting.
  bool accept_unconverged = false;
  // Plot bounds for frames and the grid oracle; the planner ignores them.
  StateVector bounds_lower = StateVector::Constant(2, -1.5);
  StateVector bounds_upper = StateVector::Constant(2, 1.5);

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
};

struct SolveStats
{
  int iterations = 0;
  bool converged = false;
  double value = 0.0;
};

/// One plan computed during a simulation. Plan 0 is the initial plan made
/// with no obstacle knowledge; plan k > 0 follows discovery event k-1.
struct PlanRecord
{
  PathMatrix path;
  SolveStats stats;
  std::vector<std::size_t> known; // indices into true_obstacles, in discovery order
};

struct DiscoveryEvent
{
  StateVector position;
  // Index, in the plan being followed, of the node where the vehicle halted.
  std::size_t node_index = 0;
  std::vector<std::size_t> discovered;
  SolveStats solve_stats;
};

struct TraveledNode
{
  StateVector position;
  std::size_t plan_id = 0;
  std::size_t node_index = 0;
};

struct ReplanTrace
{
  std::vector<StateVector> traveled;
  std::vector<TraveledNode> traveled_nodes;
  std::vector<DiscoveryEvent> events;
  std::vector<PlanRecord> plans;
  bool reached_goal = false;
  std::size_t total_nodes_traveled = 0;
  std::string diagnostic;
};

/// Indices of obstacles not yet in `known` whose boundary lies within rho
/// of x, in increasing index order.
std::vector<std::size_t> scan(const std::set<std::size_t>& known, const ObstacleSet& truth, StateRef x,
                              double rho);

/// Fresh solve from `current` using only the obstacles in `known`.
SolveResult replan(const SmoothedHamiltonian& knowledge, StateRef current, const SolverParams& params,
                   const SolveOptions& options = {});

/// Hamiltonian restricted to the known obstacles.
SmoothedHamiltonian knowledge_hamiltonian(const ScenarioSpec& spec, const std::vector<std::size_t>& known);

/// Travel, scan, halt and replan until the goal is reached or the run
/// fails. Failures are reported in the trace, not thrown, except for
/// SolverDivergence. `on_plan` sees every plan as it is made.
ReplanTrace run_simulation(const ScenarioSpec& spec,
                           const std::function<void(const PlanRecord&)>& on_plan = {});

} // namespace hjplan
