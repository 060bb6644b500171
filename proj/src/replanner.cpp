#include "hjplan/replanner.hpp"

#include <algorithm>
#include <stdexcept>

namespace hjplan {

void ScenarioSpec::validate() const
{
  const Eigen::Index d = start.size();
  if (d == 0 || !all_finite(start))
    throw std::invalid_argument("start: must be a finite point");
  if (goal.target.size() != d || !all_finite(goal.target))
    throw std::invalid_argument("goal: must be a finite point of the same dimension as start");
  if (!(goal.sharpness > 0.0))
    throw std::invalid_argument("smoothing.A: must be positive");
  if (!(sharpness_B > 0.0))
    throw std::invalid_argument("smoothing.B: must be positive");
  if (std::holds_alternative<SeparableSinusoid>(field.variant()) && d < 2)
    throw std::invalid_argument("velocity: the sinusoid field needs at least two dimensions");
  if (!true_obstacles.empty() && true_obstacles[0].center.size() != d)
    throw std::invalid_argument("obstacles: dimension does not match start");
  if (!(discovery_radius > 0.0))
    throw std::invalid_argument("discovery_radius: must be positive");
  if (max_replans < 1)
    throw std::invalid_argument("max_replans: must be positive");
  if (bounds_lower.size() != d || bounds_upper.size() != d ||
      !(bounds_lower.array() < bounds_upper.array()).all())
    throw std::invalid_argument("bounds: lower must be below upper in every coordinate");
  solver.validate();
  if (solver.init_lower.size() != d)
    throw std::invalid_argument("solver.init_box: dimension does not match start");

  const auto atStart = signed_distance(true_obstacles, start);
  if (!(atStart.distance > 0.0))
    throw std::invalid_argument("start: lies inside obstacle " + std::to_string(*atStart.nearest));
  const auto atGoal = signed_distance(true_obstacles, goal.target);
  if (!(atGoal.distance > 0.0))
    throw std::invalid_argument("goal: lies inside obstacle " + std::to_string(*atGoal.nearest));
}

std::vector<std::size_t> scan(const std::set<std::size_t>& known, const ObstacleSet& truth, StateRef x,
                              double rho)
{
  std::vector<std::size_t> found;
  for (std::size_t i = 0; i < truth.size(); ++i)
  {
    if (known.contains(i))
      continue;
    if ((x - truth[i].center).norm() - truth[i].radius <= rho)
      found.push_back(i);
  }
  return found;
}

SolveResult replan(const SmoothedHamiltonian& knowledge, StateRef current, const SolverParams& params,
                   const SolveOptions& options)
{
  return solve(knowledge, current, params, options);
}

SmoothedHamiltonian knowledge_hamiltonian(const ScenarioSpec& spec, const std::vector<std::size_t>& known)
{
  return SmoothedHamiltonian(spec.field, spec.true_obstacles.subset(known), spec.goal, spec.sharpness_B);
}

ReplanTrace run_simulation(const ScenarioSpec& spec, const std::function<void(const PlanRecord&)>& on_plan)
{
  spec.validate();

  const auto J = static_cast<std::size_t>(spec.solver.node_count());
  const StateVector& goal = spec.goal.target;

  ReplanTrace trace;
  std::set<std::size_t> knownSet;
  std::vector<std::size_t> known;

  auto makePlan = [&](StateRef from, const PathMatrix* previous) {
    SolverParams params = spec.solver;
    params.seed = spec.solver.seed + trace.plans.size();
    SolveOptions options;
    if (previous)
      options.initial_path = *previous;

    const auto result = replan(knowledge_hamiltonian(spec, known), from, params, options);
    PlanRecord record{result.path, {result.iterations, result.converged, result.value}, known};
    if (on_plan)
      on_plan(record);
    trace.plans.push_back(std::move(record));
    return trace.plans.back().stats;
  };

  auto planUsable = [&](const SolveStats& stats) {
    if (stats.converged || spec.accept_unconverged)
      return true;
    trace.diagnostic = "plan " + std::to_string(trace.plans.size() - 1) + " did not converge within " +
                       std::to_string(spec.solver.k_max) + " iterations";
    return false;
  };

  if (!planUsable(makePlan(spec.start, nullptr)))
    return trace;

  std::size_t node = J;
  StateVector position = spec.start;
  trace.traveled.push_back(position);
  trace.traveled_nodes.push_back({position, 0, node});

  while (true)
  {
    if ((position - goal).norm() < kGoalTolerance)
    {
      trace.reached_goal = true;
      break;
    }

    const auto found = scan(knownSet, spec.true_obstacles, position, spec.discovery_radius);
    if (!found.empty())
    {
      if (static_cast<int>(trace.events.size()) >= spec.max_replans)
      {
        trace.diagnostic = "replan budget of " + std::to_string(spec.max_replans) + " exhausted";
        break;
      }
      for (std::size_t i : found)
      {
        knownSet.insert(i);
        known.push_back(i);
      }

      PathMatrix remaining;
      if (spec.solver.warm_start)
        remaining = trace.plans.back().path.leftCols(node + 1);
      const auto stats = makePlan(position, spec.solver.warm_start ? &remaining : nullptr);
      trace.events.push_back({position, node, found, stats});
      if (!planUsable(stats))
        break;
      node = J;
      continue;
    }

    // Column 0 is the pinned terminal constraint, not a place to drive to.
    if (node <= 1)
    {
      trace.diagnostic = "plan exhausted before reaching the goal";
      break;
    }
    --node;
    position = trace.plans.back().path.col(static_cast<Eigen::Index>(node));
    trace.traveled.push_back(position);
    trace.traveled_nodes.push_back({position, trace.plans.size() - 1, node});
    ++trace.total_nodes_traveled;
  }

  return trace;
}

} // namespace hjplan
