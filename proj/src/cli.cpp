#include "hjplan/cli.hpp"

#include <chrono>
#include <filesystem>
#include <numeric>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "hjplan/diagnostics.hpp"
#include "hjplan/grid_oracle.hpp"
#include "hjplan/scenario_io.hpp"

namespace hjplan {

using nlohmann::json;

namespace {

struct Options
{
  std::string scenario;
  std::string outdir;
  std::optional<std::uint64_t> seed;
  bool acceptUnconverged = false;
  int grid = 201;
  int samples = 200;
};

// A run that completed but did not succeed; its result is still printed.
struct RunFailure
{
  std::string message;
};

ScenarioSpec load(const Options& o)
{
  auto spec = load_scenario(o.scenario);
  if (o.seed)
    spec.solver.seed = *o.seed;
  if (o.acceptUnconverged)
    spec.accept_unconverged = true;
  return spec;
}

json outputs_json(const std::vector<std::filesystem::path>& paths)
{
  json a = json::array();
  for (const auto& p : paths)
    a.push_back(p.string());
  return a;
}

std::optional<RunFailure> cmd_plan(const Options& o, std::ostream& out)
{
  const auto spec = load(o);
  std::vector<std::size_t> all(spec.true_obstacles.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  const auto t0 = std::chrono::steady_clock::now();
  const auto result = solve(knowledge_hamiltonian(spec, all), spec.start, spec.solver);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json doc = {{"value", result.value},
              {"iterations", result.iterations},
              {"converged", result.converged},
              {"final_residual", result.residual_history.empty() ? 0.0 : result.residual_history.back()},
              {"seconds", seconds},
              {"diagnostic", result.diagnostic}};
  if (!o.outdir.empty())
    doc["outputs"] = outputs_json(emit_outputs(single_plan_trace(result, all), spec, o.outdir));
  out << doc.dump(2) << "\n";
  if (!result.converged)
    return RunFailure{"solve did not converge within " + std::to_string(spec.solver.k_max) + " iterations"};
  return std::nullopt;
}

std::optional<RunFailure> cmd_simulate(const Options& o, std::ostream& out)
{
  const auto spec = load(o);
  const auto trace = run_simulation(spec);
  json doc = events_json(trace);
  if (!o.outdir.empty())
    doc["outputs"] = outputs_json(emit_outputs(trace, spec, o.outdir));
  out << doc.dump(2) << "\n";
  if (!trace.reached_goal)
    return RunFailure{trace.diagnostic.empty() ? "goal not reached" : trace.diagnostic};
  return std::nullopt;
}

std::optional<RunFailure> cmd_oracle(const Options& o, std::ostream& out)
{
  const auto spec = load(o);
  const GridSpec grid{spec.bounds_lower, spec.bounds_upper, {o.grid, o.grid}};
  const auto t = fast_march(spec.field, spec.true_obstacles, spec.goal.target, grid);
  const double value = t.query(spec.start);
  json doc = {{"value", std::isfinite(value) ? json(value) : json(nullptr)}, {"grid", o.grid}};
  out << doc.dump(2) << "\n";
  if (!std::isfinite(value))
    return RunFailure{"start is unreachable on the grid"};
  return std::nullopt;
}

std::optional<RunFailure> cmd_gradcheck(const Options& o, std::ostream& out)
{
  const auto spec = load(o);
  std::vector<std::size_t> all(spec.true_obstacles.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto report = gradient_check(knowledge_hamiltonian(spec, all), spec.bounds_lower, spec.bounds_upper,
                                     o.samples, spec.solver.seed);
  const double worst = std::max(report.max_error_x, report.max_error_p);
  json doc = {{"samples", report.samples},
              {"rejected", report.rejected},
              {"max_error_grad_x", report.max_error_x},
              {"max_error_grad_p", report.max_error_p},
              {"max_lagrangian_gap", report.max_lagrangian_gap},
              {"threshold", 1e-5},
              {"passed", worst < 1e-5}};
  out << doc.dump(2) << "\n";
  if (worst >= 1e-5)
    return RunFailure{"gradient error above threshold"};
  return std::nullopt;
}

std::optional<RunFailure> cmd_selftest(std::ostream& out)
{
  json checks = json::array();
  bool ok = true;
  for (const auto& c : run_selftest())
  {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    ok = ok && c.passed;
  }
  out << json{{"passed", ok}, {"checks", checks}}.dump(2) << "\n";
  if (!ok)
    return RunFailure{"selftest failed"};
  return std::nullopt;
}

void print_error(std::ostream& err, const std::string& message, const std::string& key = "")
{
  json doc = {{"error", message}};
  if (!key.empty())
    doc["key"] = key;
  err << doc.dump() << "\n";
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Grid-free path planning by primal-dual splitting"};
  app.require_subcommand(1);
  Options o;

  auto* plan = app.add_subcommand("plan", "Single solve with every obstacle known");
  plan->add_option("scenario", o.scenario, "Scenario JSON file")->required();
  plan->add_option("--out", o.outdir, "Write trajectory.csv, events.json and frames here");
  plan->add_option("--seed", o.seed, "Override solver.seed");

  auto* simulate = app.add_subcommand("simulate", "Travel, discover obstacles and replan");
  simulate->add_option("scenario", o.scenario, "Scenario JSON file")->required();
  simulate->add_option("--out", o.outdir, "Write trajectory.csv, events.json and frames here");
  simulate->add_option("--seed", o.seed, "Override solver.seed");
  simulate->add_flag("--accept-unconverged", o.acceptUnconverged, "Follow plans that hit k_max");

  auto* oracle = app.add_subcommand("oracle", "Fast-march travel time at the start point");
  oracle->add_option("scenario", o.scenario, "Scenario JSON file")->required();
  oracle->add_option("--grid", o.grid, "Nodes per axis")->check(CLI::Range(16, 8193));

  auto* gradcheck = app.add_subcommand("gradcheck", "Compare Hamiltonian gradients with finite differences");
  gradcheck->add_option("scenario", o.scenario, "Scenario JSON file")->required();
  gradcheck->add_option("--samples", o.samples, "Random sample count")->check(CLI::PositiveNumber);

  auto* selftest = app.add_subcommand("selftest", "Run the built-in property checks");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp&)
  {
    out << app.help();
    return 0;
  }
  catch (const CLI::ParseError& e)
  {
    err << e.what() << "\n\n" << app.help();
    return 2;
  }

  try
  {
    std::optional<RunFailure> failure;
    if (plan->parsed())
      failure = cmd_plan(o, out);
    else if (simulate->parsed())
      failure = cmd_simulate(o, out);
    else if (oracle->parsed())
      failure = cmd_oracle(o, out);
    else if (gradcheck->parsed())
      failure = cmd_gradcheck(o, out);
    else if (selftest->parsed())
      failure = cmd_selftest(out);
    if (failure)
    {
      print_error(err, failure->message);
      return 1;
    }
    return 0;
  }
  catch (const ScenarioError& e)
  {
    print_error(err, e.what(), e.key());
  }
  catch (const std::exception& e)
  {
    print_error(err, e.what());
  }
  return 1;
}

} // namespace hjplan
