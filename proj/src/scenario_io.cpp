#include "hjplan/scenario_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hjplan/frame_render.hpp"

namespace hjplan {

using nlohmann::json;

ScenarioError::ScenarioError(std::string key, const std::string& message)
  : std::runtime_error(key + ": " + message), myKey(std::move(key))
{
}

namespace {

std::string join(const std::string& prefix, const std::string& key)
{
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed)
{
  for (const auto& [key, _] : obj.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ScenarioError(join(prefix, key), "unknown key");
}

const json& require_object(const json& v, const std::string& key)
{
  if (!v.is_object())
    throw ScenarioError(key, "expected an object");
  return v;
}

double as_number(const json& v, const std::string& key)
{
  if (!v.is_number())
    throw ScenarioError(key, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& key)
{
  if (!v.is_number_integer())
    throw ScenarioError(key, "expected an integer");
  const auto i = v.get<long long>();
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max())
    throw ScenarioError(key, "integer out of range");
  return static_cast<int>(i);
}

bool as_bool(const json& v, const std::string& key)
{
  if (!v.is_boolean())
    throw ScenarioError(key, "expected true or false");
  return v.get<bool>();
}

StateVector as_point(const json& v, const std::string& key)
{
  if (!v.is_array() || v.empty())
    throw ScenarioError(key, "expected a nonempty array of numbers");
  StateVector x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    x[static_cast<Eigen::Index>(i)] = as_number(v[i], key + "[" + std::to_string(i) + "]");
  return x;
}

template <class T, class F>
void read_opt(const json& obj, const char* name, const std::string& prefix, T& out, F convert)
{
  if (auto it = obj.find(name); it != obj.end())
    out = convert(*it, join(prefix, name));
}

// Validation errors from the domain types carry "key: message".
[[noreturn]] void rethrow_keyed(const std::exception& e, const std::string& fallbackKey)
{
  const std::string what = e.what();
  const auto colon = what.find(": ");
  if (colon != std::string::npos && what.find(' ') > colon)
    throw ScenarioError(what.substr(0, colon), what.substr(colon + 2));
  throw ScenarioError(fallbackKey, what);
}

VelocityField parse_velocity(const json& v)
{
  require_object(v, "velocity");
  const auto typeIt = v.find("type");
  if (typeIt == v.end() || !typeIt->is_string())
    throw ScenarioError("velocity.type", "expected \"constant\" or \"sinusoid\"");
  const auto type = typeIt->get<std::string>();
  try
  {
    if (type == "constant")
    {
      reject_unknown(v, "velocity", {"type", "speed"});
      ConstantSpeed f;
      read_opt(v, "speed", "velocity", f.speed, as_number);
      return VelocityField(f);
    }
    if (type == "sinusoid")
    {
      reject_unknown(v, "velocity", {"type", "base", "amplitude", "shift1", "shift2"});
      SeparableSinusoid f;
      read_opt(v, "base", "velocity", f.base, as_number);
      read_opt(v, "amplitude", "velocity", f.amplitude, as_number);
      read_opt(v, "shift1", "velocity", f.shift1, as_number);
      read_opt(v, "shift2", "velocity", f.shift2, as_number);
      return VelocityField(f);
    }
  }
  catch (const std::invalid_argument& e)
  {
    throw ScenarioError("velocity", e.what());
  }
  throw ScenarioError("velocity.type", "unknown field type \"" + type + "\"");
}

ObstacleSet parse_obstacles(const json& v)
{
  if (!v.is_array())
    throw ScenarioError("obstacles", "expected an array");
  std::vector<CircleObstacle> circles;
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    const std::string key = "obstacles[" + std::to_string(i) + "]";
    require_object(v[i], key);
    reject_unknown(v[i], key, {"center", "radius"});
    if (!v[i].contains("center") || !v[i].contains("radius"))
      throw ScenarioError(key, "needs center and radius");
    circles.push_back({as_point(v[i]["center"], key + ".center"), as_number(v[i]["radius"], key + ".radius")});
  }
  try
  {
    return ObstacleSet(std::move(circles));
  }
  catch (const std::invalid_argument& e)
  {
    throw ScenarioError("obstacles", e.what());
  }
}

void parse_solver(const json& v, SolverParams& s)
{
  require_object(v, "solver");
  reject_unknown(v, "solver",
                 {"sigma", "tau", "kappa", "tol", "k_max", "gamma0", "gamma_warmup", "gamma_halve_every",
                  "gamma_floor", "seed", "init_box", "residual_norm", "warm_start"});
  read_opt(v, "sigma", "solver", s.sigma, as_number);
  read_opt(v, "tau", "solver", s.tau, as_number);
  read_opt(v, "kappa", "solver", s.kappa, as_number);
  read_opt(v, "tol", "solver", s.tol, as_number);
  read_opt(v, "k_max", "solver", s.k_max, as_int);
  read_opt(v, "gamma0", "solver", s.gamma0, as_number);
  read_opt(v, "gamma_warmup", "solver", s.gamma_warmup, as_int);
  read_opt(v, "gamma_halve_every", "solver", s.gamma_halve_every, as_int);
  read_opt(v, "gamma_floor", "solver", s.gamma_floor, as_number);
  read_opt(v, "warm_start", "solver", s.warm_start, as_bool);
  if (auto it = v.find("seed"); it != v.end())
  {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0))
      throw ScenarioError("solver.seed", "expected a nonnegative integer");
    s.seed = it->get<std::uint64_t>();
  }
  if (auto it = v.find("init_box"); it != v.end())
  {
    if (!it->is_array() || it->size() != 2)
      throw ScenarioError("solver.init_box", "expected [[lower...], [upper...]]");
    s.init_lower = as_point((*it)[0], "solver.init_box[0]");
    s.init_upper = as_point((*it)[1], "solver.init_box[1]");
  }
  if (auto it = v.find("residual_norm"); it != v.end())
  {
    const auto name = it->is_string() ? it->get<std::string>() : std::string();
    if (name == "node_max")
      s.residual_norm = ResidualNorm::NodeMax;
    else if (name == "euclidean")
      s.residual_norm = ResidualNorm::Euclidean;
    else
      throw ScenarioError("solver.residual_norm", "expected \"node_max\" or \"euclidean\"");
  }
}

json point_json(StateRef x)
{
  json a = json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i)
    a.push_back(x[i]);
  return a;
}

json stats_json(const SolveStats& s)
{
  return {{"iterations", s.iterations}, {"converged", s.converged}, {"value", s.value}};
}

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(path.string() + ": cannot open for writing");
  out << content;
  out.close();
  if (!out)
    throw std::runtime_error(path.string() + ": write failed");
}

} // namespace

ScenarioSpec parse_scenario(const json& doc)
{
  require_object(doc, "scenario");
  reject_unknown(doc, "",
                 {"start", "goal", "horizon_t", "delta", "velocity", "obstacles", "discovery_radius", "solver",
                  "smoothing", "max_replans", "accept_unconverged", "bounds"});
  if (!doc.contains("start"))
    throw ScenarioError("start", "required");
  if (!doc.contains("goal"))
    throw ScenarioError("goal", "required");

  ScenarioSpec spec;
  spec.start = as_point(doc["start"], "start");
  spec.goal.target = as_point(doc["goal"], "goal");
  const auto d = spec.start.size();
  spec.solver.init_lower = StateVector::Constant(d, -1.5);
  spec.solver.init_upper = StateVector::Constant(d, 1.5);
  spec.bounds_lower = StateVector::Constant(d, -1.5);
  spec.bounds_upper = StateVector::Constant(d, 1.5);

  read_opt(doc, "horizon_t", "", spec.solver.horizon_t, as_number);
  read_opt(doc, "delta", "", spec.solver.delta, as_number);
  if (auto it = doc.find("velocity"); it != doc.end())
    spec.field = parse_velocity(*it);
  if (auto it = doc.find("obstacles"); it != doc.end())
    spec.true_obstacles = parse_obstacles(*it);
  read_opt(doc, "discovery_radius", "", spec.discovery_radius, as_number);
  read_opt(doc, "max_replans", "", spec.max_replans, as_int);
  read_opt(doc, "accept_unconverged", "", spec.accept_unconverged, as_bool);
  if (auto it = doc.find("solver"); it != doc.end())
    parse_solver(*it, spec.solver);
  if (auto it = doc.find("smoothing"); it != doc.end())
  {
    require_object(*it, "smoothing");
    reject_unknown(*it, "smoothing", {"A", "B"});
    read_opt(*it, "A", "smoothing", spec.goal.sharpness, as_number);
    read_opt(*it, "B", "smoothing", spec.sharpness_B, as_number);
  }
  if (auto it = doc.find("bounds"); it != doc.end())
  {
    require_object(*it, "bounds");
    reject_unknown(*it, "bounds", {"lower", "upper"});
    read_opt(*it, "lower", "bounds", spec.bounds_lower, as_point);
    read_opt(*it, "upper", "bounds", spec.bounds_upper, as_point);
  }

  try
  {
    spec.solver.validate();
    spec.validate();
  }
  catch (const std::invalid_argument& e)
  {
    rethrow_keyed(e, "scenario");
  }
  return spec;
}

ScenarioSpec parse_scenario_text(const std::string& text)
{
  json doc;
  try
  {
    doc = json::parse(text);
  }
  catch (const json::parse_error& e)
  {
    throw ScenarioError("document", e.what());
  }
  return parse_scenario(doc);
}

ScenarioSpec load_scenario(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ScenarioError("path", path.string() + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

json scenario_to_json(const ScenarioSpec& spec)
{
  json velocity;
  std::visit(
    [&](const auto& f) {
      using T = std::decay_t<decltype(f)>;
      if constexpr (std::is_same_v<T, ConstantSpeed>)
        velocity = {{"type", "constant"}, {"speed", f.speed}};
      else
        velocity = {{"type", "sinusoid"},
                    {"base", f.base},
                    {"amplitude", f.amplitude},
                    {"shift1", f.shift1},
                    {"shift2", f.shift2}};
    },
    spec.field.variant());

  json obstacles = json::array();
  for (const auto& c : spec.true_obstacles.circles())
    obstacles.push_back({{"center", point_json(c.center)}, {"radius", c.radius}});

  const auto& s = spec.solver;
  json solver = {{"sigma", s.sigma},
                 {"tau", s.tau},
                 {"kappa", s.kappa},
                 {"tol", s.tol},
                 {"k_max", s.k_max},
                 {"gamma0", s.gamma0},
                 {"gamma_warmup", s.gamma_warmup},
                 {"gamma_halve_every", s.gamma_halve_every},
                 {"gamma_floor", s.gamma_floor},
                 {"seed", s.seed},
                 {"init_box", json::array({point_json(s.init_lower), point_json(s.init_upper)})},
                 {"residual_norm", s.residual_norm == ResidualNorm::NodeMax ? "node_max" : "euclidean"},
                 {"warm_start", s.warm_start}};

  return {{"start", point_json(spec.start)},
          {"goal", point_json(spec.goal.target)},
          {"horizon_t", s.horizon_t},
          {"delta", s.delta},
          {"velocity", velocity},
          {"obstacles", obstacles},
          {"discovery_radius", spec.discovery_radius},
          {"solver", solver},
          {"smoothing", {{"A", spec.goal.sharpness}, {"B", spec.sharpness_B}}},
          {"max_replans", spec.max_replans},
          {"accept_unconverged", spec.accept_unconverged},
          {"bounds", {{"lower", point_json(spec.bounds_lower)}, {"upper", point_json(spec.bounds_upper)}}}};
}

std::string trajectory_csv(const ReplanTrace& trace, const ScenarioSpec& spec)
{
  const double delta = spec.solver.delta;
  std::string out = std::string(kTrajectoryHeader) + "\n";

  auto row = [&](std::size_t node, StateRef x, const char* phase, std::size_t plan) {
    out += std::to_string(node) + "," + fmt(static_cast<double>(node) * delta) + "," + fmt(x[0]) + "," +
           fmt(x.size() > 1 ? x[1] : 0.0) + "," + phase + "," + std::to_string(plan) + "\n";
  };

  for (std::size_t id = 0; id < trace.plans.size(); ++id)
  {
    std::vector<const TraveledNode*> traveled;
    for (const auto& n : trace.traveled_nodes)
      if (n.plan_id == id)
        traveled.push_back(&n);
    std::stable_sort(traveled.begin(), traveled.end(),
                     [](const TraveledNode* a, const TraveledNode* b) { return a->node_index < b->node_index; });

    const auto& path = trace.plans[id].path;
    auto t = traveled.begin();
    for (Eigen::Index j = 0; j < path.cols(); ++j)
    {
      const auto node = static_cast<std::size_t>(j);
      row(node, path.col(j), "planned", id);
      for (; t != traveled.end() && (*t)->node_index == node; ++t)
        row(node, (*t)->position, "traveled", id);
    }
    for (; t != traveled.end(); ++t)
      row((*t)->node_index, (*t)->position, "traveled", id);
  }
  return out;
}

json events_json(const ReplanTrace& trace)
{
  json events = json::array();
  for (std::size_t k = 0; k < trace.events.size(); ++k)
  {
    const auto& e = trace.events[k];
    events.push_back({{"event", k},
                      {"replan_id", k + 1},
                      {"position", point_json(e.position)},
                      {"node_index", e.node_index},
                      {"discovered", e.discovered},
                      {"solver", stats_json(e.solve_stats)}});
  }
  json doc = {{"reached_goal", trace.reached_goal},
              {"total_nodes_traveled", trace.total_nodes_traveled},
              {"diagnostic", trace.diagnostic},
              {"events", events}};
  if (!trace.plans.empty())
    doc["initial_plan"] = stats_json(trace.plans.front().stats);
  return doc;
}

ReplanTrace single_plan_trace(const SolveResult& result, std::vector<std::size_t> known)
{
  ReplanTrace trace;
  trace.plans.push_back({result.path, {result.iterations, result.converged, result.value}, std::move(known)});
  if (!result.converged)
    trace.diagnostic = result.diagnostic;
  return trace;
}

std::vector<std::filesystem::path> emit_outputs(const ReplanTrace& trace, const ScenarioSpec& spec,
                                                const std::filesystem::path& outdir)
{
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec)
    throw std::runtime_error(outdir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(outdir / name, content);
    written.push_back(outdir / name);
  };

  emit("trajectory.csv", trajectory_csv(trace, spec));
  emit("events.json", events_json(trace).dump(2) + "\n");
  const auto frames = trace_frames(trace);
  for (std::size_t k = 0; k < frames.size(); ++k)
    emit("frame_" + std::to_string(k) + ".svg", render_frame_svg(spec, frames[k]));
  return written;
}

} // namespace hjplan
