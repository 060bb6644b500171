#include "hjplan/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hjplan/grid_oracle.hpp"
#include "hjplan/scenario_io.hpp"
#include "hjplan/splitting_solver.hpp"

namespace hjplan {

namespace {

StateVector uniform_point(std::mt19937_64& rng, StateRef lower, StateRef upper)
{
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  StateVector x(lower.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = lower[i] + (upper[i] - lower[i]) * u01(rng);
  return x;
}

std::string sci(double v)
{
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

ObstacleSet test_obstacles()
{
  StateVector a(2), b(2), c(2);
  a << -0.4, -0.3;
  b << 0.3, 0.2;
  c << 0.6, -0.6;
  return ObstacleSet({{a, 0.25}, {b, 0.2}, {c, 0.15}});
}

SmoothedHamiltonian test_hamiltonian()
{
  StateVector goal(2);
  goal << 1.0, 1.0;
  return SmoothedHamiltonian(VelocityField(SeparableSinusoid{}), test_obstacles(), GoalSpec{goal, kDefaultSharpness});
}

PropertyCheck check(std::string name, bool ok, std::string detail)
{
  return {std::move(name), ok, std::move(detail)};
}

} // namespace

StateVector central_difference(const std::function<double(StateRef)>& f, StateRef x, double step)
{
  StateVector g(x.size());
  StateVector y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i)
  {
    y[i] = x[i] + step;
    const double up = f(y);
    y[i] = x[i] - step;
    const double down = f(y);
    y[i] = x[i];
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

double gradient_error(StateRef approx, StateRef exact)
{
  return (approx - exact).norm() / std::max(exact.norm(), 1.0);
}

GradientCheckReport gradient_check(const SmoothedHamiltonian& hamiltonian, StateRef lower, StateRef upper,
                                   int samples, std::uint64_t seed, double step)
{
  std::mt19937_64 rng(seed);
  const StateVector pLower = StateVector::Constant(lower.size(), -1.0);
  const StateVector pUpper = StateVector::Constant(lower.size(), 1.0);

  GradientCheckReport report;
  while (report.samples < samples)
  {
    const StateVector x = uniform_point(rng, lower, upper);
    const StateVector p = uniform_point(rng, pLower, pUpper);
    if (near_geometry_singularity(hamiltonian.obstacles(), x, 1e-3) || p.norm() < 1e-3)
    {
      ++report.rejected;
      continue;
    }
    ++report.samples;

    const auto fx = [&](StateRef y) { return hamiltonian.value(y, p); };
    const auto fp = [&](StateRef q) { return hamiltonian.value(x, q); };
    report.max_error_x =
      std::max(report.max_error_x, gradient_error(central_difference(fx, x, step), hamiltonian.grad_x(x, p)));
    report.max_error_p =
      std::max(report.max_error_p, gradient_error(central_difference(fp, p, step), hamiltonian.grad_p(x, p)));
    report.max_lagrangian_gap =
      std::max(report.max_lagrangian_gap, std::abs(hamiltonian.lagrangian(x, p) - hamiltonian.goal_weight(x)));
  }
  return report;
}

std::vector<PropertyCheck> run_selftest(std::uint64_t seed)
{
  std::vector<PropertyCheck> out;
  std::mt19937_64 rng(seed);
  const StateVector lo = StateVector::Constant(2, -1.5);
  const StateVector hi = StateVector::Constant(2, 1.5);
  const auto obstacles = test_obstacles();
  const auto H = test_hamiltonian();

  {
    double worst = -1.0;
    for (int i = 0; i < 1000; ++i)
    {
      const auto x = uniform_point(rng, lo, hi);
      const auto y = uniform_point(rng, lo, hi);
      const double gap = std::abs(signed_distance(obstacles, x).distance - signed_distance(obstacles, y).distance) -
                         (x - y).norm();
      worst = std::max(worst, gap);
    }
    out.push_back(check("signed distance is 1-Lipschitz", worst <= 1e-12, "max excess " + sci(worst)));
  }

  {
    // 1 - exp(-A r^2) rounds to exactly 1 once exp(-A r^2) < eps/2, so the
    // strict upper bound is only checked where it is representable.
    bool ok = true;
    const StateVector& goal = H.goal().target;
    for (int i = 0; i < 1000 && ok; ++i)
    {
      StateVector x = goal + 0.3 * uniform_point(rng, -StateVector::Ones(2), StateVector::Ones(2));
      if (i % 2)
        x = uniform_point(rng, lo, hi);
      const double chi = goal_indicator(goal, kDefaultSharpness, x);
      const bool representable = kDefaultSharpness * (x - goal).squaredNorm() < 36.0;
      ok = chi >= 0.0 && chi <= 1.0 && (!representable || chi < 1.0) && (chi > 0.0 || x == goal);
    }
    ok = ok && goal_indicator(goal, kDefaultSharpness, goal) == 0.0;
    out.push_back(check("goal weight lies in [0,1] and vanishes only at the goal", ok, ""));
  }

  {
    double homogeneity = 0.0;
    double lowerBound = 0.0;
    double lagrangian = 0.0;
    for (int i = 0; i < 1000; ++i)
    {
      const auto x = uniform_point(rng, lo, hi);
      const StateVector p = uniform_point(rng, lo, hi);
      const double lambda = 0.1 + 4.9 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const double chi = H.goal_weight(x);
      homogeneity =
        std::max(homogeneity, std::abs(H.value(x, lambda * p) + chi - lambda * (H.value(x, p) + chi)));
      lowerBound = std::max(lowerBound, -chi - H.value(x, p));
      if (p.norm() > 0.0)
        lagrangian = std::max(lagrangian, std::abs(H.lagrangian(x, p) - chi));
    }
    out.push_back(check("H + chi is 1-homogeneous in p", homogeneity < 1e-12, "max gap " + sci(homogeneity)));
    out.push_back(check("H >= -chi", lowerBound <= 0.0, "max violation " + sci(lowerBound)));
    out.push_back(check("Lagrangian equals the goal weight", lagrangian < 1e-12, "max gap " + sci(lagrangian)));
  }

  {
    const auto report = gradient_check(H, lo, hi, 200, seed + 1);
    const double worst = std::max(report.max_error_x, report.max_error_p);
    out.push_back(check("analytic gradients match central differences", worst < 1e-5,
                        "max error x " + sci(report.max_error_x) + ", p " + sci(report.max_error_p)));
  }

  {
    // First-order optimality of the co-state prox: either p = 0 with
    // |beta| <= c, or p - beta + sigma delta grad_p H = 0.
    double worst = 0.0;
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int i = 0; i < 1000; ++i)
    {
      const auto x = uniform_point(rng, lo, hi);
      const StateVector beta = uniform_point(rng, lo, hi);
      const double sigma = u(rng);
      const double delta = 0.1 * u(rng);
      const StateVector p = p_update(H, x, beta, sigma, delta);
      if (p.norm() == 0.0)
        worst = std::max(worst, beta.norm() - sigma * delta * H.effective_speed(x) * H.goal_weight(x));
      else
        worst = std::max(worst, (p - beta + sigma * delta * H.grad_p(x, p)).norm());
    }
    out.push_back(check("co-state update satisfies its optimality condition", worst < 1e-12, "max residual " + sci(worst)));
  }

  {
    StateVector start(2), goal(2);
    start << -1.0, -1.0;
    goal << 1.0, 1.0;
    const SmoothedHamiltonian free(VelocityField(), ObstacleSet(), GoalSpec{goal, kDefaultSharpness});
    SolverParams params;
    params.k_max = 300;
    params.seed = seed;
    const int J = params.node_count();
    bool pinned = true;
    SolveOptions options;
    options.observer = [&](int, const PathIterate& it) {
      pinned = pinned && it.p.col(0).isZero(0.0) && it.x.col(J) == start && it.x.col(0) == goal;
    };
    const auto a = solve(free, start, params, options);
    const auto b = solve(free, start, params);
    out.push_back(check("boundary nodes stay pinned during a solve", pinned, ""));
    out.push_back(check("solves are deterministic for a fixed seed",
                        a.path == b.path && a.residual_history == b.residual_history, ""));
  }

  {
    StateVector goal(2);
    goal << 1.0, 1.0;
    GridSpec grid{lo, hi, {65, 65}};
    const auto t = fast_march(VelocityField(SeparableSinusoid{}), obstacles, goal, grid);
    const auto& order = t.acceptance_order();
    const bool causal = std::is_sorted(order.begin(), order.end());
    out.push_back(check("fast-march accepts nodes in nondecreasing order", causal, std::to_string(order.size()) + " nodes"));
  }

  {
    const auto spec = parse_scenario_text(R"({"start": [-1, -1], "goal": [1, 1],
      "velocity": {"type": "sinusoid"}, "obstacles": [{"center": [0.1, 0.2], "radius": 0.3}],
      "solver": {"seed": 7, "tol": 0.000123}})");
    const auto doc = scenario_to_json(spec);
    const auto again = scenario_to_json(parse_scenario(doc));
    out.push_back(check("scenario documents round-trip", doc == again, ""));
  }

  return out;
}

} // namespace hjplan
