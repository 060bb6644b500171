#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "hjplan/splitting_solver.hpp"
#include "oracles.hpp"

using namespace hjplan;
using oracle::vec2;

namespace {

SmoothedHamiltonian free_constant()
{
  return SmoothedHamiltonian(VelocityField(), ObstacleSet(), GoalSpec{vec2(1, 1), 100});
}

SmoothedHamiltonian cluttered()
{
  const ObstacleSet obs({{vec2(-0.5, -0.4), 0.3}, {vec2(0.4, 0.3), 0.25}, {vec2(0.7, -0.7), 0.2}});
  return SmoothedHamiltonian(VelocityField(SeparableSinusoid{}), obs, GoalSpec{vec2(1, 1), 100}, 100);
}

PathIterate zero_iterate(int J)
{
  return {PathMatrix::Zero(2, J + 1), PathMatrix::Zero(2, J + 1), PathMatrix::Zero(2, J + 1)};
}

} // namespace

TEST(PUpdate, NoShrinkageAtGoal)
{
  EXPECT_TRUE(p_update(cluttered(), vec2(1, 1), vec2(3, 4), 1.0, 0.1).isApprox(vec2(3, 4), 0));
}

TEST(PUpdate, FullShrinkage)
{
  EXPECT_TRUE(shrink(vec2(3, 4), 10).isZero(0));
  EXPECT_TRUE(shrink(vec2(3, 4), 5).isZero(0));
  EXPECT_TRUE(shrink(vec2(0, 0), 0.5).isZero(0));
  EXPECT_TRUE(shrink(vec2(0, 0), 0.0).isZero(0));
}

TEST(PUpdate, FreeSpaceUnitShrink)
{
  const auto p = p_update(free_constant(), vec2(-1, -1), vec2(3, 4), 1.0, 1.0);
  EXPECT_NEAR(p[0], 2.4, 1e-12);
  EXPECT_NEAR(p[1], 3.2, 1e-12);
  EXPECT_LT((p - oracle::polar_prox(1.0, vec2(3, 4), 1.0)).norm(), 1e-8);
}

TEST(PUpdate, MatchesDirectProxMinimization)
{
  std::mt19937_64 rng(31);
  const auto h = cluttered();
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int i = 0; i < 300; ++i)
  {
    const auto x = oracle::uniform(rng, 2, -1.5, 1.5);
    const auto beta = oracle::uniform(rng, 2, -2, 2);
    const double sigma = u(rng), delta = 0.1 * u(rng);
    const double s = delta * goal_indicator(vec2(1, 1), 100, x) * h.field().value(x) *
                     obstacle_indicator(h.obstacles(), 100, x);
    const auto expected = oracle::polar_prox(s, beta, sigma);
    EXPECT_LT((p_update(h, x, beta, sigma, delta) - expected).norm(), 1e-8);
  }
}

TEST(XUpdate, FixedPointWithoutGradient)
{
  // Free constant field with p = 0 far from the goal has zero x-gradient.
  const auto h = free_constant();
  const auto x = vec2(-1, -1);
  EXPECT_TRUE(x_update_step(h, x, vec2(0, 0), x, 0.2, 0.2, 0.1).isApprox(x, 0));
  EXPECT_TRUE(x_update_step(h, x, vec2(0, 0), vec2(0.3, 0.4), 1.0, 0.2, 0.1).isApprox(vec2(0.3, 0.4), 1e-15));
}

TEST(XUpdate, DescendsForSmallEnoughRate)
{
  std::mt19937_64 rng(32);
  const auto h = cluttered();
  const double tau = 0.2, delta = 0.1;
  for (int i = 0; i < 100; ++i)
  {
    const auto x = oracle::uniform(rng, 2, -1.5, 1.5);
    const auto p = oracle::uniform(rng, 2, -1, 1);
    const Eigen::VectorXd nu = x + oracle::uniform(rng, 2, -0.1, 0.1);
    auto objective = [&](const Eigen::VectorXd& y) { return -delta * tau * h.value(y, p) + 0.5 * (y - nu).squaredNorm(); };
    const Eigen::VectorXd g = -delta * tau * h.grad_x(x, p) + (x - nu);
    if (g.norm() < 1e-12)
      continue;
    double gamma = 1.0;
    while (gamma > 1e-12 && objective(x_update_step(h, x, p, nu, gamma, tau, delta)) >= objective(x))
      gamma *= 0.5;
    EXPECT_GT(gamma, 1e-12);
    EXPECT_LT(objective(x_update_step(h, x, p, nu, gamma, tau, delta)), objective(x));
  }
}

TEST(X0Update, IsTheGoal)
{
  EXPECT_EQ(x0_update(vec2(1, 1)), vec2(1, 1));
  EXPECT_EQ(x0_update(vec2(0, 0)), vec2(0, 0));
}

TEST(Relaxation, Arithmetic)
{
  PathMatrix prev = PathMatrix::Zero(2, 4);
  PathMatrix next(2, 4);
  next.row(0).setConstant(1);
  next.row(1).setConstant(2);
  EXPECT_EQ(relaxation_update(next, next, 1.0), next);
  EXPECT_EQ(relaxation_update(next, prev, 0.0), next);
  const PathMatrix z = relaxation_update(next, prev, 1.0);
  EXPECT_TRUE((z.row(0).array() == 2).all());
  EXPECT_TRUE((z.row(1).array() == 4).all());
}

TEST(ConvergenceResidual, IdenticalIteratesGiveZero)
{
  const auto a = zero_iterate(10);
  EXPECT_EQ(convergence_residual(a, a), 0.0);
  EXPECT_EQ(convergence_residual(a, a, ResidualNorm::Euclidean), 0.0);
}

TEST(ConvergenceResidual, SingleEntryChange)
{
  const auto a = zero_iterate(10);
  auto b = a;
  b.p.col(3) = vec2(0.6, 0.8);
  EXPECT_NEAR(convergence_residual(b, a), 1.0, 1e-15);
  EXPECT_NEAR(convergence_residual(b, a, ResidualNorm::Euclidean), 1.0, 1e-15);
}

TEST(ConvergenceResidual, MatchesIndependentNorms)
{
  std::mt19937_64 rng(33);
  std::normal_distribution<double> n(0, 0.01);
  for (int trial = 0; trial < 50; ++trial)
  {
    const int J = 20;
    auto a = zero_iterate(J), b = zero_iterate(J);
    for (int j = 0; j <= J; ++j)
      for (int d = 0; d < 2; ++d)
      {
        b.x(d, j) = n(rng);
        b.p(d, j) = n(rng);
      }
    double sx = 0, sp = 0, mx = 0, mp = 0;
    for (int j = 0; j <= J; ++j)
    {
      const double ex = std::hypot(b.x(0, j), b.x(1, j)), ep = std::hypot(b.p(0, j), b.p(1, j));
      sx += ex * ex;
      sp += ep * ep;
      mx = std::max(mx, ex);
      mp = std::max(mp, ep);
    }
    EXPECT_NEAR(convergence_residual(b, a, ResidualNorm::Euclidean), std::max(std::sqrt(sx), std::sqrt(sp)), 1e-12);
    EXPECT_NEAR(convergence_residual(b, a, ResidualNorm::NodeMax), std::max(mx, mp), 1e-12);
  }
}

TEST(ValueFromPath, ZeroCoStatesSumGoalWeights)
{
  const auto h = cluttered();
  std::mt19937_64 rng(34);
  const int J = 30;
  auto it = zero_iterate(J);
  it.x.col(0) = vec2(1, 1);
  double expected = 0;
  for (int j = 1; j <= J; ++j)
  {
    it.x.col(j) = oracle::uniform(rng, 2, -1.5, 1.5);
    expected += 0.1 * goal_indicator(vec2(1, 1), 100, it.x.col(j));
  }
  EXPECT_NEAR(value_from_path(h, it, 0.1, vec2(1, 1)), expected, 1e-12);
}

TEST(ValueFromPath, CollapsedAtGoalIsZero)
{
  auto it = zero_iterate(8);
  it.x.colwise() = vec2(1, 1);
  it.p.setConstant(0.7);
  EXPECT_EQ(value_from_path(cluttered(), it, 0.1, vec2(1, 1)), 0.0);
}

TEST(ValueFromPath, RejectsUnpinnedGoalNode)
{
  auto it = zero_iterate(8);
  it.x.colwise() = vec2(1, 1);
  it.x(0, 0) += 1e-6;
  EXPECT_EQ(value_from_path(cluttered(), it, 0.1, vec2(1, 1)), std::numeric_limits<double>::infinity());
}

TEST(SolverParams, NodeCountAndErrors)
{
  SolverParams p;
  EXPECT_EQ(p.node_count(), 80);
  p.delta = 0.3;
  try
  {
    (void)p.node_count();
    FAIL();
  }
  catch (const std::invalid_argument& e)
  {
    EXPECT_EQ(std::string(e.what()).rfind("delta:", 0), 0u);
  }
  p.delta = 0.05;
  p.horizon_t = 4;
  EXPECT_EQ(p.node_count(), 80);
}

TEST(SolverParams, ValidationNamesField)
{
  SolverParams p;
  p.gamma_floor = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = SolverParams{};
  p.kappa = 1.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = SolverParams{};
  p.sigma = 0;
  try
  {
    p.validate();
    FAIL();
  }
  catch (const std::invalid_argument& e)
  {
    EXPECT_NE(std::string(e.what()).find("solver.sigma"), std::string::npos);
  }
}

TEST(SolverParams, GammaSchedule)
{
  const SolverParams p;
  EXPECT_EQ(p.gamma_at(0), 0.2);
  EXPECT_EQ(p.gamma_at(4999), 0.2);
  EXPECT_EQ(p.gamma_at(5000), 0.1);
  EXPECT_EQ(p.gamma_at(5999), 0.1);
  EXPECT_EQ(p.gamma_at(6000), 0.05);
  EXPECT_EQ(p.gamma_at(39999), 1e-4);
}

TEST(ResamplePath, IdentityAndEndpoints)
{
  PathMatrix path(2, 3);
  path << 0, 1, 2, 0, 0, 4;
  EXPECT_EQ(resample_path(path, 3), path);
  const auto r = resample_path(path, 5);
  EXPECT_EQ(r.col(0), path.col(0));
  EXPECT_EQ(r.col(4), path.col(2));
  EXPECT_TRUE(r.col(1).isApprox(vec2(0.5, 0), 1e-15));
  EXPECT_TRUE(r.col(3).isApprox(vec2(1.5, 2), 1e-15));
}

TEST(Solve, StartAtGoal)
{
  const auto r = solve(free_constant(), vec2(1, 1), SolverParams{});
  EXPECT_TRUE(r.converged);
  // Nodes settle inside the goal's smoothing radius 1/sqrt(A) = 0.1, not on it.
  EXPECT_NEAR(r.value, 0.0, 0.02);
  EXPECT_LT((r.path.colwise() - vec2(1, 1)).colwise().norm().maxCoeff(), 0.02);
}

TEST(Solve, FreeSpaceGeodesic)
{
  const auto start = vec2(-1, -1), goal = vec2(1, 1);
  const auto h = free_constant();
  const auto r = solve(h, start, SolverParams{});
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2 * std::sqrt(2.0), 0.02 * 2 * std::sqrt(2.0));
  EXPECT_EQ(r.path.col(0), goal);
  EXPECT_EQ(r.path.col(80), start);
  EXPECT_LT(r.residual_history.back(), SolverParams{}.tol);
  for (Eigen::Index j = 0; j < r.path.cols(); ++j)
    if (h.goal_weight(r.path.col(j)) > 0.5)
      EXPECT_LT(oracle::segment_distance(r.path.col(j), start, goal), 0.05);
}

TEST(Solve, BoundaryNodesPinnedEveryIteration)
{
  const auto start = vec2(-1, -1);
  SolverParams params;
  params.k_max = 2000;
  SolveOptions opts;
  int calls = 0;
  opts.observer = [&](int k, const PathIterate& it) {
    ++calls;
    EXPECT_EQ(k, calls);
    EXPECT_TRUE(it.p.col(0).isZero(0));
    EXPECT_EQ(it.x.col(80), start);
    EXPECT_EQ(it.x.col(0), vec2(1, 1));
  };
  const auto r = solve(cluttered(), start, params, opts);
  EXPECT_EQ(calls, r.iterations);
}

TEST(Solve, DeterministicForFixedSeed)
{
  SolverParams params;
  params.k_max = 3000;
  params.seed = 42;
  const auto a = solve(cluttered(), vec2(-1, -1), params);
  const auto b = solve(cluttered(), vec2(-1, -1), params);
  EXPECT_EQ(a.path, b.path);
  EXPECT_EQ(a.residual_history, b.residual_history);
  EXPECT_EQ(a.value, b.value);
  params.seed = 43;
  EXPECT_NE(solve(cluttered(), vec2(-1, -1), params).path, a.path);
}

TEST(Solve, ConvergedFlagMatchesHistory)
{
  SolverParams params;
  params.k_max = 500;
  const auto r = solve(free_constant(), vec2(-1, -1), params);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 500);
  EXPECT_EQ(r.residual_history.size(), 500u);
  EXPECT_FALSE(r.diagnostic.empty());
}

TEST(Solve, ReturnedPathIsFeasibleAroundCircle)
{
  const ObstacleSet obs({{vec2(0, 0), 0.5}});
  const SmoothedHamiltonian h(VelocityField(), obs, GoalSpec{vec2(1, 1), 100}, 100);
  const auto r = solve(h, vec2(-1, -1), SolverParams{});
  ASSERT_TRUE(r.converged);
  for (Eigen::Index j = 1; j < r.path.cols(); ++j)
  {
    const Eigen::VectorXd x = r.path.col(j);
    EXPECT_GE(signed_distance(obs, x).distance, -0.02);
    if (h.goal_weight(x) > 0.5)
      EXPECT_LE((x - r.path.col(j - 1)).norm() / 0.1, h.effective_speed(x) + 0.1);
  }
}

TEST(Solve, DivergenceIsReported)
{
  SolverParams params;
  params.gamma0 = 1e6;
  params.gamma_floor = 1.0;
  params.k_max = 5000;
  EXPECT_THROW(solve(cluttered(), vec2(-1, -1), params), SolverDivergence);
}

TEST(Solve, WarmStartUsesInitialPath)
{
  const auto h = free_constant();
  const auto first = solve(h, vec2(-1, -1), SolverParams{});
  SolveOptions opts;
  opts.initial_path = first.path;
  SolverParams params;
  params.k_max = 1;
  // One step moves each node by at most gamma tau |p_j - p_{j+1}| < 0.12.
  EXPECT_GT((solve(h, vec2(-1, -1), params, opts).path - first.path).cwiseAbs().maxCoeff(), 0.2);
  params.warm_start = true;
  EXPECT_LT((solve(h, vec2(-1, -1), params, opts).path - first.path).cwiseAbs().maxCoeff(), 0.12);
}
