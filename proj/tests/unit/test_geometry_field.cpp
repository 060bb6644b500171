#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hjplan/geometry_field.hpp"
#include "oracles.hpp"

using namespace hjplan;
using oracle::vec2;

namespace {

ObstacleSet unit_circle_half()
{
  return ObstacleSet({{vec2(0, 0), 0.5}});
}

ObstacleSet scattered()
{
  return ObstacleSet({{vec2(-0.5, -0.4), 0.3}, {vec2(0.4, 0.3), 0.25}, {vec2(0.7, -0.7), 0.2}});
}

} // namespace

TEST(SignedDistance, PointOutsideSingleCircle)
{
  const auto q = signed_distance(unit_circle_half(), vec2(1, 0));
  EXPECT_DOUBLE_EQ(q.distance, 0.5);
  ASSERT_TRUE(q.nearest);
  EXPECT_EQ(*q.nearest, 0u);
}

TEST(SignedDistance, InteriorPointIsNegative)
{
  EXPECT_DOUBLE_EQ(signed_distance(unit_circle_half(), vec2(0.2, 0)).distance, -0.3);
}

TEST(SignedDistance, MinimumOverTwoCircles)
{
  const ObstacleSet obs({{vec2(0, 0), 0.5}, {vec2(2, 0), 0.3}});
  const auto q = signed_distance(obs, vec2(1.5, 0));
  EXPECT_NEAR(q.distance, 0.2, 1e-15);
  EXPECT_EQ(*q.nearest, 1u);
}

TEST(SignedDistance, EmptySetUsesSentinel)
{
  const auto q = signed_distance(ObstacleSet(), vec2(3, 4));
  EXPECT_EQ(q.distance, kFreeSpaceDistance);
  EXPECT_FALSE(q.nearest);
}

TEST(SignedDistance, TieResolvesToLowestIndex)
{
  const ObstacleSet obs({{vec2(-1, 0), 0.5}, {vec2(1, 0), 0.5}});
  const auto q = signed_distance(obs, vec2(0, 0.3));
  EXPECT_EQ(*q.nearest, 0u);
  EXPECT_TRUE(q.tie);
}

TEST(SignedDistance, IsOneLipschitz)
{
  std::mt19937_64 rng(11);
  const auto obs = scattered();
  for (int i = 0; i < 2000; ++i)
  {
    const auto x = oracle::uniform(rng, 2, -1.5, 1.5);
    const auto y = oracle::uniform(rng, 2, -1.5, 1.5);
    EXPECT_LE(std::abs(signed_distance(obs, x).distance - signed_distance(obs, y).distance), (x - y).norm() + 1e-12);
  }
}

TEST(SignedDistanceGradient, RadialDirection)
{
  EXPECT_TRUE(signed_distance_gradient(unit_circle_half(), vec2(1, 0)).isApprox(vec2(1, 0)));
  EXPECT_TRUE(signed_distance_gradient(unit_circle_half(), vec2(0, -2)).isApprox(vec2(0, -1)));
}

TEST(SignedDistanceGradient, DegenerateChoices)
{
  EXPECT_TRUE(signed_distance_gradient(ObstacleSet(), vec2(1, 1)).isZero(0));
  EXPECT_TRUE(signed_distance_gradient(unit_circle_half(), vec2(0, 0)).isZero(0));
  const ObstacleSet obs({{vec2(-1, 0), 0.5}, {vec2(1, 0), 0.5}});
  EXPECT_TRUE(signed_distance_gradient(obs, vec2(0, 0.5)).isApprox(vec2(1, 0.5).normalized()));
}

TEST(SignedDistanceGradient, MatchesFiniteDifferences)
{
  std::mt19937_64 rng(12);
  const auto obs = scattered();
  int checked = 0;
  while (checked < 100)
  {
    const auto x = oracle::uniform(rng, 2, -1.5, 1.5);
    if (near_geometry_singularity(obs, x, 1e-3))
      continue;
    ++checked;
    const auto fd = oracle::central_gradient([&](const Eigen::VectorXd& y) { return signed_distance(obs, y).distance; }, x, 1e-5);
    EXPECT_LT(oracle::relative_error(fd, signed_distance_gradient(obs, x)), 1e-6);
  }
}

TEST(ObstacleSet, RejectsOverlapNamingBothIndices)
{
  try
  {
    ObstacleSet({{vec2(0, 0), 0.5}, {vec2(3, 3), 0.1}, {vec2(0.8, 0), 0.4}});
    FAIL() << "overlap accepted";
  }
  catch (const std::invalid_argument& e)
  {
    const std::string what = e.what();
    EXPECT_NE(what.find('0'), std::string::npos);
    EXPECT_NE(what.find('2'), std::string::npos);
  }
}

TEST(ObstacleSet, RejectsNonpositiveRadius)
{
  EXPECT_THROW(ObstacleSet({{vec2(0, 0), 0.0}}), std::invalid_argument);
  EXPECT_THROW(ObstacleSet({{vec2(0, 0), -1.0}}), std::invalid_argument);
}

TEST(ObstacleSet, TouchingCirclesAreNotDisjoint)
{
  EXPECT_THROW(ObstacleSet({{vec2(0, 0), 0.5}, {vec2(1, 0), 0.5}}), std::invalid_argument);
}

TEST(ObstacleIndicator, BoundaryIsHalf)
{
  EXPECT_DOUBLE_EQ(obstacle_indicator(unit_circle_half(), 100, vec2(0.5, 0)), 0.5);
}

TEST(ObstacleIndicator, EmptySetIsExactlyOne)
{
  EXPECT_EQ(obstacle_indicator(ObstacleSet(), 100, vec2(0.1, 0.2)), 1.0);
}

TEST(ObstacleIndicator, TenthOutsideWithSharpness100)
{
  EXPECT_NEAR(obstacle_indicator(unit_circle_half(), 100, vec2(0.6, 0)), 0.999999997938846381809796, 1e-15);
}

TEST(ObstacleIndicator, MonotoneAlongRaysFromNearestCenter)
{
  std::mt19937_64 rng(13);
  const auto obs = scattered();
  for (int i = 0; i < 200; ++i)
  {
    const auto k = static_cast<std::size_t>(i % 3);
    const double angle = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(rng);
    const Eigen::VectorXd dir = vec2(std::cos(angle), std::sin(angle));
    double previous = -1;
    for (double s = 0.0; s < 0.6; s += 0.002)
    {
      const Eigen::VectorXd x = obs[k].center + s * dir;
      const auto q = signed_distance(obs, x);
      if (!q.nearest || *q.nearest != k)
        break;
      const double o = obstacle_indicator(obs, 100, x);
      EXPECT_GE(o, previous);
      previous = o;
    }
  }
}

TEST(GoalIndicator, ZeroAtGoal)
{
  EXPECT_EQ(goal_indicator(vec2(1, 1), 100, vec2(1, 1)), 0.0);
}

TEST(GoalIndicator, HalfAtLogTwoRadius)
{
  const double r = std::sqrt(std::log(2.0) / 100);
  EXPECT_NEAR(goal_indicator(vec2(1, 1), 100, vec2(1 + r, 1)), 0.5, 1e-15);
}

TEST(GoalIndicator, SaturatesFarAway)
{
  EXPECT_NEAR(goal_indicator(vec2(0, 0), 100, vec2(1, 1)), 1.0, 1e-15);
}

TEST(GoalIndicator, RangeAndZeroSet)
{
  std::mt19937_64 rng(14);
  const auto goal = vec2(1, 1);
  for (int i = 0; i < 2000; ++i)
  {
    const Eigen::VectorXd x = goal + oracle::uniform(rng, 2, -0.5, 0.5);
    const double chi = goal_indicator(goal, 100, x);
    EXPECT_GT(chi, 0.0);
    EXPECT_LE(chi, 1.0);
    // 1 - exp(-A r^2) is representable below 1 only while exp(-A r^2) > eps/2.
    if (100 * (x - goal).squaredNorm() < 36)
      EXPECT_LT(chi, 1.0);
  }
}

TEST(VelocityField, ConstantValueAndGradient)
{
  const VelocityField v;
  EXPECT_EQ(v.value(vec2(0.3, -7)), 1.0);
  EXPECT_TRUE(v.gradient(vec2(0.3, -7)).isZero(0));
}

TEST(VelocityField, SinusoidKnownValues)
{
  const VelocityField v(SeparableSinusoid{});
  EXPECT_NEAR(v.value(vec2(-1, -1)), 0.75, 1e-15);
  EXPECT_NEAR(v.value(vec2(0.05, 0.25)), 0.5, 1e-15);
  EXPECT_LT(v.gradient(vec2(0.05, 0.25)).norm(), 1e-14);
}

TEST(VelocityField, SinusoidGradientMatchesFiniteDifferences)
{
  std::mt19937_64 rng(15);
  const VelocityField v(SeparableSinusoid{});
  for (int i = 0; i < 100; ++i)
  {
    const auto x = oracle::uniform(rng, 2, -1.5, 1.5);
    const auto fd = oracle::central_gradient([&](const Eigen::VectorXd& y) { return v.value(y); }, x, 1e-5);
    EXPECT_LT(oracle::relative_error(fd, v.gradient(x)), 1e-6);
  }
}

TEST(VelocityField, RejectsFieldsReachingZero)
{
  EXPECT_THROW(VelocityField(ConstantSpeed{0.0}), std::invalid_argument);
  EXPECT_THROW(VelocityField(SeparableSinusoid{0.25, 0.25, 0, 0}), std::invalid_argument);
  EXPECT_THROW(VelocityField(SeparableSinusoid{0.2, -0.3, 0, 0}), std::invalid_argument);
  EXPECT_DOUBLE_EQ(VelocityField(SeparableSinusoid{}).lower_bound(), 0.5);
}
