#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace hjplan {

/// A point in state space. Co-states use the same representation.
using StateVector = Eigen::VectorXd;
using StateRef = Eigen::Ref<const Eigen::VectorXd>;

/// Signed distance reported for an empty obstacle set. Large enough that
/// tanh(B * d) rounds to exactly 1 for any sensible sharpness B.
inline constexpr double kFreeSpaceDistance = 1e9;

bool all_finite(StateRef x);

struct CircleObstacle
{
  StateVector center;
  double radius = 0.0;
};

/// Ordered union of pairwise disjoint circles (balls when d > 2).
class ObstacleSet
{
public:
  ObstacleSet() = default;

  /// Throws std::invalid_argument on a nonpositive radius, mixed dimensions
  /// or two overlapping circles (the message names both indices).
  explicit ObstacleSet(std::vector<CircleObstacle> circles);

  const std::vector<CircleObstacle>& circles() const { return myCircles; }
  const CircleObstacle& operator[](std::size_t i) const { return myCircles[i]; }
  std::size_t size() const { return myCircles.size(); }
  bool empty() const { return myCircles.empty(); }

  /// The circles at the given indices, in the given order.
  ObstacleSet subset(const std::vector<std::size_t>& indices) const;

private:
  std::vector<CircleObstacle> myCircles;
};

struct DistanceQuery
{
  double distance = kFreeSpaceDistance;
  std::optional<std::size_t> nearest;
  // Another circle is exactly as close as `nearest`.
  bool tie = false;
};

/// min_i(|x - c_i| - r_i), negative inside an obstacle. Ties resolve to the
/// lowest index.
DistanceQuery signed_distance(const ObstacleSet& obstacles, StateRef x);

/// Unit radial direction from the nearest center. Zero for an empty set and
/// at an exact circle center.
StateVector signed_distance_gradient(const ObstacleSet& obstacles, StateRef x);

/// True when x lies within `tolerance` of a circle center or of a point
/// equidistant to the two nearest circles, where the distance is not smooth.
bool near_geometry_singularity(const ObstacleSet& obstacles, StateRef x, double tolerance);

/// 1/2 + 1/2 tanh(B d(x)).
double obstacle_indicator(const ObstacleSet& obstacles, double sharpness, StateRef x);

/// 1 - exp(-A |x - x_f|^2).
double goal_indicator(StateRef goal, double sharpness, StateRef x);

struct ConstantSpeed
{
  double speed = 1.0;
};

/// v(x) = base - amplitude sin(2 pi (x1 + shift1)) sin(2 pi (x2 + shift2)).
/// Only the first two coordinates enter the field.
struct SeparableSinusoid
{
  double base = 0.75;
  double amplitude = 0.25;
  double shift1 = 0.2;
  double shift2 = 0.0;
};

/// Analytic speed field, strictly positive everywhere.
class VelocityField
{
public:
  using Variant = std::variant<ConstantSpeed, SeparableSinusoid>;

  VelocityField() : VelocityField(ConstantSpeed{}) {}

  /// Throws std::invalid_argument if the field can reach zero speed.
  VelocityField(ConstantSpeed field);
  VelocityField(SeparableSinusoid field);

  double value(StateRef x) const;
  StateVector gradient(StateRef x) const;

  /// Infimum of the speed over the whole space.
  double lower_bound() const;
  bool is_constant() const { return std::holds_alternative<ConstantSpeed>(myField); }

  const Variant& variant() const { return myField; }

private:
  Variant myField;
};

} // namespace hjplan
