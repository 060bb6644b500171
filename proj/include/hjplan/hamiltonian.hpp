#pragma once

#include "hjplan/geometry_field.hpp"

namespace hjplan {

inline constexpr double kDefaultSharpness = 100.0;

struct GoalSpec
{
  StateVector target;
  double sharpness = kDefaultSharpness; // A
};

/// Pointwise pieces of the Hamiltonian at a state x. Computing them once
/// lets the solver evaluate H and its gradients without repeating the
/// geometry queries.
struct LocalTerms
{
  double goal_weight = 0.0; // chi(x), smoothed 1_{x != x_f}
  StateVector goal_weight_gradient;
  double speed = 0.0; // v(x)
  StateVector speed_gradient;
  double clearance = 0.0; // O(x), smoothed obstacle indicator
  StateVector clearance_gradient;

  double effective_speed() const { return speed * clearance; }
};

/// Isotropic minimal-time Hamiltonian with smoothed goal and obstacle
/// indicators:
///
///   H(x, p) = chi(x) (v(x) O(x) |p| - 1)
///
/// O multiplies the speed only; the constant term is weighted by chi alone.
class SmoothedHamiltonian
{
public:
  /// Throws std::invalid_argument on nonpositive sharpness or a goal whose
  /// dimension does not match the obstacles.
  SmoothedHamiltonian(VelocityField field, ObstacleSet obstacles, GoalSpec goal,
                      double obstacleSharpness = kDefaultSharpness);

  LocalTerms local_terms(StateRef x) const;

  double value(StateRef x, StateRef p) const;
  StateVector grad_x(StateRef x, StateRef p) const;

  /// chi v O p/|p|, with the zero vector selected at p = 0.
  StateVector grad_p(StateRef x, StateRef p) const;

  /// <p, grad_p H> - H. Equals chi(x) for any p != 0.
  double lagrangian(StateRef x, StateRef p) const;

  double goal_weight(StateRef x) const;
  double effective_speed(StateRef x) const;

  const VelocityField& field() const { return myField; }
  const ObstacleSet& obstacles() const { return myObstacles; }
  const GoalSpec& goal() const { return myGoal; }
  double obstacle_sharpness() const { return myObstacleSharpness; }
  Eigen::Index dimension() const { return myGoal.target.size(); }

private:
  VelocityField myField;
  ObstacleSet myObstacles;
  GoalSpec myGoal;
  double myObstacleSharpness;
};

/// grad_x H evaluated from precomputed local terms.
StateVector grad_x_from_terms(const LocalTerms& terms, StateRef p);

} // namespace hjplan
