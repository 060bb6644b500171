#include "hjplan/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hjplan {

SmoothedHamiltonian::SmoothedHamiltonian(VelocityField field, ObstacleSet obstacles, GoalSpec goal,
                                         double obstacleSharpness)
  : myField(std::move(field)),
    myObstacles(std::move(obstacles)),
    myGoal(std::move(goal)),
    myObstacleSharpness(obstacleSharpness)
{
  if (!(myGoal.sharpness > 0.0))
    throw std::invalid_argument("goal sharpness A must be positive");
  if (!(myObstacleSharpness > 0.0))
    throw std::invalid_argument("obstacle sharpness B must be positive");
  if (myGoal.target.size() == 0 || !all_finite(myGoal.target))
    throw std::invalid_argument("goal must be a finite, nonempty state");
  if (!myObstacles.empty() && myObstacles[0].center.size() != myGoal.target.size())
    throw std::invalid_argument("obstacle dimension does not match goal dimension");
}

LocalTerms SmoothedHamiltonian::local_terms(StateRef x) const
{
  LocalTerms t;

  const StateVector offset = x - myGoal.target;
  const double exponent = -myGoal.sharpness * offset.squaredNorm();
  const double decay = std::exp(exponent);
  t.goal_weight = -std::expm1(exponent);
  t.goal_weight_gradient = (2.0 * myGoal.sharpness * decay) * offset;

  t.speed = myField.value(x);
  t.speed_gradient = myField.gradient(x);

  const auto query = signed_distance(myObstacles, x);
  const double bd = myObstacleSharpness * query.distance;
  t.clearance = 0.5 + 0.5 * std::tanh(bd);
  if (query.nearest)
  {
    // sech^2 underflows to zero far from obstacles, which is the right limit.
    const double sech = 1.0 / std::cosh(std::min(std::abs(bd), 700.0));
    t.clearance_gradient =
      (0.5 * myObstacleSharpness * sech * sech) * signed_distance_gradient(myObstacles, x);
  }
  else
    t.clearance_gradient = StateVector::Zero(x.size());

  return t;
}

double SmoothedHamiltonian::value(StateRef x, StateRef p) const
{
  const double chi = goal_weight(x);
  return chi * (effective_speed(x) * p.norm() - 1.0);
}

StateVector grad_x_from_terms(const LocalTerms& t, StateRef p)
{
  const double pn = p.norm();
  return t.goal_weight_gradient * (t.effective_speed() * pn - 1.0) +
         (t.goal_weight * pn) * (t.speed_gradient * t.clearance + t.speed * t.clearance_gradient);
}

StateVector SmoothedHamiltonian::grad_x(StateRef x, StateRef p) const
{
  return grad_x_from_terms(local_terms(x), p);
}

StateVector SmoothedHamiltonian::grad_p(StateRef x, StateRef p) const
{
  const double pn = p.norm();
  if (pn == 0.0)
    return StateVector::Zero(p.size());
  return (goal_weight(x) * effective_speed(x) / pn) * p;
}

double SmoothedHamiltonian::lagrangian(StateRef x, StateRef p) const
{
  return p.dot(grad_p(x, p)) - value(x, p);
}

double SmoothedHamiltonian::goal_weight(StateRef x) const
{
  return goal_indicator(myGoal.target, myGoal.sharpness, x);
}

double SmoothedHamiltonian::effective_speed(StateRef x) const
{
  return myField.value(x) * obstacle_indicator(myObstacles, myObstacleSharpness, x);
}

} // namespace hjplan
