#include "hjplan/geometry_field.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hjplan {

bool all_finite(StateRef x)
{
  return x.allFinite();
}

ObstacleSet::ObstacleSet(std::vector<CircleObstacle> circles) : myCircles(std::move(circles))
{
  for (std::size_t i = 0; i < myCircles.size(); ++i)
  {
    const auto& c = myCircles[i];
    if (!(c.radius > 0.0) || !std::isfinite(c.radius))
      throw std::invalid_argument("obstacle " + std::to_string(i) + " has nonpositive radius");
    if (c.center.size() == 0 || !all_finite(c.center))
      throw std::invalid_argument("obstacle " + std::to_string(i) + " has an invalid center");
    if (c.center.size() != myCircles.front().center.size())
      throw std::invalid_argument("obstacle " + std::to_string(i) + " has mismatched dimension");
  }

  for (std::size_t i = 0; i < myCircles.size(); ++i)
    for (std::size_t j = i + 1; j < myCircles.size(); ++j)
    {
      const double gap = (myCircles[i].center - myCircles[j].center).norm();
      if (!(gap > myCircles[i].radius + myCircles[j].radius))
        throw std::invalid_argument("obstacles " + std::to_string(i) + " and " + std::to_string(j) +
                                    " overlap");
    }
}

ObstacleSet ObstacleSet::subset(const std::vector<std::size_t>& indices) const
{
  std::vector<CircleObstacle> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices)
    picked.push_back(myCircles.at(i));
  return ObstacleSet(std::move(picked));
}

DistanceQuery signed_distance(const ObstacleSet& obstacles, StateRef x)
{
  DistanceQuery result;
  for (std::size_t i = 0; i < obstacles.size(); ++i)
  {
    const double d = (x - obstacles[i].center).norm() - obstacles[i].radius;
    if (!result.nearest || d < result.distance)
    {
      result.distance = d;
      result.nearest = i;
      result.tie = false;
    }
    else if (d == result.distance)
      result.tie = true;
  }
  return result;
}

StateVector signed_distance_gradient(const ObstacleSet& obstacles, StateRef x)
{
  const auto query = signed_distance(obstacles, x);
  if (!query.nearest)
    return StateVector::Zero(x.size());

  StateVector offset = x - obstacles[*query.nearest].center;
  const double r = offset.norm();
  if (r == 0.0)
    return StateVector::Zero(x.size());
  return offset / r;
}

bool near_geometry_singularity(const ObstacleSet& obstacles, StateRef x, double tolerance)
{
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  for (const auto& c : obstacles.circles())
  {
    const double r = (x - c.center).norm();
    if (r <= tolerance)
      return true;
    const double d = r - c.radius;
    if (d < best)
    {
      second = best;
      best = d;
    }
    else if (d < second)
      second = d;
  }
  return second - best <= tolerance;
}

double obstacle_indicator(const ObstacleSet& obstacles, double sharpness, StateRef x)
{
  return 0.5 + 0.5 * std::tanh(sharpness * signed_distance(obstacles, x).distance);
}

double goal_indicator(StateRef goal, double sharpness, StateRef x)
{
  return -std::expm1(-sharpness * (x - goal).squaredNorm());
}

namespace {

struct FieldValue
{
  double operator()(const ConstantSpeed& f, StateRef) const { return f.speed; }
  double operator()(const SeparableSinusoid& f, StateRef x) const
  {
    constexpr double twoPi = 2.0 * std::numbers::pi;
    return f.base - f.amplitude * std::sin(twoPi * (x[0] + f.shift1)) * std::sin(twoPi * (x[1] + f.shift2));
  }
};

struct FieldGradient
{
  StateVector operator()(const ConstantSpeed&, StateRef x) const { return StateVector::Zero(x.size()); }
  StateVector operator()(const SeparableSinusoid& f, StateRef x) const
  {
    constexpr double twoPi = 2.0 * std::numbers::pi;
    const double a1 = twoPi * (x[0] + f.shift1);
    const double a2 = twoPi * (x[1] + f.shift2);
    StateVector g = StateVector::Zero(x.size());
    g[0] = -f.amplitude * twoPi * std::cos(a1) * std::sin(a2);
    g[1] = -f.amplitude * twoPi * std::sin(a1) * std::cos(a2);
    return g;
  }
};

} // namespace

VelocityField::VelocityField(ConstantSpeed field) : myField(field)
{
  if (!(field.speed > 0.0) || !std::isfinite(field.speed))
    throw std::invalid_argument("constant speed must be positive");
}

VelocityField::VelocityField(SeparableSinusoid field) : myField(field)
{
  if (!std::isfinite(field.base) || !std::isfinite(field.amplitude) || !std::isfinite(field.shift1) ||
      !std::isfinite(field.shift2))
    throw std::invalid_argument("sinusoid parameters must be finite");
  if (!(field.base - std::abs(field.amplitude) > 0.0))
    throw std::invalid_argument("sinusoid speed floor base - |amplitude| must be positive");
}

double VelocityField::value(StateRef x) const
{
  return std::visit([&](const auto& f) { return FieldValue{}(f, x); }, myField);
}

StateVector VelocityField::gradient(StateRef x) const
{
  return std::visit([&](const auto& f) { return FieldGradient{}(f, x); }, myField);
}

double VelocityField::lower_bound() const
{
  if (const auto* c = std::get_if<ConstantSpeed>(&myField))
    return c->speed;
  const auto& s = std::get<SeparableSinusoid>(myField);
  return s.base - std::abs(s.amplitude);
}

} // namespace hjplan
