#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hjplan/hamiltonian.hpp"

namespace hjplan {

/// Central differences of a scalar function, one coordinate at a time.
StateVector central_difference(const std::function<double(StateRef)>& f, StateRef x, double step);

/// |approx - exact| / max(|exact|, 1): relative for large gradients,
/// absolute once the gradient is below one.
double gradient_error(StateRef approx, StateRef exact);

struct GradientCheckReport
{
  int samples = 0;
  int rejected = 0; // draws skipped for lying near a singular set
  double max_error_x = 0.0;
  double max_error_p = 0.0;
  double max_lagrangian_gap = 0.0; // max |L(x,p) - chi(x)|
};

/// Compare grad_x and grad_p with central differences of H at `samples`
/// random (x, p) pairs, x uniform in [lower, upper], p uniform in [-1,1]^d.
/// Draws within 1e-3 of an obstacle center, a distance tie, or p = 0 are
/// redrawn.
GradientCheckReport gradient_check(const SmoothedHamiltonian& hamiltonian, StateRef lower, StateRef upper,
                                   int samples, std::uint64_t seed, double step = 1e-6);

struct PropertyCheck
{
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick randomized property checks over every module.
std::vector<PropertyCheck> run_selftest(std::uint64_t seed = 0);

} // namespace hjplan
