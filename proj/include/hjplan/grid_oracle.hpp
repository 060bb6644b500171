#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "hjplan/geometry_field.hpp"

namespace hjplan {

/// Regular node grid over a 2-D box; resolution counts nodes per axis.
struct GridSpec
{
  StateVector lower;
  StateVector upper;
  std::array<int, 2> resolution{201, 201};

  /// Throws std::invalid_argument.
  void validate() const;
  double spacing(int axis) const { return (upper[axis] - lower[axis]) / (resolution[axis] - 1); }
};

/// First-arrival times to the goal on the grid. Unreachable nodes hold +inf.
class TravelTimeGrid
{
public:
  TravelTimeGrid(GridSpec spec, Eigen::MatrixXd values, std::vector<double> acceptanceOrder);

  const GridSpec& spec() const { return mySpec; }
  double at(int i, int j) const { return myValues(i, j); }
  StateVector node(int i, int j) const;

  /// Bilinear interpolation; +inf if any corner is unreachable. Throws
  /// std::out_of_range outside the grid box.
  double query(StateRef x) const;

  /// Node values in the order the front accepted them.
  const std::vector<double>& acceptance_order() const { return myAcceptanceOrder; }

private:
  GridSpec mySpec;
  Eigen::MatrixXd myValues;
  std::vector<double> myAcceptanceOrder;
};

/// First-order upwind fast marching for |grad u| = 1/v with u(goal) = 0, on
/// the 4-neighbor stencil. Nodes with negative signed distance are blocked.
/// The corners of the cell holding the goal are seeded with straight-line
/// times. Throws std::invalid_argument if the goal is outside the grid or
/// inside an obstacle.
TravelTimeGrid fast_march(const VelocityField& field, const ObstacleSet& obstacles, StateRef goal,
                          const GridSpec& grid);

} // namespace hjplan
