#include "hjplan/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace hjplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class NodeState : unsigned char
{
  Far,
  Trial,
  Accepted,
  Blocked
};

struct FrontEntry
{
  double value;
  int i;
  int j;
  bool operator>(const FrontEntry& o) const { return value > o.value; }
};

// Upwind update from the smaller known neighbor along each axis.
double eikonal_update(double a, double b, double ha, double hb, double slowness)
{
  if (!std::isfinite(a) && !std::isfinite(b))
    return kInf;
  if (!std::isfinite(b))
    return a + ha * slowness;
  if (!std::isfinite(a))
    return b + hb * slowness;

  // Solve (u-a)^2/ha^2 + (u-b)^2/hb^2 = slowness^2.
  const double wa = 1.0 / (ha * ha);
  const double wb = 1.0 / (hb * hb);
  const double qa = wa + wb;
  const double qb = -2.0 * (wa * a + wb * b);
  const double qc = wa * a * a + wb * b * b - slowness * slowness;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc >= 0.0)
  {
    const double u = (-qb + std::sqrt(disc)) / (2.0 * qa);
    if (u >= std::max(a, b))
      return u;
  }
  return std::min(a + ha * slowness, b + hb * slowness);
}

} // namespace

void GridSpec::validate() const
{
  if (lower.size() != 2 || upper.size() != 2)
    throw std::invalid_argument("grid: only two-dimensional grids are supported");
  if (!(lower.array() < upper.array()).all())
    throw std::invalid_argument("grid: lower must be below upper");
  if (resolution[0] < 16 || resolution[1] < 16)
    throw std::invalid_argument("grid: resolution must be at least 16 per axis");
}

TravelTimeGrid::TravelTimeGrid(GridSpec spec, Eigen::MatrixXd values, std::vector<double> acceptanceOrder)
  : mySpec(std::move(spec)), myValues(std::move(values)), myAcceptanceOrder(std::move(acceptanceOrder))
{
}

StateVector TravelTimeGrid::node(int i, int j) const
{
  StateVector x(2);
  x << mySpec.lower[0] + i * mySpec.spacing(0), mySpec.lower[1] + j * mySpec.spacing(1);
  return x;
}

double TravelTimeGrid::query(StateRef x) const
{
  if (x.size() != 2)
    throw std::out_of_range("grid query: point must be two-dimensional");
  const double eps = 1e-12;
  for (int a = 0; a < 2; ++a)
    if (x[a] < mySpec.lower[a] - eps || x[a] > mySpec.upper[a] + eps)
      throw std::out_of_range("grid query: point outside the grid box");

  const double si = std::clamp((x[0] - mySpec.lower[0]) / mySpec.spacing(0), 0.0, mySpec.resolution[0] - 1.0);
  const double sj = std::clamp((x[1] - mySpec.lower[1]) / mySpec.spacing(1), 0.0, mySpec.resolution[1] - 1.0);
  const int i = std::min(static_cast<int>(si), mySpec.resolution[0] - 2);
  const int j = std::min(static_cast<int>(sj), mySpec.resolution[1] - 2);
  const double wi = si - i;
  const double wj = sj - j;

  const double c00 = myValues(i, j), c10 = myValues(i + 1, j), c01 = myValues(i, j + 1), c11 = myValues(i + 1, j + 1);
  if (!std::isfinite(c00) || !std::isfinite(c10) || !std::isfinite(c01) || !std::isfinite(c11))
    return kInf;
  return (1 - wi) * (1 - wj) * c00 + wi * (1 - wj) * c10 + (1 - wi) * wj * c01 + wi * wj * c11;
}

TravelTimeGrid fast_march(const VelocityField& field, const ObstacleSet& obstacles, StateRef goal,
                          const GridSpec& grid)
{
  grid.validate();
  if (goal.size() != 2)
    throw std::invalid_argument("fast_march: goal must be two-dimensional");
  if ((goal.array() < grid.lower.array()).any() || (goal.array() > grid.upper.array()).any())
    throw std::invalid_argument("fast_march: goal outside the grid");
  if (signed_distance(obstacles, goal).distance < 0.0)
    throw std::invalid_argument("fast_march: goal inside an obstacle");

  const int nx = grid.resolution[0];
  const int ny = grid.resolution[1];
  const double hx = grid.spacing(0);
  const double hy = grid.spacing(1);

  Eigen::MatrixXd u = Eigen::MatrixXd::Constant(nx, ny, kInf);
  Eigen::MatrixXd slowness(nx, ny);
  std::vector<NodeState> state(static_cast<std::size_t>(nx) * ny, NodeState::Far);
  auto st = [&](int i, int j) -> NodeState& { return state[static_cast<std::size_t>(i) * ny + j]; };

  StateVector x(2);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
    {
      x << grid.lower[0] + i * hx, grid.lower[1] + j * hy;
      slowness(i, j) = 1.0 / field.value(x);
      if (signed_distance(obstacles, x).distance < 0.0)
        st(i, j) = NodeState::Blocked;
    }

  std::priority_queue<FrontEntry, std::vector<FrontEntry>, std::greater<>> front;

  const int gi = std::min(static_cast<int>((goal[0] - grid.lower[0]) / hx), nx - 2);
  const int gj = std::min(static_cast<int>((goal[1] - grid.lower[1]) / hy), ny - 2);
  const double goalSlowness = 1.0 / field.value(goal);
  for (int di = 0; di <= 1; ++di)
    for (int dj = 0; dj <= 1; ++dj)
    {
      const int i = gi + di, j = gj + dj;
      if (st(i, j) == NodeState::Blocked)
        continue;
      x << grid.lower[0] + i * hx, grid.lower[1] + j * hy;
      const double seed = (x - goal).norm() * 0.5 * (goalSlowness + slowness(i, j));
      if (seed < u(i, j))
      {
        u(i, j) = seed;
        st(i, j) = NodeState::Trial;
        front.push({seed, i, j});
      }
    }

  std::vector<double> order;
  order.reserve(static_cast<std::size_t>(nx) * ny);

  auto known = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= nx || j >= ny || st(i, j) != NodeState::Accepted)
      return kInf;
    return u(i, j);
  };

  constexpr int di[4] = {1, -1, 0, 0};
  constexpr int dj[4] = {0, 0, 1, -1};

  while (!front.empty())
  {
    const auto top = front.top();
    front.pop();
    if (st(top.i, top.j) == NodeState::Accepted || top.value > u(top.i, top.j))
      continue;
    st(top.i, top.j) = NodeState::Accepted;
    order.push_back(top.value);

    for (int n = 0; n < 4; ++n)
    {
      const int i = top.i + di[n], j = top.j + dj[n];
      if (i < 0 || j < 0 || i >= nx || j >= ny)
        continue;
      if (st(i, j) == NodeState::Accepted || st(i, j) == NodeState::Blocked)
        continue;
      const double a = std::min(known(i - 1, j), known(i + 1, j));
      const double b = std::min(known(i, j - 1), known(i, j + 1));
      const double candidate = eikonal_update(a, b, hx, hy, slowness(i, j));
      if (candidate < u(i, j))
      {
        u(i, j) = candidate;
        st(i, j) = NodeState::Trial;
        front.push({candidate, i, j});
      }
    }
  }

  return TravelTimeGrid(grid, std::move(u), std::move(order));
}

} // namespace hjplan
