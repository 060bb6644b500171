#include "hjplan/splitting_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hjplan {

namespace {

void require(bool ok, const char* field, const char* what)
{
  if (!ok)
    throw std::invalid_argument(std::string("solver.") + field + ": " + what);
}

} // namespace

int SolverParams::node_count() const
{
  require(horizon_t > 0.0 && std::isfinite(horizon_t), "horizon_t", "must be positive");
  require(delta > 0.0 && std::isfinite(delta), "delta", "must be positive");
  const double ratio = horizon_t / delta;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("delta: horizon_t / delta = " + std::to_string(ratio) + " is not a positive integer");
  return static_cast<int>(rounded);
}

void SolverParams::validate() const
{
  require(sigma > 0.0 && std::isfinite(sigma), "sigma", "must be positive");
  require(tau > 0.0 && std::isfinite(tau), "tau", "must be positive");
  require(kappa >= 0.0 && kappa <= 1.0, "kappa", "must lie in [0, 1]");
  require(tol > 0.0, "tol", "must be positive");
  require(k_max > 0, "k_max", "must be positive");
  require(gamma0 > 0.0 && std::isfinite(gamma0), "gamma0", "must be positive");
  require(gamma_warmup > 0, "gamma_warmup", "must be positive");
  require(gamma_halve_every > 0, "gamma_halve_every", "must be positive");
  require(gamma_floor > 0.0, "gamma_floor", "must be positive");
  require(gamma_floor <= gamma0, "gamma_floor", "must not exceed gamma0");
  require(init_lower.size() > 0 && init_lower.size() == init_upper.size(), "init_box", "bounds must share a dimension");
  require((init_lower.array() < init_upper.array()).all(), "init_box", "lower must be below upper");
  node_count();
}

double SolverParams::gamma_at(int k) const
{
  if (k < gamma_warmup)
    return gamma0;
  const int halvings = (k - gamma_warmup) / gamma_halve_every + 1;
  // Past ~1000 halvings ldexp underflows to zero; the floor applies anyway.
  return std::max(gamma_floor, std::ldexp(gamma0, -std::min(halvings, 1000)));
}

SolverDivergence::SolverDivergence(int iteration, Eigen::Index node)
  : std::runtime_error("non-finite iterate at iteration " + std::to_string(iteration) + ", node " +
                       std::to_string(node)),
    myIteration(iteration),
    myNode(node)
{
}

StateVector shrink(StateRef beta, double c)
{
  if (c <= 0.0)
    return beta;
  const double n = beta.norm();
  if (n <= c)
    return StateVector::Zero(beta.size());
  return (1.0 - c / n) * beta;
}

StateVector p_update(const SmoothedHamiltonian& hamiltonian, StateRef xj, StateRef beta, double sigma,
                     double delta)
{
  const double c = sigma * delta * hamiltonian.goal_weight(xj) * hamiltonian.effective_speed(xj);
  return shrink(beta, c);
}

StateVector x_update_step(const SmoothedHamiltonian& hamiltonian, StateRef xj, StateRef pNext, StateRef nu,
                          double gamma, double tau, double delta)
{
  return xj - gamma * (-delta * tau * hamiltonian.grad_x(xj, pNext) + (xj - nu));
}

StateVector x0_update(StateRef goal)
{
  return goal;
}

PathMatrix relaxation_update(const PathMatrix& next, const PathMatrix& prev, double kappa)
{
  return next + kappa * (next - prev);
}

double convergence_residual(const PathIterate& curr, const PathIterate& prev, ResidualNorm norm)
{
  if (norm == ResidualNorm::Euclidean)
    return std::max((curr.x - prev.x).norm(), (curr.p - prev.p).norm());
  const double dx = (curr.x - prev.x).colwise().norm().maxCoeff();
  const double dp = (curr.p - prev.p).colwise().norm().maxCoeff();
  return std::max(dx, dp);
}

double value_from_path(const SmoothedHamiltonian& hamiltonian, const PathIterate& iterate, double delta,
                       StateRef goal)
{
  if ((iterate.x.col(0) - goal).norm() > 1e-9)
    return std::numeric_limits<double>::infinity();

  double u = 0.0;
  for (Eigen::Index j = 1; j < iterate.x.cols(); ++j)
  {
    const auto pj = iterate.p.col(j);
    const auto xj = iterate.x.col(j);
    u += pj.dot(xj - iterate.x.col(j - 1)) - delta * hamiltonian.value(xj, pj);
  }
  return u;
}

PathMatrix resample_path(const PathMatrix& path, Eigen::Index nodes)
{
  if (path.cols() == 0 || nodes < 1)
    throw std::invalid_argument("resample_path: empty input or target");
  PathMatrix out(path.rows(), nodes);
  if (path.cols() == 1 || nodes == 1)
  {
    out.colwise() = path.col(0);
    if (nodes > 1)
      out.col(nodes - 1) = path.col(path.cols() - 1);
    return out;
  }
  const double scale = static_cast<double>(path.cols() - 1) / static_cast<double>(nodes - 1);
  for (Eigen::Index j = 0; j < nodes; ++j)
  {
    const double s = j * scale;
    const auto i = std::min(static_cast<Eigen::Index>(s), path.cols() - 2);
    const double w = s - static_cast<double>(i);
    out.col(j) = (1.0 - w) * path.col(i) + w * path.col(i + 1);
  }
  return out;
}

namespace {

PathIterate initial_iterate(const SolverParams& params, StateRef start, StateRef goal, const SolveOptions& options)
{
  const Eigen::Index d = start.size();
  const Eigen::Index J = params.node_count();
  if (params.init_lower.size() != d)
    throw std::invalid_argument("solver.init_box: dimension does not match the start point");

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  PathIterate it;
  it.x.resize(d, J + 1);
  it.p.resize(d, J + 1);

  if (params.warm_start && options.initial_path && options.initial_path->cols() > 0)
  {
    if (options.initial_path->rows() != d)
      throw std::invalid_argument("initial path dimension does not match the start point");
    it.x = resample_path(*options.initial_path, J + 1);
    it.x.col(0) = goal;
  }
  else
  {
    for (Eigen::Index j = 0; j < J; ++j)
      for (Eigen::Index i = 0; i < d; ++i)
        it.x(i, j) = params.init_lower[i] + (params.init_upper[i] - params.init_lower[i]) * unit(rng);
  }
  it.x.col(J) = start;

  it.p.col(0).setZero();
  for (Eigen::Index j = 1; j <= J; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      it.p(i, j) = -1.0 + 2.0 * unit(rng);

  it.z = it.x;
  return it;
}

} // namespace

SolveResult solve(const SmoothedHamiltonian& hamiltonian, StateRef start, const SolverParams& params,
                  const SolveOptions& options)
{
  params.validate();
  if (start.size() != hamiltonian.dimension() || !all_finite(start))
    throw std::invalid_argument("start must be a finite state of the problem's dimension");

  const StateVector goal = hamiltonian.goal().target;
  const Eigen::Index J = params.node_count();
  const double sigma = params.sigma;
  const double tau = params.tau;
  const double delta = params.delta;

  PathIterate curr = initial_iterate(params, start, goal, options);
  PathIterate next = curr;
  std::vector<LocalTerms> terms(static_cast<std::size_t>(J + 1));

  SolveResult result;
  result.residual_history.reserve(static_cast<std::size_t>(params.k_max));

  for (int k = 1; k <= params.k_max; ++k)
  {
    const double gamma = params.gamma_at(k - 1);

    // Co-state sweep. Every node reads iterate k only.
    next.p.col(0).setZero();
    for (Eigen::Index j = 1; j <= J; ++j)
    {
      terms[j] = hamiltonian.local_terms(curr.x.col(j));
      const StateVector beta = curr.p.col(j) + sigma * (curr.z.col(j) - curr.z.col(j - 1));
      const double c = sigma * delta * terms[j].goal_weight * terms[j].effective_speed();
      next.p.col(j) = shrink(beta, c);
    }

    // State sweep with the end points pinned.
    next.x.col(0) = x0_update(goal);
    for (Eigen::Index j = 1; j < J; ++j)
    {
      const auto xj = curr.x.col(j);
      const StateVector nu = xj - tau * (next.p.col(j) - next.p.col(j + 1));
      next.x.col(j) = xj - gamma * (-delta * tau * grad_x_from_terms(terms[j], next.p.col(j)) + (xj - nu));
    }
    next.x.col(J) = start;

    next.z = relaxation_update(next.x, curr.x, params.kappa);

    for (Eigen::Index j = 0; j <= J; ++j)
      if (!next.x.col(j).allFinite() || !next.p.col(j).allFinite())
        throw SolverDivergence(k, j);

    const double change = convergence_residual(next, curr, params.residual_norm);
    result.residual_history.push_back(change);
    std::swap(curr, next);
    result.iterations = k;

    if (options.observer)
      options.observer(k, curr);

    if (change < params.tol)
    {
      result.converged = true;
      break;
    }
  }

  result.value = value_from_path(hamiltonian, curr, delta, goal);
  if (!std::isfinite(result.value))
    result.diagnostic = "terminal node does not match the goal";
  else if (!result.converged)
    result.diagnostic = "iteration limit reached with residual " + std::to_string(result.residual_history.back());
  result.path = std::move(curr.x);
  return result;
}

} // namespace hjplan
