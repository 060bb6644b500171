#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hjplan/hamiltonian.hpp"

namespace hjplan {

/// Node paths are stored as d x (J+1) matrices, one column per node. Column
/// 0 is the goal end, column J the query point.
using PathMatrix = Eigen::MatrixXd;

enum class ResidualNorm
{
  NodeMax,  // max over nodes of the per-node Euclidean change
  Euclidean // Euclidean norm over all concatenated coordinates
};

struct SolverParams
{
  double sigma = 1.0; // dual prox step
  double tau = 0.2;   // primal prox step
  double kappa = 1.0; // relaxation
  double horizon_t = 8.0;
  double delta = 0.1;
  double tol = 1e-3;
  int k_max = 40000;
  double gamma0 = 0.2;
  int gamma_warmup = 5000;
  int gamma_halve_every = 1000;
  double gamma_floor = 1e-4;
  std::uint64_t seed = 0;
  StateVector init_lower = StateVector::Constant(2, -1.5);
  StateVector init_upper = StateVector::Constant(2, 1.5);
  ResidualNorm residual_norm = ResidualNorm::NodeMax;
  // Start from the previous plan instead of random nodes (replanning only).
  bool warm_start = false;

  /// J = horizon_t / delta. Throws std::invalid_argument unless integral.
  int node_count() const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Gradient descent rate for the 0-based iteration k.
  double gamma_at(int k) const;
};

struct PathIterate
{
  PathMatrix x;
  PathMatrix p;
  PathMatrix z;

  Eigen::Index node_count() const { return x.cols() - 1; }
};

struct SolveResult
{
  double value = 0.0;
  PathMatrix path;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;
  std::string diagnostic;
};

struct SolveOptions
{
  // Used instead of random initialization; resampled to J+1 nodes. Column
  // order matches PathMatrix (goal end first).
  std::optional<PathMatrix> initial_path;
  // Called after every iteration with the 1-based iteration number.
  std::function<void(int, const PathIterate&)> observer;
};

/// A NaN or Inf appeared in an iterate.
class SolverDivergence : public std::runtime_error
{
public:
  SolverDivergence(int iteration, Eigen::Index node);

  int iteration() const { return myIteration; }
  Eigen::Index node() const { return myNode; }

private:
  int myIteration;
  Eigen::Index myNode;
};

/// Closed-form co-state prox: argmin_p delta H(x_j, p) + |p - beta|^2 / (2 sigma).
StateVector p_update(const SmoothedHamiltonian& hamiltonian, StateRef xj, StateRef beta, double sigma,
                     double delta);

/// Shrinkage max(0, 1 - c/|beta|) beta.
StateVector shrink(StateRef beta, double c);

/// One explicit gradient step on -delta tau H(., p) + |. - nu|^2 / 2, from xj.
StateVector x_update_step(const SmoothedHamiltonian& hamiltonian, StateRef xj, StateRef pNext, StateRef nu,
                          double gamma, double tau, double delta);

/// The prox of the goal's convex indicator is the goal itself.
StateVector x0_update(StateRef goal);

PathMatrix relaxation_update(const PathMatrix& next, const PathMatrix& prev, double kappa);

double convergence_residual(const PathIterate& curr, const PathIterate& prev,
                            ResidualNorm norm = ResidualNorm::NodeMax);

/// Discrete saddle objective sum_j <p_j, x_j - x_{j-1}> - delta H(x_j, p_j).
/// Returns +infinity when x_0 is not the goal (to 1e-9).
double value_from_path(const SmoothedHamiltonian& hamiltonian, const PathIterate& iterate, double delta,
                       StateRef goal);

/// Resample a polyline (one column per vertex) to `nodes` columns by
/// linear interpolation in the column index.
PathMatrix resample_path(const PathMatrix& path, Eigen::Index nodes);

/// Primal-dual splitting for the discrete saddle-point problem. Throws
/// SolverDivergence on non-finite iterates.
SolveResult solve(const SmoothedHamiltonian& hamiltonian, StateRef start, const SolverParams& params,
                  const SolveOptions& options = {});

} // namespace hjplan
