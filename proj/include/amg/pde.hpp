#pragma once

#include "amg/grid.hpp"
#include "amg/wulff.hpp"

namespace amg {

struct SolveOptions {
  double tol_res = 0.0;   // 0 -> 1e-9 * data_range / h^2
  double tol_step = 0.0;  // 0 -> 1e-10 * data_range
  int max_iterations = 60;
  int max_halvings = 30;
  double gradient_cap = 1e3;
};

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;
  double final_step = 0.0;
  double gradient_bound = 0.0;
  bool converged = false;
  bool gradient_exploded = false;
  bool max_principle_ok = false;
  double tol_res = 0.0;
  double tol_step = 0.0;
};

/// tr(D^2 phi(grad w) D^2 w) at each interior node, by central differences.
/// Non-interior entries are NaN.
std::vector<double> residual(const Integrand& phi, const DiscreteGraph& g);

/// Gradient of w at an interior node by central differences.
Vec node_gradient(const DiscreteGraph& g, int i, int j);

/// Hessian of w at an interior node by central differences.
Mat node_hessian(const DiscreteGraph& g, int i, int j);

/// Damped-Newton solve of the Dirichlet problem for the anisotropic minimal
/// graph equation, with a frozen-coefficient (Picard) fallback step. The
/// Dirichlet values of `domain` are the boundary data; interior values are
/// used only if `use_initial_guess` is set, otherwise the solve starts from
/// the Picard linearization at zero gradient.
std::pair<DiscreteGraph, SolveReport> solve_dirichlet(
    const Integrand& phi, const DiscreteGraph& domain,
    const SolveOptions& opts = {}, bool use_initial_guess = false);

}  // namespace amg
