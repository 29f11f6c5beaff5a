#include "amg/pde.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace amg {

namespace {

using Trip = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

double data_range(const DiscreteGraph& g) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int k = 0; k < g.size(); ++k) {
    if (g.mask[k] != NodeKind::Dirichlet) continue;
    lo = std::min(lo, g.w[k]);
    hi = std::max(hi, g.w[k]);
  }
  const double r = hi - lo;
  return (std::isfinite(r) && r > 0.0) ? r : 1.0;
}

double max_abs_interior(const DiscreteGraph& g, const std::vector<double>& f) {
  double m = 0.0;
  for (int k = 0; k < g.size(); ++k)
    if (g.mask[k] == NodeKind::Interior) m = std::max(m, std::abs(f[k]));
  return m;
}

double max_gradient(const DiscreteGraph& g) {
  double m = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.interior(i, j)) m = std::max(m, node_gradient(g, i, j).norm());
  return m;
}

// Linear solve of tr(A(z_at_node) D^2 w) = 0 with the graph's Dirichlet
// values; coefficients are frozen per node (Picard step). When `frozen_zero`
// is set the coefficients are evaluated at z = 0 everywhere.
DiscreteGraph picard_solve(const Integrand& phi, const DiscreteGraph& g,
                           bool frozen_zero) {
  const int n = g.n;
  std::vector<int> eq(g.size(), -1);
  std::vector<int> nodes;
  for (int k = 0; k < g.size(); ++k)
    if (g.mask[k] == NodeKind::Interior) {
      eq[k] = static_cast<int>(nodes.size());
      nodes.push_back(k);
    }
  const int N = static_cast<int>(nodes.size());
  std::vector<Trip> trips;
  trips.reserve(static_cast<size_t>(N) * 9);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  const double h2 = g.h * g.h;

  for (int row = 0; row < N; ++row) {
    const int k = nodes[row];
    const int i = k % g.nx, j = k / g.nx;
    Mat A;
    if (frozen_zero) {
      A = phi.graph_hessian(Vec::Zero(n));
    } else {
      A = phi.graph_hessian(node_gradient(g, i, j));
    }
    auto add = [&](int ii, int jj, double c) {
      const int kk = g.idx(ii, jj);
      if (g.mask[kk] == NodeKind::Interior)
        trips.emplace_back(row, eq[kk], c);
      else
        rhs[row] -= c * g.w[kk];
    };
    add(i, j, -2.0 * A(0, 0) / h2);
    add(i + 1, j, A(0, 0) / h2);
    add(i - 1, j, A(0, 0) / h2);
    if (n == 2) {
      add(i, j, -2.0 * A(1, 1) / h2);
      add(i, j + 1, A(1, 1) / h2);
      add(i, j - 1, A(1, 1) / h2);
      const double c = 2.0 * A(0, 1) / (4.0 * h2);
      add(i + 1, j + 1, c);
      add(i - 1, j - 1, c);
      add(i + 1, j - 1, -c);
      add(i - 1, j + 1, -c);
    }
  }
  SpMat M(N, N);
  M.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<SpMat> lu(M);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("picard_solve: factorization failed");
  Eigen::VectorXd x = lu.solve(rhs);
  DiscreteGraph out = g;
  for (int row = 0; row < N; ++row) out.w[nodes[row]] = x[row];
  return out;
}

}  // namespace

Vec node_gradient(const DiscreteGraph& g, int i, int j) {
  Vec z(g.n);
  z[0] = (g.w[g.idx(i + 1, j)] - g.w[g.idx(i - 1, j)]) / (2.0 * g.h);
  if (g.n == 2)
    z[1] = (g.w[g.idx(i, j + 1)] - g.w[g.idx(i, j - 1)]) / (2.0 * g.h);
  return z;
}

Mat node_hessian(const DiscreteGraph& g, int i, int j) {
  const double h2 = g.h * g.h;
  Mat H(g.n, g.n);
  const double c = g.w[g.idx(i, j)];
  H(0, 0) = (g.w[g.idx(i + 1, j)] - 2.0 * c + g.w[g.idx(i - 1, j)]) / h2;
  if (g.n == 2) {
    H(1, 1) = (g.w[g.idx(i, j + 1)] - 2.0 * c + g.w[g.idx(i, j - 1)]) / h2;
    H(0, 1) = H(1, 0) =
        (g.w[g.idx(i + 1, j + 1)] - g.w[g.idx(i + 1, j - 1)] -
         g.w[g.idx(i - 1, j + 1)] + g.w[g.idx(i - 1, j - 1)]) /
        (4.0 * h2);
  }
  return H;
}

std::vector<double> residual(const Integrand& phi, const DiscreteGraph& g) {
  if (phi.base_dim() != g.n)
    throw std::invalid_argument("residual: integrand/grid dimension mismatch");
  validate_mask(g);
  std::vector<double> out(g.size(),
                          std::numeric_limits<double>::quiet_NaN());
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.interior(i, j)) continue;
      const Vec z = node_gradient(g, i, j);
      if (!z.allFinite())
        throw std::runtime_error("residual: non-finite gradient");
      const Mat A = phi.graph_hessian(z);
      out[g.idx(i, j)] = (A * node_hessian(g, i, j)).trace();
    }
  }
  return out;
}

std::pair<DiscreteGraph, SolveReport> solve_dirichlet(
    const Integrand& phi, const DiscreteGraph& domain,
    const SolveOptions& opts, bool use_initial_guess) {
  const int n = domain.n;
  if (phi.base_dim() != n)
    throw std::invalid_argument("solve: integrand/grid dimension mismatch");
  const double range = data_range(domain);
  SolveReport rep;
  rep.tol_res = opts.tol_res > 0.0 ? opts.tol_res
                                   : 1e-9 * range / (domain.h * domain.h);
  rep.tol_step = opts.tol_step > 0.0 ? opts.tol_step : 1e-10 * range;

  DiscreteGraph g =
      use_initial_guess ? domain : picard_solve(phi, domain, true);

  std::vector<int> eq(g.size(), -1);
  std::vector<int> nodes;
  for (int k = 0; k < g.size(); ++k)
    if (g.mask[k] == NodeKind::Interior) {
      eq[k] = static_cast<int>(nodes.size());
      nodes.push_back(k);
    }
  const int N = static_cast<int>(nodes.size());
  if (N == 0) throw std::invalid_argument("solve: no interior nodes");
  const double h = g.h, h2 = h * h;

  auto residual_norm = [&](const DiscreteGraph& s) {
    return max_abs_interior(s, residual(phi, s));
  };

  double last_step = std::numeric_limits<double>::infinity();
  double resnorm = residual_norm(g);

  for (int it = 0; it < opts.max_iterations; ++it) {
    if (resnorm <= rep.tol_res && last_step <= rep.tol_step) {
      rep.converged = true;
      break;
    }
    rep.iterations = it + 1;

    // Newton system: second-order stencil terms plus the coefficient
    // derivative (D^3 phi by central differencing of D^2 phi).
    std::vector<Trip> trips;
    trips.reserve(static_cast<size_t>(N) * 9);
    Eigen::VectorXd F(N);
    for (int row = 0; row < N; ++row) {
      const int k = nodes[row];
      const int i = k % g.nx, j = k / g.nx;
      const Vec z = node_gradient(g, i, j);
      const Mat H = node_hessian(g, i, j);
      const Mat A = phi.graph_hessian(z);
      F[row] = (A * H).trace();

      Vec b(n);  // dF/dz_m
      const double eta = 1e-6 * std::max(1.0, z.norm());
      for (int m = 0; m < n; ++m) {
        Vec zp = z, zm = z;
        zp[m] += eta;
        zm[m] -= eta;
        b[m] = (((phi.graph_hessian(zp) - phi.graph_hessian(zm)) / (2.0 * eta)) *
                H)
                   .trace();
      }

      auto add = [&](int ii, int jj, double c) {
        const int kk = g.idx(ii, jj);
        if (g.mask[kk] == NodeKind::Interior) trips.emplace_back(row, eq[kk], c);
      };
      add(i, j, -2.0 * A(0, 0) / h2);
      add(i + 1, j, A(0, 0) / h2 + b[0] / (2.0 * h));
      add(i - 1, j, A(0, 0) / h2 - b[0] / (2.0 * h));
      if (n == 2) {
        add(i, j, -2.0 * A(1, 1) / h2);
        add(i, j + 1, A(1, 1) / h2 + b[1] / (2.0 * h));
        add(i, j - 1, A(1, 1) / h2 - b[1] / (2.0 * h));
        const double c = 2.0 * A(0, 1) / (4.0 * h2);
        add(i + 1, j + 1, c);
        add(i - 1, j - 1, c);
        add(i + 1, j - 1, -c);
        add(i - 1, j + 1, -c);
      }
    }

    SpMat J(N, N);
    J.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<SpMat> lu(J);
    bool newton_ok = lu.info() == Eigen::Success;
    Eigen::VectorXd d;
    if (newton_ok) d = lu.solve(-F);

    bool stepped = false;
    if (newton_ok) {
      double s = 1.0;
      for (int halv = 0; halv < opts.max_halvings; ++halv) {
        DiscreteGraph trial = g;
        for (int row = 0; row < N; ++row) trial.w[nodes[row]] += s * d[row];
        const double rn = residual_norm(trial);
        if (rn < resnorm || rn <= rep.tol_res) {
          last_step = s * d.cwiseAbs().maxCoeff();
          g = std::move(trial);
          resnorm = rn;
          stepped = true;
          break;
        }
        s *= 0.5;
      }
    }
    if (!stepped) {
      // Picard fallback: frozen-coefficient linear solve at the current
      // gradient field.
      DiscreteGraph trial = picard_solve(phi, g, false);
      double step = 0.0;
      for (int row = 0; row < N; ++row)
        step = std::max(step, std::abs(trial.w[nodes[row]] - g.w[nodes[row]]));
      last_step = step;
      g = std::move(trial);
      resnorm = residual_norm(g);
    }

    rep.gradient_bound = std::max(rep.gradient_bound, max_gradient(g));
    if (rep.gradient_bound > opts.gradient_cap) {
      rep.gradient_exploded = true;
      break;
    }
  }
  if (resnorm <= rep.tol_res && last_step <= rep.tol_step)
    rep.converged = true;

  rep.final_residual = resnorm;
  rep.final_step = std::isfinite(last_step) ? last_step : 0.0;
  rep.gradient_bound = std::max(rep.gradient_bound, max_gradient(g));

  // discrete maximum principle check
  double blo = std::numeric_limits<double>::infinity(), bhi = -blo;
  double ilo = blo, ihi = -blo;
  for (int k = 0; k < g.size(); ++k) {
    if (g.mask[k] == NodeKind::Dirichlet) {
      blo = std::min(blo, g.w[k]);
      bhi = std::max(bhi, g.w[k]);
    } else if (g.mask[k] == NodeKind::Interior) {
      ilo = std::min(ilo, g.w[k]);
      ihi = std::max(ihi, g.w[k]);
    }
  }
  const double slack = 1e3 * rep.tol_res * h2 + 1e-12 * range;
  rep.max_principle_ok = (ilo >= blo - slack) && (ihi <= bhi + slack);
  return {std::move(g), rep};
}

}  // namespace amg
