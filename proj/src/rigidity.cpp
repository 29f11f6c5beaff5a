#include "amg/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "amg/elliptic.hpp"

namespace amg {

SlopeEnvelope extremal_slopes(const DiscreteGraph& g, const ScalarField& L,
                              const RegionPredicate& region) {
  SlopeEnvelope env;
  env.A_minus = std::numeric_limits<double>::infinity();
  env.A_plus = -env.A_minus;
  bool any = false;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.in_domain(i, j)) continue;
      const Eigen::Vector2d p = g.pos(i, j);
      if (p.x() <= 0.0) {
        if (g.interior(i, j))
          throw std::invalid_argument(
              "extremal_slopes: interior node with x1 <= 0");
        continue;
      }
      if (region && !region(p)) continue;
      const double q = (g.w[g.idx(i, j)] - L(p)) / p.x();
      if (q > env.A_plus) {
        env.A_plus = q;
        env.arg_plus = p;
      }
      if (q < env.A_minus) {
        env.A_minus = q;
        env.arg_minus = p;
      }
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("extremal_slopes: no nodes with x1 > 0");
  return env;
}

HopfResult hopf_slope_improvement(const Integrand& phi, const DiscreteGraph& g,
                                  const ScalarField& L, double A, Side side,
                                  double delta) {
  const double sgn = side == Side::Minus ? 1.0 : -1.0;
  const double range = std::max(g.value_range(), 1e-300);
  const double tol = 1e-10 * range;

  // precondition: g on the correct side of the plane, strictly so away
  // from the boundary line Gamma
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.in_domain(i, j)) continue;
      const Eigen::Vector2d p = g.pos(i, j);
      const double gap = sgn * (g.w[g.idx(i, j)] - L(p) - A * p.x());
      if (gap < -tol)
        throw std::invalid_argument(
            "hopf_slope_improvement: graph crosses the candidate plane at (" +
            std::to_string(p.x()) + "," + std::to_string(p.y()) + ")");
    }
  }

  // barrier profile: normalized phi0 cross-section times x1
  const double grad_bound = 2.0;
  const PucciParams pucci{phi.pucci_lambda(grad_bound)};
  const BarrierSpec phi0 = choose_barrier_exponent(pucci, g.n, delta);
  const double phi0_max = phi0.radial_value(delta);
  auto psi = [&](const Eigen::Vector2d& p) {
    const double v = phi0.radial_value(p.norm());
    return v > 0.0 ? v / phi0_max * p.x() : 0.0;
  };

  HopfResult out;
  out.delta = delta;
  for (int k = 1; k <= 20; ++k) {
    const double eps = std::pow(0.5, k);
    // obstacle on the barrier support inside the domain
    DiscreteGraph obs = g;
    bool any = false;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const int kk = g.idx(i, j);
        obs.mask[kk] = NodeKind::Outside;
        if (!g.in_domain(i, j)) continue;
        const Eigen::Vector2d p = g.pos(i, j);
        if (p.norm() > 2.0 / 3.0 || p.x() <= 0.0) continue;
        obs.mask[kk] = NodeKind::Interior;
        obs.w[kk] = L(p) + A * p.x() + sgn * eps * psi(p);
        any = true;
      }
    }
    if (!any)
      throw std::invalid_argument(
          "hopf_slope_improvement: barrier support misses the domain");
    if (side == Side::Plus) {
      // mirror: slide the reflected graph against the reflected barrier
      DiscreteGraph neg = g;
      for (auto& v : neg.w) v = -v;
      for (auto& v : obs.w) v = -v;
      const SlideResult s = slide_until_contact(neg, obs);
      if (s.shift >= -tol) {
        out.improved = true;
        out.eps = eps;
        return out;
      }
      const int node = s.contact.front();
      out.blocking_point = g.pos(node % g.nx, node / g.nx);
    } else {
      const SlideResult s = slide_until_contact(g, obs);
      if (s.shift >= -tol) {
        out.improved = true;
        out.eps = eps;
        return out;
      }
      const int node = s.contact.front();
      out.blocking_point = g.pos(node % g.nx, node / g.nx);
    }
  }
  return out;
}

namespace {

struct Geometry {
  DomainPredicate inside;
  ScalarField data;
  Eigen::Vector2d origin;
  int nx, ny;
  double h;
};

Geometry build_geometry(const HalfSpaceSetup& s, int res) {
  if (res < 17) throw std::invalid_argument("resolution must be >= 17 nodes");
  Geometry geo;
  const Eigen::Vector2d Ls = s.L_slope;
  auto L = [Ls](const Eigen::Vector2d& p) { return Ls.dot(p); };
  const double A = s.far.slope_x1;
  const double amp = s.far.perturbed ? s.far.amplitude : 0.0;

  switch (s.kase) {
    case BernsteinCase::HalfSpace: {
      geo.h = s.R / (res - 1);
      geo.origin = Eigen::Vector2d(0.0, -s.R);
      geo.nx = res;
      geo.ny = 2 * (res - 1) + 1;
      geo.inside = [](const Eigen::Vector2d&) { return true; };
      const double R = s.R;
      geo.data = [=](const Eigen::Vector2d& p) {
        const double pert = amp * std::sin(std::numbers::pi * p.x() / R);
        return L(p) + A * p.x() + pert;
      };
      break;
    }
    case BernsteinCase::Slab: {
      const double c = s.slab_width;
      geo.h = c / (res - 1);
      geo.origin = Eigen::Vector2d(0.0, -s.R);
      geo.nx = res;
      geo.ny = 2 * static_cast<int>(std::lround(s.R / geo.h)) + 1;
      geo.inside = [](const Eigen::Vector2d&) { return true; };
      geo.data = [=](const Eigen::Vector2d& p) {
        // the slab walls are true boundary and carry L; the perturbation
        // vanishes there so the data is continuous at the corners
        const double pert = amp * std::sin(std::numbers::pi * p.x() / c);
        return L(p) + A * p.x() + pert;
      };
      break;
    }
    case BernsteinCase::Wedge: {
      const double tanhalf = std::tan(0.5 * s.wedge_angle);
      if (!(tanhalf > 0.0) || s.wedge_angle >= std::numbers::pi)
        throw std::invalid_argument("wedge opening angle out of (0, pi)");
      geo.h = s.R / (res - 1);
      const double half_width = s.R * tanhalf;
      const int m = static_cast<int>(std::ceil(half_width / geo.h));
      geo.origin = Eigen::Vector2d(0.0, -m * geo.h);
      geo.nx = res;
      geo.ny = 2 * m + 1;
      geo.inside = [tanhalf](const Eigen::Vector2d& p) {
        return p.x() > 0.0 && std::abs(p.y()) < p.x() * tanhalf;
      };
      const double R = s.R;
      geo.data = [=](const Eigen::Vector2d& p) {
        // far data only on the truncation face x1 ~ R; the wedge sides
        // carry L. The perturbation vanishes on the sides.
        if (p.x() < R - 1e-9) return L(p) + A * p.x();
        const double t = p.y() / (p.x() * tanhalf);  // in [-1, 1]
        const double pert =
            amp * std::cos(0.5 * std::numbers::pi * std::clamp(t, -1.0, 1.0));
        return L(p) + A * p.x() + pert;
      };
      break;
    }
  }
  return geo;
}

}  // namespace

ExperimentReport bernstein_experiment(const Integrand& phi,
                                      const HalfSpaceSetup& setup,
                                      int resolution,
                                      const SolveOptions& opts) {
  ExperimentReport rep;
  rep.kase = setup.kase;
  rep.R = setup.R;
  const Geometry geo = build_geometry(setup, resolution);
  rep.h = geo.h;
  DiscreteGraph domain = make_domain(
      2, geo.origin, geo.h, geo.nx, geo.ny, geo.inside, geo.data,
      setup.kase == BernsteinCase::HalfSpace ? "half-space"
      : setup.kase == BernsteinCase::Slab    ? "slab-strip"
                                             : "wedge-sector");
  auto [g, solve_rep] = solve_dirichlet(phi, domain, opts);
  rep.solve = solve_rep;
  if (!solve_rep.converged) return rep;  // no partial claims
  rep.valid = true;

  // fixed interior affine-fit window
  Eigen::Vector2d wc(setup.window_R0 / 2.0, 0.0);
  double wr = setup.window_R0 / 4.0;
  if (setup.kase == BernsteinCase::Slab) {
    wc = Eigen::Vector2d(setup.slab_width / 2.0, 0.0);
    wr = std::min(wr, 0.4 * setup.slab_width);
  }

  Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  std::vector<int> window_nodes;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.in_domain(i, j)) continue;
      const Eigen::Vector2d p = g.pos(i, j);
      if ((p - wc).norm() > wr) continue;
      window_nodes.push_back(g.idx(i, j));
      Eigen::Vector3d b(1.0, p.x(), p.y());
      M += b * b.transpose();
      rhs += b * g.w[g.idx(i, j)];
    }
  }
  if (window_nodes.empty())
    throw std::runtime_error("bernstein_experiment: empty fit window");
  rep.affine_fit = M.ldlt().solve(rhs);
  for (int k : window_nodes) {
    const Eigen::Vector2d p = g.pos(k % g.nx, k / g.nx);
    const double fit =
        rep.affine_fit[0] + rep.affine_fit[1] * p.x() + rep.affine_fit[2] * p.y();
    rep.deviation = std::max(rep.deviation, std::abs(g.w[k] - fit));
  }

  const Eigen::Vector2d Ls = setup.L_slope;
  auto L = [Ls](const Eigen::Vector2d& p) { return Ls.dot(p); };
  const double Rhalf = setup.R / 2.0;
  rep.envelope = extremal_slopes(
      g, L, [Rhalf](const Eigen::Vector2d& p) { return p.norm() <= Rhalf; });
  rep.envelope_full = extremal_slopes(g, L);
  return rep;
}

ExcisionResult sigmoid_excision_diagnostic(const Integrand& phi, double height,
                                           double eps, double cyl_h,
                                           int resolution) {
  const double half = 1.2;  // grid covers the unit cross-section ball
  const double h = 2.0 * half / (resolution - 1);
  auto data = [&](const Eigen::Vector2d& p) {
    return height * std::tanh(p.x() / eps);
  };
  DiscreteGraph g = make_rectangle(2, Eigen::Vector2d(-half, -half), h,
                                   resolution, resolution, data);
  const Cylinder q(0, Eigen::Vector2d(0.0, 0.0), 1.0, -cyl_h, cyl_h);
  return excision_gap(phi, g, q);
}

}  // namespace amg
