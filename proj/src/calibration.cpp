#include "amg/calibration.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace amg {

namespace {

// Cell-centered gradient from corner values (averaged one-sided differences).
bool cell_gradient(const DiscreteGraph& g, int i, int j, Vec& z,
                   double& wmid) {
  if (g.n == 1) {
    if (!g.in_domain(i, 0) || !g.in_domain(i + 1, 0)) return false;
    z.resize(1);
    z[0] = (g.w[g.idx(i + 1, 0)] - g.w[g.idx(i, 0)]) / g.h;
    wmid = 0.5 * (g.w[g.idx(i, 0)] + g.w[g.idx(i + 1, 0)]);
    return true;
  }
  if (!g.in_domain(i, j) || !g.in_domain(i + 1, j) || !g.in_domain(i, j + 1) ||
      !g.in_domain(i + 1, j + 1))
    return false;
  const double w00 = g.w[g.idx(i, j)], w10 = g.w[g.idx(i + 1, j)];
  const double w01 = g.w[g.idx(i, j + 1)], w11 = g.w[g.idx(i + 1, j + 1)];
  z.resize(2);
  z[0] = (w10 - w00 + w11 - w01) / (2.0 * g.h);
  z[1] = (w01 - w00 + w11 - w10) / (2.0 * g.h);
  wmid = 0.25 * (w00 + w10 + w01 + w11);
  return true;
}

double area_element(const Integrand& phi, const Vec& z) {
  Vec x(z.size() + 1);
  x.head(z.size()) = -z;
  x[z.size()] = 1.0;
  return phi.value(x);
}

}  // namespace

double anisotropic_area(const Integrand& phi, const DiscreteGraph& g,
                        const RegionPredicate& region) {
  if (phi.base_dim() != g.n)
    throw std::invalid_argument("anisotropic_area: dimension mismatch");
  const double measure = g.n == 2 ? g.h * g.h : g.h;
  double total = 0.0;
  bool any = false;
  Vec z;
  double wmid;
  for (int j = 0; j < (g.n == 2 ? g.ny - 1 : 1); ++j) {
    for (int i = 0; i < g.nx - 1; ++i) {
      if (!cell_gradient(g, i, j, z, wmid)) continue;
      const Eigen::Vector2d center =
          g.pos(i, j) + 0.5 * g.h * Eigen::Vector2d(1.0, g.n == 2 ? 1.0 : 0.0);
      if (region && !region(center)) continue;
      total += area_element(phi, z) * measure;
      any = true;
    }
  }
  if (!any) std::cerr << "anisotropic_area: empty region\n";
  return total;
}

std::vector<double> calibration_divergence(const Integrand& phi,
                                           const DiscreteGraph& g) {
  if (phi.base_dim() != g.n)
    throw std::invalid_argument("calibration_divergence: dimension mismatch");
  const int n = g.n;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // horizontal components of grad Phi(-grad w, 1), where the full central
  // gradient stencil is available
  std::vector<Vec> X(g.size());
  std::vector<char> have(g.size(), 0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.in_domain(i, j)) continue;
      if (i < 1 || i + 1 >= g.nx || !g.in_domain(i + 1, j) ||
          !g.in_domain(i - 1, j))
        continue;
      if (n == 2 && (j < 1 || j + 1 >= g.ny || !g.in_domain(i, j + 1) ||
                     !g.in_domain(i, j - 1)))
        continue;
      Vec z(n);
      z[0] = (g.w[g.idx(i + 1, j)] - g.w[g.idx(i - 1, j)]) / (2.0 * g.h);
      if (n == 2)
        z[1] = (g.w[g.idx(i, j + 1)] - g.w[g.idx(i, j - 1)]) / (2.0 * g.h);
      Vec x(n + 1);
      x.head(n) = -z;
      x[n] = 1.0;
      X[g.idx(i, j)] = phi.gradient(x).head(n);
      have[g.idx(i, j)] = 1;
    }
  }
  std::vector<double> div(g.size(), nan);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i < 1 || i + 1 >= g.nx || !have[g.idx(i + 1, j)] ||
          !have[g.idx(i - 1, j)])
        continue;
      if (n == 2 && (j < 1 || j + 1 >= g.ny || !have[g.idx(i, j + 1)] ||
                     !have[g.idx(i, j - 1)]))
        continue;
      double d =
          (X[g.idx(i + 1, j)][0] - X[g.idx(i - 1, j)][0]) / (2.0 * g.h);
      if (n == 2)
        d += (X[g.idx(i, j + 1)][1] - X[g.idx(i, j - 1)][1]) / (2.0 * g.h);
      div[g.idx(i, j)] = d;
    }
  }
  return div;
}

double competitor_gap(const Integrand& phi, const DiscreteGraph& g,
                      const DiscreteGraph& v) {
  if (g.n != v.n || g.nx != v.nx || g.ny != v.ny ||
      (g.origin - v.origin).cwiseAbs().maxCoeff() > 0.0 || g.h != v.h)
    throw std::invalid_argument("competitor_gap: grids differ");
  for (int k = 0; k < g.size(); ++k) {
    if (g.mask[k] != v.mask[k])
      throw std::invalid_argument("competitor_gap: masks differ");
    if (g.mask[k] == NodeKind::Dirichlet && g.w[k] != v.w[k])
      throw std::invalid_argument("competitor_gap: boundary values differ");
  }
  return anisotropic_area(phi, v) - anisotropic_area(phi, g);
}

ExcisionResult excision_gap(const Integrand& phi, const DiscreteGraph& g,
                            const Cylinder& q) {
  if (g.n != 2 || phi.base_dim() != 2)
    throw std::invalid_argument("excision_gap: base dimension must be 2");
  if (q.axis != 0)
    throw std::invalid_argument("excision_gap: cylinder axis must be e1");

  auto inside_q = [&](double x1, double x2, double w) {
    if (x1 <= q.axial_lo || x1 >= q.axial_hi) return false;
    const double dx2 = x2 - q.cross_center.x();
    const double dx3 = w - q.cross_center.y();
    return dx2 * dx2 + dx3 * dx3 < q.cross_radius * q.cross_radius;
  };

  // sheet: graph cells whose center lies in Q, with an optional coarsening
  // stride for the Richardson error estimate
  auto sheet = [&](int stride) {
    const double cellh = g.h * stride;
    double total = 0.0;
    for (int j = 0; j + stride < g.ny; j += stride) {
      for (int i = 0; i + stride < g.nx; i += stride) {
        bool ok = g.in_domain(i, j) && g.in_domain(i + stride, j) &&
                  g.in_domain(i, j + stride) &&
                  g.in_domain(i + stride, j + stride);
        if (!ok) continue;
        const double w00 = g.w[g.idx(i, j)], w10 = g.w[g.idx(i + stride, j)];
        const double w01 = g.w[g.idx(i, j + stride)],
                     w11 = g.w[g.idx(i + stride, j + stride)];
        Vec z(2);
        z[0] = (w10 - w00 + w11 - w01) / (2.0 * cellh);
        z[1] = (w01 - w00 + w11 - w10) / (2.0 * cellh);
        const double wmid = 0.25 * (w00 + w10 + w01 + w11);
        const Eigen::Vector2d c = g.pos(i, j) + 0.5 * cellh * Eigen::Vector2d(1, 1);
        if (!inside_q(c.x(), c.y(), wmid)) continue;
        total += area_element(phi, z) * cellh * cellh;
      }
    }
    return total;
  };

  // lateral: the cylinder side {x1 in (lo,hi)} x boundary circle, counted
  // where it lies inside the subgraph (x3 <= w), weighted by Phi of the
  // side's horizontal unit normal
  auto lateral = [&](int ntheta, int naxial) {
    const double dtheta = 2.0 * std::numbers::pi / ntheta;
    const double dx1 = (q.axial_hi - q.axial_lo) / naxial;
    double total = 0.0;
    for (int t = 0; t < ntheta; ++t) {
      const double th = (t + 0.5) * dtheta;
      const double x2 = q.cross_center.x() + q.cross_radius * std::cos(th);
      const double x3 = q.cross_center.y() + q.cross_radius * std::sin(th);
      Vec nu(3);
      nu << 0.0, std::cos(th), std::sin(th);
      const double weight = phi.value(nu);
      double len = 0.0;
      for (int a = 0; a < naxial; ++a) {
        const double x1 = q.axial_lo + (a + 0.5) * dx1;
        const Eigen::Vector2d p(x1, x2);
        if (!g.cell_in_domain(p)) continue;
        if (x3 <= g.interpolate(p)) len += dx1;
      }
      total += weight * len * q.cross_radius * dtheta;
    }
    return total;
  };

  ExcisionResult r;
  r.sheet_area = sheet(1);
  if (r.sheet_area == 0.0)
    throw std::invalid_argument("excision_gap: graph does not intersect Q");
  Vec me1(3);
  me1 << -1.0, 0.0, 0.0;
  r.face_area = std::numbers::pi * q.cross_radius * q.cross_radius *
                phi.value(me1);
  r.lateral_area = lateral(2048, 512);
  r.replacement_area = r.face_area + r.lateral_area;
  r.gap = r.sheet_area - r.replacement_area;
  r.budget = std::abs(r.sheet_area - sheet(2)) +
             std::abs(r.lateral_area - lateral(1024, 256));
  return r;
}

}  // namespace amg
