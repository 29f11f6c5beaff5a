#include "amg/contact.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "amg/elliptic.hpp"
#include "amg/pde.hpp"

namespace amg {

namespace {

// Newton minimization of z -> c0 + p.z + s * Phi(sign * (-z), 1)-type
// profile objectives; both profile branches below reduce to minimizing a
// smooth strongly convex function with positive definite Hessian.
Vec newton_argmin(const std::function<double(const Vec&)>& f,
                  const std::function<Vec(const Vec&)>& grad,
                  const std::function<Mat(const Vec&)>& hess, Vec z0) {
  Vec z = z0;
  for (int it = 0; it < 100; ++it) {
    const Vec g = grad(z);
    if (g.norm() < 1e-13 * std::max(1.0, z.norm())) break;
    const Vec d = hess(z).ldlt().solve(-g);
    double s = 1.0;
    const double f0 = f(z);
    for (int k = 0; k < 60; ++k) {
      if (f(z + s * d) < f0) break;
      s *= 0.5;
    }
    z += s * d;
  }
  return z;
}

}  // namespace

WulffProfile::WulffProfile(const Integrand& phi, double r, double safety)
    : phi_(phi), r_(r) {
  if (r <= 0.0) throw std::invalid_argument("WulffProfile: r <= 0");
  if (!(safety > 0.0 && safety < 1.0))
    throw std::invalid_argument("WulffProfile: safety factor out of (0,1)");
  disk_radius_ = safety * r * phi.min_horizontal_extent();
}

// f(p) = sup_z [ p.z - r Phi(z, -1) ]; the maximizer solves
// r grad_z Phi(z, -1) = p.
double WulffProfile::value(const Vec& p) const {
  const Vec z = slope(p);
  const int n = phi_.base_dim();
  Vec x(n + 1);
  x.head(n) = z;
  x[n] = -1.0;
  return p.dot(z) - r_ * phi_.value(x);
}

Vec WulffProfile::slope(const Vec& p) const {
  const int n = phi_.base_dim();
  if (p.size() != n)
    throw std::invalid_argument("WulffProfile: offset dimension mismatch");
  if (p.norm() > disk_radius_ + 1e-12)
    throw std::out_of_range("WulffProfile: offset beyond usable disk");
  auto lift = [n](const Vec& z) {
    Vec x(n + 1);
    x.head(n) = z;
    x[n] = -1.0;
    return x;
  };
  auto f = [&](const Vec& z) { return r_ * phi_.value(lift(z)) - p.dot(z); };
  auto g = [&](const Vec& z) {
    return Vec(r_ * phi_.gradient(lift(z)).head(n) - p);
  };
  auto h = [&](const Vec& z) {
    return Mat(r_ * phi_.hessian(lift(z)).topLeftCorner(n, n));
  };
  return newton_argmin(f, g, h, Vec::Zero(n));
}

double contact_jacobian(const Integrand& phi, const DiscreteGraph& surface,
                        int i, int j, double r, double psd_tolerance) {
  if (!surface.interior(i, j))
    throw std::invalid_argument("contact_jacobian: contact not interior");
  const int n = surface.n;
  const Vec z = node_gradient(surface, i, j);
  const Mat D2w = node_hessian(surface, i, j);
  const double q = std::sqrt(1.0 + z.squaredNorm());
  Vec nu(n + 1);
  nu.head(n) = -z / q;
  nu[n] = 1.0 / q;
  const Mat T = tangent_basis(nu);  // (n+1) x n
  const Mat Xi = T.topRows(n);      // horizontal parts of the tangent basis
  const Mat II = Xi.transpose() * D2w * Xi / q;
  const Mat W = T.transpose() * phi.hessian(nu) * T;
  Eigen::SelfAdjointEigenSolver<Mat> ws(W);
  const Mat Wh = ws.operatorSqrt();
  const Mat B = Mat::Identity(n, n) + r * Wh * II * Wh;  // similar to I+rW*II
  Eigen::SelfAdjointEigenSolver<Mat> bs(B);
  if (bs.eigenvalues().minCoeff() < -psd_tolerance)
    throw std::runtime_error(
        "contact_jacobian: contact operator has eigenvalue " +
        std::to_string(bs.eigenvalues().minCoeff()) +
        " below -tolerance (inconsistent contact)");
  return B.determinant();
}

std::pair<std::vector<ContactRecord>, ContactSummary> run_contact_experiment(
    const Integrand& phi, const DiscreteGraph& surface, double delta,
    const ContactOptions& opts) {
  if (surface.n != 2 || phi.base_dim() != 2)
    throw std::invalid_argument("contact experiment: base dimension must be 2");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("contact experiment: bad delta");
  for (int k = 0; k < surface.size(); ++k)
    if (surface.mask[k] != NodeKind::Outside && !(surface.w[k] > 0.0))
      throw std::invalid_argument("contact experiment: surface must be > 0");

  // eps := w at the node nearest the origin
  const int ci = static_cast<int>(std::lround(-surface.origin.x() / surface.h));
  const int cj = static_cast<int>(std::lround(-surface.origin.y() / surface.h));
  if (ci < 0 || ci >= surface.nx || cj < 0 || cj >= surface.ny ||
      !surface.in_domain(ci, cj))
    throw std::invalid_argument("contact experiment: origin not in domain");
  const double eps = surface.w[surface.idx(ci, cj)];
  const double eps0 = opts.eps0_proxy > 0.0 ? opts.eps0_proxy
                                            : std::pow(delta, 1.5);
  if (!(eps < eps0))
    throw std::invalid_argument(
        "contact experiment: surface height at center exceeds the eps0 proxy");

  ContactSummary sum;
  sum.delta = delta;
  sum.C2 = opts.C2;
  sum.eps = eps;
  sum.r = opts.C2 * std::sqrt(delta);

  double max_extent = 0.0;
  for (const auto& e : sphere_lattice(2, 256)) {
    Vec x(3);
    x << e[0], e[1], 0.0;
    max_extent = std::max(max_extent, phi.value(x));
  }
  sum.C3 = opts.C3 > 0.0 ? opts.C3 : 1.05 * opts.C2 * max_extent;

  const double sample_radius = 1.0 / 3.0 - sum.C3 * std::sqrt(delta);
  if (sample_radius <= surface.h)
    throw std::invalid_argument(
        "contact experiment: C3 sqrt(delta) leaves no center disk; reduce "
        "delta or C2/C3");

  // The sliding obstacle is the top cap of rK: u(p) = inf_z [p.z + r phi(z)],
  // which equals the reflected lower profile of -K. Its gradient is the
  // Legendre minimizer, giving the exact contact normal.
  const double cap_radius =
      opts.profile_safety * sum.r * phi.min_horizontal_extent();
  const int n = 2;
  auto cap = [&](const Vec& p, Vec* slope_out) {
    auto f = [&](const Vec& z) { return p.dot(z) + sum.r * phi.graph_value(z); };
    auto g = [&](const Vec& z) {
      return Vec(p + sum.r * phi.graph_gradient(z));
    };
    auto h = [&](const Vec& z) { return Mat(sum.r * phi.graph_hessian(z)); };
    const Vec z = newton_argmin(f, g, h, Vec::Zero(n));
    if (slope_out) *slope_out = z;
    return f(z);
  };

  std::vector<ContactRecord> records;
  std::set<int> covered;
  const double h = surface.h;
  const double det_tol =
      opts.det_tolerance > 0.0 ? opts.det_tolerance : 1e-6 + 10.0 * h;

  int ball_nodes = 0, sampled_nodes = 0;
  for (int j = 0; j < surface.ny; ++j)
    for (int i = 0; i < surface.nx; ++i) {
      if (!surface.in_domain(i, j)) continue;
      const double rho = surface.pos(i, j).norm();
      if (rho <= 1.0 / 3.0) ++ball_nodes;
      if (rho <= sample_radius) ++sampled_nodes;
    }
  sum.ball_area = ball_nodes * h * h;
  sum.sampled_area = sampled_nodes * h * h;
  sum.num_centers = sampled_nodes;

  // Centers are grid nodes, so the cap stencil (values at grid offsets from
  // the center) is the same for every center; compute it once.
  const int reach = static_cast<int>(std::floor(cap_radius / h));
  const int stencil_w = 2 * reach + 1;
  std::vector<double> stencil(static_cast<size_t>(stencil_w) * stencil_w,
                              std::numeric_limits<double>::quiet_NaN());
  for (int jj = -reach; jj <= reach; ++jj)
    for (int ii = -reach; ii <= reach; ++ii) {
      const double px = ii * h, py = jj * h;
      if (std::hypot(px, py) > cap_radius) continue;
      Vec p(2);
      p << px, py;
      stencil[(jj + reach) * stencil_w + (ii + reach)] = cap(p, nullptr);
    }
  const double tie_tol = 1e-12 * surface.value_range();

  for (int j = 0; j < surface.ny; ++j) {
    for (int i = 0; i < surface.nx; ++i) {
      if (!surface.in_domain(i, j)) continue;
      const Eigen::Vector2d c = surface.pos(i, j);
      if (c.norm() > sample_radius) continue;

      if (i - reach < 0 || i + reach >= surface.nx || j - reach < 0 ||
          j + reach >= surface.ny)
        throw std::invalid_argument(
            "contact experiment: cap stencil leaves the surface grid");

      // slide: max shift with cap + t <= surface over the stencil
      double shift = std::numeric_limits<double>::infinity();
      for (int jj = -reach; jj <= reach; ++jj)
        for (int ii = -reach; ii <= reach; ++ii) {
          const double cv = stencil[(jj + reach) * stencil_w + (ii + reach)];
          if (std::isnan(cv)) continue;
          if (!surface.in_domain(i + ii, j + jj))
            throw std::invalid_argument(
                "contact experiment: cap stencil leaves the surface domain");
          shift = std::min(shift, surface.w[surface.idx(i + ii, j + jj)] - cv);
        }
      std::vector<int> contact_nodes;
      for (int jj = -reach; jj <= reach; ++jj)
        for (int ii = -reach; ii <= reach; ++ii) {
          const double cv = stencil[(jj + reach) * stencil_w + (ii + reach)];
          if (std::isnan(cv)) continue;
          const int node = surface.idx(i + ii, j + jj);
          if (surface.w[node] - cv - shift <= tie_tol)
            contact_nodes.push_back(node);
        }

      bool first = true;
      for (int node : contact_nodes) {
        const int si = node % surface.nx, sj = node / surface.nx;
        const Eigen::Vector2d xp = surface.pos(si, sj);
        if (node != surface.idx(si, sj)) continue;
        covered.insert(node);
        if (!first) continue;  // one record per center, ties still cover G
        first = false;

        ContactRecord rec;
        rec.node = node;
        rec.height = surface.w[node];
        rec.flagged = ((xp - c).norm() >= cap_radius - 1.5 * h) ||
                      !surface.interior(si, sj);
        Vec p(2);
        p << xp.x() - c.x(), xp.y() - c.y();
        Vec zstar;
        const double cap_val = cap(p, &zstar);
        const double q = std::sqrt(1.0 + zstar.squaredNorm());
        Vec nu(3);
        nu << -zstar[0] / q, -zstar[1] / q, 1.0 / q;
        rec.normal = nu;
        rec.point = Vec(3);
        rec.point << xp.x(), xp.y(), surface.w[node];
        rec.center = rec.point - sum.r * phi.gradient(nu);
        // consistency with the slide: the body's center height is the
        // contact height minus the cap value
        (void)cap_val;
        if (surface.interior(si, sj)) {
          rec.tangential_gradient = node_gradient(surface, si, sj).norm();
          if (!rec.flagged)
            rec.jacobian_det =
                contact_jacobian(phi, surface, si, sj, sum.r, det_tol);
        } else {
          rec.flagged = true;
        }
        if (rec.flagged) ++sum.num_flagged;
        records.push_back(std::move(rec));
      }
    }
  }

  sum.num_contacts = static_cast<int>(records.size());
  sum.covered_nodes.assign(covered.begin(), covered.end());
  sum.covered_area = static_cast<double>(covered.size()) * h * h;
  sum.deficit_sampled = sum.sampled_area - sum.covered_area;
  sum.deficit_ball = sum.ball_area - sum.covered_area;
  for (const auto& rec : records) {
    if (rec.flagged) continue;
    sum.max_height = std::max(sum.max_height, rec.height);
    sum.max_gradient = std::max(sum.max_gradient, rec.tangential_gradient);
    sum.max_det = std::max(sum.max_det, rec.jacobian_det);
  }
  const double sq = std::sqrt(delta);
  sum.C1_measured = std::max({sum.max_height / (delta * sq),
                              sum.max_gradient / sq, sum.deficit_ball / sq});
  return {std::move(records), sum};
}

void write_contact_csv(const std::vector<ContactRecord>& records,
                       const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f,
               "center_x,center_y,center_z,contact_x,contact_y,contact_z,"
               "normal_x,normal_y,normal_z,height,jacobian_det,grad,flagged\n");
  for (const auto& r : records) {
    std::fprintf(f,
                 "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                 "%.17g,%.17g,%.17g,%d\n",
                 r.center[0], r.center[1], r.center[2], r.point[0], r.point[1],
                 r.point[2], r.normal[0], r.normal[1], r.normal[2], r.height,
                 r.jacobian_det, r.tangential_gradient, r.flagged ? 1 : 0);
  }
  std::fclose(f);
}

}  // namespace amg
