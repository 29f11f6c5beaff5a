#include "amg/verify.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace amg {

std::uint64_t Rng::next_u64() {
  // splitmix64
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  have_spare_ = true;
  return rad * std::cos(ang);
}

Vec Rng::unit_vector(int dim) {
  Vec v(dim);
  double nrm = 0.0;
  do {
    for (int k = 0; k < dim; ++k) v[k] = normal();
    nrm = v.norm();
  } while (nrm < 1e-8);
  return v / nrm;
}

Vec Rng::ball_vector(int dim, double radius) {
  const double u = uniform();
  return radius * std::pow(u, 1.0 / dim) * unit_vector(dim);
}

Mat Rng::random_spd(int dim) {
  Mat A(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) A(i, j) = normal();
  return A.transpose() * A + 0.5 * Mat::Identity(dim, dim);
}

namespace {

// Finite-difference normal of the Wulff boundary at grad Phi(x), from
// curve/surface tangents along great-circle directions through x.
Vec fd_boundary_normal(const Integrand& phi, const Vec& x, double eta) {
  const int d = phi.ambient_dim();
  const Mat T = tangent_basis(x);
  std::vector<Vec> tangents;
  for (int a = 0; a < d - 1; ++a) {
    const Vec xp = (x + eta * T.col(a)).normalized();
    const Vec xm = (x - eta * T.col(a)).normalized();
    tangents.push_back((phi.gradient(xp) - phi.gradient(xm)) / (2.0 * eta));
  }
  Vec n(d);
  if (d == 2) {
    n << -tangents[0][1], tangents[0][0];
  } else if (d == 3) {
    n = Eigen::Vector3d(tangents[0].head<3>())
            .cross(Eigen::Vector3d(tangents[1].head<3>()));
  } else {
    throw std::invalid_argument("fd_boundary_normal: dim must be 2 or 3");
  }
  n.normalize();
  if (n.dot(x) < 0.0) n = -n;
  return n;
}

// Shape operator of the Wulff boundary at grad Phi(x), in the basis
// tangent_basis(x): columns of dX are FD sphere tangents (the normal
// derivatives d nu), columns of dY the corresponding boundary tangents.
Mat fd_shape_operator(const Integrand& phi, const Vec& x, double eta) {
  const int d = phi.ambient_dim();
  const Mat T = tangent_basis(x);
  Mat dX(d - 1, d - 1), dY(d - 1, d - 1);
  for (int a = 0; a < d - 1; ++a) {
    const Vec xp = (x + eta * T.col(a)).normalized();
    const Vec xm = (x - eta * T.col(a)).normalized();
    dX.col(a) = T.transpose() * (xp - xm) / (2.0 * eta);
    dY.col(a) =
        T.transpose() * (phi.gradient(xp) - phi.gradient(xm)) / (2.0 * eta);
  }
  return dX * dY.inverse();
}

}  // namespace

WulffIdentityReport verify_wulff_identities(const Integrand& phi,
                                            std::uint64_t seed,
                                            int lattice_samples,
                                            int random_samples) {
  WulffIdentityReport rep;
  const int d = phi.ambient_dim();
  Rng rng(seed);
  const std::vector<Vec> dirs = sphere_lattice(d, lattice_samples);
  const double eta = 1e-4;

  // homogeneity and Euler kernel on the lattice
  for (const Vec& x : dirs) {
    const double base = phi.value(x);
    for (double t : {0.5, 2.0, 10.0}) {
      const double err = std::abs(phi.value(t * x) - t * base) / (t * base);
      rep.homogeneity_err = std::max(rep.homogeneity_err, err);
    }
    const Mat H = phi.hessian(x);
    const double kernel =
        (H * x).lpNorm<Eigen::Infinity>() /
        std::max(H.lpNorm<Eigen::Infinity>(), 1e-300);
    rep.euler_kernel_err = std::max(rep.euler_kernel_err, kernel);
  }

  // boundary-map identities on a thinner lattice (FD cost)
  const std::vector<Vec> probe = sphere_lattice(d, random_samples);
  for (const Vec& x : probe) {
    const Vec n = fd_boundary_normal(phi, x, eta);
    rep.normal_identity_err =
        std::max(rep.normal_identity_err, (n - x).norm());
    const Mat S = fd_shape_operator(phi, x, eta);
    const Mat W = phi.tangential_hessian(x);
    rep.second_ff_err = std::max(
        rep.second_ff_err,
        (W * S - Mat::Identity(d - 1, d - 1)).lpNorm<Eigen::Infinity>());
  }

  // calibration inequality Phi(a) >= grad Phi(b) . a
  rep.calibration_slack = std::numeric_limits<double>::infinity();
  for (const Vec& b : dirs) {
    const Vec gb = phi.gradient(b);
    for (int k = 0; k < random_samples; ++k) {
      const Vec a = rng.unit_vector(d) * rng.uniform(0.25, 4.0);
      rep.calibration_slack =
          std::min(rep.calibration_slack, phi.value(a) - gb.dot(a));
    }
  }

  // graph integrand derivatives against central differences
  for (int k = 0; k < random_samples; ++k) {
    const Vec z = rng.ball_vector(d - 1, 2.0);
    const Vec g = phi.graph_gradient(z);
    const Mat H = phi.graph_hessian(z);
    const double scale = std::max(1.0, g.lpNorm<Eigen::Infinity>());
    for (int m = 0; m < d - 1; ++m) {
      Vec zp = z, zm = z;
      zp[m] += eta;
      zm[m] -= eta;
      const double fd_g =
          (phi.graph_value(zp) - phi.graph_value(zm)) / (2.0 * eta);
      rep.graph_fd_err =
          std::max(rep.graph_fd_err, std::abs(fd_g - g[m]) / scale);
      const Vec fd_h =
          (phi.graph_gradient(zp) - phi.graph_gradient(zm)) / (2.0 * eta);
      rep.graph_fd_err = std::max(
          rep.graph_fd_err,
          (fd_h - H.col(m)).lpNorm<Eigen::Infinity>() /
              std::max(1.0, H.lpNorm<Eigen::Infinity>()));
    }
  }

  std::tie(rep.ellipticity_min, rep.ellipticity_max) =
      phi.ellipticity_bounds(2.0);
  return rep;
}

}  // namespace amg
