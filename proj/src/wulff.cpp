#include "amg/wulff.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace amg {

namespace {

constexpr double kUnitTol = 1e-12;

bool finite(const Vec& x) { return x.allFinite(); }

// Re((x1 + i x2)^4) and its derivatives, as functions on ambient space
// (all other coordinates inert). Homogeneous of degree 4 and harmonic in
// the (x1, x2) plane.
double quartic(const Vec& x) {
  const double a = x[0], b = x[1];
  return a * a * a * a - 6.0 * a * a * b * b + b * b * b * b;
}

Vec quartic_grad(const Vec& x) {
  const double a = x[0], b = x[1];
  Vec g = Vec::Zero(x.size());
  g[0] = 4.0 * a * a * a - 12.0 * a * b * b;
  g[1] = 4.0 * b * b * b - 12.0 * a * a * b;
  return g;
}

Mat quartic_hess(const Vec& x) {
  const double a = x[0], b = x[1];
  Mat H = Mat::Zero(x.size(), x.size());
  H(0, 0) = 12.0 * (a * a - b * b);
  H(1, 1) = 12.0 * (b * b - a * a);
  H(0, 1) = H(1, 0) = -24.0 * a * b;
  return H;
}

}  // namespace

std::vector<Vec> sphere_lattice(int dim, int count) {
  if (count < 1) throw std::invalid_argument("sphere_lattice: count < 1");
  std::vector<Vec> out;
  out.reserve(count);
  if (dim == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * i / count;
      Vec v(2);
      v << std::cos(t), std::sin(t);
      out.push_back(v);
    }
  } else if (dim == 3) {
    const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = ga * i;
      Vec v(3);
      v << r * std::cos(t), r * std::sin(t), z;
      out.push_back(v);
    }
  } else {
    throw std::invalid_argument("sphere_lattice: dim must be 2 or 3");
  }
  return out;
}

Mat tangent_basis(const Vec& nu) {
  const int d = static_cast<int>(nu.size());
  if (std::abs(nu.norm() - 1.0) > kUnitTol)
    throw std::invalid_argument("tangent_basis: direction is not unit");
  // Householder reflection mapping e_d to -sign(nu_d) nu; its first d-1
  // columns are an orthonormal basis of nu-perp.
  const double s = nu[d - 1] >= 0.0 ? 1.0 : -1.0;
  Vec v = nu;
  v[d - 1] += s;
  const double vn2 = v.squaredNorm();
  Mat H = Mat::Identity(d, d);
  if (vn2 > 1e-30) H -= (2.0 / vn2) * (v * v.transpose());
  return H.leftCols(d - 1);
}

Integrand Integrand::isotropic(int ambient_dim) {
  if (ambient_dim < 2) throw std::invalid_argument("ambient dimension < 2");
  Integrand p;
  p.family_ = Family::Isotropic;
  p.dim_ = ambient_dim;
  return p;
}

Integrand Integrand::ellipsoidal(const Mat& Q) {
  if (Q.rows() != Q.cols() || Q.rows() < 2)
    throw std::invalid_argument("ellipsoidal: Q must be square, size >= 2");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("ellipsoidal: Q is not symmetric");
  Eigen::LLT<Mat> llt(Q);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("ellipsoidal: Q is not positive definite");
  Integrand p;
  p.family_ = Family::Ellipsoidal;
  p.dim_ = static_cast<int>(Q.rows());
  p.Q_ = Q;
  return p;
}

Integrand Integrand::perturbed_isotropic(int ambient_dim, double amplitude) {
  if (ambient_dim < 2) throw std::invalid_argument("ambient dimension < 2");
  Integrand p;
  p.family_ = Family::PerturbedIsotropic;
  p.dim_ = ambient_dim;
  p.amplitude_ = amplitude;
  // Sampled uniform-convexity check; construction fails loudly when the
  // amplitude destroys convexity.
  const auto dirs = sphere_lattice(ambient_dim, ambient_dim == 2 ? 720 : 2000);
  for (const auto& nu : dirs) {
    Eigen::SelfAdjointEigenSolver<Mat> es(p.tangential_hessian(nu));
    if (es.eigenvalues().minCoeff() <= 1e-6)
      throw std::invalid_argument(
          "perturbed_isotropic: amplitude too large, uniform convexity lost");
  }
  return p;
}

Integrand Integrand::flipped() const {
  Integrand p = *this;
  p.flip_ = !p.flip_;
  return p;
}

void Integrand::check_input(const Vec& x, bool need_nonzero) const {
  if (x.size() != dim_)
    throw std::invalid_argument("integrand: wrong input dimension");
  if (!finite(x)) throw std::domain_error("integrand: non-finite input");
  if (need_nonzero && x.norm() == 0.0)
    throw std::domain_error("integrand: derivative undefined at the origin");
}

double Integrand::base_value(const Vec& x) const {
  switch (family_) {
    case Family::Isotropic:
      return x.norm();
    case Family::Ellipsoidal:
      return std::sqrt(x.dot(Q_ * x));
    case Family::PerturbedIsotropic: {
      const double r = x.norm();
      if (r == 0.0) return 0.0;
      return r + amplitude_ * quartic(x) / (r * r * r);
    }
  }
  return 0.0;
}

Vec Integrand::base_gradient(const Vec& x) const {
  switch (family_) {
    case Family::Isotropic:
      return x / x.norm();
    case Family::Ellipsoidal: {
      return Q_ * x / std::sqrt(x.dot(Q_ * x));
    }
    case Family::PerturbedIsotropic: {
      const double r = x.norm();
      const double r3 = r * r * r, r5 = r3 * r * r;
      return x / r +
             amplitude_ * (quartic_grad(x) / r3 - 3.0 * quartic(x) / r5 * x);
    }
  }
  return Vec();
}

Mat Integrand::base_hessian(const Vec& x) const {
  const int d = dim_;
  switch (family_) {
    case Family::Isotropic: {
      const double r = x.norm();
      Vec u = x / r;
      return (Mat::Identity(d, d) - u * u.transpose()) / r;
    }
    case Family::Ellipsoidal: {
      const double s = std::sqrt(x.dot(Q_ * x));
      Vec q = Q_ * x;
      return Q_ / s - q * q.transpose() / (s * s * s);
    }
    case Family::PerturbedIsotropic: {
      const double r = x.norm();
      const double r3 = r * r * r, r5 = r3 * r * r, r7 = r5 * r * r;
      Vec u = x / r;
      const double h = quartic(x);
      Vec gh = quartic_grad(x);
      Mat H = (Mat::Identity(d, d) - u * u.transpose()) / r;
      H += amplitude_ *
           (quartic_hess(x) / r3 -
            3.0 / r5 * (gh * x.transpose() + x * gh.transpose()) -
            3.0 * h / r5 * Mat::Identity(d, d) +
            15.0 * h / r7 * (x * x.transpose()));
      return H;
    }
  }
  return Mat();
}

double Integrand::value(const Vec& x) const {
  check_input(x, false);
  if (x.norm() == 0.0) return 0.0;  // continuous extension
  return base_value(flip_ ? Vec(-x) : x);
}

Vec Integrand::gradient(const Vec& x) const {
  check_input(x, true);
  if (flip_) return -base_gradient(Vec(-x));
  return base_gradient(x);
}

Mat Integrand::hessian(const Vec& x) const {
  check_input(x, true);
  if (flip_) return base_hessian(Vec(-x));
  return base_hessian(x);
}

Mat Integrand::tangential_hessian(const Vec& nu) const {
  if (std::abs(nu.norm() - 1.0) > kUnitTol)
    throw std::invalid_argument("tangential_hessian: direction is not unit");
  Mat T = tangent_basis(nu);
  return T.transpose() * hessian(nu) * T;
}

std::vector<Vec> Integrand::wulff_boundary(
    const std::vector<Vec>& directions) const {
  std::vector<Vec> out;
  out.reserve(directions.size());
  for (const auto& nu : directions) {
    if (std::abs(nu.norm() - 1.0) > kUnitTol)
      throw std::invalid_argument("wulff_boundary: direction is not unit");
    out.push_back(gradient(nu));
  }
  return out;
}

double Integrand::graph_value(const Vec& z) const {
  Vec x(dim_);
  x.head(dim_ - 1) = -z;
  x[dim_ - 1] = 1.0;
  return value(x);
}

Vec Integrand::graph_gradient(const Vec& z) const {
  Vec x(dim_);
  x.head(dim_ - 1) = -z;
  x[dim_ - 1] = 1.0;
  return -gradient(x).head(dim_ - 1);
}

Mat Integrand::graph_hessian(const Vec& z) const {
  Vec x(dim_);
  x.head(dim_ - 1) = -z;
  x[dim_ - 1] = 1.0;
  return hessian(x).topLeftCorner(dim_ - 1, dim_ - 1);
}

std::pair<double, double> Integrand::ellipticity_bounds(
    double gradient_bound, int direction_samples, int radial_samples) const {
  if (gradient_bound <= 0.0)
    throw std::invalid_argument("ellipticity_bounds: gradient bound <= 0");
  const int n = dim_ - 1;
  std::vector<Vec> dirs;
  if (n == 1) {
    Vec p(1), m(1);
    p << 1.0;
    m << -1.0;
    dirs = {p, m};
  } else {
    dirs = sphere_lattice(n, direction_samples);
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto visit = [&](const Vec& z) {
    Eigen::SelfAdjointEigenSolver<Mat> es(graph_hessian(z));
    const double mn = es.eigenvalues().minCoeff();
    const double mx = es.eigenvalues().maxCoeff();
    if (mn <= 0.0)
      throw std::runtime_error(
          "ellipticity_bounds: nonpositive eigenvalue, integrand not convex");
    lo = std::min(lo, mn);
    hi = std::max(hi, mx);
  };
  visit(Vec::Zero(n));
  for (const auto& d : dirs)
    for (int k = 1; k < radial_samples; ++k)
      visit(Vec(d * (gradient_bound * k / (radial_samples - 1))));
  return {lo, hi};
}

double Integrand::pucci_lambda(double gradient_bound) const {
  auto [lo, hi] = ellipticity_bounds(gradient_bound);
  return std::min(lo, 1.0 / hi);
}

double Integrand::max_curvature_radius(int samples) const {
  double best = 0.0;
  for (const auto& nu : sphere_lattice(dim_, samples)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(tangential_hessian(nu));
    best = std::max(best, es.eigenvalues().maxCoeff());
  }
  return best;
}

double Integrand::min_horizontal_extent(int samples) const {
  double best = std::numeric_limits<double>::infinity();
  const int n = dim_ - 1;
  std::vector<Vec> dirs;
  if (n == 1) {
    Vec p(1), m(1);
    p << 1.0;
    m << -1.0;
    dirs = {p, m};
  } else {
    dirs = sphere_lattice(n, samples);
  }
  for (const auto& e : dirs) {
    Vec x = Vec::Zero(dim_);
    x.head(n) = e;
    best = std::min(best, value(x));
  }
  return best;
}

}  // namespace amg
