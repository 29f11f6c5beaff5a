#include "amg/elliptic.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace amg {

double pucci_minus(const PucciParams& params, const Mat& A) {
  if (params.lambda <= 0.0 || params.lambda >= 1.0)
    throw std::invalid_argument("pucci_minus: lambda must be in (0,1)");
  if (!A.allFinite())
    throw std::invalid_argument("pucci_minus: non-finite entries");
  if (A.rows() != A.cols())
    throw std::invalid_argument("pucci_minus: matrix not square");
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    std::cerr << "pucci_minus: symmetrizing input with asymmetry " << asym
              << "\n";
  const Mat S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  double out = 0.0;
  for (int i = 0; i < S.rows(); ++i) {
    const double e = es.eigenvalues()[i];
    out += e > 0.0 ? params.lambda * e : e / params.lambda;
  }
  return out;
}

BarrierSpec::BarrierSpec(double M, double delta, int n, Vec center)
    : M_(M), delta_(delta), n_(n), center_(std::move(center)) {
  if (M_ < 1.0) throw std::invalid_argument("BarrierSpec: M must be >= 1");
  if (!(delta_ > 0.0 && delta_ < 1.0 / 3.0))
    throw std::invalid_argument("BarrierSpec: delta must be in (0, 1/3)");
  if (n_ < 1) throw std::invalid_argument("BarrierSpec: dimension < 1");
  if (center_.size() == 0) center_ = Vec::Zero(n_);
  if (center_.size() != n_)
    throw std::invalid_argument("BarrierSpec: center dimension mismatch");
  if (!(radial_value(1.0 / 3.0) > 1.0))
    throw std::invalid_argument(
        "BarrierSpec: phi0 <= 1 on the sphere of radius 1/3");
}

double BarrierSpec::radial_value(double rho) const {
  const double cap = std::pow(delta_, -M_);
  const double head = rho <= delta_ ? cap : std::pow(rho, -M_);
  return std::min(head, cap) - std::pow(1.5, M_);
}

double BarrierSpec::value(const Vec& x) const {
  return radial_value((x - center_).norm());
}

double BarrierSpec::radial_gradient(double rho) const {
  if (rho <= delta_) return 0.0;
  return -M_ * std::pow(rho, -M_ - 1.0);
}

std::pair<double, double> BarrierSpec::radial_hessian_eigs(double rho) const {
  const double c = std::pow(rho, -M_ - 2.0);
  return {M_ * (M_ + 1.0) * c, -M_ * c};
}

Mat BarrierSpec::hessian(const Vec& x) const {
  const Vec d = x - center_;
  const double rho = d.norm();
  if (rho <= delta_) return Mat::Zero(n_, n_);
  const auto [er, et] = radial_hessian_eigs(rho);
  const Vec u = d / rho;
  return er * (u * u.transpose()) +
         et * (Mat::Identity(n_, n_) - u * u.transpose());
}

BarrierSpec choose_barrier_exponent(const PucciParams& params, int n,
                                    double delta, int radial_samples) {
  if (n < 1) throw std::invalid_argument("choose_barrier_exponent: n < 1");
  if (!(delta > 0.0 && delta < 1.0 / 3.0))
    throw std::invalid_argument("choose_barrier_exponent: delta out of range");
  for (int M = 1;; ++M) {
    if (M + 1.0 <= (n - 1.0) / (params.lambda * params.lambda)) continue;
    BarrierSpec spec(M, delta, n);
    if (!(spec.radial_value(1.0 / 3.0) > 1.0)) continue;
    bool ok = true;
    for (int k = 1; k <= radial_samples && ok; ++k) {
      const double rho = delta + (1.0 - delta) * k / radial_samples;
      Vec x = Vec::Zero(n);
      x[0] = rho;
      if (!(pucci_minus(params, spec.hessian(x)) > 0.0)) ok = false;
    }
    if (ok) return spec;
    if (M > 10000)
      throw std::runtime_error("choose_barrier_exponent: no M found");
  }
}

SlideResult slide_until_contact(const DiscreteGraph& surface,
                                const DiscreteGraph& obstacle) {
  if (surface.n != obstacle.n)
    throw std::invalid_argument("slide: dimension mismatch");
  if (std::abs(surface.h - obstacle.h) > 1e-12 * surface.h)
    throw std::invalid_argument("slide: grid spacings differ");
  const Eigen::Vector2d off = (obstacle.origin - surface.origin) / surface.h;
  const int oi = static_cast<int>(std::lround(off.x()));
  const int oj = static_cast<int>(std::lround(off.y()));
  if ((off - Eigen::Vector2d(oi, oj)).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("slide: grids are not aligned");

  double shift = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int j = 0; j < obstacle.ny; ++j) {
    for (int i = 0; i < obstacle.nx; ++i) {
      if (!obstacle.in_domain(i, j)) continue;
      const int si = i + oi, sj = j + oj;
      if (si < 0 || si >= surface.nx || sj < 0 || sj >= surface.ny ||
          !surface.in_domain(si, sj))
        throw std::invalid_argument(
            "slide: obstacle subdomain leaves the surface domain");
      const double sv = surface.w[surface.idx(si, sj)];
      if (!std::isfinite(sv))
        throw std::invalid_argument("slide: non-finite surface value");
      shift = std::min(shift, sv - obstacle.w[obstacle.idx(i, j)]);
      any = true;
    }
  }
  if (!any)
    throw std::invalid_argument("slide: obstacle has no in-domain nodes");

  SlideResult res;
  res.shift = shift;
  const double tol = 1e-12 * std::max(surface.value_range(), 1e-300);
  for (int j = 0; j < obstacle.ny; ++j) {
    for (int i = 0; i < obstacle.nx; ++i) {
      if (!obstacle.in_domain(i, j)) continue;
      const int si = i + oi, sj = j + oj;
      const double gap = surface.w[surface.idx(si, sj)] -
                         obstacle.w[obstacle.idx(i, j)] - shift;
      if (gap <= tol) res.contact.push_back(surface.idx(si, sj));
    }
  }
  return res;
}

}  // namespace amg
