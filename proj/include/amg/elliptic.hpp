#pragma once

#include "amg/grid.hpp"
#include "amg/wulff.hpp"

namespace amg {

struct PucciParams {
  double lambda = 0.5;
};

/// Minimal Pucci operator: lambda * (sum of positive eigenvalues)
/// + lambda^{-1} * (sum of negative eigenvalues). A is symmetrized
/// internally; asymmetry beyond 1e-10 prints a warning to stderr.
double pucci_minus(const PucciParams& params, const Mat& A);

/// Radial barrier phi0(x) = min(|x - center|^{-M}, delta^{-M}) - (3/2)^M.
/// Constant on B_delta; its Hessian is computed from the analytic radial
/// branches, never by differencing the min.
class BarrierSpec {
 public:
  BarrierSpec(double M, double delta, int n, Vec center = Vec());

  double exponent() const { return M_; }
  double delta() const { return delta_; }
  int dim() const { return n_; }
  const Vec& center() const { return center_; }

  double value(const Vec& x) const;
  double radial_value(double rho) const;
  /// Hessian; zero inside B_delta (constant branch).
  Mat hessian(const Vec& x) const;
  /// Radial Hessian eigenvalues at rho > delta: (radial, tangential).
  std::pair<double, double> radial_hessian_eigs(double rho) const;
  double radial_gradient(double rho) const;

 private:
  double M_;
  double delta_;
  int n_;
  Vec center_;
};

/// Smallest integer M such that phi0 is a strict Pucci subsolution on a
/// dense radial grid of (delta, 1], phi0 > 1 on the sphere of radius 1/3,
/// and the analytic sufficient condition M + 1 > lambda^{-2} (n - 1) holds.
BarrierSpec choose_barrier_exponent(const PucciParams& params, int n,
                                    double delta, int radial_samples = 1000);

struct SlideResult {
  double shift = 0.0;
  std::vector<int> contact;  // node indices into the surface grid
};

/// Largest vertical shift t with obstacle + t <= surface on the obstacle's
/// in-domain nodes, plus the near-contact set (tolerance 1e-12 times the
/// surface value range, ties all reported in lexicographic order). The
/// obstacle grid must align with the surface grid (same spacing, integer
/// offset) and its domain must sit inside the surface domain.
SlideResult slide_until_contact(const DiscreteGraph& surface,
                                const DiscreteGraph& obstacle);

}  // namespace amg
