#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace amg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Deterministic quasi-uniform unit-sphere sample set.
/// dim == 2 gives equally spaced angles, dim == 3 a Fibonacci lattice.
std::vector<Vec> sphere_lattice(int dim, int count);

/// Orthonormal basis of the hyperplane orthogonal to the unit vector nu,
/// returned as the columns of a dim x (dim-1) matrix. Deterministic
/// (Householder construction).
Mat tangent_basis(const Vec& nu);

enum class Family { Isotropic, Ellipsoidal, PerturbedIsotropic };

/// One-homogeneous convex integrand Phi, the support function of a smooth
/// uniformly convex body K. Three closed-form families so that all
/// derivatives are exact:
///   isotropic            Phi(x) = |x|
///   ellipsoidal          Phi(x) = sqrt(x' Q x), Q SPD
///   perturbed isotropic  Phi(x) = |x| + a * Re((x1 + i x2)^4) / |x|^3
/// The orientation flip K -> -K is a constructor transform (flipped()).
class Integrand {
 public:
  static Integrand isotropic(int ambient_dim);
  static Integrand ellipsoidal(const Mat& Q);
  static Integrand perturbed_isotropic(int ambient_dim, double amplitude);

  Integrand flipped() const;

  int ambient_dim() const { return dim_; }
  int base_dim() const { return dim_ - 1; }
  Family family() const { return family_; }
  bool is_flipped() const { return flip_; }
  double amplitude() const { return amplitude_; }
  const Mat& Q() const { return Q_; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  /// Hessian of Phi restricted to the tangent plane of the sphere at nu,
  /// expressed in the basis tangent_basis(nu). Positive definite.
  Mat tangential_hessian(const Vec& nu) const;

  /// grad Phi applied to unit directions; images lie on the Wulff boundary.
  std::vector<Vec> wulff_boundary(const std::vector<Vec>& directions) const;

  /// phi(z) = Phi(-z, 1) and its exact derivatives.
  double graph_value(const Vec& z) const;
  Vec graph_gradient(const Vec& z) const;
  Mat graph_hessian(const Vec& z) const;

  /// Min/max eigenvalue of D^2 phi over a dense deterministic sample of
  /// {|z| <= gradient_bound}. Throws if positivity fails (lost convexity).
  std::pair<double, double> ellipticity_bounds(double gradient_bound,
                                               int direction_samples = 64,
                                               int radial_samples = 33) const;

  /// Pucci parameter lambda(K) = min(lambda_min, 1/lambda_max) for the
  /// ellipticity bounds at the given gradient bound.
  double pucci_lambda(double gradient_bound) const;

  /// max over sampled sphere directions of the largest curvature radius of
  /// the Wulff boundary (= largest eigenvalue of the tangential Hessian).
  double max_curvature_radius(int samples = 512) const;

  /// min over sampled horizontal unit directions e' of Phi(e', 0); the
  /// horizontal reach of K is at least this in every direction.
  double min_horizontal_extent(int samples = 256) const;

 private:
  Integrand() = default;
  void check_input(const Vec& x, bool need_nonzero) const;

  double base_value(const Vec& x) const;
  Vec base_gradient(const Vec& x) const;
  Mat base_hessian(const Vec& x) const;

  Family family_ = Family::Isotropic;
  int dim_ = 3;
  bool flip_ = false;
  Mat Q_;            // ellipsoidal only
  double amplitude_ = 0.0;  // perturbed only
};

}  // namespace amg
