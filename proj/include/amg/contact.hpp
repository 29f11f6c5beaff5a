#pragma once

#include "amg/grid.hpp"
#include "amg/wulff.hpp"

namespace amg {

/// Lower boundary of the scaled Wulff shape rK as a convex graph over its
/// horizontal projection, through the support-function parametrization
/// (Legendre transform of z -> r Phi(z, -1), evaluated by Newton).
class WulffProfile {
 public:
  WulffProfile(const Integrand& phi, double r, double safety = 0.9);

  double r() const { return r_; }
  /// Usable horizontal radius (a safety factor below the projection rim,
  /// where the profile slope blows up).
  double disk_radius() const { return disk_radius_; }

  /// Height of the lower boundary above horizontal offset p.
  double value(const Vec& p) const;
  /// Gradient of the profile at p (the Legendre maximizer).
  Vec slope(const Vec& p) const;

 private:
  Integrand phi_;
  double r_;
  double disk_radius_;
};

struct ContactRecord {
  Vec center;        // ambient center y of the slid copy of rK
  Vec point;         // ambient contact point x
  Vec normal;        // upper unit normal at the contact
  double height = 0.0;
  double jacobian_det = 1.0;
  double tangential_gradient = 0.0;
  int node = -1;     // surface grid node of the contact
  bool flagged = false;  // contact on the rim of the profile projection
};

struct ContactSummary {
  double delta = 0.0;
  double r = 0.0;
  double C2 = 0.0, C3 = 0.0;
  double eps = 0.0;
  int num_centers = 0;
  int num_contacts = 0;
  int num_flagged = 0;
  double covered_area = 0.0;   // |G|, grid measure of contact projections
  double sampled_area = 0.0;   // grid measure of the center disk
  double ball_area = 0.0;      // grid measure of B_{1/3}
  double deficit_sampled = 0.0;  // sampled_area - covered_area
  double deficit_ball = 0.0;     // ball_area - covered_area
  double max_height = 0.0;
  double max_gradient = 0.0;
  double max_det = 0.0;
  double C1_measured = 0.0;
  std::vector<int> covered_nodes;  // G as surface node indices
};

struct ContactOptions {
  double C2 = 0.2;
  double C3 = 0.0;          // 0 -> 1.05 * C2 * max horizontal extent of K
  double eps0_proxy = 0.0;  // 0 -> delta^{3/2}
  double profile_safety = 0.9;
  double det_tolerance = 0.0;  // 0 -> 1e-6 + 10 h; PSD integrity slack
};

/// I + r D_T^2 Phi(nu) II_S at a contact, computed on the tangent plane in
/// an orthonormal basis, returned as its determinant. Throws when the
/// symmetrized operator has an eigenvalue below -tolerance (inconsistent
/// contact).
double contact_jacobian(const Integrand& phi, const DiscreteGraph& surface,
                        int i, int j, double r, double psd_tolerance = 1e-6);

/// Slide copies of rK (r = C2 sqrt(delta)) up from below against the
/// surface, one per grid node in the disk of radius 1/3 - C3 sqrt(delta),
/// and collect contact records plus the measure-estimate summary.
std::pair<std::vector<ContactRecord>, ContactSummary> run_contact_experiment(
    const Integrand& phi, const DiscreteGraph& surface, double delta,
    const ContactOptions& opts = {});

void write_contact_csv(const std::vector<ContactRecord>& records,
                       const std::string& path);

}  // namespace amg
