#pragma once

#include "amg/grid.hpp"
#include "amg/wulff.hpp"

namespace amg {

/// Cylinder B_r(center) x (s, t) with a coordinate axis. For the excision
/// diagnostic the axis is e1 and the cross-section ball lives in the
/// (x2, ..., x_{n+1}) coordinates.
struct Cylinder {
  int axis = 0;
  Eigen::Vector2d cross_center = Eigen::Vector2d::Zero();
  double cross_radius = 1.0;
  double axial_lo = 0.0, axial_hi = 1.0;

  Cylinder() = default;
  Cylinder(int ax, const Eigen::Vector2d& c, double r, double lo, double hi)
      : axis(ax), cross_center(c), cross_radius(r), axial_lo(lo), axial_hi(hi) {
    if (cross_radius <= 0.0)
      throw std::invalid_argument("Cylinder: radius <= 0");
    if (!(axial_lo < axial_hi))
      throw std::invalid_argument("Cylinder: empty axial interval");
  }
};

using RegionPredicate = std::function<bool(const Eigen::Vector2d&)>;

/// Anisotropic area of the graph over a region by midpoint quadrature in
/// graph coordinates: sum over cells of Phi(-grad w, 1) h^n. The region
/// predicate is evaluated at cell centers; empty region gives 0.
double anisotropic_area(const Integrand& phi, const DiscreteGraph& g,
                        const RegionPredicate& region = nullptr);

/// Discrete divergence of the horizontal calibration field
/// x -> (first n components of grad Phi(-grad w, 1)); equals -residual up
/// to O(h^2). Defined on nodes whose two-ring stencil is in-domain, NaN
/// elsewhere.
std::vector<double> calibration_divergence(const Integrand& phi,
                                           const DiscreteGraph& g);

/// anisotropic_area(v) - anisotropic_area(g); v must share the grid and the
/// Dirichlet values of g exactly.
double competitor_gap(const Integrand& phi, const DiscreteGraph& g,
                      const DiscreteGraph& v);

struct ExcisionResult {
  double sheet_area = 0.0;        // graph area inside Q
  double face_area = 0.0;         // |B| Phi(-e1)
  double lateral_area = 0.0;      // thin sides between the graph traces
  double replacement_area = 0.0;  // face + lateral
  double gap = 0.0;               // sheet - replacement
  double budget = 0.0;            // quadrature error estimate (Richardson)
};

/// Cylinder-excision energy comparison: anisotropic area of the graph
/// inside Q versus the area of the competitor surgery (one flat face plus
/// the included portion of the thin lateral sides). n == 2 only, axis e1.
ExcisionResult excision_gap(const Integrand& phi, const DiscreteGraph& g,
                            const Cylinder& q);

}  // namespace amg
