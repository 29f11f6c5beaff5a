#pragma once

#include "amg/calibration.hpp"
#include "amg/grid.hpp"
#include "amg/pde.hpp"
#include "amg/wulff.hpp"

namespace amg {

enum class BernsteinCase { HalfSpace, Slab, Wedge };  // (A), (B), (C)

struct FarData {
  bool perturbed = false;
  double slope_x1 = 0.0;  // the A in L + A x1
  double amplitude = 0.0; // perturbation amplitude (perturbed only)
};

/// Truncated rendering of the three boundary geometries: Omega is placed in
/// {x1 > 0} with {x1 = 0} tangent at the origin and L(0) = 0.
struct HalfSpaceSetup {
  BernsteinCase kase = BernsteinCase::HalfSpace;
  double R = 4.0;            // truncation radius
  double slab_width = 3.0;   // case (B)
  double wedge_angle = 1.5707963267948966;  // case (C), full opening
  Eigen::Vector2d L_slope = Eigen::Vector2d::Zero();  // L(x) = L_slope . x
  FarData far;
  double window_R0 = 4.0;    // fixed affine-fit window parameter
};

struct SlopeEnvelope {
  double A_minus = 0.0;
  double A_plus = 0.0;
  Eigen::Vector2d arg_minus = Eigen::Vector2d::Zero();
  Eigen::Vector2d arg_plus = Eigen::Vector2d::Zero();
};

/// Discrete extremal slopes: extremes of (u - L)/x1 over in-domain nodes
/// with x1 > 0, optionally restricted by a region predicate. Interior nodes
/// with x1 <= 0 are a setup error.
SlopeEnvelope extremal_slopes(const DiscreteGraph& g, const ScalarField& L,
                              const RegionPredicate& region = nullptr);

enum class Side { Minus, Plus };

struct HopfResult {
  bool improved = false;
  double eps = 0.0;
  double delta = 0.0;
  Eigen::Vector2d blocking_point = Eigen::Vector2d::Zero();
};

/// Hopf-type slope improvement: slides the barrier
///   L + A x1 + eps * (phi0(|x|)+ / phi0(delta)) * x1
/// (side Minus; mirrored for Plus) under the graph over the barrier support
/// and certifies the largest eps on a dyadic ladder for which the graph
/// stays above it.
HopfResult hopf_slope_improvement(const Integrand& phi,
                                  const DiscreteGraph& g, const ScalarField& L,
                                  double A, Side side, double delta = 0.1);

struct ExperimentReport {
  BernsteinCase kase = BernsteinCase::HalfSpace;
  double R = 0.0;
  double h = 0.0;
  SolveReport solve;
  Eigen::Vector3d affine_fit = Eigen::Vector3d::Zero();  // a0 + a1 x1 + a2 x2
  double deviation = 0.0;       // max |u - fit| over the window
  SlopeEnvelope envelope;       // over Omega \cap {|x| <= R/2}
  SlopeEnvelope envelope_full;  // over all of Omega
  bool valid = false;           // false iff the solve did not converge
};

/// Solve the truncated Dirichlet problem for one setup and report the
/// affine-fit deviation and slope envelopes. `resolution` is the node count
/// across the primary width (R for (A)/(C), the slab width for (B)).
ExperimentReport bernstein_experiment(const Integrand& phi,
                                      const HalfSpaceSetup& setup,
                                      int resolution,
                                      const SolveOptions& opts = {});

/// Steep-sigmoid excision diagnostic: w = height * tanh(x1 / eps) through
/// the unit-ball cylinder Q_h around the origin.
ExcisionResult sigmoid_excision_diagnostic(const Integrand& phi,
                                           double height, double eps,
                                           double cyl_h, int resolution);

}  // namespace amg
