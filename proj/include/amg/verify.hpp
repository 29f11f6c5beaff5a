#pragma once

#include <cstdint>

#include "amg/wulff.hpp"

namespace amg {

/// Deterministic RNG for randomized audits; bit-stable across reruns
/// (avoids the implementation-defined std distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next_u64();
  double uniform();                 // [0, 1)
  double uniform(double a, double b);
  double normal();                  // Box-Muller
  Vec unit_vector(int dim);
  Vec ball_vector(int dim, double radius);
  Mat random_spd(int dim);          // A^T A + I/2, entries ~ N(0,1)

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Numeric checks of the differential-geometric identities of an integrand:
/// homogeneity, the Euler kernel relation D^2 Phi x = 0, the Wulff normal
/// identity (finite-difference normals of the boundary map), the second
/// fundamental form product identity, the calibration inequality, and the
/// graph-integrand derivative relations (finite-difference oracle).
struct WulffIdentityReport {
  double homogeneity_err = 0.0;
  double euler_kernel_err = 0.0;
  double normal_identity_err = 0.0;
  double second_ff_err = 0.0;
  double calibration_slack = 0.0;  // min of Phi(a) - grad Phi(b).a
  double graph_fd_err = 0.0;
  double ellipticity_min = 0.0;
  double ellipticity_max = 0.0;

  bool pass() const {
    return homogeneity_err <= 1e-10 && euler_kernel_err <= 1e-8 &&
           normal_identity_err <= 1e-5 && second_ff_err <= 1e-5 &&
           calibration_slack >= -1e-10 && graph_fd_err <= 1e-6 &&
           ellipticity_min > 0.0;
  }
};

WulffIdentityReport verify_wulff_identities(const Integrand& phi,
                                            std::uint64_t seed,
                                            int lattice_samples = 500,
                                            int random_samples = 100);

}  // namespace amg
