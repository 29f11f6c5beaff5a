#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "amg/elliptic.hpp"
#include "amg/pde.hpp"
#include "amg/verify.hpp"

using namespace amg;

TEST_CASE("pucci minimal operator point values") {
  const PucciParams half{0.5};
  CHECK(pucci_minus(half, Mat::Zero(3, 3)) == 0.0);
  CHECK(pucci_minus(half, Mat::Identity(2, 2)) == doctest::Approx(1.0));
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 2.0;
  A(1, 1) = -1.0;
  CHECK(pucci_minus(half, A) == doctest::Approx(-1.0));  // 0.5*2 + 2*(-1)
  A(0, 0) = std::nan("");
  CHECK_THROWS(pucci_minus(half, A));
}

TEST_CASE("pucci operator is degenerate elliptic and sign asymmetric") {
  Rng rng(5);
  const PucciParams params{0.4};
  for (int k = 0; k < 200; ++k) {
    Mat A(3, 3);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i <= j; ++i) A(i, j) = A(j, i) = rng.normal();
    const Mat B = A + rng.random_spd(3);  // A <= B in the matrix order
    CHECK(pucci_minus(params, A) <= pucci_minus(params, B) + 1e-12);
    CHECK(pucci_minus(params, A) + pucci_minus(params, Mat(-A)) <= 1e-12);
  }
}

TEST_CASE("barrier point values") {
  const BarrierSpec spec(2.0, 0.1, 2);
  Vec x(2);
  x << 1.0 / 3.0, 0.0;
  CHECK(spec.value(x) == doctest::Approx(9.0 - 2.25).epsilon(1e-14));
  x << 0.6, 0.8;  // |x| = 1
  CHECK(spec.value(x) == doctest::Approx(1.0 - 2.25).epsilon(1e-13));
  // constant branch inside B_delta
  const double plateau = std::pow(0.1, -2.0) - 2.25;
  x << 0.05, 0.0;
  CHECK(spec.value(x) == doctest::Approx(plateau).epsilon(1e-14));
  x << 0.0, 0.0;
  CHECK(spec.value(x) == doctest::Approx(plateau).epsilon(1e-14));
  for (double M : {1.0, 3.0, 7.0}) {
    const BarrierSpec s(M, 0.1, 2);
    CHECK(s.radial_value(1.0) == doctest::Approx(1.0 - std::pow(1.5, M)));
    CHECK(s.radial_value(1.0) < 0.0);
  }
  CHECK_THROWS(BarrierSpec(0.5, 0.1, 2));   // M >= 1
  CHECK_THROWS(BarrierSpec(2.0, 0.4, 2));   // delta < 1/3
}

TEST_CASE("barrier hessian matches finite differences away from the kink") {
  const BarrierSpec spec(4.0, 0.1, 2);
  Rng rng(9);
  const double eta = 1e-6;
  for (int k = 0; k < 30; ++k) {
    const Vec x = rng.unit_vector(2) * rng.uniform(0.25, 0.9);
    const Mat H = spec.hessian(x);
    for (int m = 0; m < 2; ++m) {
      Vec xp = x, xm = x;
      xp[m] += eta;
      xm[m] -= eta;
      for (int l = 0; l < 2; ++l) {
        const double fd =
            (spec.value(xp) - 2.0 * spec.value(x) + spec.value(xm)) /
            (eta * eta);
        if (l == m)
          CHECK(std::abs(fd - H(m, m)) <
                1e-3 * std::max(1.0, std::abs(H(m, m))));
      }
    }
  }
}

TEST_CASE("barrier exponent selection") {
  // n = 2, lambda = 0.5: positivity needs M + 1 > lambda^-2 (n-1) = 4
  const BarrierSpec spec = choose_barrier_exponent(PucciParams{0.5}, 2, 0.1);
  CHECK(spec.exponent() == doctest::Approx(4.0));

  // n = 1: no tangential eigenvalues, M = 1 suffices
  for (double lam : {0.2, 0.5, 0.9}) {
    const BarrierSpec s1 = choose_barrier_exponent(PucciParams{lam}, 1, 0.1);
    CHECK(s1.exponent() == doctest::Approx(1.0));
    CHECK(s1.radial_value(1.0 / 3.0) > 1.0);
  }

  // self-check sweep: the returned spec is a strict Pucci subsolution on
  // 1000 radii in (delta, 1]
  for (double lam : {0.3, 0.5, 0.8}) {
    const PucciParams params{lam};
    const BarrierSpec s = choose_barrier_exponent(params, 2, 0.1);
    for (int k = 1; k <= 1000; ++k) {
      const double rho = 0.1 + 0.9 * k / 1000.0;
      const auto [rad, tan] = s.radial_hessian_eigs(rho);
      Mat D2 = Mat::Zero(2, 2);
      D2(0, 0) = rad;
      D2(1, 1) = tan;
      CHECK(pucci_minus(params, D2) > 0.0);
    }
    CHECK(s.radial_value(1.0 / 3.0) > 1.0);
    CHECK(s.exponent() + 1.0 > 1.0 / (lam * lam));  // analytic threshold
  }
}

namespace {

DiscreteGraph constant_graph(double value, int res) {
  return make_rectangle(2, Eigen::Vector2d(-1, -1), 2.0 / (res - 1), res, res,
                        [value](const Eigen::Vector2d&) { return value; });
}

}  // namespace

TEST_CASE("slide until contact") {
  const DiscreteGraph surface = constant_graph(0.0, 33);
  DiscreteGraph obstacle = make_rectangle(
      2, Eigen::Vector2d(-0.5, -0.5), 2.0 / 32, 17, 17,
      [](const Eigen::Vector2d&) { return -1.0; });
  const SlideResult r = slide_until_contact(surface, obstacle);
  CHECK(r.shift == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.contact.size() == size_t(17 * 17));

  // paraboloid over a plane touches at the vertex only
  DiscreteGraph parab = make_rectangle(
      2, Eigen::Vector2d(-1, -1), 2.0 / 32, 33, 33,
      [](const Eigen::Vector2d& p) { return p.squaredNorm(); });
  DiscreteGraph plane = make_rectangle(
      2, Eigen::Vector2d(-0.5, -0.5), 2.0 / 32, 17, 17,
      [](const Eigen::Vector2d&) { return 0.0; });
  const SlideResult r2 = slide_until_contact(parab, plane);
  CHECK(r2.shift == doctest::Approx(0.0));
  REQUIRE(r2.contact.size() == 1);
  const int node = r2.contact.front();
  CHECK((parab.pos(node % parab.nx, node / parab.nx)).norm() < 1e-14);

  // translation equivariance in the surface values
  DiscreteGraph shifted = parab;
  for (auto& v : shifted.w) v += 3.25;
  const SlideResult r3 = slide_until_contact(shifted, plane);
  CHECK(r3.shift == doctest::Approx(r2.shift + 3.25).epsilon(1e-15));
  CHECK(r3.contact == r2.contact);
}

TEST_CASE("scaled barrier is a discrete subsolution away from the plateau") {
  // eps small enough that eps * |grad phi0| < 1 outside B_delta
  const BarrierSpec spec = choose_barrier_exponent(PucciParams{0.5}, 2, 0.1);
  const double grad_max = std::abs(spec.radial_gradient(0.2));
  const double eps = 0.5 / grad_max;
  REQUIRE(eps * grad_max < 1.0);

  const double h = 1.0 / 128;
  DiscreteGraph g = make_domain(
      2, Eigen::Vector2d(-1, -1), h, 257, 257,
      [](const Eigen::Vector2d& p) {
        const double r = p.norm();
        return r > 0.2 && r < 0.9;
      },
      [&](const Eigen::Vector2d& p) { return eps * spec.value(Vec(p)); },
      "annulus");
  for (const Integrand& phi :
       {Integrand::isotropic(3), Integrand::perturbed_isotropic(3, 0.02)}) {
    const std::vector<double> res = residual(phi, g);
    int tested = 0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        if (!g.interior(i, j)) continue;
        CHECK(res[g.idx(i, j)] > 0.0);
        ++tested;
      }
    CHECK(tested > 1000);
  }
}
