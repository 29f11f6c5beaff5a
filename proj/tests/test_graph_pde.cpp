#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "amg/pde.hpp"
#include "amg/verify.hpp"

using namespace amg;

namespace {

DiscreteGraph square(int res, double extent,
                     const std::function<double(const Eigen::Vector2d&)>& f) {
  const double h = 2.0 * extent / (res - 1);
  return make_rectangle(2, Eigen::Vector2d(-extent, -extent), h, res, res, f);
}

double scherk(const Eigen::Vector2d& p) {
  return std::log(std::cos(p.x())) - std::log(std::cos(p.y()));
}

double max_interior_residual(const Integrand& phi, const DiscreteGraph& g) {
  const auto r = residual(phi, g);
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.interior(i, j)) worst = std::max(worst, std::abs(r[g.idx(i, j)]));
  return worst;
}

}  // namespace

TEST_CASE("residual point values") {
  Rng rng(3);
  const Integrand iso = Integrand::isotropic(3);
  const Integrand ell = Integrand::ellipsoidal(rng.random_spd(3));

  // affine graphs are exact solutions
  const auto affine = [](const Eigen::Vector2d& p) {
    return 3.0 + 2.0 * p.x() - p.y();
  };
  for (const Integrand& phi : {iso, ell})
    CHECK(max_interior_residual(phi, square(33, 1.0, affine)) < 1e-12);

  // paraboloid at the origin: grad = 0, D^2 w = I, trace = n
  const DiscreteGraph parab = square(33, 1.0, [](const Eigen::Vector2d& p) {
    return 0.5 * p.squaredNorm();
  });
  const auto r = residual(iso, parab);
  CHECK(r[parab.idx(16, 16)] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::isnan(r[parab.idx(0, 0)]));  // boundary nodes carry no residual

  // Scherk's surface solves the isotropic equation; the discrete residual is
  // pure truncation error and drops by ~4x when h halves
  const DiscreteGraph s32 = square(65, 1.0, scherk);       // h = 1/32
  const DiscreteGraph s64 = square(129, 1.0, scherk);      // h = 1/64
  const double r32 = max_interior_residual(iso, s32);
  const double r64 = max_interior_residual(iso, s64);
  CHECK(r32 / r64 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("affine boundary data reproduces the affine solution") {
  Rng rng(7);
  const std::vector<Integrand> phis = {
      Integrand::isotropic(3), Integrand::ellipsoidal(rng.random_spd(3)),
      Integrand::perturbed_isotropic(3, 0.02)};
  const auto affine = [](const Eigen::Vector2d& p) {
    return 0.4 * p.x() - 0.7 * p.y() + 0.2;
  };
  for (const Integrand& phi : phis) {
    auto [g, rep] = solve_dirichlet(phi, square(49, 1.0, affine));
    REQUIRE(rep.converged);
    CHECK(rep.max_principle_ok);
    double dev = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        dev = std::max(dev, std::abs(g.w[g.idx(i, j)] - affine(g.pos(i, j))));
    CHECK(dev <= 1e-9);
  }
}

TEST_CASE("scherk boundary data converges at second order") {
  const Integrand iso = Integrand::isotropic(3);
  std::vector<double> errs;
  for (int res : {21, 41, 81}) {
    auto [g, rep] = solve_dirichlet(iso, square(res, 0.625, scherk));
    REQUIRE(rep.converged);
    double err = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (g.interior(i, j))
          err = std::max(err, std::abs(g.w[g.idx(i, j)] - scherk(g.pos(i, j))));
    errs.push_back(err);
  }
  const double rate1 = std::log2(errs[0] / errs[1]);
  const double rate2 = std::log2(errs[1] / errs[2]);
  CHECK(rate1 == doctest::Approx(2.0).epsilon(0.15));
  CHECK(rate2 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("solver residual and report tolerances are consistent") {
  Rng rng(11);
  const Integrand phi = Integrand::perturbed_isotropic(3, 0.02);
  auto [g, rep] = solve_dirichlet(phi, square(49, 1.0, [&](const Eigen::Vector2d& p) {
    return 0.3 * std::sin(2.0 * p.x()) + 0.2 * p.y() * p.y();
  }));
  REQUIRE(rep.converged);
  CHECK(max_interior_residual(phi, g) <= rep.tol_res);
  CHECK(rep.final_residual <= rep.tol_res);
  // ellipticity guard at the attained gradient bound
  auto [lo, hi] = phi.ellipticity_bounds(std::max(rep.gradient_bound, 0.1));
  CHECK(lo > 0.0);
  CHECK(hi < 1.0 / lo + 1e-12);
}

TEST_CASE("comparison principle for ordered boundary data") {
  Rng rng(13);
  const Integrand iso = Integrand::isotropic(3);
  for (int trial = 0; trial < 20; ++trial) {
    double c[4];
    for (double& v : c) v = rng.uniform(-0.5, 0.5);
    auto lower = [&](const Eigen::Vector2d& p) {
      return c[0] * p.x() + c[1] * p.y() + c[2] * std::sin(3.0 * p.x()) * 0.2;
    };
    const double bump = rng.uniform(0.05, 0.5);
    auto upper = [&](const Eigen::Vector2d& p) {
      return lower(p) + bump * (1.1 + std::cos(2.0 * p.y()) * 0.1);
    };
    auto [glo, rlo] = solve_dirichlet(iso, square(33, 1.0, lower));
    auto [ghi, rhi] = solve_dirichlet(iso, square(33, 1.0, upper));
    REQUIRE(rlo.converged);
    REQUIRE(rhi.converged);
    CHECK(rlo.max_principle_ok);
    const double slack = (rlo.tol_res + rhi.tol_res) * glo.h * glo.h;
    for (int k = 0; k < glo.size(); ++k) CHECK(ghi.w[k] >= glo.w[k] - slack);
  }
}

TEST_CASE("vertical shift equivariance") {
  const Integrand iso = Integrand::isotropic(3);
  auto base = [](const Eigen::Vector2d& p) {
    return 0.3 * std::sin(2.0 * p.x()) - 0.2 * p.y();
  };
  auto shifted = [&](const Eigen::Vector2d& p) { return base(p) + 5.0; };
  auto [g0, r0] = solve_dirichlet(iso, square(33, 1.0, base));
  auto [g1, r1] = solve_dirichlet(iso, square(33, 1.0, shifted));
  REQUIRE(r0.converged);
  REQUIRE(r1.converged);
  for (int k = 0; k < g0.size(); ++k)
    CHECK(g1.w[k] - g0.w[k] == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("rescale") {
  // affine graphs keep their slope under Lipschitz rescaling
  const DiscreteGraph aff = square(33, 1.0, [](const Eigen::Vector2d& p) {
    return 0.7 * p.x() - 0.3 * p.y();
  });
  const DiscreteGraph aff2 = rescale(aff, 2.0);
  CHECK(aff2.h == doctest::Approx(aff.h / 2.0));
  for (int j = 0; j < aff2.ny; ++j)
    for (int i = 0; i < aff2.nx; ++i) {
      const Eigen::Vector2d p = aff2.pos(i, j);
      CHECK(aff2.w[aff2.idx(i, j)] ==
            doctest::Approx(0.7 * p.x() - 0.3 * p.y()).epsilon(1e-12));
    }

  // quadratic scaling law: u_k = k |x|^2 / 2 for u = |x|^2 / 2
  const DiscreteGraph parab = square(65, 1.0, [](const Eigen::Vector2d& p) {
    return 0.5 * p.squaredNorm();
  });
  const DiscreteGraph pk = rescale(parab, 2.0);
  for (int j = 0; j < pk.ny; ++j)
    for (int i = 0; i < pk.nx; ++i) {
      const Eigen::Vector2d p = pk.pos(i, j);
      CHECK(pk.w[pk.idx(i, j)] ==
            doctest::Approx(p.squaredNorm()).epsilon(1e-10));
    }

  // round trip is identity up to interpolation error O(h^2)
  const DiscreteGraph smooth = square(65, 1.0, [](const Eigen::Vector2d& p) {
    return std::sin(2.0 * p.x()) * std::cos(p.y());
  });
  const DiscreteGraph back = rescale(rescale(smooth, 2.0), 0.5);
  double dev = 0.0;
  for (int j = 0; j < back.ny; ++j)
    for (int i = 0; i < back.nx; ++i)
      dev = std::max(dev, std::abs(back.w[back.idx(i, j)] -
                                   smooth.interpolate(back.pos(i, j))));
  CHECK(dev < 10.0 * smooth.h * smooth.h);
}

TEST_CASE("grid refinement difference is second order") {
  const Integrand iso = Integrand::isotropic(3);
  auto data = [](const Eigen::Vector2d& p) {
    return 0.4 * std::sin(2.0 * p.x()) + 0.3 * std::cos(1.5 * p.y());
  };
  std::vector<DiscreteGraph> sols;
  for (int res : {17, 33, 65}) {
    auto [g, rep] = solve_dirichlet(iso, square(res, 1.0, data));
    REQUIRE(rep.converged);
    sols.push_back(g);
  }
  auto diff = [](const DiscreteGraph& coarse, const DiscreteGraph& fine) {
    double d = 0.0;
    for (int j = 0; j < coarse.ny; ++j)
      for (int i = 0; i < coarse.nx; ++i)
        d = std::max(d, std::abs(coarse.w[coarse.idx(i, j)] -
                                 fine.w[fine.idx(2 * i, 2 * j)]));
    return d;
  };
  const double rate = std::log2(diff(sols[0], sols[1]) / diff(sols[1], sols[2]));
  CHECK(rate >= 1.8);
}

TEST_CASE("grid formats round trip") {
  const DiscreteGraph g = square(21, 1.0, [](const Eigen::Vector2d& p) {
    return std::sin(p.x()) + 0.25 * p.y();
  });
  const std::string path = "roundtrip_test.wgrf";
  write_wgrf(g, path);
  const DiscreteGraph back = read_wgrf(path);
  CHECK(back.n == g.n);
  CHECK(back.nx == g.nx);
  CHECK(back.ny == g.ny);
  CHECK(back.h == g.h);
  CHECK(back.origin == g.origin);
  CHECK(back.w == g.w);          // bytewise-identical doubles
  CHECK(back.mask == g.mask);
  std::remove(path.c_str());

  write_csv(g, "roundtrip_test.csv");
  std::FILE* f = std::fopen("roundtrip_test.csv", "r");
  REQUIRE(f);
  std::fclose(f);
  std::remove("roundtrip_test.csv");

  CHECK_NOTHROW(validate_mask(g));
  DiscreteGraph broken = g;
  broken.mask[broken.idx(10, 10)] = NodeKind::Outside;  // inside the stencil
  CHECK_THROWS(validate_mask(broken));
}
