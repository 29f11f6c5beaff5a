#include "amg/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "amg/calibration.hpp"
#include "amg/contact.hpp"
#include "amg/elliptic.hpp"
#include "amg/grid.hpp"
#include "amg/pde.hpp"
#include "amg/rigidity.hpp"
#include "amg/verify.hpp"
#include "amg/wulff.hpp"

namespace amg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- schema ---

void require_object(const json& j, const std::string& path) {
  if (!j.is_object())
    throw ConfigError("config error at " + path + ": expected an object");
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("config error at " + path + "/" + it.key() +
                        ": unknown key (schema rejects unrecognized keys)");
  }
}

const json& require_key(const json& j, const std::string& path,
                        const std::string& key) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError("config error at " + path + ": missing required key '" +
                      key + "'");
  return *it;
}

double get_number(const json& j, const std::string& path, const std::string& key,
                  double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number())
    throw ConfigError("config error at " + path + "/" + key +
                      ": expected a number");
  return it->get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key,
            int fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer())
    throw ConfigError("config error at " + path + "/" + key +
                      ": expected an integer");
  return it->get<int>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key,
              bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean())
    throw ConfigError("config error at " + path + "/" + key +
                      ": expected a boolean");
  return it->get<bool>();
}

std::string get_string(const json& j, const std::string& path,
                       const std::string& key, const std::string& fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string())
    throw ConfigError("config error at " + path + "/" + key +
                      ": expected a string");
  return it->get<std::string>();
}

std::vector<double> get_number_list(const json& j, const std::string& path,
                                    const std::string& key,
                                    std::vector<double> fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_array())
    throw ConfigError("config error at " + path + "/" + key +
                      ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number())
      throw ConfigError("config error at " + path + "/" + key +
                        ": expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

int check_resolution(int res, const std::string& path) {
  if (res < 17)
    throw ConfigError("config error at " + path +
                      ": resolution must be >= 17 nodes per axis");
  return res;
}

Integrand parse_integrand(const json& cfg) {
  const json& j = require_key(cfg, "", "integrand");
  check_keys(j, "/integrand",
             {"family", "dimension", "Q", "amplitude", "flip"});
  const std::string fam = get_string(j, "/integrand", "family", "");
  const int dim = get_int(j, "/integrand", "dimension", 3);
  Integrand phi = Integrand::isotropic(3);
  if (fam == "isotropic") {
    phi = Integrand::isotropic(dim);
  } else if (fam == "ellipsoidal") {
    const json& q = require_key(j, "/integrand", "Q");
    if (!q.is_array())
      throw ConfigError(
          "config error at /integrand/Q: expected a square matrix as nested "
          "arrays");
    const int d = static_cast<int>(q.size());
    Mat Q(d, d);
    for (int r = 0; r < d; ++r) {
      if (!q[r].is_array() || static_cast<int>(q[r].size()) != d)
        throw ConfigError("config error at /integrand/Q: row " +
                          std::to_string(r) + " is not a length-" +
                          std::to_string(d) + " array");
      for (int c = 0; c < d; ++c) {
        if (!q[r][c].is_number())
          throw ConfigError("config error at /integrand/Q: non-numeric entry");
        Q(r, c) = q[r][c].get<double>();
      }
    }
    phi = Integrand::ellipsoidal(Q);
  } else if (fam == "perturbed") {
    const double amp = get_number(j, "/integrand", "amplitude", 0.02);
    phi = Integrand::perturbed_isotropic(dim, amp);
  } else {
    throw ConfigError(
        "config error at /integrand/family: expected one of isotropic | "
        "ellipsoidal | perturbed");
  }
  if (get_bool(j, "/integrand", "flip", false)) phi = phi.flipped();
  return phi;
}

json integrand_echo(const Integrand& phi) {
  json j;
  switch (phi.family()) {
    case Family::Isotropic:
      j["family"] = "isotropic";
      break;
    case Family::Ellipsoidal: {
      j["family"] = "ellipsoidal";
      json rows = json::array();
      for (int r = 0; r < phi.Q().rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < phi.Q().cols(); ++c) row.push_back(phi.Q()(r, c));
        rows.push_back(row);
      }
      j["Q"] = rows;
      break;
    }
    case Family::PerturbedIsotropic:
      j["family"] = "perturbed";
      j["amplitude"] = phi.amplitude();
      break;
  }
  j["dimension"] = phi.ambient_dim();
  j["flip"] = phi.is_flipped();
  return j;
}

// --------------------------------------------------------------- outputs ---

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << content;
    if (!f.good()) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

struct Checks {
  json list = json::array();
  bool all_pass = true;
  std::string first_failure;

  void add(const std::string& name, bool pass, double value, double threshold,
           const std::string& relation) {
    json c;
    c["name"] = name;
    c["pass"] = pass;
    c["value"] = value;
    c["threshold"] = threshold;
    c["relation"] = relation;
    list.push_back(c);
    if (!pass && all_pass) {
      all_pass = false;
      first_failure = name;
    }
  }
};

// writes a (radius, value...) style table atomically
void write_csv_rows(const fs::path& path, const std::string& header,
                    const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  os << header << "\n";
  char buf[64];
  for (const auto& row : rows) {
    for (size_t k = 0; k < row.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[k]);
      os << (k ? "," : "") << buf;
    }
    os << "\n";
  }
  atomic_write(path, os.str());
}

// ------------------------------------------------------------- pipelines ---

json run_verify(const Integrand& phi, const json& cfg, const RunOptions& opts,
                Checks& checks) {
  json section = cfg.value("verify", json::object());
  check_keys(section, "/verify", {"lattice_samples", "random_samples"});
  const int lat = get_int(section, "/verify", "lattice_samples", 500);
  const int rnd = get_int(section, "/verify", "random_samples", 100);

  const WulffIdentityReport rep =
      verify_wulff_identities(phi, opts.seed, lat, rnd);
  checks.add("wulff.one_homogeneity", rep.homogeneity_err <= 1e-10,
             rep.homogeneity_err, 1e-10, "<=");
  checks.add("wulff.euler_kernel", rep.euler_kernel_err <= 1e-8,
             rep.euler_kernel_err, 1e-8, "<=");
  checks.add("wulff.normal_identity", rep.normal_identity_err <= 1e-5,
             rep.normal_identity_err, 1e-5, "<=");
  checks.add("wulff.second_fundamental_form", rep.second_ff_err <= 1e-5,
             rep.second_ff_err, 1e-5, "<=");
  checks.add("wulff.calibration_inequality", rep.calibration_slack >= -1e-10,
             rep.calibration_slack, -1e-10, ">=");
  checks.add("wulff.graph_derivatives", rep.graph_fd_err <= 1e-6,
             rep.graph_fd_err, 1e-6, "<=");
  checks.add("wulff.uniform_ellipticity", rep.ellipticity_min > 0.0,
             rep.ellipticity_min, 0.0, ">");

  json out;
  out["homogeneity_err"] = rep.homogeneity_err;
  out["euler_kernel_err"] = rep.euler_kernel_err;
  out["normal_identity_err"] = rep.normal_identity_err;
  out["second_ff_err"] = rep.second_ff_err;
  out["calibration_slack"] = rep.calibration_slack;
  out["graph_fd_err"] = rep.graph_fd_err;
  out["ellipticity_min"] = rep.ellipticity_min;
  out["ellipticity_max"] = rep.ellipticity_max;
  return out;
}

json solve_report_json(const SolveReport& r) {
  json j;
  j["iterations"] = r.iterations;
  j["final_residual"] = r.final_residual;
  j["final_step"] = r.final_step;
  j["gradient_bound"] = r.gradient_bound;
  j["converged"] = r.converged;
  j["gradient_exploded"] = r.gradient_exploded;
  j["max_principle_ok"] = r.max_principle_ok;
  j["tol_res"] = r.tol_res;
  j["tol_step"] = r.tol_step;
  return j;
}

// max |div X + residual| over nodes where both are defined
double divergence_mismatch(const Integrand& phi, const DiscreteGraph& g) {
  const std::vector<double> res = residual(phi, g);
  const std::vector<double> div = calibration_divergence(phi, g);
  double worst = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    if (std::isnan(res[k]) || std::isnan(div[k])) continue;
    worst = std::max(worst, std::abs(div[k] + res[k]));
  }
  return worst;
}

json run_solve(const Integrand& phi, const json& cfg, const RunOptions& opts,
               Checks& checks) {
  if (phi.base_dim() != 2)
    throw ConfigError(
        "config error at /integrand/dimension: solve pipelines are built for "
        "base dimension 2 (ambient 3)");
  json section = cfg.value("solve", json::object());
  check_keys(section, "/solve",
             {"problem", "resolution", "resolutions", "extent", "slope",
              "constant", "amplitude", "tolerance", "write_solution"});
  const std::string problem = get_string(section, "/solve", "problem", "affine");
  json out;
  out["problem"] = problem;

  auto write_solution = [&](const DiscreteGraph& g) {
    if (!get_bool(section, "/solve", "write_solution", true)) return;
    write_wgrf(g, (fs::path(opts.out_dir) / "solution.wgrf").string());
    write_csv(g, (fs::path(opts.out_dir) / "solution.csv").string());
  };

  if (problem == "affine") {
    const int res = check_resolution(
        get_int(section, "/solve", "resolution", 65), "/solve/resolution");
    const double extent = get_number(section, "/solve", "extent", 1.0);
    const std::vector<double> slope =
        get_number_list(section, "/solve", "slope", {0.3, -0.2});
    if (slope.size() != 2)
      throw ConfigError("config error at /solve/slope: expected 2 numbers");
    const double c0 = get_number(section, "/solve", "constant", 0.1);
    const double tol = get_number(section, "/solve", "tolerance", 1e-9);
    auto data = [&](const Eigen::Vector2d& p) {
      return slope[0] * p.x() + slope[1] * p.y() + c0;
    };
    const double h = 2.0 * extent / (res - 1);
    DiscreteGraph dom = make_rectangle(2, Eigen::Vector2d(-extent, -extent), h,
                                       res, res, data);
    auto [g, rep] = solve_dirichlet(phi, dom);
    double dev = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        dev = std::max(dev, std::abs(g.w[g.idx(i, j)] - data(g.pos(i, j))));
    const double mismatch = divergence_mismatch(phi, g);
    out["solve"] = solve_report_json(rep);
    out["deviation"] = dev;
    out["divergence_mismatch"] = mismatch;
    checks.add("solve.converged", rep.converged, rep.final_residual,
               rep.tol_res, "<=");
    checks.add("solve.affine_exactness", dev <= tol, dev, tol, "<=");
    checks.add("solve.max_principle", rep.max_principle_ok, 0.0, 0.0, "==");
    checks.add("solve.calibration_divergence",
               mismatch <= 10.0 * h * h * std::max(1.0, g.value_range()),
               mismatch, 10.0 * h * h * std::max(1.0, g.value_range()), "<=");
    write_solution(g);
  } else if (problem == "scherk") {
    if (phi.family() != Family::Isotropic || phi.amplitude() != 0.0)
      throw ConfigError(
          "config error at /solve/problem: the scherk oracle requires the "
          "isotropic integrand");
    const std::vector<double> resolutions = get_number_list(
        section, "/solve", "resolutions", {41.0, 81.0, 161.0});
    auto oracle = [](const Eigen::Vector2d& p) {
      return std::log(std::cos(p.x())) - std::log(std::cos(p.y()));
    };
    const double extent = get_number(section, "/solve", "extent", 0.625);
    std::vector<double> errs, hs;
    DiscreteGraph finest;
    for (double rd : resolutions) {
      const int res = check_resolution(static_cast<int>(rd), "/solve/resolutions");
      const double h = 2.0 * extent / (res - 1);
      DiscreteGraph dom = make_rectangle(
          2, Eigen::Vector2d(-extent, -extent), h, res, res, oracle);
      auto [g, rep] = solve_dirichlet(phi, dom);
      checks.add("solve.converged_res" + std::to_string(res), rep.converged,
                 rep.final_residual, rep.tol_res, "<=");
      double err = 0.0;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
          if (g.interior(i, j))
            err = std::max(err,
                           std::abs(g.w[g.idx(i, j)] - oracle(g.pos(i, j))));
      errs.push_back(err);
      hs.push_back(h);
      finest = g;
    }
    std::vector<double> rates;
    for (size_t k = 0; k + 1 < errs.size(); ++k)
      rates.push_back(std::log(errs[k] / errs[k + 1]) /
                      std::log(hs[k] / hs[k + 1]));
    double mean_rate = 0.0;
    for (double r : rates) mean_rate += r;
    if (!rates.empty()) mean_rate /= static_cast<double>(rates.size());
    out["errors"] = errs;
    out["spacings"] = hs;
    out["rates"] = rates;
    out["mean_rate"] = mean_rate;
    checks.add("solve.scherk_rate",
               std::abs(mean_rate - 2.0) <= 0.2, mean_rate, 2.0, "~");
    std::vector<std::vector<double>> rows;
    for (size_t k = 0; k < errs.size(); ++k)
      rows.push_back({hs[k], errs[k]});
    write_csv_rows(fs::path(opts.out_dir) / "convergence.csv", "h,error", rows);
    write_solution(finest);
  } else if (problem == "random") {
    const int res = check_resolution(
        get_int(section, "/solve", "resolution", 65), "/solve/resolution");
    const double extent = get_number(section, "/solve", "extent", 1.0);
    const double amp = get_number(section, "/solve", "amplitude", 0.3);
    Rng rng(opts.seed);
    double c[6];
    for (double& v : c) v = rng.uniform(-1.0, 1.0);
    const double pi = std::numbers::pi;
    auto data = [&](const Eigen::Vector2d& p) {
      const double x = p.x() / extent, y = p.y() / extent;
      return amp * (c[0] * std::sin(pi * x) + c[1] * std::cos(pi * y) +
                    c[2] * std::sin(2.0 * pi * x) * std::cos(pi * y) +
                    c[3] * x * y + c[4] * x + c[5] * y);
    };
    const double h = 2.0 * extent / (res - 1);
    DiscreteGraph dom = make_rectangle(2, Eigen::Vector2d(-extent, -extent), h,
                                       res, res, data);
    auto [g, rep] = solve_dirichlet(phi, dom);
    const double mismatch = divergence_mismatch(phi, g);
    out["solve"] = solve_report_json(rep);
    out["divergence_mismatch"] = mismatch;
    out["value_range"] = g.value_range();
    checks.add("solve.converged", rep.converged, rep.final_residual,
               rep.tol_res, "<=");
    checks.add("solve.max_principle", rep.max_principle_ok, 0.0, 0.0, "==");
    checks.add("solve.calibration_divergence",
               mismatch <= 10.0 * h * h * std::max(1.0, g.value_range()),
               mismatch, 10.0 * h * h * std::max(1.0, g.value_range()), "<=");
    write_solution(g);
  } else {
    throw ConfigError(
        "config error at /solve/problem: expected affine | scherk | random");
  }
  return out;
}

json run_barrier(const json& cfg, const RunOptions& opts, Checks& checks) {
  json section = cfg.value("barrier", json::object());
  check_keys(section, "/barrier",
             {"n", "delta", "lambdas", "radial_samples", "csv"});
  const int n = get_int(section, "/barrier", "n", 2);
  const double delta = get_number(section, "/barrier", "delta", 0.1);
  const std::vector<double> lambdas =
      get_number_list(section, "/barrier", "lambdas", {0.3, 0.5, 0.8});
  const int radii = get_int(section, "/barrier", "radial_samples", 1000);

  json out;
  json per_lambda = json::array();
  bool wrote_csv = false;
  for (double lam : lambdas) {
    const PucciParams params{lam};
    const BarrierSpec spec = choose_barrier_exponent(params, n, delta, radii);
    const double M = spec.exponent();

    // analytic threshold: smallest integer exponent with M+1 > lambda^-2 (n-1)
    int m_analytic = 1;
    while (m_analytic + 1.0 <= (n - 1) / (lam * lam)) ++m_analytic;

    // independent re-sweep of the Pucci operator on the radial eigenvalues
    double sweep_min = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> rows;
    for (int k = 1; k <= radii; ++k) {
      const double rho = delta + (1.0 - delta) * k / radii;
      const auto [radial, tangential] = spec.radial_hessian_eigs(rho);
      Mat D2 = Mat::Zero(n, n);
      D2(0, 0) = radial;
      for (int d = 1; d < n; ++d) D2(d, d) = tangential;
      const double p = pucci_minus(params, D2);
      sweep_min = std::min(sweep_min, p);
      rows.push_back({rho, spec.radial_value(rho), p});
    }
    const double wall_value = spec.radial_value(1.0 / 3.0);

    json lj;
    lj["lambda"] = lam;
    lj["M"] = M;
    lj["M_analytic_threshold"] = m_analytic;
    lj["pucci_sweep_min"] = sweep_min;
    lj["value_at_one_third"] = wall_value;
    per_lambda.push_back(lj);

    const std::string tag = "barrier.lambda_" + std::to_string(lam);
    checks.add(tag + ".sweep_positive", sweep_min > 0.0, sweep_min, 0.0, ">");
    checks.add(tag + ".exceeds_one_inside", wall_value > 1.0, wall_value, 1.0,
               ">");
    checks.add(tag + ".analytic_condition", M + 1.0 > (n - 1) / (lam * lam),
               M + 1.0, (n - 1) / (lam * lam), ">");
    checks.add(tag + ".analytic_consistency", M >= m_analytic, M,
               m_analytic, ">=");

    if (!wrote_csv && get_bool(section, "/barrier", "csv", true)) {
      write_csv_rows(fs::path(opts.out_dir) / "barrier_sweep.csv",
                     "radius,phi0,pucci", rows);
      wrote_csv = true;
    }
  }
  out["n"] = n;
  out["delta"] = delta;
  out["lambdas"] = per_lambda;
  return out;
}

json summary_json(const ContactSummary& s) {
  json j;
  j["delta"] = s.delta;
  j["r"] = s.r;
  j["C2"] = s.C2;
  j["C3"] = s.C3;
  j["eps"] = s.eps;
  j["num_centers"] = s.num_centers;
  j["num_contacts"] = s.num_contacts;
  j["num_flagged"] = s.num_flagged;
  j["covered_area"] = s.covered_area;
  j["sampled_area"] = s.sampled_area;
  j["ball_area"] = s.ball_area;
  j["deficit_sampled"] = s.deficit_sampled;
  j["deficit_ball"] = s.deficit_ball;
  j["max_height"] = s.max_height;
  j["max_gradient"] = s.max_gradient;
  j["max_det"] = s.max_det;
  j["C1_measured"] = s.C1_measured;
  return j;
}

json run_contact(const Integrand& phi, const json& cfg, const RunOptions& opts,
                 Checks& checks) {
  if (phi.base_dim() != 2)
    throw ConfigError(
        "config error at /integrand/dimension: the contact experiment needs "
        "base dimension 2");
  json section = cfg.value("contact", json::object());
  check_keys(section, "/contact",
             {"surface", "delta", "deltas", "resolution", "C2", "C3",
              "epsilon", "exponent_band", "deficit_band"});
  const std::string surface = get_string(section, "/contact", "surface", "flat");
  std::vector<double> deltas =
      get_number_list(section, "/contact", "deltas", {});
  if (deltas.empty())
    deltas = {get_number(section, "/contact", "delta", 0.05)};
  const int res = check_resolution(
      get_int(section, "/contact", "resolution", 129), "/contact/resolution");
  ContactOptions copts;
  copts.C2 = get_number(section, "/contact", "C2", 0.2);
  copts.C3 = get_number(section, "/contact", "C3", 0.0);

  const double half = 0.45;
  const double h = 2.0 * half / (res - 1);
  json out;
  out["surface"] = surface;
  json per_delta = json::array();
  std::vector<std::vector<double>> table;

  for (size_t di = 0; di < deltas.size(); ++di) {
    const double delta = deltas[di];
    const double eps0 =
        get_number(section, "/contact", "epsilon", 0.0) > 0.0
            ? get_number(section, "/contact", "epsilon", 0.0)
            : 0.8 * std::pow(delta, 1.5);
    DiscreteGraph g;
    if (surface == "flat") {
      g = make_rectangle(2, Eigen::Vector2d(-half, -half), h, res, res,
                         [&](const Eigen::Vector2d&) { return 0.5 * eps0; });
    } else if (surface == "pinched") {
      const double pi = std::numbers::pi;
      auto data = [&](const Eigen::Vector2d& p) {
        return eps0 * (0.5 + 0.25 * std::sin(2.0 * pi * p.x()) +
                       0.25 * std::cos(2.0 * pi * p.y()));
      };
      DiscreteGraph dom = make_rectangle(2, Eigen::Vector2d(-half, -half), h,
                                         res, res, data);
      auto [sol, rep] = solve_dirichlet(phi, dom);
      checks.add("contact.surface_converged_delta" + std::to_string(delta),
                 rep.converged, rep.final_residual, rep.tol_res, "<=");
      g = sol;
    } else {
      throw ConfigError(
          "config error at /contact/surface: expected flat | pinched");
    }

    auto [records, sum] = run_contact_experiment(phi, g, delta, copts);
    per_delta.push_back(summary_json(sum));
    table.push_back({delta, sum.deficit_sampled, sum.deficit_ball,
                     sum.covered_area, sum.max_det, sum.max_height,
                     static_cast<double>(sum.num_flagged)});
    char name[64];
    std::snprintf(name, sizeof(name), "contacts_delta_%g.csv", delta);
    write_contact_csv(records, (fs::path(opts.out_dir) / name).string());

    const std::string tag = "contact.delta_" + std::to_string(delta);
    if (surface == "flat") {
      checks.add(tag + ".flat_deficit_zero", sum.deficit_sampled == 0.0,
                 sum.deficit_sampled, 0.0, "==");
      checks.add(tag + ".flat_unit_jacobian", sum.max_det == 1.0, sum.max_det,
                 1.0, "==");
    } else {
      const double det_tol = 1e-6 + 10.0 * h;
      checks.add(tag + ".jacobian_bound", sum.max_det <= 1.0 + det_tol,
                 sum.max_det, 1.0 + det_tol, "<=");
      checks.add(tag + ".coverage_positive", sum.covered_area > 0.0,
                 sum.covered_area, 0.0, ">");
    }
  }

  write_csv_rows(fs::path(opts.out_dir) / "contact_summary.csv",
                 "delta,deficit_sampled,deficit_ball,covered_area,max_det,"
                 "max_height,num_flagged",
                 table);

  if (surface != "flat" && deltas.size() >= 2) {
    // least-squares slope of log(deficit_ball) against log(delta)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(deltas.size());
    for (int k = 0; k < m; ++k) {
      const double x = std::log(deltas[k]);
      const double y = std::log(std::max(table[k][2], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    out["deficit_exponent"] = slope;
    const std::vector<double> band =
        get_number_list(section, "/contact", "exponent_band", {0.45, 10.0});
    checks.add("contact.deficit_exponent",
               slope >= band[0] && slope <= band[1], slope, band[0], ">=");
  } else if (surface != "flat") {
    const std::vector<double> band =
        get_number_list(section, "/contact", "deficit_band", {0.0, 10.0});
    const double ratio = table[0][2] / std::sqrt(deltas[0]);
    out["deficit_over_sqrt_delta"] = ratio;
    checks.add("contact.deficit_band", ratio >= band[0] && ratio <= band[1],
               ratio, band[1], "<=");
  }
  out["summaries"] = per_delta;
  return out;
}

json envelope_json(const SlopeEnvelope& e) {
  json j;
  j["A_minus"] = e.A_minus;
  j["A_plus"] = e.A_plus;
  j["width"] = e.A_plus - e.A_minus;
  j["arg_minus"] = {e.arg_minus.x(), e.arg_minus.y()};
  j["arg_plus"] = {e.arg_plus.x(), e.arg_plus.y()};
  return j;
}

json run_rigidity(const Integrand& phi, const json& cfg, const RunOptions& opts,
                  Checks& checks) {
  if (phi.base_dim() != 2)
    throw ConfigError(
        "config error at /integrand/dimension: rigidity experiments need base "
        "dimension 2");
  json section = cfg.value("rigidity", json::object());
  check_keys(section, "/rigidity",
             {"case", "radii", "resolution", "L_slope", "far_slope",
              "perturbation", "slab_width", "wedge_angle_deg", "window_R0",
              "require_decreasing", "excision"});
  const std::string kase = get_string(section, "/rigidity", "case", "half-space");
  HalfSpaceSetup setup;
  if (kase == "half-space")
    setup.kase = BernsteinCase::HalfSpace;
  else if (kase == "slab")
    setup.kase = BernsteinCase::Slab;
  else if (kase == "wedge")
    setup.kase = BernsteinCase::Wedge;
  else
    throw ConfigError(
        "config error at /rigidity/case: expected half-space | slab | wedge");

  const std::vector<double> radii =
      get_number_list(section, "/rigidity", "radii", {4.0, 8.0, 16.0});
  const int res = check_resolution(
      get_int(section, "/rigidity", "resolution", 65), "/rigidity/resolution");
  const std::vector<double> ls =
      get_number_list(section, "/rigidity", "L_slope", {0.0, 0.3});
  if (ls.size() != 2)
    throw ConfigError("config error at /rigidity/L_slope: expected 2 numbers");
  setup.L_slope = Eigen::Vector2d(ls[0], ls[1]);
  setup.far.slope_x1 = get_number(section, "/rigidity", "far_slope", 0.0);
  setup.far.amplitude = get_number(section, "/rigidity", "perturbation", 0.0);
  setup.far.perturbed = setup.far.amplitude != 0.0;
  setup.slab_width = get_number(section, "/rigidity", "slab_width", 3.0);
  setup.wedge_angle = get_number(section, "/rigidity", "wedge_angle_deg", 90.0) *
                      std::numbers::pi / 180.0;
  setup.window_R0 = get_number(section, "/rigidity", "window_R0", 4.0);
  const bool want_decreasing = get_bool(section, "/rigidity",
                                        "require_decreasing",
                                        setup.far.perturbed);

  json out;
  out["case"] = kase;
  json series = json::array();
  std::vector<std::vector<double>> table;
  std::vector<double> devs, widths;
  for (double R : radii) {
    setup.R = R;
    const ExperimentReport rep = bernstein_experiment(phi, setup, res);
    json rj;
    rj["R"] = R;
    rj["h"] = rep.h;
    rj["valid"] = rep.valid;
    rj["solve"] = solve_report_json(rep.solve);
    rj["affine_fit"] = {rep.affine_fit[0], rep.affine_fit[1], rep.affine_fit[2]};
    rj["deviation"] = rep.deviation;
    rj["envelope"] = envelope_json(rep.envelope);
    rj["envelope_full"] = envelope_json(rep.envelope_full);
    series.push_back(rj);
    table.push_back({R, rep.h, rep.deviation, rep.envelope.A_minus,
                     rep.envelope.A_plus,
                     rep.envelope.A_plus - rep.envelope.A_minus,
                     static_cast<double>(rep.solve.iterations),
                     rep.solve.final_residual});
    checks.add("rigidity.converged_R" + std::to_string(R), rep.valid,
               rep.solve.final_residual, rep.solve.tol_res, "<=");
    if (!setup.far.perturbed)
      checks.add("rigidity.affine_deviation_R" + std::to_string(R),
                 rep.deviation <= 10.0 * rep.solve.tol_res, rep.deviation,
                 10.0 * rep.solve.tol_res, "<=");
    devs.push_back(rep.deviation);
    widths.push_back(rep.envelope.A_plus - rep.envelope.A_minus);
  }
  if (want_decreasing && devs.size() >= 2) {
    bool dec_d = true, dec_w = true;
    for (size_t k = 0; k + 1 < devs.size(); ++k) {
      dec_d = dec_d && devs[k + 1] < devs[k];
      dec_w = dec_w && widths[k + 1] <= widths[k] + 1e-14;
    }
    checks.add("rigidity.deviation_decreasing", dec_d, devs.back(),
               devs.front(), "<");
    checks.add("rigidity.envelope_width_decreasing", dec_w, widths.back(),
               widths.front(), "<=");
  }
  out["series"] = series;
  write_csv_rows(fs::path(opts.out_dir) / "rigidity.csv",
                 "R,h,deviation,A_minus,A_plus,width,iterations,residual",
                 table);

  if (section.contains("excision")) {
    const json& ej = section["excision"];
    check_keys(ej, "/rigidity/excision",
               {"height", "eps", "cyl_height", "resolution"});
    const double height = get_number(ej, "/rigidity/excision", "height", 1.0);
    const double eps = get_number(ej, "/rigidity/excision", "eps", 0.02);
    const double ch = get_number(ej, "/rigidity/excision", "cyl_height",
                                 1.5 * height);
    const int eres = check_resolution(
        get_int(ej, "/rigidity/excision", "resolution", 257),
        "/rigidity/excision/resolution");
    const ExcisionResult ex =
        sigmoid_excision_diagnostic(phi, height, eps, ch, eres);
    json xj;
    xj["sheet_area"] = ex.sheet_area;
    xj["face_area"] = ex.face_area;
    xj["lateral_area"] = ex.lateral_area;
    xj["replacement_area"] = ex.replacement_area;
    xj["gap"] = ex.gap;
    xj["budget"] = ex.budget;
    out["excision"] = xj;
    checks.add("rigidity.excision_sheet_dominates",
               ex.sheet_area >= 0.9 * ex.face_area, ex.sheet_area,
               0.9 * ex.face_area, ">=");
    checks.add("rigidity.excision_face_identity",
               std::abs(ex.replacement_area - ex.lateral_area - ex.face_area) <=
                   ex.budget + 1e-12,
               std::abs(ex.replacement_area - ex.lateral_area - ex.face_area),
               ex.budget + 1e-12, "<=");
  }
  return out;
}

}  // namespace

int run_config(const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  json cfg;
  try {
    std::ifstream f(opts.config_path);
    if (!f)
      throw ConfigError("config error: cannot open " + opts.config_path);
    try {
      cfg = json::parse(f);
    } catch (const json::parse_error& e) {
      throw ConfigError("config error in " + opts.config_path + ": " +
                        e.what());
    }
    check_keys(cfg, "",
               {"command", "integrand", "verify", "solve", "barrier",
                "contact", "rigidity"});
    if (opts.threads < 1)
      throw ConfigError("config error: --threads must be >= 1");
    if (!opts.expected_command.empty() &&
        get_string(cfg, "", "command", "") != opts.expected_command)
      throw ConfigError("config error at /command: '" +
                        get_string(cfg, "", "command", "") +
                        "' does not match the invoked subcommand '" +
                        opts.expected_command + "'");
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  json report;
  Checks checks;
  std::string command;
  int status = 0;
  try {
    command = get_string(cfg, "", "command", "");
    fs::create_directories(opts.out_dir);
    if (command == "verify-wulff") {
      report["results"] = run_verify(parse_integrand(cfg), cfg, opts, checks);
    } else if (command == "solve") {
      report["results"] = run_solve(parse_integrand(cfg), cfg, opts, checks);
    } else if (command == "barrier-check") {
      report["results"] = run_barrier(cfg, opts, checks);
    } else if (command == "contact") {
      report["results"] = run_contact(parse_integrand(cfg), cfg, opts, checks);
    } else if (command == "rigidity") {
      report["results"] = run_rigidity(parse_integrand(cfg), cfg, opts, checks);
    } else {
      throw ConfigError(
          "config error at /command: expected one of verify-wulff | solve | "
          "barrier-check | contact | rigidity");
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "pipeline failure (" << command << "): " << e.what() << "\n";
    checks.add("pipeline." + command, false, 0.0, 0.0,
               std::string("exception: ") + e.what());
    status = 1;
  }

  report["command"] = command;
  report["seed"] = opts.seed;
  if (cfg.contains("integrand"))
    report["integrand"] = integrand_echo(parse_integrand(cfg));
  report["checks"] = checks.list;
  report["pass"] = checks.all_pass;
  if (!checks.all_pass) {
    status = 1;
    if (!opts.quiet)
      std::cerr << "check failed: " << checks.first_failure << "\n";
  }

  const auto t1 = std::chrono::steady_clock::now();
  json manifest;
  manifest["toolkit_version"] = kToolkitVersion;
  manifest["command"] = command;
  manifest["config_path"] = opts.config_path;
  manifest["config"] = cfg;
  manifest["seed"] = opts.seed;
  manifest["threads"] = opts.threads;
  manifest["wall_time_seconds"] =
      std::chrono::duration<double>(t1 - t0).count();
  const auto now = std::chrono::system_clock::now();
  manifest["generated_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          now.time_since_epoch())
          .count();

  try {
    atomic_write(fs::path(opts.out_dir) / "report.json", report.dump(2) + "\n");
    atomic_write(fs::path(opts.out_dir) / "manifest.json",
                 manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "artifact write failure: " << e.what() << "\n";
    return 1;
  }
  if (!opts.quiet)
    std::cout << (status == 0 ? "PASS " : "FAIL ") << command << " ("
              << checks.list.size() << " checks)\n";
  return status;
}

}  // namespace amg
