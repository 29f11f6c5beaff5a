#include "amg/grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace amg {

double DiscreteGraph::value_range() const {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int k = 0; k < size(); ++k) {
    if (mask[k] == NodeKind::Outside) continue;
    lo = std::min(lo, w[k]);
    hi = std::max(hi, w[k]);
  }
  if (!(hi >= lo)) return 0.0;
  return hi - lo;
}

bool DiscreteGraph::cell_in_domain(const Eigen::Vector2d& p) const {
  const double fx = (p.x() - origin.x()) / h;
  const double fy = n == 2 ? (p.y() - origin.y()) / h : 0.0;
  const int i = static_cast<int>(std::floor(fx));
  const int j = n == 2 ? static_cast<int>(std::floor(fy)) : 0;
  if (i < 0 || i + 1 >= nx) return false;
  if (n == 2 && (j < 0 || j + 1 >= ny)) return false;
  if (!in_domain(i, j) || !in_domain(i + 1, j)) return false;
  if (n == 2 && (!in_domain(i, j + 1) || !in_domain(i + 1, j + 1)))
    return false;
  return true;
}

double DiscreteGraph::interpolate(const Eigen::Vector2d& p) const {
  const double fx = (p.x() - origin.x()) / h;
  const double fy = n == 2 ? (p.y() - origin.y()) / h : 0.0;
  // exact node hits bypass the cell lookup (masked domains may lack a
  // full in-domain cell around an edge node)
  const int ri = static_cast<int>(std::lround(fx));
  const int rj = n == 2 ? static_cast<int>(std::lround(fy)) : 0;
  if (std::abs(fx - ri) < 1e-9 && std::abs(fy - rj) < 1e-9 && ri >= 0 &&
      ri < nx && rj >= 0 && rj < ny && in_domain(ri, rj))
    return w[idx(ri, rj)];
  int i = static_cast<int>(std::floor(fx));
  int j = n == 2 ? static_cast<int>(std::floor(fy)) : 0;
  // clamp so that points on the far boundary stay in the last cell
  i = std::max(0, std::min(i, nx - 2));
  if (n == 2) j = std::max(0, std::min(j, ny - 2));
  const double tx = fx - i;
  const double ty = n == 2 ? fy - j : 0.0;
  if (tx < -1e-9 || tx > 1.0 + 1e-9 || ty < -1e-9 || ty > 1.0 + 1e-9)
    throw std::out_of_range("interpolate: point outside grid");
  auto need = [&](int a, int b) {
    if (!in_domain(a, b))
      throw std::out_of_range("interpolate: cell corner outside domain");
    return w[idx(a, b)];
  };
  if (n == 1) return (1.0 - tx) * need(i, 0) + tx * need(i + 1, 0);
  return (1.0 - tx) * (1.0 - ty) * need(i, j) + tx * (1.0 - ty) * need(i + 1, j) +
         (1.0 - tx) * ty * need(i, j + 1) + tx * ty * need(i + 1, j + 1);
}

DiscreteGraph make_domain(int n, const Eigen::Vector2d& origin, double h,
                          int nx, int ny, const DomainPredicate& inside,
                          const ScalarField& data, const std::string& tag) {
  if (n != 1 && n != 2) throw std::invalid_argument("base dimension must be 1 or 2");
  if (h <= 0.0) throw std::invalid_argument("grid spacing must be positive");
  if (nx < 3 || (n == 2 && ny < 3))
    throw std::invalid_argument("grid needs at least 3 nodes per axis");
  if (n == 1) ny = 1;
  DiscreteGraph g;
  g.n = n;
  g.origin = origin;
  g.h = h;
  g.nx = nx;
  g.ny = ny;
  g.domain_tag = tag;
  g.w.assign(static_cast<size_t>(nx) * ny, 0.0);
  g.mask.assign(static_cast<size_t>(nx) * ny, NodeKind::Outside);

  std::vector<char> in(static_cast<size_t>(nx) * ny, 0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      in[g.idx(i, j)] = inside(g.pos(i, j)) ? 1 : 0;

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int k = g.idx(i, j);
      if (!in[k]) continue;
      bool boundary = false;
      for (int dj = (n == 2 ? -1 : 0); dj <= (n == 2 ? 1 : 0); ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || ii >= nx || jj < 0 || jj >= ny || !in[g.idx(ii, jj)]) {
            boundary = true;
          }
        }
      }
      g.mask[k] = boundary ? NodeKind::Dirichlet : NodeKind::Interior;
      g.w[k] = data(g.pos(i, j));
      if (!std::isfinite(g.w[k]))
        throw std::invalid_argument("make_domain: non-finite data value");
    }
  }
  validate_mask(g);
  return g;
}

DiscreteGraph make_rectangle(int n, const Eigen::Vector2d& origin, double h,
                             int nx, int ny, const ScalarField& data) {
  return make_domain(
      n, origin, h, nx, ny, [](const Eigen::Vector2d&) { return true; }, data,
      "rectangle");
}

void validate_mask(const DiscreteGraph& g) {
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.interior(i, j)) continue;
      const int r = g.n == 2 ? 1 : 0;
      for (int dj = -r; dj <= r; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny ||
              !g.in_domain(ii, jj))
            throw std::runtime_error("mask integrity: interior node " +
                                     std::to_string(i) + "," +
                                     std::to_string(j) +
                                     " lacks a full in-domain stencil");
        }
    }
  }
}

DiscreteGraph rescale(const DiscreteGraph& g, double k) {
  if (k <= 0.0) throw std::invalid_argument("rescale: k must be positive");
  DiscreteGraph out;
  out.n = g.n;
  out.h = g.h / k;
  out.nx = g.nx;
  out.ny = g.ny;
  out.origin = g.origin / k;
  out.domain_tag = g.domain_tag;
  out.w.assign(static_cast<size_t>(out.nx) * out.ny, 0.0);
  out.mask.assign(static_cast<size_t>(out.nx) * out.ny, NodeKind::Outside);
  for (int j = 0; j < out.ny; ++j) {
    for (int i = 0; i < out.nx; ++i) {
      const Eigen::Vector2d src = k * out.pos(i, j);
      const int kk = out.idx(i, j);
      if (g.mask[kk] == NodeKind::Outside) continue;
      out.mask[kk] = g.mask[kk];
      out.w[kk] = g.interpolate(src) / k;
    }
  }
  return out;
}

void write_csv(const DiscreteGraph& g, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f, g.n == 2 ? "x1,x2,w\n" : "x1,w\n");
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.in_domain(i, j)) continue;
      const auto p = g.pos(i, j);
      if (g.n == 2)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", p.x(), p.y(), g.w[g.idx(i, j)]);
      else
        std::fprintf(f, "%.17g,%.17g\n", p.x(), g.w[g.idx(i, j)]);
    }
  }
  std::fclose(f);
}

void write_wgrf(const DiscreteGraph& g, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  char header[64] = {0};
  std::memcpy(header, "WGRF", 4);
  const std::uint32_t version = 1, n = g.n, nx = g.nx, ny = g.ny;
  std::memcpy(header + 4, &version, 4);
  std::memcpy(header + 8, &n, 4);
  std::memcpy(header + 12, &nx, 4);
  std::memcpy(header + 16, &ny, 4);
  const double ox = g.origin.x(), oy = g.origin.y();
  std::memcpy(header + 20, &g.h, 8);
  std::memcpy(header + 28, &ox, 8);
  std::memcpy(header + 36, &oy, 8);
  f.write(header, 64);
  f.write(reinterpret_cast<const char*>(g.w.data()),
          static_cast<std::streamsize>(g.w.size() * sizeof(double)));
  f.write(reinterpret_cast<const char*>(g.mask.data()),
          static_cast<std::streamsize>(g.mask.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

DiscreteGraph read_wgrf(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  char header[64];
  f.read(header, 64);
  if (!f || std::memcmp(header, "WGRF", 4) != 0)
    throw std::runtime_error("not a WGRF file: " + path);
  std::uint32_t version, n, nx, ny;
  std::memcpy(&version, header + 4, 4);
  std::memcpy(&n, header + 8, 4);
  std::memcpy(&nx, header + 12, 4);
  std::memcpy(&ny, header + 16, 4);
  if (version != 1) throw std::runtime_error("unsupported WGRF version");
  DiscreteGraph g;
  g.n = static_cast<int>(n);
  g.nx = static_cast<int>(nx);
  g.ny = static_cast<int>(ny);
  double ox, oy;
  std::memcpy(&g.h, header + 20, 8);
  std::memcpy(&ox, header + 28, 8);
  std::memcpy(&oy, header + 36, 8);
  g.origin << ox, oy;
  g.w.resize(static_cast<size_t>(g.nx) * g.ny);
  g.mask.resize(g.w.size());
  f.read(reinterpret_cast<char*>(g.w.data()),
         static_cast<std::streamsize>(g.w.size() * sizeof(double)));
  f.read(reinterpret_cast<char*>(g.mask.data()),
         static_cast<std::streamsize>(g.mask.size()));
  if (!f) throw std::runtime_error("truncated WGRF file: " + path);
  return g;
}

}  // namespace amg
