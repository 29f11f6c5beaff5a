#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace amg {

enum class NodeKind : std::uint8_t { Outside = 0, Interior = 1, Dirichlet = 2 };

/// A scalar function sampled on a uniform rectangular grid, with a mask
/// distinguishing interior, Dirichlet and outside nodes. Non-rectangular
/// domains are masked rectangles. Base dimension n is 1 or 2; for n == 1
/// the y axis collapses (ny == 1).
struct DiscreteGraph {
  int n = 2;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double h = 0.0;
  int nx = 0, ny = 1;
  std::vector<double> w;
  std::vector<NodeKind> mask;
  std::string domain_tag = "rectangle";

  int size() const { return nx * ny; }
  int idx(int i, int j) const { return j * nx + i; }
  Eigen::Vector2d pos(int i, int j) const {
    return origin + h * Eigen::Vector2d(i, j);
  }
  bool in_domain(int i, int j) const {
    return mask[idx(i, j)] != NodeKind::Outside;
  }
  bool interior(int i, int j) const {
    return mask[idx(i, j)] == NodeKind::Interior;
  }
  double value_range() const;

  /// Bilinear interpolation of w at a point; requires the enclosing cell
  /// to have all corners in-domain.
  double interpolate(const Eigen::Vector2d& p) const;
  bool cell_in_domain(const Eigen::Vector2d& p) const;
};

using DomainPredicate = std::function<bool(const Eigen::Vector2d&)>;
using ScalarField = std::function<double(const Eigen::Vector2d&)>;

/// Masked-rectangle domain. Nodes failing `inside` are Outside; in-domain
/// nodes on the array edge or adjacent (8-neighborhood) to an outside node
/// are Dirichlet; the rest are Interior. Values are initialized with `data`
/// everywhere in-domain.
DiscreteGraph make_domain(int n, const Eigen::Vector2d& origin, double h,
                          int nx, int ny, const DomainPredicate& inside,
                          const ScalarField& data,
                          const std::string& tag = "rectangle");

/// Full rectangle: every node in-domain, edges Dirichlet.
DiscreteGraph make_rectangle(int n, const Eigen::Vector2d& origin, double h,
                             int nx, int ny, const ScalarField& data);

/// Throws if some interior node lacks a full in-domain stencil.
void validate_mask(const DiscreteGraph& g);

/// u_k(x) = u(kx)/k sampled on a grid of spacing h/k over the shrunk
/// domain, by bilinear interpolation. k > 0.
DiscreteGraph rescale(const DiscreteGraph& g, double k);

void write_csv(const DiscreteGraph& g, const std::string& path);

/// Binary format: 64-byte little-endian header
///   bytes 0-3   magic "WGRF"
///   4-7         uint32 version (1)
///   8-11        uint32 n
///   12-15       uint32 nx
///   16-19       uint32 ny
///   20-27       double h
///   28-35       double origin x1
///   36-43       double origin x2
///   44-63       zero padding
/// followed by nx*ny row-major doubles (w) and nx*ny mask bytes.
void write_wgrf(const DiscreteGraph& g, const std::string& path);
DiscreteGraph read_wgrf(const std::string& path);

}  // namespace amg
