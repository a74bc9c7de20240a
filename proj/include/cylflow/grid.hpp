#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "cylflow/common.hpp"

namespace cylflow {

// Generalized cylinder R^k x S^m. Only the two instances used by the lab are
// accepted: (k=2, m=1) is the normalized sheet Gamma = R^2 x S^1(sqrt(2)),
// (k=1, m=1) is the surface-of-revolution reduction for profile work.
struct CylinderSpec {
  int k = 2;  // flat directions
  int m = 1;  // sphere dimension n-k

  void validate() const {
    if (k < 1 || m < 1) throw config_error("cylinder spec requires k >= 1, m >= 1");
    if (m != 1 || (k != 1 && k != 2))
      throw config_error("unsupported cylinder instance (k,m); supported: (2,1), (1,1)");
  }
  bool is_sheet() const { return k == 2 && m == 1; }
};

// Tensor grid on [-R,R]^k x (periodic angle). Flat axes are uniform with
// N_y nodes including both endpoints; the angle has N_theta nodes on
// [0, 2*pi). Fourier differentiation matrices for the angle are built once
// and shared.
class Grid {
 public:
  Grid(CylinderSpec spec, double R, int ny, int ntheta);

  const CylinderSpec& spec() const { return spec_; }
  double R() const { return R_; }
  int ny() const { return ny_; }
  int ntheta() const { return ntheta_; }
  double hy() const { return hy_; }
  double htheta() const { return htheta_; }
  std::size_t size() const { return size_; }

  double y(int j) const { return y_[j]; }
  double theta(int t) const { return theta_[t]; }

  // Node layout: theta fastest, then y2 (when k=2), then y1.
  std::size_t index(int j1, int j2, int t) const {
    if (spec_.k == 1) return static_cast<std::size_t>(j1) * ntheta_ + t;
    return (static_cast<std::size_t>(j1) * ny_ + j2) * ntheta_ + t;
  }

  // Euclidean radius of the flat coordinates at a node.
  double flat_radius(int j1, int j2) const {
    return spec_.k == 1 ? std::abs(y_[j1]) : std::hypot(y_[j1], y_[j2]);
  }

  const std::vector<double>& theta_d1() const { return d1t_; }
  const std::vector<double>& theta_d2() const { return d2t_; }

  bool compatible(const Grid& other) const {
    return spec_.k == other.spec_.k && spec_.m == other.spec_.m && R_ == other.R_ &&
           ny_ == other.ny_ && ntheta_ == other.ntheta_;
  }

 private:
  CylinderSpec spec_;
  double R_;
  int ny_, ntheta_;
  double hy_, htheta_;
  std::size_t size_;
  std::vector<double> y_, theta_;
  std::vector<double> d1t_, d2t_;  // ntheta x ntheta, row-major
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(CylinderSpec spec, double R, int ny, int ntheta);

// Scalar samples on a grid. Also used for evolution rates (graph radius per
// unit tau).
struct Field {
  GridPtr grid;
  std::vector<double> v;

  Field() = default;
  explicit Field(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), v(grid->size(), fill) {}

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  std::size_t size() const { return v.size(); }
};

// A positive graph over the cylinder: the hypersurface {(z, v(z,w)w)}.
struct CylinderGraph {
  Field radius;

  explicit CylinderGraph(Field f) : radius(std::move(f)) { validate(); }
  CylinderGraph(GridPtr g, double fill) : radius(std::move(g), fill) { validate(); }

  const Grid& grid() const { return *radius.grid; }

  void validate() const {
    for (std::size_t i = 0; i < radius.size(); ++i)
      if (!(radius.v[i] > 0.0))
        throw domain_error("graph radius must be positive everywhere");
  }

  // Deviation u = v - sqrt(2) from the round sheet.
  Field deviation() const {
    Field u(radius.grid);
    for (std::size_t i = 0; i < u.size(); ++i) u.v[i] = radius.v[i] - constants::sqrt2;
    return u;
  }
};

void require_compatible(const Field& a, const Field& b);

}  // namespace cylflow
