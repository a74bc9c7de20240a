#include "cylflow/grid.hpp"

#include <cmath>

namespace cylflow {

Grid::Grid(CylinderSpec spec, double R, int ny, int ntheta)
    : spec_(spec), R_(R), ny_(ny), ntheta_(ntheta) {
  spec_.validate();
  if (!(R > 0.0)) throw config_error("grid half-width must be positive");
  if (ny < 7) throw config_error("need at least 7 nodes per flat axis");
  if (ntheta < 4 || ntheta % 2 != 0) throw config_error("angular node count must be even and >= 4");

  hy_ = 2.0 * R_ / (ny_ - 1);
  htheta_ = 2.0 * constants::pi / ntheta_;
  y_.resize(ny_);
  for (int j = 0; j < ny_; ++j) y_[j] = -R_ + j * hy_;
  theta_.resize(ntheta_);
  for (int t = 0; t < ntheta_; ++t) theta_[t] = t * htheta_;

  size_ = static_cast<std::size_t>(ntheta_);
  for (int a = 0; a < spec_.k; ++a) size_ *= static_cast<std::size_t>(ny_);

  // Fourier differentiation matrices on the unit circle (even node count).
  // Row sums are forced to zero so constants are annihilated exactly.
  const int n = ntheta_;
  d1t_.assign(static_cast<std::size_t>(n) * n, 0.0);
  d2t_.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    double s1 = 0.0, s2 = 0.0;
    for (int kcol = 0; kcol < n; ++kcol) {
      if (kcol == j) continue;
      const int d = j - kcol;
      const double half = 0.5 * htheta_ * d;
      const double sign = (d % 2 == 0) ? 1.0 : -1.0;
      const double e1 = 0.5 * sign / std::tan(half);
      const double e2 = -sign / (2.0 * std::sin(half) * std::sin(half));
      d1t_[static_cast<std::size_t>(j) * n + kcol] = e1;
      d2t_[static_cast<std::size_t>(j) * n + kcol] = e2;
      s1 += e1;
      s2 += e2;
    }
    d1t_[static_cast<std::size_t>(j) * n + j] = -s1;
    d2t_[static_cast<std::size_t>(j) * n + j] = -s2;
  }
}

GridPtr make_grid(CylinderSpec spec, double R, int ny, int ntheta) {
  return std::make_shared<Grid>(spec, R, ny, ntheta);
}

void require_compatible(const Field& a, const Field& b) {
  if (!a.grid || !b.grid || !a.grid->compatible(*b.grid))
    throw config_error("fields live on incompatible grids");
}

}  // namespace cylflow
