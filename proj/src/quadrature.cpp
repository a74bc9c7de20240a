#include "cylflow/quadrature.hpp"

#include <cmath>

namespace cylflow {

namespace {

// Gauss-Hermite nodes/weights for weight exp(-x^2) via Newton iteration on
// the orthonormal recurrence (cf. the classic gauher routine).
void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
  const double eps = 1.0e-15;
  const double pim4 = 0.7511255444649425;  // pi^(-1/4)
  const int maxit = 200;
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    int its = 0;
    for (its = 0; its < maxit; ++its) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= eps) break;
    }
    if (its >= maxit) throw solver_error("Gauss-Hermite Newton iteration did not converge");
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  if (n % 2 == 1) x[m - 1] = 0.0;
}

}  // namespace

double gaussian_moment(int j) {
  // m_{2k} = 2^(k+1) sqrt(pi) (2k-1)!!, so m_{2k}/m_{2k-2} = 2(2k-1).
  if (j % 2 == 1) return 0.0;
  double m = 2.0 * std::sqrt(constants::pi);
  for (int i = 2; i <= j; i += 2) m *= 2.0 * (i - 1);
  return m;
}

GaussianRule1D::GaussianRule1D(int n) {
  if (n < 2) throw config_error("Gaussian rule needs at least 2 nodes");
  std::vector<double> x, w;
  gauss_hermite(n, x, w);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = 2.0 * x[i];
    weights[i] = 2.0 * w[i];
  }
  // Self-test against closed-form moments through the exactness degree.
  for (int j = 0; j + 1 <= degree_exact(); j += 2) {
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += weights[i] * std::pow(nodes[i], j);
    const double exact = gaussian_moment(j);
    if (std::abs(q - exact) > 1e-12 * std::abs(exact))
      throw solver_error("Gaussian rule failed its moment self-test");
  }
}

std::vector<double> gregory_weights(int n, double h) {
  if (n < 7) throw config_error("Gregory weights need at least 7 nodes");
  std::vector<double> w(n, h);
  const double c0 = 3.0 / 8.0, c1 = 7.0 / 6.0, c2 = 23.0 / 24.0;
  w[0] = c0 * h;
  w[1] = c1 * h;
  w[2] = c2 * h;
  w[n - 1] = c0 * h;
  w[n - 2] = c1 * h;
  w[n - 3] = c2 * h;
  return w;
}

SheetQuadrature::SheetQuadrature(int nflat, int ntheta) : rule_(nflat), ntheta_(ntheta) {
  if (ntheta < 2) throw config_error("angular rule needs at least 2 nodes");
  theta_.resize(ntheta_);
  for (int t = 0; t < ntheta_; ++t) theta_[t] = 2.0 * constants::pi * t / ntheta_;
  prefactor_ = reduced_prefactor();
}

double SheetQuadrature::reduced_prefactor() {
  return 1.0 / std::sqrt(8.0 * std::exp(1.0) * constants::pi);
}

double low_mode(int which, double y1, double y2, double theta) {
  switch (which) {
    case 0: return 1.0;
    case 1: return y1;
    case 2: return y2;
    case 3: return std::cos(theta);
    case 4: return std::sin(theta);
    case 5: return y1 * y1 - 2.0;        // psi_1
    case 6: return y2 * y2 - 2.0;        // psi_2
    case 7: return 2.0 * y1 * y2;        // psi_3
    case 8: return y1 * std::cos(theta); // psi_4
    case 9: return y1 * std::sin(theta); // psi_5
    case 10: return y2 * std::cos(theta);// psi_6
    case 11: return y2 * std::sin(theta);// psi_7
    default: throw config_error("low_mode index out of range");
  }
}

double low_mode_eigenvalue(int which) {
  if (which == 0) return 1.0;
  if (which >= 1 && which <= 4) return 0.5;
  if (which >= 5 && which < n_low_modes) return 0.0;
  throw config_error("low_mode index out of range");
}

}  // namespace cylflow
