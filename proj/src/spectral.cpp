#include "cylflow/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace cylflow {

double chi(double s) {
  s = std::abs(s);
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  const double t = 2.0 * s - 1.0;
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

Field truncate(const Field& u, double rho) {
  if (!(rho > 0.0)) throw config_error("truncation radius must be positive");
  const Grid& g = *u.grid;
  Field out(u.grid);
  if (g.spec().k == 2) {
    for (int j1 = 0; j1 < g.ny(); ++j1)
      for (int j2 = 0; j2 < g.ny(); ++j2) {
        const double c = chi(g.flat_radius(j1, j2) / rho);
        const std::size_t base = g.index(j1, j2, 0);
        for (int t = 0; t < g.ntheta(); ++t) out.v[base + t] = c * u.v[base + t];
      }
  } else {
    for (int j1 = 0; j1 < g.ny(); ++j1) {
      const double c = chi(g.flat_radius(j1, 0) / rho);
      const std::size_t base = g.index(j1, 0, 0);
      for (int t = 0; t < g.ntheta(); ++t) out.v[base + t] = c * u.v[base + t];
    }
  }
  return out;
}

namespace {

// Lower-triangular Cholesky of a small SPD matrix, row-major, in place.
template <std::size_t N>
std::array<double, N * N> cholesky(std::array<double, N * N> a) {
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * N + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * N + k] * a[j * N + k];
      if (i == j) {
        if (s <= 0.0) throw solver_error("mode Gram matrix is not positive definite");
        a[i * N + i] = std::sqrt(s);
      } else {
        a[i * N + j] = s / a[j * N + j];
      }
    }
    for (std::size_t j = i + 1; j < N; ++j) a[i * N + j] = 0.0;
  }
  return a;
}

// Solves L z = c and returns |z|^2 = c^T (L L^T)^{-1} c.
template <std::size_t N>
double gram_energy(const std::array<double, N * N>& chol, const std::array<double, N>& c) {
  std::array<double, N> z{};
  for (std::size_t i = 0; i < N; ++i) {
    double s = c[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol[i * N + k] * z[k];
    z[i] = s / chol[i * N + i];
  }
  double e = 0.0;
  for (std::size_t i = 0; i < N; ++i) e += z[i] * z[i];
  return e;
}

}  // namespace

SheetDiagnostics::SheetDiagnostics(GridPtr grid, double rho0)
    : grid_(std::move(grid)), rho0_(rho0), chi_(grid_) {
  const Grid& g = *grid_;
  if (!g.spec().is_sheet())
    throw config_error("sheet diagnostics require the (k=2, m=1) instance");
  if (!(rho0_ > 0.0)) throw config_error("rho0 must be positive");

  const auto gw = gregory_weights(g.ny(), g.hy());
  const double pref = SheetQuadrature::reduced_prefactor();
  flat_weight_.resize(static_cast<std::size_t>(g.ny()) * g.ny());
  for (int j1 = 0; j1 < g.ny(); ++j1)
    for (int j2 = 0; j2 < g.ny(); ++j2) {
      const double y1 = g.y(j1), y2 = g.y(j2);
      flat_weight_[static_cast<std::size_t>(j1) * g.ny() + j2] =
          pref * gw[j1] * gw[j2] * std::exp(-(y1 * y1 + y2 * y2) / 4.0);
    }

  for (int j1 = 0; j1 < g.ny(); ++j1)
    for (int j2 = 0; j2 < g.ny(); ++j2) {
      const double c = chi(g.flat_radius(j1, j2) / rho0_);
      const std::size_t base = g.index(j1, j2, 0);
      for (int t = 0; t < g.ntheta(); ++t) chi_.v[base + t] = c;
    }

  modes_.reserve(n_low_modes);
  for (int m = 0; m < n_low_modes; ++m) {
    Field f(grid_);
    for (int j1 = 0; j1 < g.ny(); ++j1)
      for (int j2 = 0; j2 < g.ny(); ++j2) {
        const std::size_t base = g.index(j1, j2, 0);
        for (int t = 0; t < g.ntheta(); ++t)
          f.v[base + t] = low_mode(m, g.y(j1), g.y(j2), g.theta(t));
      }
    modes_.push_back(std::move(f));
  }
  for (int m = 0; m < n_low_modes; ++m) mode_norm2_[m] = inner(modes_[m], modes_[m]);

  std::array<double, n_unstable * n_unstable> gp{};
  for (int i = 0; i < n_unstable; ++i)
    for (int j = 0; j < n_unstable; ++j) gp[i * n_unstable + j] = inner(modes_[i], modes_[j]);
  gram_plus_ = cholesky<n_unstable>(gp);

  std::array<double, n_neutral * n_neutral> gz{};
  for (int i = 0; i < n_neutral; ++i)
    for (int j = 0; j < n_neutral; ++j)
      gz[i * n_neutral + j] = inner(modes_[n_unstable + i], modes_[n_unstable + j]);
  gram_zero_ = cholesky<n_neutral>(gz);
}

double SheetDiagnostics::inner(const Field& f, const Field& g) const {
  if (!f.grid->compatible(*grid_) || !g.grid->compatible(*grid_))
    throw config_error("field grid does not match the diagnostics grid");
  const Grid& gr = *grid_;
  const int nt = gr.ntheta();
  double acc = 0.0;
  for (int j1 = 0; j1 < gr.ny(); ++j1)
    for (int j2 = 0; j2 < gr.ny(); ++j2) {
      const std::size_t base = gr.index(j1, j2, 0);
      double at = 0.0;
      for (int t = 0; t < nt; ++t) at += f.v[base + t] * g.v[base + t];
      acc += flat_weight_[static_cast<std::size_t>(j1) * gr.ny() + j2] * (at / nt);
    }
  return acc;
}

ModeState SheetDiagnostics::mode_state(const Field& u, double tau) const {
  Field uhat(grid_);
  for (std::size_t i = 0; i < uhat.size(); ++i) uhat.v[i] = u.v[i] * chi_.v[i];
  return mode_state_truncated(uhat, tau);
}

ModeState SheetDiagnostics::mode_state_truncated(const Field& uhat, double tau) const {
  ModeState ms;
  ms.tau = tau;
  std::array<double, n_unstable> cp{};
  for (int i = 0; i < n_unstable; ++i) cp[i] = inner(modes_[i], uhat);
  std::array<double, n_neutral> cz{};
  for (int i = 0; i < n_neutral; ++i) cz[i] = inner(modes_[n_unstable + i], uhat);
  for (int i = 0; i < n_neutral; ++i) ms.alpha[i] = cz[i] / mode_norm2_[n_unstable + i];
  ms.uplus = gram_energy<n_unstable>(gram_plus_, cp);
  ms.uzero = gram_energy<n_neutral>(gram_zero_, cz);
  ms.norm2 = inner(uhat, uhat);
  ms.uminus = std::max(0.0, ms.norm2 - ms.uplus - ms.uzero);
  return ms;
}

double theta_defect(const Field& u, double radius) {
  const Grid& g = *u.grid;
  const int nt = g.ntheta();
  const double* d1 = g.theta_d1().data();
  double sup = 0.0;
  std::vector<double> ut(nt);
  const int n2 = g.spec().k == 2 ? g.ny() : 1;
  for (int j1 = 0; j1 < g.ny(); ++j1)
    for (int j2 = 0; j2 < n2; ++j2) {
      if (g.flat_radius(j1, j2) > radius) continue;
      const std::size_t base = g.index(j1, j2, 0);
      for (int j = 0; j < nt; ++j) {
        double s = 0.0;
        const double* row = d1 + static_cast<std::size_t>(j) * nt;
        for (int k = 0; k < nt; ++k) s += row[k] * u.v[base + k];
        sup = std::max(sup, std::abs(s));
      }
    }
  return sup;
}

ModeDominance merle_zaag_classify(const std::vector<ModeState>& series,
                                  const MerleZaagOptions& opts) {
  if (series.empty()) throw input_error("mode history is empty");
  if (series.size() < opts.min_samples)
    throw input_error("mode history needs at least " + std::to_string(opts.min_samples) +
                      " samples");
  const std::size_t n = series.size();
  std::size_t w = static_cast<std::size_t>(std::ceil(opts.window * n));
  w = std::max<std::size_t>(w, 2);
  bool neutral = true, unstable = true;
  for (std::size_t i = n - w; i < n; ++i) {
    const ModeState& s = series[i];
    if (!(s.uplus + s.uminus <= opts.threshold * s.uzero)) neutral = false;
    if (!(s.uzero + s.uminus <= opts.threshold * s.uplus)) unstable = false;
  }
  if (neutral && !unstable) return ModeDominance::neutral_dominant;
  if (unstable && !neutral) return ModeDominance::unstable_dominant;
  return ModeDominance::undetermined;
}

BetaRho beta_and_radius(const std::vector<double>& taus, const std::vector<double>& norms,
                        double tau) {
  if (taus.empty() || taus.size() != norms.size())
    throw input_error("beta needs matching tau and norm series");
  if (tau < taus.front()) throw input_error("tau precedes the recorded history");
  double beta = 0.0;
  for (std::size_t i = 0; i < taus.size() && taus[i] <= tau; ++i)
    beta = std::max(beta, norms[i]);
  return {beta, std::pow(beta, -0.2)};
}

}  // namespace cylflow
