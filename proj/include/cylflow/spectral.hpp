#pragma once

#include <array>
#include <optional>

#include "cylflow/grid.hpp"
#include "cylflow/quadrature.hpp"

namespace cylflow {

// Cutoff used to build the truncated deviation u_hat = u * chi(|y|/rho).
// chi is 1 on [0,1/2], 0 on [1,inf), and the quintic smoothstep
// 1 - t^3 (10 - 15 t + 6 t^2), t = 2s-1, in between. This exact polynomial
// is part of the file-format contract: u_hat is reproducible bit-for-bit.
double chi(double s);

Field truncate(const Field& u, double rho);

// Spectral content of a truncated deviation: the seven neutral coefficients
// (def: alpha_j = <psi_j, u_hat> / |psi_j|^2) and the squared norms of the
// projections onto the unstable span, the neutral span, and the rest.
struct ModeState {
  double tau = 0.0;
  std::array<double, n_neutral> alpha{};  // alpha_1..alpha_7
  double uplus = 0.0;   // U_+
  double uzero = 0.0;   // U_0
  double uminus = 0.0;  // U_- (norm^2 complement, floored at 0)
  double norm2 = 0.0;   // |u_hat|^2

  double trace() const { return alpha[0] + alpha[1]; }
  double det() const { return alpha[0] * alpha[1] - alpha[2] * alpha[2]; }
};

// Grid realization of the Gaussian inner product on the sheet, plus the
// tabulated low modes and their Gram factors. Weights are Gregory-corrected
// trapezoid in the flat directions (the Gaussian factor makes the box
// truncation error negligible) and exact uniform in the angle.
class SheetDiagnostics {
 public:
  SheetDiagnostics(GridPtr grid, double rho0);

  const Grid& grid() const { return *grid_; }
  double rho0() const { return rho0_; }

  double inner(const Field& f, const Field& g) const;
  double norm2(const Field& f) const { return inner(f, f); }

  // u is the untruncated deviation; the state is computed from u*chi(|y|/rho0).
  ModeState mode_state(const Field& u, double tau) const;
  ModeState mode_state_truncated(const Field& uhat, double tau) const;

  double low_mode_norm2(int which) const { return mode_norm2_[which]; }
  const Field& low_mode_field(int which) const { return modes_[which]; }
  const Field& chi_field() const { return chi_; }

 private:
  GridPtr grid_;
  double rho0_;
  std::vector<double> flat_weight_;  // per (j1,j2): gregory x gregory x gaussian x prefactor
  std::vector<Field> modes_;
  Field chi_;
  std::array<double, n_low_modes> mode_norm2_{};
  // Cholesky factors of the Gram matrices of the unstable / neutral spans.
  std::array<double, n_unstable * n_unstable> gram_plus_{};
  std::array<double, n_neutral * n_neutral> gram_zero_{};
};

// sup of |u_theta| over the nodes with |(y1,y2)| <= radius.
double theta_defect(const Field& u, double radius);

enum class ModeDominance { neutral_dominant, unstable_dominant, undetermined };

struct MerleZaagOptions {
  double threshold = 0.2;     // dominance ratio bound
  double window = 0.25;       // trailing fraction of samples examined
  std::size_t min_samples = 10;
};

// Windowed finite-horizon proxy for the Merle-Zaag alternative: a mode is
// dominant when the complementary energy ratio stays below `threshold` over
// the trailing window.
ModeDominance merle_zaag_classify(const std::vector<ModeState>& series,
                                  const MerleZaagOptions& opts = {});

// beta(tau) = sup over recorded sigma <= tau of |u_hat(sigma)|_H, and the
// graphical radius rho = beta^(-1/5).
struct BetaRho {
  double beta;
  double rho;
};
BetaRho beta_and_radius(const std::vector<double>& taus, const std::vector<double>& norms,
                        double tau);

}  // namespace cylflow
