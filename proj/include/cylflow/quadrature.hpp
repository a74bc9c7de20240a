#pragma once

#include <vector>

#include "cylflow/common.hpp"

namespace cylflow {

// Nodes and weights for  int_R f(y) exp(-y^2/4) dy,  exact for polynomials
// of degree <= 2n-1. Built from the physicists' Gauss-Hermite rule by the
// substitution y = 2x. Construction self-tests against the closed-form
// moments 2^(j+1) sqrt(pi) (2j-1)!! and refuses to return a rule that
// misses them.
struct GaussianRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussianRule1D(int n);
  int degree_exact() const { return 2 * static_cast<int>(nodes.size()) - 1; }
};

// Closed-form moment  int_R y^j exp(-y^2/4) dy.
double gaussian_moment(int j);

// Gregory-corrected trapezoid weights (4th order) for a uniform grid with n
// nodes and spacing h: h * [3/8, 7/6, 23/24, 1, ..., 1, 23/24, 7/6, 3/8].
std::vector<double> gregory_weights(int n, double h);

// Inner product on the round cylinder R^2 x S^1(sqrt(2)):
//   <f,g> = (4 pi)^(-3/2) int_Gamma f g exp(-|q|^2/4) dq.
// The theta-independent reduction carries the prefactor (8 e pi)^(-1/2).
// Functions are evaluated at tensor Gauss nodes times a uniform angular
// rule with `ntheta` nodes (trigonometric degree ntheta-1).
class SheetQuadrature {
 public:
  SheetQuadrature(int nflat, int ntheta);

  // f(y1, y2, theta)
  template <class F, class G>
  double inner(const F& f, const G& g) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule_.nodes.size(); ++i)
      for (std::size_t j = 0; j < rule_.nodes.size(); ++j) {
        const double y1 = rule_.nodes[i], y2 = rule_.nodes[j];
        double at = 0.0;
        for (int t = 0; t < ntheta_; ++t) {
          const double th = theta_[t];
          at += f(y1, y2, th) * g(y1, y2, th);
        }
        acc += rule_.weights[i] * rule_.weights[j] * at / ntheta_;
      }
    return prefactor_ * acc;
  }

  template <class F>
  double norm2(const F& f) const {
    return inner(f, f);
  }

  int ntheta() const { return ntheta_; }
  const GaussianRule1D& flat_rule() const { return rule_; }
  // (8 e pi)^(-1/2)
  static double reduced_prefactor();

 private:
  GaussianRule1D rule_;
  int ntheta_;
  std::vector<double> theta_;
  double prefactor_;
};

// The low part of the spectrum of the drift Laplacian at the round sheet:
// index 0..4 span the unstable space (eigenvalues 1, 1/2, 1/2, 1/2, 1/2),
// index 5..11 the neutral space (psi_1..psi_7).
inline constexpr int n_unstable = 5;
inline constexpr int n_neutral = 7;
inline constexpr int n_low_modes = 12;

double low_mode(int which, double y1, double y2, double theta);
double low_mode_eigenvalue(int which);

}  // namespace cylflow
