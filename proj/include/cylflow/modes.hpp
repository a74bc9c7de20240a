#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cylflow/common.hpp"

namespace cylflow {

// Spectral coefficients (alpha_1, alpha_2, alpha_3) of the neutral quadratic
// modes psi_1, psi_2, psi_3 at a renormalized time tau.
struct AlphaState {
  double a1 = 0.0, a2 = 0.0, a3 = 0.0;
  double tau = 0.0;
};

// Trace and determinant of the coefficient matrix [[a1,a3],[a3,a2]].
struct TraceDet {
  double S, D;
};
inline TraceDet trace_det(const AlphaState& s) {
  return {s.a1 + s.a2, s.a1 * s.a2 - s.a3 * s.a3};
}

// Rescaled phase coordinates (defined for tau < 0):
//   x = sqrt(2) tau S,  y = 8 tau^2 D,  sigma = -log(-tau).
struct PhasePoint {
  double x, y, sigma;
};
PhasePoint phase_point(const AlphaState& s);

// Idealized spectral ODE rates (error terms dropped):
//   a1' = -sqrt(8)(a1^2 + a3^2)
//   a2' = -sqrt(8)(a2^2 + a3^2)
//   a3' = -sqrt(8)(a1 + a2) a3
std::array<double, 3> spectral_rhs(const AlphaState& s);

// Conjugates the coefficient matrix by the rotation R(phi).
AlphaState rotate_state(const AlphaState& s, double phi);

// Closed-form solution of the matrix Riccati equation M' = -sqrt(8) M^2:
// coefficients at tau given the coefficients at tau0.
AlphaState exact_mode_solution(const AlphaState& s0, double tau);

// Autonomous phase-plane vector field V(x,y) = (2x^2 - x - y, 2xy - 2y).
std::array<double, 2> phase_vector_field(double x, double y);
std::array<double, 4> phase_jacobian(double x, double y);  // row-major 2x2

struct Box {
  double xlo = 0.25, xhi = 1.5, ylo = -0.25, yhi = 1.5;
  bool contains(double x, double y) const {
    return x >= xlo && x <= xhi && y >= ylo && y <= yhi;
  }
};

// Newton search for zeros of V inside the box, seeded from a coarse lattice.
std::vector<std::array<double, 2>> find_phase_zeros(const Box& box, int density = 12);

struct ModeTrajectory {
  std::vector<double> tau;
  std::vector<AlphaState> states;
};

struct IntegrateOptions {
  double rtol = 1e-9;
  double atol = 1e-14;
  int samples = 400;          // log-spaced in |tau|
  double noise_delta = 0.0;   // bounded forcing of size delta/tau^2
};

// Integrates the spectral ODEs from s0.tau to tau1 (< 0), sampling at
// geometrically spaced tau. With noise_delta > 0 a fixed quasi-periodic
// forcing of magnitude delta/tau^2 is added to probe robustness of the
// quantized limits.
ModeTrajectory integrate_modes(const AlphaState& s0, double tau1,
                               const IntegrateOptions& opts = {});

// The limit matrix |tau| * [[a1,a3],[a3,a2]] with eigenvalues snapped to
// {0, -1/sqrt(8)}.
struct QuantizationMatrix {
  std::array<double, 3> q{};          // q11, q22, q12 of the scaled limit
  std::array<double, 2> eigs_raw{};
  std::array<double, 2> eigs_snapped{};
  double snap_distance = 0.0;         // max |raw - snapped|
  int rank = -1;                      // -1 when undetermined
  bool settled = false;
  double phi = 0.0;                   // rotation angle for rank 1, in [0, pi)
  double rdot_scaled_bound = 0.0;     // sup |phi'| * |tau| over the window
  std::string note;
};

struct ClassifyOptions {
  double window = 0.25;       // trailing fraction of samples
  double settle_tol = 0.05;   // relative variation allowed over the window
  double snap_tol = 0.02;     // max distance of scaled eigenvalues to {0, -1/sqrt8}
};

QuantizationMatrix classify_Q(const ModeTrajectory& traj, const ClassifyOptions& opts = {});

// Probes the phase-plane dichotomy: the heteroclinic orbit from (1,1) to
// (1/2,0) exists, and no sampled trajectory realizes the reverse connection.
struct SeparatrixReport {
  bool connector_reached = false;
  double connector_endpoint_error = 1.0;
  std::array<double, 2> jacobian_eigs_saddle{};  // at (1/2, 0)
  std::array<double, 2> jacobian_eigs_source{};  // at (1, 1)
  int reverse_attempts = 0;
  int reverse_reached_source = 0;  // must stay 0
  int reverse_exited_box = 0;
  bool passed = false;
};

struct SeparatrixOptions {
  int reverse_samples = 100;
  double perturbation = 1e-2;
  double ball_radius = 1e-3;
  double sigma_budget = 200.0;
  Box box{};
};

SeparatrixReport separatrix_check(const SeparatrixOptions& opts = {});

}  // namespace cylflow
