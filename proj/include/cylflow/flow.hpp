#pragma once

#include <functional>
#include <optional>

#include "cylflow/geometry.hpp"
#include "cylflow/modes.hpp"
#include "cylflow/spectral.hpp"

namespace cylflow {

enum class BoundaryPolicy {
  dirichlet_mode,  // ring values from the mode-dynamics prediction
  neumann,         // even reflection (zero normal derivative)
  free_ends,       // one-sided stencils only, nothing imposed
};

// State of one renormalized-flow simulation.
struct FlowState {
  double tau = 0.0;
  CylinderGraph graph;
};

// Dirichlet ring data: v = sqrt(2) + y^T M(tau) y - 2 tr M(tau), where
// M(tau) is the closed-form mode prediction seeded at (tau0, M0).
struct ModeBoundary {
  AlphaState seed;  // coefficients at tau0
  double value(double y1, double y2, double tau) const;
};

struct StepContext {
  BoundaryPolicy policy = BoundaryPolicy::dirichlet_mode;
  std::optional<ModeBoundary> boundary;
  GeometryWorkspace ws;
  Field k1, k2, k3, k4, stage;
};

// Largest admissible explicit step for the grid (the c * min(dy^2, (sqrt(2)
// dtheta)^2) bound with c = 0.2).
double cfl_limit(const Grid& g);

// Stability-driven step used by the driver: also respects the angular arc
// spacing of the current smallest radius.
double suggested_step(const Grid& g, double vmin, double cfl_factor);

// One classical RK4 step; boundary values are re-imposed after every stage.
// Throws config_error for non-positive dtau or a CFL violation, and
// blowup_error if the radius leaves (0, inf).
FlowState step(const FlowState& s, double dtau, StepContext& ctx);

struct HistoryRecord {
  double tau = 0.0;
  ModeState modes;
  double S = 0.0, D = 0.0, x = 0.0, y = 0.0;
  double F_total = 0.0, F_interior = 0.0, F_tail = 0.0;
  double theta_defect = 0.0;
  double unorm = 0.0;  // |u_hat|_H
  std::optional<Field> snapshot;
};

struct FlowHistory {
  std::vector<HistoryRecord> records;
  bool partial = false;
  std::string blowup_note;

  std::vector<ModeState> mode_series() const;
  std::vector<double> taus() const;
  std::vector<double> norms() const;
};

struct GaussianArea {
  double interior = 0.0;
  double tail = 0.0;
  double total() const { return interior + tail; }
};

// Gaussian area of the embedded graph over the truncated box, with the tail
// beyond the box estimated by the round-cylinder value.
GaussianArea gaussian_area(const CylinderGraph& g);

struct RunConfig {
  double tau0 = -200.0;
  double tau1 = -180.0;
  double sample_stride = 2.0;
  double cfl_factor = 0.1;
  std::optional<double> fixed_dtau;
  BoundaryPolicy policy = BoundaryPolicy::dirichlet_mode;
  std::optional<ModeBoundary> boundary;
  double rho0 = 12.0;
  double defect_radius = 4.0;
  bool store_snapshots = false;
};

// Integrates the flow from (tau0, initial) to tau1 recording diagnostics at
// every sample. On blow-up the history is truncated and flagged partial.
FlowHistory run_flow(const CylinderGraph& initial, const RunConfig& cfg,
                     const SheetDiagnostics& diag);

}  // namespace cylflow
