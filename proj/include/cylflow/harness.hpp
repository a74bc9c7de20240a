#pragma once

#include <nlohmann/json.hpp>

#include "cylflow/barriers.hpp"
#include "cylflow/csvio.hpp"
#include "cylflow/flow.hpp"

namespace cylflow {

using json = nlohmann::json;

enum class ScenarioKind {
  cylinder,
  rank2_seed,
  rank1_seed,
  rank1_rotated_seed,
  unstable_seed,
  custom,
};

ScenarioKind scenario_from_name(const std::string& name);
std::string scenario_name(ScenarioKind k);

struct Perturbation {
  double amplitude = 0.0;
  std::array<double, n_neutral> psi{};       // coefficients on psi_1..psi_7
  std::array<double, n_unstable> unstable{}; // coefficients on 1, y1, y2, cos, sin
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::cylinder;
  double tau0 = -200.0;
  double tau1 = -180.0;
  double R = 8.0;
  int ny = 96;
  int ntheta = 32;
  double cfl_factor = 0.1;
  std::optional<double> dtau;
  BoundaryPolicy policy = BoundaryPolicy::dirichlet_mode;
  double rho0 = 0.0;  // 0 = default 1.5 R
  double sample_stride = 2.0;
  double phi0 = constants::pi / 6.0;  // rotation of the rank-1 rotated seed
  double unstable_eps = 1e-3;
  std::array<double, 3> alpha0{};  // custom seed coefficients at tau0
  Perturbation perturb;
  bool store_snapshots = true;
  std::string out_dir = ".";
  std::string history_name = "history.csv";
  std::string validators_name = "validators.csv";
  std::string report_name = "report.json";

  struct Validators {
    bool f_monotone = true;
    double f_slack = 1e-8;
    std::string expect_dominance;  // "", "neutral-dominant", "unstable-dominant"
    bool alpha_track = false;
    double alpha_rel_tol = 0.10;
    double alpha3_abs = 1e-3;
    bool parabolic = false;
    double parabolic_R_check = 4.0;
    double parabolic_tol = 0.1;
    bool intermediate = false;
    double intermediate_tol = 0.15;
    double intermediate_checkpoint_min = -40.0;
    bool barrier = false;
    double barrier_a = 9.0;
    double barrier_eta = 0.0;
    double barrier_L0 = 4.0;
    bool theta = false;
    double theta_max = 1e-10;
    int expect_rank = -2;  // -2 = not checked
    double expect_phi = -1.0;
    double phi_tol = 0.0349;  // 2 degrees
  } validators;

  double effective_rho0() const { return rho0 > 0.0 ? rho0 : 1.5 * R; }
  AlphaState seed_alpha() const;
};

ScenarioConfig scenario_preset(ScenarioKind kind);
ScenarioConfig parse_scenario(const json& j);
json scenario_to_json(const ScenarioConfig& cfg);

// Initial graph: v = sqrt(2) + quadratic(seed matrix) + perturbation.
CylinderGraph build_initial(const ScenarioConfig& cfg, GridPtr grid);

// History CSV schema (fixed): tau, alpha1..alpha7, Uplus, U0, Uminus, S, D,
// x, y, F, theta_defect.
CsvTable history_table(const FlowHistory& hist);
std::vector<ModeState> mode_series_from_table(const CsvTable& t);

struct ValidatorOutcome {
  std::string name;
  bool enabled = false;
  bool passed = true;
  json details;
};

struct ExperimentResult {
  FlowHistory history;
  std::vector<ValidatorOutcome> outcomes;
  json report;
  bool passed = true;
  std::string history_path, validators_path, report_path;
};

ExperimentResult run_experiment(const ScenarioConfig& cfg);

// Per-sample sup over |(y1,y2)| <= R_check of |tau u - (y1^2+y2^2-4)/sqrt(8)|.
struct ParabolicSeries {
  std::vector<double> tau;
  std::vector<double> sup_error;
};
ParabolicSeries validate_parabolic(const FlowHistory& hist, double R_check);

// Per-sample sup over the sampled z-set {|z|^2 <= z2_max} of
// |sqrt(2) + u(sqrt(|tau|) z) - sqrt(2 - |z|^2)|, with coverage clamped to
// the grid and flagged when partial.
struct IntermediateSeries {
  std::vector<double> tau;
  std::vector<double> sup_deviation;
  std::vector<bool> full_coverage;
  double z2_max = 1.0;
};
IntermediateSeries validate_intermediate(const FlowHistory& hist, double z2_max = 1.0);

// Fits of externally supplied tip series against the model asymptotics
// d(t) = sqrt(2|t| log|t|) and H = sqrt(|t|^{-1} log|t|)/sqrt(2).
struct TipVerdict {
  double diameter_ratio_mean = 0.0;
  double diameter_ratio_residual = 0.0;
  double curvature_ratio_mean = 0.0;
  double curvature_ratio_residual = 0.0;
};
TipVerdict validate_tip(const std::vector<double>& t, const std::vector<double>& d,
                        const std::vector<double>& H);

// Phase-portrait data file: density^2 lattice rows plus sampled
// trajectories (the heteroclinic connector first). Columns x,y,xp,yp,kind.
CsvTable phase_portrait_table(const Box& box, int density);

}  // namespace cylflow
