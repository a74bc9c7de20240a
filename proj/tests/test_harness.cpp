#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cylflow/harness.hpp"

using namespace cylflow;

namespace {

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

ScenarioConfig small_cylinder(const std::string& dir) {
  ScenarioConfig cfg = scenario_preset(ScenarioKind::cylinder);
  cfg.tau0 = -50.0;
  cfg.tau1 = -48.0;
  cfg.R = 5.0;
  cfg.ny = 33;
  cfg.ntheta = 8;
  cfg.sample_stride = 0.2;
  cfg.out_dir = dir;
  return cfg;
}

}  // namespace

TEST_CASE("csv io round-trips and is byte-deterministic") {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{1.0, -0.125}, {3.14159265358979, std::nan("")}, {1e-300, 2e222}};
  const std::string p1 = "test_csv_1.csv", p2 = "test_csv_2.csv";
  write_csv(p1, t);
  write_csv(p2, t);
  CHECK(read_bytes(p1) == read_bytes(p2));
  const CsvTable back = read_csv(p1);
  CHECK(back.header == t.header);
  REQUIRE(back.rows.size() == t.rows.size());
  CHECK(back.rows[0][1] == -0.125);
  CHECK(std::isnan(back.rows[1][1]));
  CHECK(back.rows[2][0] == 1e-300);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("scenario json round-trip keeps the configuration") {
  ScenarioConfig cfg = scenario_preset(ScenarioKind::rank1_rotated_seed);
  cfg.phi0 = 0.321;
  cfg.perturb.amplitude = 1e-4;
  cfg.perturb.psi[3] = 0.25;
  const json j = scenario_to_json(cfg);
  const ScenarioConfig back = parse_scenario(j);
  CHECK(back.kind == cfg.kind);
  CHECK(back.phi0 == cfg.phi0);
  CHECK(back.tau0 == cfg.tau0);
  CHECK(back.perturb.psi[3] == 0.25);
  CHECK(back.validators.expect_rank == cfg.validators.expect_rank);
}

TEST_CASE("seed construction matches the inward-bending convention") {
  ScenarioConfig cfg = scenario_preset(ScenarioKind::rank2_seed);
  const AlphaState a = cfg.seed_alpha();
  // tau * u0 must equal the nonnegative quadratic (y^2 - 4)/sqrt(8):
  // coefficients are negative for tau < 0.
  CHECK(a.a1 < 0.0);
  CHECK(a.a1 == doctest::Approx(1.0 / (constants::sqrt8 * cfg.tau0)).epsilon(1e-14));

  auto grid = make_grid({2, 1}, 6.0, 17, 4);
  CylinderGraph g = build_initial(cfg, grid);
  // v > 0 held by construction; spot-check the formula at a node.
  const double y1 = grid->y(3), y2 = grid->y(5);
  const double want = constants::sqrt2 +
                      (y1 * y1 + y2 * y2 - 4.0) / (constants::sqrt8 * cfg.tau0);
  CHECK(g.radius.v[grid->index(3, 5, 0)] == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("cylinder scenario: everything quiet, rank 0") {
  ScenarioConfig cfg = small_cylinder("test_out_cyl");
  const ExperimentResult res = run_experiment(cfg);
  CHECK(res.passed);
  REQUIRE_FALSE(res.history.records.empty());
  for (const auto& r : res.history.records) {
    CHECK(std::abs(r.modes.alpha[0]) <= 1e-10);
    CHECK(r.modes.uplus <= 1e-20);
    CHECK(r.theta_defect <= 1e-10);
  }
  const json& q = res.report["validators"]["quantization"]["details"];
  CHECK(q["rank"].get<int>() == 0);
  std::filesystem::remove_all("test_out_cyl");
}

TEST_CASE("scenario runs are byte-deterministic") {
  ScenarioConfig cfg = small_cylinder("test_out_det1");
  cfg.perturb.amplitude = 1e-3;
  cfg.perturb.psi[0] = 1.0;
  cfg.perturb.psi[2] = 0.5;
  run_experiment(cfg);
  const std::string h1 = read_bytes("test_out_det1/history.csv");
  cfg.out_dir = "test_out_det2";
  run_experiment(cfg);
  const std::string h2 = read_bytes("test_out_det2/history.csv");
  CHECK(h1 == h2);
  std::filesystem::remove_all("test_out_det1");
  std::filesystem::remove_all("test_out_det2");
}

TEST_CASE("history csv matches the records that produced it") {
  ScenarioConfig cfg = small_cylinder("test_out_hist");
  cfg.perturb.amplitude = 5e-4;
  cfg.perturb.psi[1] = 1.0;
  const ExperimentResult res = run_experiment(cfg);
  const CsvTable t = read_csv(res.history_path);
  REQUIRE(t.rows.size() == res.history.records.size());
  const auto series = mode_series_from_table(t);
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(series[i].tau == res.history.records[i].tau);
    CHECK(series[i].alpha[1] == res.history.records[i].modes.alpha[1]);
  }
  // x and y columns are the rescaled trace/determinant of the alpha columns.
  const std::size_t cx = t.column("x"), cS = t.column("S"), ct = t.column("tau");
  for (const auto& row : t.rows)
    CHECK(row[cx] == doctest::Approx(constants::sqrt2 * row[ct] * row[cS]).epsilon(1e-12));
  std::filesystem::remove_all("test_out_hist");
}

TEST_CASE("parabolic validator separates the seed ranks") {
  // Exact ansatz input has zero error; a rank-1 history keeps an order-one
  // error against the rank-2 ansatz.
  auto grid = make_grid({2, 1}, 6.0, 33, 4);
  const double tau = -60.0;
  FlowHistory hist;
  for (ScenarioKind kind : {ScenarioKind::rank2_seed, ScenarioKind::rank1_seed}) {
    ScenarioConfig cfg = scenario_preset(kind);
    cfg.tau0 = tau;
    HistoryRecord rec;
    rec.tau = tau;
    rec.snapshot = build_initial(cfg, grid).radius;
    hist.records.push_back(std::move(rec));
  }
  const ParabolicSeries series = validate_parabolic(hist, 4.0);
  CHECK(series.sup_error[0] <= 1e-12);
  CHECK(series.sup_error[1] >= 0.5);  // differs by (y1^2-2)/sqrt(8) on |y| <= 4
}

TEST_CASE("intermediate validator vanishes on the exact profile") {
  auto grid = make_grid({2, 1}, 6.0, 49, 4);
  const double tau = -30.0;
  Field v(grid, 1.0);
  for (int j1 = 0; j1 < grid->ny(); ++j1)
    for (int j2 = 0; j2 < grid->ny(); ++j2) {
      const double z2 = std::pow(grid->flat_radius(j1, j2), 2) / std::abs(tau);
      const double val = std::sqrt(std::max(2.0 - z2, 0.04));
      const std::size_t base = grid->index(j1, j2, 0);
      for (int t = 0; t < grid->ntheta(); ++t) v.v[base + t] = val;
    }
  FlowHistory hist;
  HistoryRecord rec;
  rec.tau = tau;
  rec.snapshot = v;
  hist.records.push_back(std::move(rec));
  const IntermediateSeries s = validate_intermediate(hist, 1.0);
  CHECK(s.sup_deviation[0] <= 1e-12);
  CHECK(s.full_coverage[0]);  // sqrt(30) < 6

  // z = 0 consistency: with the parabolic ansatz instead, the deviation at
  // the origin is |u(0)| = 4/(sqrt(8)|tau|).
  ScenarioConfig cfg = scenario_preset(ScenarioKind::rank2_seed);
  cfg.tau0 = tau;
  FlowHistory hist2;
  HistoryRecord rec2;
  rec2.tau = tau;
  rec2.snapshot = build_initial(cfg, grid).radius;
  hist2.records.push_back(std::move(rec2));
  const IntermediateSeries s2 = validate_intermediate(hist2, 1e-9);
  CHECK(s2.sup_deviation[0] ==
        doctest::Approx(4.0 / (constants::sqrt8 * std::abs(tau))).epsilon(1e-6));
}

TEST_CASE("tip validator recognizes the exact asymptotics") {
  std::vector<double> t, d, H;
  for (double s = -1e8; s <= -1e6; s += 2e6) {
    t.push_back(s);
    d.push_back(std::sqrt(2.0 * std::abs(s) * std::log(std::abs(s))));
    H.push_back(std::sqrt(std::log(std::abs(s)) / std::abs(s)) / constants::sqrt2);
  }
  const TipVerdict v = validate_tip(t, d, H);
  CHECK(v.diameter_ratio_mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v.diameter_ratio_residual <= 1e-12);
  CHECK(v.curvature_ratio_mean == doctest::Approx(1.0 / constants::sqrt2).epsilon(1e-12));

  CHECK_THROWS_AS(validate_tip({-1, -2}, {1, 2}, {1, 2}), input_error);
}

TEST_CASE("phase portrait table has the documented shape") {
  const int density = 12;
  const CsvTable t = phase_portrait_table(Box{}, density);
  REQUIRE(t.header.size() == 5);
  std::size_t lattice = 0, connector = 0;
  for (const auto& row : t.rows) {
    if (row[4] == 0.0) ++lattice;
    if (row[4] == 1.0) ++connector;
    // Rates are the vector field evaluated at the point.
    const auto v = phase_vector_field(row[0], row[1]);
    CHECK(row[2] == v[0]);
    CHECK(row[3] == v[1]);
  }
  CHECK(lattice == static_cast<std::size_t>(density) * density);
  CHECK(connector > 10);
  CHECK(t.rows.size() > lattice + connector);  // extra sampled trajectories
}

TEST_CASE("unknown scenario names are rejected") {
  CHECK_THROWS_AS(scenario_from_name("squircle"), input_error);
  json j;
  j["scenario"] = "rank2_seed";
  j["seed"] = {{"alpha0", {1.0, 2.0}}};
  CHECK_THROWS_AS(parse_scenario(j), input_error);
}
