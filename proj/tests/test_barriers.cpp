#include <doctest.h>

#include <cmath>

#include "cylflow/barriers.hpp"

using namespace cylflow;

TEST_CASE("shrinker profile meets the axis with a concave graph") {
  const double a = 9.0;
  const ShrinkerProfile p = solve_shrinker(a);
  CHECK(std::abs(p.endpoint - a) <= 1e-8 * a);
  CHECK(p.value(a) <= 1e-6);  // u_a(a) = 0
  CHECK(p.waist > constants::sqrt2);
  CHECK(p.waist < 2.0);
  CHECK(p.residual_fd <= 1e-8);
  CHECK(p.residual_fd_half <= 1e-8);
  CHECK(p.tolerance_gap <= 1e-8);

  // Concavity: discrete second differences stay below 1e-8.
  for (std::size_t i = 1; i + 1 < p.u.size(); ++i)
    CHECK(p.u[i + 1] - 2.0 * p.u[i] + p.u[i - 1] <= 1e-8);

  // The waist bound from the barrier argument.
  const double at_root = p.value(std::sqrt(a));
  CHECK(at_root * at_root >= 2.0 - 2.0 / a);
}

TEST_CASE("shrinker waist bound holds along the family") {
  for (double a : {9.0, 25.0, 100.0}) {
    const ShrinkerProfile p = solve_shrinker(a);
    const double at_root = p.value(std::sqrt(a));
    CHECK(at_root * at_root >= 2.0 - 2.0 / a);
    CHECK(std::abs(p.endpoint - a) <= 1e-8 * a);
  }
}

TEST_CASE("shrinkers foliate inside the cylinder beyond the core") {
  const ShrinkerProfile p9 = solve_shrinker(9.0);
  const ShrinkerProfile p25 = solve_shrinker(25.0);
  for (double r = 4.0; r <= 8.5; r += 0.25) CHECK(p9.value(r) < p25.value(r));
  for (double r = 4.0; r <= 8.5; r += 0.25) CHECK(p25.value(r) < constants::sqrt2);
}

TEST_CASE("profiles approach the quarter-circle limit as a grows") {
  auto sup_distance = [](const ShrinkerProfile& p) {
    double sup = 0.0;
    for (double r = 0.0; r <= p.a; r += p.a / 400.0) {
      const double limit = std::sqrt(std::max(0.0, 2.0 - 2.0 * r * r / (p.a * p.a)));
      sup = std::max(sup, std::abs(p.value(r) - limit));
    }
    return sup;
  };
  const double d100 = sup_distance(solve_shrinker(100.0));
  const double d400 = sup_distance(solve_shrinker(400.0));
  CHECK(d400 < d100);
}

TEST_CASE("upper barrier bound and its empirical reach") {
  const ShrinkerProfile p100 = solve_shrinker(100.0);
  const ShrinkerProfile p400 = solve_shrinker(400.0);
  const AdsUpperReport r100 = check_ads_upper(p100);
  const AdsUpperReport r400 = check_ads_upper(p400);
  // At r = 0 the bound sits above sqrt(2) and the profile below 2.
  CHECK(p100.value(0.0) <= constants::sqrt2 + 3.0 / (constants::sqrt2 * 1e4));
  CHECK(r100.m_emp < r400.m_emp);  // the validated reach grows with a
  CHECK(r100.m_emp >= std::sqrt(100.0));
}

TEST_CASE("rotated barrier enclosure verdicts") {
  const ShrinkerProfile p = solve_shrinker(9.0);
  auto grid = make_grid({2, 1}, 8.0, 49, 8);

  // The round sheet encloses the barrier with positive clearance.
  CylinderGraph sheet(grid, constants::sqrt2);
  const EnclosureVerdict ev = barrier_compare(sheet, {p, 0.0}, 4.0);
  CHECK(ev.enclosed);
  CHECK(ev.min_clearance > 0.0);

  // Self-comparison: the graph built from the barrier itself has zero
  // clearance.
  Field v(grid);
  for (int j1 = 0; j1 < grid->ny(); ++j1)
    for (int j2 = 0; j2 < grid->ny(); ++j2) {
      const double val = std::max(p.value(grid->flat_radius(j1, j2)), 1e-3);
      const std::size_t base = grid->index(j1, j2, 0);
      for (int t = 0; t < grid->ntheta(); ++t) v.v[base + t] = val;
    }
  const EnclosureVerdict self = barrier_compare(CylinderGraph(v), {p, 0.0}, 4.0);
  CHECK(self.enclosed);
  CHECK(self.min_clearance == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  // A shifted barrier compares against u_a(r + eta) <= u_a(r).
  const EnclosureVerdict shifted = barrier_compare(sheet, {p, 0.5}, 4.0);
  CHECK(shifted.min_clearance >= ev.min_clearance);

  CHECK_THROWS_AS(barrier_compare(sheet, {p, 0.0}, 20.0), input_error);
}

TEST_CASE("bowl translator profile") {
  const double c = 1.0 / constants::sqrt2;
  const BowlProfile p = solve_bowl(c);
  CHECK(p.residual_fd <= 1e-8);
  CHECK(p.residual_fd_half <= 1e-8);
  CHECK(p.hp.front() <= 1e-3);  // h'(0) ~ 0
  for (std::size_t i = 1; i < p.hp.size(); ++i) CHECK(p.hp[i] >= p.hp[i - 1] - 1e-12);  // convex
  for (std::size_t i = 1; i < p.h.size(); ++i) CHECK(p.h[i] > p.h[i - 1]);  // increasing

  // Far-field growth h ~ c r^2 / 2.
  const double r_far = 1000.0;
  CHECK(p.value(r_far) / (c * r_far * r_far / 2.0) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("bowl rescaling law") {
  // h_c(r) = (1/c) h_1(c r), exact for the equation; verified to 1e-8.
  const double c = 1.0 / constants::sqrt2;
  BowlOptions small;
  small.r_max = 50.0;
  const BowlProfile pc = solve_bowl(c, small);
  BowlOptions unit;
  unit.r_max = 50.0;
  const BowlProfile p1 = solve_bowl(1.0, unit);
  double worst = 0.0;
  for (double r = 0.2; r <= 30.0; r += 0.7)
    worst = std::max(worst, std::abs(pc.value(r) - p1.value(c * r) / c));
  CHECK(worst <= 1e-8);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(solve_shrinker(2.0), config_error);
  CHECK_THROWS_AS(solve_bowl(-1.0), config_error);
}
