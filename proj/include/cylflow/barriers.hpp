#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cylflow/grid.hpp"

namespace cylflow {

// Self-shrinking surface of revolution with boundary: profile r = u_a(y) on
// [0, a], u_a(a) = 0, solving  u''/(1+u'^2) - 1/u + (u - y u')/2 = 0.
// Obtained by shooting from the waist (u(0) = u0, u'(0) = 0) and bisecting
// u0 so the profile meets the axis at y = a. Near the tip the integration
// runs in the inverse chart y(v), where the equation is regular.
struct ShrinkerProfile {
  double a = 0.0;
  double waist = 0.0;  // u_a(0)
  // Uniform graph-chart samples on [0, y_graph_end].
  std::vector<double> y, u, up;
  // Tip chart: y as a function of v on [0, v_swap], v decreasing to 0.
  std::vector<double> tip_v, tip_y, tip_dydv;
  double endpoint = 0.0;       // y(v=0)
  double residual_fd = 0.0;    // max FD residual over the waist region
  double residual_fd_half = 0.0;  // same at half the sampling step
  double tolerance_gap = 0.0;  // max profile change between solver tolerances

  // Profile value at radius r in [0, a] (graph chart + tip chart).
  double value(double r) const;
};

struct ShrinkerOptions {
  double v_swap = 0.1;          // chart-swap radius
  double sample_step = 0.1;     // uniform graph-chart sampling
  double endpoint_rel_tol = 1e-8;
  double rtol = 1e-12;
};

ShrinkerProfile solve_shrinker(double a, const ShrinkerOptions& opts = {});

// Largest sampled radius M such that u_a(r) <= sqrt(2) - (r^2-3)/(sqrt(2)a^2)
// holds on [0, M], with the first violation reported when one exists.
struct AdsUpperReport {
  double m_emp = 0.0;
  bool holds_everywhere = false;
  std::optional<double> first_crossing;
};
AdsUpperReport check_ads_upper(const ShrinkerProfile& p);

// Shifted rotated barrier: at flat radius r the barrier circle has radius
// u_a(r + eta); the flow encloses it when v > that value on the sampled
// annulus. eta = 0 is the unshifted barrier.
struct RotatedBarrier {
  ShrinkerProfile profile;
  double eta = 0.0;
};

struct EnclosureVerdict {
  bool enclosed = false;
  double min_clearance = 0.0;
  double r_lo = 0.0, r_hi = 0.0;  // annulus actually sampled
  std::size_t nodes_checked = 0;
};

// Samples all grid nodes with L0 <= |(y1,y2)| <= min(a - eta, R).
EnclosureVerdict barrier_compare(const CylinderGraph& g, const RotatedBarrier& b,
                                 double L0 = 4.0);

// Rotationally symmetric graphical translator (2d bowl) with speed c:
//   h''/(1+h'^2) + h'/r = c,  h(0) = 0, h'(0) = 0,
// started from the series h = c r^2/4 + c^3 r^4/128 at the removable
// singularity.
struct BowlProfile {
  double c = 0.0;
  std::vector<double> r, h, hp;
  double residual_fd = 0.0;
  double residual_fd_half = 0.0;

  double value(double radius) const;
};

struct BowlOptions {
  double r_max = 1000.0;
  double sample_step = 0.05;
  double rtol = 1e-12;
};

BowlProfile solve_bowl(double c, const BowlOptions& opts = {});

}  // namespace cylflow
