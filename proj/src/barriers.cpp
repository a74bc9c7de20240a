#include "cylflow/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cylflow/ode.hpp"

namespace cylflow {

namespace {

// Graph-chart shrinker system: state (v, p), p = v'.
inline void shrinker_rhs(double y, const std::array<double, 2>& s, std::array<double, 2>& out) {
  const double v = s[0], p = s[1];
  out[0] = p;
  out[1] = (1.0 + p * p) * (1.0 / v - 0.5 * (v - y * p));
}

// Tip-chart system in v: state (y, q), q = dy/dv. Regular down to v = 0.
inline void tip_rhs(double v, const std::array<double, 2>& s, std::array<double, 2>& out) {
  const double y = s[0], q = s[1];
  out[0] = q;
  out[1] = -q * (1.0 + q * q) * (1.0 / v - 0.5 * v) - 0.5 * y * (1.0 + q * q);
}

struct Shot {
  double y_swap = 0.0;  // where v reaches v_swap
  double v_swap = 0.0;
  double p_swap = 0.0;
  double endpoint = 0.0;  // y at v = 0
  bool hit = false;
};

Shot shoot(double u0, double v_swap, double y_budget, double rtol) {
  Shot shot;
  OdeOptions oo;
  oo.rtol = rtol;
  oo.atol = 1e-14;
  std::array<double, 2> at_swap{};
  double y_at = 0.0;
  integrate_dopri5<2>(shrinker_rhs, {u0, 0.0}, 0.0, y_budget, oo,
                      [&](double y, const std::array<double, 2>& s) {
                        if (s[0] <= v_swap) {
                          at_swap = s;
                          y_at = y;
                          shot.hit = true;
                          return false;
                        }
                        return true;
                      });
  if (!shot.hit) return shot;
  shot.y_swap = y_at;
  shot.v_swap = at_swap[0];
  shot.p_swap = at_swap[1];
  // Continue in the tip chart from (v, y, dy/dv = 1/p) down to v = 0.
  std::array<double, 2> tip = {y_at, 1.0 / at_swap[1]};
  std::array<double, 2> last = tip;
  integrate_dopri5<2>(tip_rhs, tip, at_swap[0], 0.0, oo,
                      [&](double, const std::array<double, 2>& s) {
                        last = s;
                        return true;
                      });
  shot.endpoint = last[0];
  return shot;
}

double hermite_eval(const std::vector<double>& xs, const std::vector<double>& fs,
                    const std::vector<double>& dfs, double x) {
  if (xs.size() < 2) throw solver_error("profile has too few samples to interpolate");
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = (it == xs.begin()) ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  i = std::min(i, xs.size() - 2);
  const double h = xs[i + 1] - xs[i];
  const double t = (x - xs[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * fs[i] + h10 * h * dfs[i] + h01 * fs[i + 1] + h11 * h * dfs[i + 1];
}

// Max defect of the first-order system under 6th-order differentiation of
// the sampled (v, p) pair, restricted to samples where mask(i) holds.
template <class Rhs, class Mask>
double fd_defect(const std::vector<double>& x, const std::vector<double>& v,
                 const std::vector<double>& p, const Rhs& rhs, const Mask& mask) {
  static const double c[7] = {-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0};
  if (x.size() < 7) return 0.0;
  const double h = x[1] - x[0];
  double worst = 0.0;
  for (std::size_t i = 3; i + 3 < x.size(); ++i) {
    if (!mask(i)) continue;
    double dv = 0.0, dp = 0.0;
    for (int j = -3; j <= 3; ++j) {
      dv += c[j + 3] * v[i + j];
      dp += c[j + 3] * p[i + j];
    }
    dv /= 60.0 * h;
    dp /= 60.0 * h;
    std::array<double, 2> f{};
    rhs(x[i], {v[i], p[i]}, f);
    worst = std::max(worst, std::abs(dv - f[0]));
    worst = std::max(worst, std::abs(dp - f[1]));
  }
  return worst;
}

}  // namespace

double ShrinkerProfile::value(double r) const {
  r = std::abs(r);  // even reflection about the waist
  if (r >= endpoint) return 0.0;
  if (!y.empty() && r <= y.back()) return hermite_eval(y, u, up, r);
  // Tip chart: invert y(v) by bisection on the interpolant.
  double vlo = 0.0, vhi = tip_v.front();
  // tip_v is stored decreasing; build ascending views once per call.
  std::vector<double> va(tip_v.rbegin(), tip_v.rend());
  std::vector<double> ya(tip_y.rbegin(), tip_y.rend());
  std::vector<double> qa(tip_dydv.rbegin(), tip_dydv.rend());
  for (int it = 0; it < 200; ++it) {
    const double vm = 0.5 * (vlo + vhi);
    const double ym = hermite_eval(va, ya, qa, vm);
    if (ym > r)
      vlo = vm;
    else
      vhi = vm;
    if (vhi - vlo < 1e-14) break;
  }
  return 0.5 * (vlo + vhi);
}

ShrinkerProfile solve_shrinker(double a, const ShrinkerOptions& opts) {
  if (!(a >= 4.0)) throw config_error("shrinker parameter must satisfy a >= 4");

  // The waist radius lies above sqrt(2): the profile is concave there
  // (u'' (0) = 1/u0 - u0/2 < 0 requires u0 > sqrt(2)) and the family limits
  // to the round sphere (waist 2) on one side and the cylinder on the other.
  const double y_budget = 3.0 * a + 10.0;
  double lo = constants::sqrt2 * (1.0 + 1e-13);  // endpoint far beyond a
  double hi = 2.0;                               // the sphere, endpoint 2
  auto endpoint_of = [&](double u0) {
    const Shot s = shoot(u0, opts.v_swap, y_budget, opts.rtol);
    return s.hit ? s.endpoint : y_budget;
  };
  if (!(endpoint_of(lo) > a && endpoint_of(hi) < a))
    throw solver_error("shrinker shooting bracket does not straddle a = " + std::to_string(a) +
                       " (bracket endpoints " + std::to_string(endpoint_of(lo)) + ", " +
                       std::to_string(endpoint_of(hi)) + ")");
  double u0 = hi;  // keep the iterate whose endpoint is <= a
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double e = endpoint_of(mid);
    if (e > a)
      lo = mid;
    else {
      hi = mid;
      u0 = mid;
      if (a - e <= opts.endpoint_rel_tol * a) break;
    }
    if (hi - lo < 8e-16 * hi) break;
  }
  const Shot final_shot = shoot(u0, opts.v_swap, y_budget, opts.rtol);
  if (!final_shot.hit || std::abs(final_shot.endpoint - a) > opts.endpoint_rel_tol * a)
    throw solver_error("shrinker bisection failed to meet the axis within tolerance; last "
                       "endpoint " + std::to_string(final_shot.endpoint));

  ShrinkerProfile prof;
  prof.a = a;
  prof.waist = u0;
  prof.endpoint = final_shot.endpoint;

  // Uniform graph-chart samples up to the chart swap.
  OdeOptions oo;
  oo.rtol = opts.rtol;
  oo.atol = 1e-14;
  auto sample_graph = [&](double step, std::vector<double>& ys, std::vector<double>& vs,
                          std::vector<double>& ps) {
    const int nsamp = static_cast<int>(std::floor(final_shot.y_swap / step)) + 1;
    ys.resize(nsamp);
    for (int i = 0; i < nsamp; ++i) ys[i] = i * step;
    const auto states = integrate_at<2>(shrinker_rhs, {u0, 0.0}, ys, oo);
    vs.resize(nsamp);
    ps.resize(nsamp);
    for (int i = 0; i < nsamp; ++i) {
      vs[i] = states[i][0];
      ps[i] = states[i][1];
    }
  };
  sample_graph(opts.sample_step, prof.y, prof.u, prof.up);

  // Tip chart on a uniform v-grid down to the axis.
  {
    const int ntip = 129;
    std::vector<double> vg(ntip);
    for (int i = 0; i < ntip; ++i)
      vg[i] = final_shot.v_swap * (1.0 - static_cast<double>(i) / (ntip - 1));
    const auto states =
        integrate_at<2>(tip_rhs, {final_shot.y_swap, 1.0 / final_shot.p_swap}, vg, oo);
    prof.tip_v = vg;
    prof.tip_y.resize(ntip);
    prof.tip_dydv.resize(ntip);
    for (int i = 0; i < ntip; ++i) {
      prof.tip_y[i] = states[i][0];
      prof.tip_dydv[i] = states[i][1];
    }
  }

  // A-posteriori defect of the sampled profile over the waist region
  // (v >= 0.7), at the sampling step and at half the step.
  auto waist_mask = [&](const std::vector<double>& vs) {
    return [&vs](std::size_t i) { return vs[i] >= 0.7; };
  };
  prof.residual_fd =
      fd_defect(prof.y, prof.u, prof.up, shrinker_rhs, waist_mask(prof.u));
  {
    std::vector<double> yh, vh, ph;
    sample_graph(0.5 * opts.sample_step, yh, vh, ph);
    prof.residual_fd_half = fd_defect(yh, vh, ph, shrinker_rhs, waist_mask(vh));
  }

  // Sensitivity of the profile to the solver tolerance.
  {
    OdeOptions loose = oo;
    loose.rtol = 100.0 * opts.rtol;
    const auto states = integrate_at<2>(shrinker_rhs, {u0, 0.0}, prof.y, loose);
    double gap = 0.0;
    for (std::size_t i = 0; i < prof.y.size(); ++i)
      gap = std::max(gap, std::abs(states[i][0] - prof.u[i]));
    prof.tolerance_gap = gap;
  }
  return prof;
}

AdsUpperReport check_ads_upper(const ShrinkerProfile& p) {
  AdsUpperReport rep;
  const double a2 = p.a * p.a;
  std::vector<double> radii = p.y;
  for (auto it = p.tip_y.begin(); it != p.tip_y.end(); ++it)
    if (*it > (radii.empty() ? 0.0 : radii.back())) radii.push_back(*it);
  rep.holds_everywhere = true;
  double last_ok = 0.0;
  for (double r : radii) {
    const double bound = constants::sqrt2 - (r * r - 3.0) / (constants::sqrt2 * a2);
    if (p.value(r) <= bound) {
      if (rep.holds_everywhere) last_ok = r;
    } else if (rep.holds_everywhere) {
      rep.holds_everywhere = false;
      rep.first_crossing = r;
    }
  }
  rep.m_emp = rep.holds_everywhere ? p.a : last_ok;
  return rep;
}

EnclosureVerdict barrier_compare(const CylinderGraph& g, const RotatedBarrier& b, double L0) {
  const Grid& gr = g.grid();
  if (b.eta < 0.0) throw input_error("barrier shift must be nonnegative");
  EnclosureVerdict verdict;
  verdict.r_lo = L0;
  verdict.r_hi = std::min(b.profile.a - b.eta, gr.R());
  if (!(verdict.r_lo < verdict.r_hi))
    throw input_error("barrier annulus does not intersect the grid");
  double minc = std::numeric_limits<double>::infinity();
  const int n2 = gr.spec().k == 2 ? gr.ny() : 1;
  for (int j1 = 0; j1 < gr.ny(); ++j1)
    for (int j2 = 0; j2 < n2; ++j2) {
      const double r = gr.flat_radius(j1, j2);
      if (r < verdict.r_lo || r > verdict.r_hi) continue;
      const double barrier_radius = b.profile.value(r + b.eta);
      const std::size_t base = gr.index(j1, j2, 0);
      for (int t = 0; t < gr.ntheta(); ++t)
        minc = std::min(minc, g.radius.v[base + t] - barrier_radius);
      ++verdict.nodes_checked;
    }
  if (verdict.nodes_checked == 0) throw input_error("no grid nodes inside the barrier annulus");
  verdict.min_clearance = minc;
  verdict.enclosed = minc >= -1e-12;
  return verdict;
}

namespace {

inline void bowl_rhs_raw(double r, const std::array<double, 2>& s, std::array<double, 2>& out,
                         double c) {
  const double p = s[1];
  out[0] = p;
  out[1] = (1.0 + p * p) * (c - p / r);
}

}  // namespace

double BowlProfile::value(double radius) const {
  radius = std::abs(radius);
  if (radius <= r.front()) return c * radius * radius / 4.0;
  return hermite_eval(r, h, hp, radius);
}

BowlProfile solve_bowl(double c, const BowlOptions& opts) {
  if (!(c > 0.0)) throw config_error("bowl speed must be positive");
  BowlProfile prof;
  prof.c = c;
  const double r0 = 1e-3;
  // Series start at the removable singularity: h = c r^2/4 + c^3 r^4/128.
  const double h0 = c * r0 * r0 / 4.0 + c * c * c * r0 * r0 * r0 * r0 / 128.0;
  const double p0 = c * r0 / 2.0 + c * c * c * r0 * r0 * r0 / 32.0;

  auto rhs = [c](double r, const std::array<double, 2>& s, std::array<double, 2>& out) {
    bowl_rhs_raw(r, s, out, c);
  };
  OdeOptions oo;
  oo.rtol = opts.rtol;
  oo.atol = 1e-14;

  auto sample = [&](double step, std::vector<double>& rs, std::vector<double>& hs,
                    std::vector<double>& ps) {
    const int n = static_cast<int>(std::floor((opts.r_max - r0) / step)) + 1;
    rs.resize(n);
    for (int i = 0; i < n; ++i) rs[i] = r0 + i * step;
    const auto states = integrate_at<2>(rhs, {h0, p0}, rs, oo);
    hs.resize(n);
    ps.resize(n);
    for (int i = 0; i < n; ++i) {
      hs[i] = states[i][0];
      ps[i] = states[i][1];
    }
  };
  sample(opts.sample_step, prof.r, prof.h, prof.hp);
  auto all = [](std::size_t) { return true; };
  prof.residual_fd = fd_defect(prof.r, prof.h, prof.hp, rhs, all);
  {
    std::vector<double> rh, hh, ph;
    sample(0.5 * opts.sample_step, rh, hh, ph);
    prof.residual_fd_half = fd_defect(rh, hh, ph, rhs, all);
  }
  return prof;
}

}  // namespace cylflow
