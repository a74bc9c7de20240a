#include "cylflow/modes.hpp"

#include <algorithm>
#include <cmath>

#include "cylflow/ode.hpp"

namespace cylflow {

using constants::sqrt8;

PhasePoint phase_point(const AlphaState& s) {
  if (!(s.tau < 0.0)) throw domain_error("phase coordinates require tau < 0");
  const auto [S, D] = trace_det(s);
  return {constants::sqrt2 * s.tau * S, 8.0 * s.tau * s.tau * D, -std::log(-s.tau)};
}

std::array<double, 3> spectral_rhs(const AlphaState& s) {
  return {-sqrt8 * (s.a1 * s.a1 + s.a3 * s.a3), -sqrt8 * (s.a2 * s.a2 + s.a3 * s.a3),
          -sqrt8 * (s.a1 + s.a2) * s.a3};
}

AlphaState rotate_state(const AlphaState& s, double phi) {
  const double c = std::cos(phi), sn = std::sin(phi);
  // R^T M R with M = [[a1,a3],[a3,a2]], R = [[c,-sn],[sn,c]].
  const double m11 = s.a1, m22 = s.a2, m12 = s.a3;
  AlphaState r;
  r.tau = s.tau;
  r.a1 = c * c * m11 + 2.0 * sn * c * m12 + sn * sn * m22;
  r.a2 = sn * sn * m11 - 2.0 * sn * c * m12 + c * c * m22;
  r.a3 = (c * c - sn * sn) * m12 + sn * c * (m22 - m11);
  return r;
}

AlphaState exact_mode_solution(const AlphaState& s0, double tau) {
  // M' = -sqrt(8) M^2 has M(tau) = M0 (I + sqrt(8) (tau-tau0) M0)^{-1};
  // diagonalize M0 and push each eigenvalue through l/(1 + sqrt(8) dt l).
  const double dt = tau - s0.tau;
  const double tr = s0.a1 + s0.a2;
  const double disc = std::sqrt(std::max(0.0, 0.25 * (s0.a1 - s0.a2) * (s0.a1 - s0.a2) +
                                                  s0.a3 * s0.a3));
  const double l1 = 0.5 * tr + disc, l2 = 0.5 * tr - disc;
  double c = 1.0, sn = 0.0;  // eigenvector (c, sn) for l1
  if (std::abs(s0.a3) > 1e-300 || s0.a1 < s0.a2) {
    const double ang = 0.5 * std::atan2(2.0 * s0.a3, s0.a1 - s0.a2);
    c = std::cos(ang);
    sn = std::sin(ang);
  }
  auto flow = [dt](double l) {
    const double den = 1.0 + sqrt8 * dt * l;
    if (!(den > 0.0)) throw domain_error("mode solution blows up before the requested tau");
    return l / den;
  };
  const double f1 = flow(l1), f2 = flow(l2);
  AlphaState out;
  out.tau = tau;
  out.a1 = c * c * f1 + sn * sn * f2;
  out.a2 = sn * sn * f1 + c * c * f2;
  out.a3 = c * sn * (f1 - f2);
  return out;
}

std::array<double, 2> phase_vector_field(double x, double y) {
  return {2.0 * x * x - x - y, 2.0 * x * y - 2.0 * y};
}

std::array<double, 4> phase_jacobian(double x, double y) {
  return {4.0 * x - 1.0, -1.0, 2.0 * y, 2.0 * x - 2.0};
}

std::vector<std::array<double, 2>> find_phase_zeros(const Box& box, int density) {
  std::vector<std::array<double, 2>> zeros;
  for (int i = 0; i <= density; ++i)
    for (int j = 0; j <= density; ++j) {
      double x = box.xlo + (box.xhi - box.xlo) * i / density;
      double y = box.ylo + (box.yhi - box.ylo) * j / density;
      bool ok = true;
      for (int it = 0; it < 60; ++it) {
        const auto v = phase_vector_field(x, y);
        const auto J = phase_jacobian(x, y);
        const double det = J[0] * J[3] - J[1] * J[2];
        if (std::abs(det) < 1e-14) {
          ok = false;
          break;
        }
        const double dx = (v[0] * J[3] - v[1] * J[1]) / det;
        const double dy = (v[1] * J[0] - v[0] * J[2]) / det;
        x -= dx;
        y -= dy;
        if (std::abs(dx) + std::abs(dy) < 1e-14) break;
      }
      if (!ok || !box.contains(x, y)) continue;
      const auto v = phase_vector_field(x, y);
      if (std::abs(v[0]) + std::abs(v[1]) > 1e-12) continue;
      bool dup = false;
      for (const auto& z : zeros)
        if (std::hypot(z[0] - x, z[1] - y) < 1e-8) dup = true;
      if (!dup) zeros.push_back({x, y});
    }
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

ModeTrajectory integrate_modes(const AlphaState& s0, double tau1, const IntegrateOptions& opts) {
  if (!(s0.tau < tau1 && tau1 < 0.0))
    throw config_error("mode integration requires tau0 < tau1 < 0");
  ModeTrajectory traj;
  const int n = std::max(2, opts.samples);
  traj.tau.resize(n);
  const double l0 = std::log(-s0.tau), l1 = std::log(-tau1);
  for (int i = 0; i < n; ++i)
    traj.tau[i] = -std::exp(l0 + (l1 - l0) * i / (n - 1));
  traj.tau.front() = s0.tau;
  traj.tau.back() = tau1;

  const double delta = opts.noise_delta;
  auto rhs = [delta](double t, const std::array<double, 3>& a, std::array<double, 3>& out) {
    AlphaState s{a[0], a[1], a[2], t};
    const auto r = spectral_rhs(s);
    out = {r[0], r[1], r[2]};
    if (delta != 0.0) {
      // Fixed quasi-periodic forcing of size delta/tau^2: a stand-in for the
      // bounded error terms dropped from the idealized system.
      const double amp = delta / (t * t);
      out[0] += amp * std::sin(0.37 * t + 0.1);
      out[1] += amp * std::sin(0.53 * t + 1.7);
      out[2] += amp * std::sin(0.71 * t + 0.9);
    }
  };

  OdeOptions oo;
  oo.rtol = opts.rtol;
  oo.atol = opts.atol;
  const auto states = integrate_at<3>(rhs, {s0.a1, s0.a2, s0.a3}, traj.tau, oo);
  traj.states.resize(n);
  for (int i = 0; i < n; ++i)
    traj.states[i] = {states[i][0], states[i][1], states[i][2], traj.tau[i]};
  return traj;
}

namespace {

// Eigen-structure of the symmetric 2x2 matrix [[q11,q12],[q12,q22]]. The
// angle is the phi with eigenvector (sin phi, cos phi) for `l1`, matching
// Q = R(phi)^T diag(l2, l1) R(phi).
struct Sym2Eig {
  double l1, l2;  // l1 <= l2
  double phi;
};

Sym2Eig sym2_eig(double q11, double q22, double q12) {
  const double tr = q11 + q22;
  const double disc = std::sqrt(std::max(0.0, 0.25 * (q11 - q22) * (q11 - q22) + q12 * q12));
  Sym2Eig e;
  e.l1 = 0.5 * tr - disc;
  e.l2 = 0.5 * tr + disc;
  // Eigenvector (ex, ey) for the smaller eigenvalue l1.
  double ex, ey;
  if (disc < 1e-300) {
    ex = 0.0;
    ey = 1.0;
  } else if (std::abs(q12) > std::abs(q11 - e.l1)) {
    ex = e.l1 - q22;
    ey = q12;
  } else {
    ex = q12;
    ey = e.l1 - q11;
  }
  const double nn = std::hypot(ex, ey);
  ex /= nn;
  ey /= nn;
  e.phi = std::atan2(ex, ey);
  if (e.phi < 0.0) e.phi += constants::pi;
  if (e.phi >= constants::pi) e.phi -= constants::pi;
  return e;
}

}  // namespace

QuantizationMatrix classify_Q(const ModeTrajectory& traj, const ClassifyOptions& opts) {
  QuantizationMatrix qm;
  const std::size_t n = traj.states.size();
  if (n < 8) throw input_error("trajectory too short to classify");
  const std::size_t w = std::max<std::size_t>(2, static_cast<std::size_t>(opts.window * n));

  // Scaled eigenvalues over the trailing window.
  std::vector<Sym2Eig> eigs;
  eigs.reserve(w);
  for (std::size_t i = n - w; i < n; ++i) {
    const AlphaState& s = traj.states[i];
    const double sc = std::abs(s.tau);
    eigs.push_back(sym2_eig(sc * s.a1, sc * s.a2, sc * s.a3));
  }
  const double scale = std::abs(constants::quantized_eigenvalue);
  double var = 0.0;
  for (const auto& e : eigs) {
    var = std::max(var, std::abs(e.l1 - eigs.back().l1) / scale);
    var = std::max(var, std::abs(e.l2 - eigs.back().l2) / scale);
  }
  qm.settled = var < opts.settle_tol;

  const AlphaState& last = traj.states.back();
  const double sc = std::abs(last.tau);
  qm.q = {sc * last.a1, sc * last.a2, sc * last.a3};
  const Sym2Eig e = sym2_eig(qm.q[0], qm.q[1], qm.q[2]);
  qm.eigs_raw = {e.l1, e.l2};

  if (!qm.settled) {
    qm.note = "trailing-window variation " + std::to_string(var) +
              " exceeds the settle tolerance; no snap performed";
    return qm;
  }

  auto snap = [&](double l) {
    return (std::abs(l - constants::quantized_eigenvalue) < std::abs(l)) ?
               constants::quantized_eigenvalue : 0.0;
  };
  qm.eigs_snapped = {snap(e.l1), snap(e.l2)};
  qm.snap_distance = std::max(std::abs(qm.eigs_raw[0] - qm.eigs_snapped[0]),
                              std::abs(qm.eigs_raw[1] - qm.eigs_snapped[1]));
  if (qm.snap_distance > opts.snap_tol) {
    qm.settled = false;
    qm.rank = -1;
    qm.note = "scaled eigenvalues are not within the snap tolerance of {0, -1/sqrt(8)}";
    return qm;
  }
  qm.rank = (qm.eigs_snapped[0] != 0.0) + (qm.eigs_snapped[1] != 0.0);

  if (qm.rank == 1) {
    // phi(tau) series over the window; report sup |phi'| |tau|.
    qm.phi = sym2_eig(qm.q[0], qm.q[1], qm.q[2]).phi;
    double bound = 0.0;
    for (std::size_t i = n - w + 1; i < n; ++i) {
      const AlphaState& a = traj.states[i - 1];
      const AlphaState& b = traj.states[i];
      const double pa = sym2_eig(std::abs(a.tau) * a.a1, std::abs(a.tau) * a.a2,
                                 std::abs(a.tau) * a.a3).phi;
      const double pb = sym2_eig(std::abs(b.tau) * b.a1, std::abs(b.tau) * b.a2,
                                 std::abs(b.tau) * b.a3).phi;
      double dphi = pb - pa;
      if (dphi > 0.5 * constants::pi) dphi -= constants::pi;
      if (dphi < -0.5 * constants::pi) dphi += constants::pi;
      const double dtau = b.tau - a.tau;
      bound = std::max(bound, std::abs(dphi / dtau) * std::abs(b.tau));
    }
    qm.rdot_scaled_bound = bound;
  }
  return qm;
}

SeparatrixReport separatrix_check(const SeparatrixOptions& opts) {
  SeparatrixReport rep;
  // Analytic Jacobian spectra at the two zeros.
  {
    const auto Js = phase_jacobian(0.5, 0.0);  // [[1,-1],[0,-1]]
    const double trs = Js[0] + Js[3], dets = Js[0] * Js[3] - Js[1] * Js[2];
    const double ds = std::sqrt(trs * trs / 4.0 - dets);
    rep.jacobian_eigs_saddle = {trs / 2.0 - ds, trs / 2.0 + ds};
    const auto Jo = phase_jacobian(1.0, 1.0);  // [[3,-1],[2,0]]
    const double tro = Jo[0] + Jo[3], deto = Jo[0] * Jo[3] - Jo[1] * Jo[2];
    const double dd = std::sqrt(tro * tro / 4.0 - deto);
    rep.jacobian_eigs_source = {tro / 2.0 - dd, tro / 2.0 + dd};
  }

  auto rhs = [](double, const std::array<double, 2>& p, std::array<double, 2>& out) {
    const auto v = phase_vector_field(p[0], p[1]);
    out = {v[0], v[1]};
  };
  OdeOptions oo;
  oo.rtol = 1e-10;
  oo.atol = 1e-13;
  oo.max_step = 0.1;

  // Forward connector: leave (1,1) along the unstable eigendirection that
  // points at the saddle (the eigenvector (1,2)/sqrt(5) of eigenvalue 1).
  {
    const double s5 = std::sqrt(5.0);
    std::array<double, 2> p0 = {1.0 - 1e-6 / s5, 1.0 - 2e-6 / s5};
    double best = 1.0;
    integrate_dopri5<2>(rhs, p0, 0.0, opts.sigma_budget, oo,
                        [&](double, const std::array<double, 2>& p) {
                          const double d = std::hypot(p[0] - 0.5, p[1]);
                          best = std::min(best, d);
                          if (d <= opts.ball_radius) return false;
                          return opts.box.contains(p[0], p[1]);
                        });
    rep.connector_endpoint_error = best;
    rep.connector_reached = best <= opts.ball_radius;
  }

  // Reverse attempts: trajectories emanating from the saddle, integrated
  // forward in sigma, must never realize a connection to (1,1).
  rep.reverse_attempts = opts.reverse_samples;
  for (int i = 0; i < opts.reverse_samples; ++i) {
    const double ang = 2.0 * constants::pi * i / opts.reverse_samples;
    std::array<double, 2> p0 = {0.5 + opts.perturbation * std::cos(ang),
                                opts.perturbation * std::sin(ang)};
    bool reached = false, exited = false;
    integrate_dopri5<2>(rhs, p0, 0.0, opts.sigma_budget, oo,
                        [&](double, const std::array<double, 2>& p) {
                          if (std::hypot(p[0] - 1.0, p[1] - 1.0) <= opts.ball_radius) {
                            reached = true;
                            return false;
                          }
                          if (!opts.box.contains(p[0], p[1])) {
                            exited = true;
                            return false;
                          }
                          return true;
                        });
    if (reached) ++rep.reverse_reached_source;
    if (exited) ++rep.reverse_exited_box;
  }
  rep.passed = rep.connector_reached && rep.reverse_reached_source == 0;
  return rep;
}

}  // namespace cylflow
