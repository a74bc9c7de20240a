#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "cylflow/common.hpp"

namespace cylflow {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = 0.0;   // 0 = unrestricted
  double initial_step = 0.0;
  std::size_t max_steps = 2'000'000;
};

// Embedded Dormand-Prince 5(4). Integrates y' = f(t, y) from t0 to t1
// (either direction), calling `observe(t, y)` after every accepted step
// (and once at t0). If `observe` returns false the integration stops early.
// Throws solver_error on step-size underflow; the last good state is in the
// message's t.
template <int N, class RHS, class Observer>
void integrate_dopri5(const RHS& f, std::array<double, N> y, double t0, double t1,
                      const OdeOptions& opts, const Observer& observe) {
  using V = std::array<double, N>;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  double t = t0;
  if (!observe(t, y)) return;
  if (t0 == t1) return;

  V k1;
  f(t, y, k1);
  double h = opts.initial_step > 0.0 ? opts.initial_step : std::abs(t1 - t0) / 100.0;
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);

  std::size_t steps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++steps > opts.max_steps) throw solver_error("ODE step budget exhausted");
    h = std::min(h, std::abs(t1 - t));
    const double hs = dir * h;

    V k2, k3, k4, k5, k6, k7, yt, y5;
    for (int i = 0; i < N; ++i) yt[i] = y[i] + hs * a21 * k1[i];
    f(t + c2 * hs, yt, k2);
    for (int i = 0; i < N; ++i) yt[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * hs, yt, k3);
    for (int i = 0; i < N; ++i) yt[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * hs, yt, k4);
    for (int i = 0; i < N; ++i)
      yt[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * hs, yt, k5);
    for (int i = 0; i < N; ++i)
      yt[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + hs, yt, k6);
    for (int i = 0; i < N; ++i)
      y5[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(t + hs, y5, k7);

    double err = 0.0;
    for (int i = 0; i < N; ++i) {
      const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / N);

    if (err <= 1.0) {
      t += hs;
      y = y5;
      k1 = k7;  // FSAL
      if (!observe(t, y)) return;
      double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      fac = std::min(5.0, std::max(0.2, fac));
      h *= fac;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    if (!(h > std::abs(t) * 1e-15 + 1e-300))
      throw solver_error("ODE step size underflow at t = " + std::to_string(t));
  }
}

// Convenience wrapper that lands exactly on the requested sample times and
// collects the states there.
template <int N, class RHS>
std::vector<std::array<double, N>> integrate_at(const RHS& f, std::array<double, N> y0,
                                                const std::vector<double>& times,
                                                const OdeOptions& opts) {
  if (times.empty()) return {};
  std::vector<std::array<double, N>> out;
  out.reserve(times.size());
  out.push_back(y0);
  std::array<double, N> y = y0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    std::array<double, N> last{};
    integrate_dopri5<N>(f, y, times[i - 1], times[i], opts,
                        [&](double, const std::array<double, N>& s) {
                          last = s;
                          return true;
                        });
    y = last;
    out.push_back(y);
  }
  return out;
}

}  // namespace cylflow
