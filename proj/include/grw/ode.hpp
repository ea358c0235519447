#pragma once

// Adaptive Dormand-Prince RK45 for small fixed-size systems, with bisection
// event location on monotone event functions.

#include <array>
#include <cmath>
#include <functional>

#include "grw/numeric.hpp"

namespace grw::detail {

template <int N>
using StateVec = std::array<double, N>;

template <int N>
struct OdeStepResult {
  StateVec<N> y;
  double error;
};

// One Dormand-Prince 5(4) step of size h from (t, y).
template <int N, typename RHS>
OdeStepResult<N> dopri_step(RHS&& rhs, double t, const StateVec<N>& y, double h) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  StateVec<N> k1 = rhs(t, y), tmp;
  auto axpy = [&](const StateVec<N>& base, std::initializer_list<std::pair<double, const StateVec<N>*>> terms) {
    StateVec<N> out = base;
    for (auto& [c, k] : terms)
      for (int i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    return out;
  };
  tmp = axpy(y, {{a21, &k1}});
  StateVec<N> k2 = rhs(t + c2 * h, tmp);
  tmp = axpy(y, {{a31, &k1}, {a32, &k2}});
  StateVec<N> k3 = rhs(t + c3 * h, tmp);
  tmp = axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
  StateVec<N> k4 = rhs(t + c4 * h, tmp);
  tmp = axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
  StateVec<N> k5 = rhs(t + c5 * h, tmp);
  tmp = axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
  StateVec<N> k6 = rhs(t + h, tmp);
  StateVec<N> y5 = axpy(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  StateVec<N> k7 = rhs(t + h, y5);
  OdeStepResult<N> res;
  res.y = y5;
  double err = 0;
  for (int i = 0; i < N; ++i) {
    double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    err = std::max(err, std::abs(e));
  }
  res.error = err;
  return res;
}

// Integrate y' = rhs(t, y) from t0 to t_end with adaptive steps.
// `watch(t, y)` is called after each accepted step; return false to stop.
template <int N, typename RHS, typename Watch>
void dopri_integrate(RHS&& rhs, StateVec<N>& y, double& t, double t_end,
                     double rtol, double atol, Watch&& watch,
                     long max_steps = 2000000) {
  if (t_end == t) return;
  const double dir = (t_end > t) ? 1.0 : -1.0;
  // a conservative first step; the controller ramps it up quickly
  double h = dir * std::min(1e-3, std::abs(t_end - t) * 1e-4 + 1e-12);
  for (long step = 0; step < max_steps && dir * (t_end - t) > 0; ++step) {
    if (dir * (t + h) > dir * t_end) h = t_end - t;
    auto r = dopri_step<N>(rhs, t, y, h);
    double ynorm = atol;
    for (int i = 0; i < N; ++i) ynorm = std::max(ynorm, std::abs(y[i]) * rtol);
    if (r.error <= ynorm || std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
      t += h;
      y = r.y;
      if (!watch(t, y)) return;
    }
    double scale = (r.error > 0) ? 0.9 * std::pow(ynorm / r.error, 0.2) : 2.0;
    scale = clamp(scale, 0.2, 5.0);
    h *= scale;
  }
}

// Integrate from (t0, y0) exactly to t1 (fixed target) with adaptive steps.
template <int N, typename RHS>
StateVec<N> dopri_to(RHS&& rhs, StateVec<N> y, double t0, double t1, double rtol,
                     double atol) {
  double t = t0;
  dopri_integrate<N>(rhs, y, t, t1, rtol, atol, [](double, const StateVec<N>&) { return true; });
  return y;
}

}  // namespace grw::detail
