#pragma once

// Independent initial-value oracle for the geodesic equations. The base
// component obeys tau'' = (c/2) dp/dtau with p = 1/f^2, the fiber arclength
// r obeys r' = sqrt(c) p(tau), and D = -tau'^2 + c p(tau) is conserved. The
// t-parameterization is regular at simple turning points, so a plain
// adaptive Runge-Kutta integration suffices; tangential dwells show up as
// stagnation and are reported.

#include <cmath>
#include <optional>
#include <vector>

#include "grw/fiber.hpp"
#include "grw/numeric.hpp"
#include "grw/ode.hpp"
#include "grw/warp.hpp"

namespace grw {

struct IvpParams {
  double rtol = 1e-10;
  double atol = 1e-12;
  double t_cap = 1e6;
  long max_steps = 4000000;
  double f_cap = 1e130;       // treat f beyond this as an escape to a big end
  double tau_cap = 1e12;
  bool record = false;        // keep a sample trace
  int record_stride = 1;
};

struct IvpSample {
  double t, tau, dtau, r;
};

struct IvpResult {
  enum class Stop { t_end, fiber_arc, boundary, dwell, step_limit };
  Stop stop = Stop::t_end;
  double t = 0, tau = 0, dtau = 0, r = 0;
  double D_drift = 0;  // max |D(t) - D(0)| over accepted steps
  double tau_max = -kInf, tau_min = kInf;  // bounce-refined extrema of tau(t)
  std::vector<IvpSample> trace;
  // tau recorded at each requested fiber arclength (NaN if never reached)
  std::vector<double> tau_at_arc;
};

namespace detail {

inline double p_clamped(const WarpFunction& w, double tau) {
  const auto& d = w.domain();
  double margin = 1e-13 * std::max(1.0, std::abs(tau));
  double t = tau;
  if (d.lo_finite() && t <= d.lo) t = d.lo + std::max(margin, (d.hi - d.lo) * 1e-15);
  if (d.hi_finite() && t >= d.hi) t = d.hi - std::max(margin, (d.hi - d.lo) * 1e-15);
  return w.p(t);
}

inline double dp_clamped(const WarpFunction& w, double tau) {
  const auto& d = w.domain();
  double margin = 1e-13 * std::max(1.0, std::abs(tau));
  double t = tau;
  if (d.lo_finite() && t <= d.lo) t = d.lo + std::max(margin, (d.hi - d.lo) * 1e-15);
  if (d.hi_finite() && t >= d.hi) t = d.hi - std::max(margin, (d.hi - d.lo) * 1e-15);
  return w.dp(t);
}

}  // namespace detail

// Integrate the (tau, dtau/dt, r) system from (tau0, dtau0) with fiber
// constant c >= 0, stopping at t_span, at a requested fiber arclength, or at
// the interval boundary. `arc_marks` requests tau readings at those fiber
// arclengths (ascending).
inline IvpResult integrate_ivp(const WarpFunction& w, double tau0, double dtau0,
                               double c, double t_span, const IvpParams& ip = {},
                               std::optional<double> stop_at_arc = std::nullopt,
                               const std::vector<double>& arc_marks = {}) {
  IvpResult out;
  out.tau_at_arc.assign(arc_marks.size(), std::numeric_limits<double>::quiet_NaN());
  if (c < 0) throw std::invalid_argument("integrate_ivp needs c >= 0");
  if (c == 0) {
    // base-tangent line
    double t_end = t_span;
    out.stop = IvpResult::Stop::t_end;
    double tau_end = tau0 + dtau0 * t_end;
    if (w.domain().lo_finite() && tau_end <= w.domain().lo) {
      t_end = (w.domain().lo - tau0) / dtau0;
      out.stop = IvpResult::Stop::boundary;
    }
    if (w.domain().hi_finite() && tau_end >= w.domain().hi) {
      t_end = (w.domain().hi - tau0) / dtau0;
      out.stop = IvpResult::Stop::boundary;
    }
    out.t = t_end;
    out.tau = tau0 + dtau0 * t_end;
    out.dtau = dtau0;
    out.r = 0;
    return out;
  }
  const double sqc = std::sqrt(c);
  auto rhs = [&](double, const detail::StateVec<3>& y) {
    detail::StateVec<3> dy;
    dy[0] = y[1];
    dy[1] = 0.5 * c * detail::dp_clamped(w, y[0]);
    dy[2] = sqc * detail::p_clamped(w, y[0]);
    return dy;
  };
  detail::StateVec<3> y{tau0, dtau0, 0.0};
  double t = 0.0;
  const double D0 = -dtau0 * dtau0 + c * detail::p_clamped(w, tau0);
  size_t next_mark = 0;
  double dwell_t0 = -1.0;
  long accepted = 0;

  auto hit_boundary = [&](const detail::StateVec<3>& s) {
    const auto& d = w.domain();
    double span = (d.lo_finite() && d.hi_finite()) ? d.hi - d.lo : 1.0;
    double margin_lo = d.lo_finite() ? std::max(span * 1e-14, std::abs(d.lo) * 1e-14) : 0;
    double margin_hi = d.hi_finite() ? std::max(span * 1e-14, std::abs(d.hi) * 1e-14) : 0;
    if (d.lo_finite() && s[0] <= d.lo + margin_lo) return true;
    if (d.hi_finite() && s[0] >= d.hi - margin_hi) return true;
    if (std::abs(s[0]) > ip.tau_cap) return true;
    if (w.f(clamp(s[0], d.lo_finite() ? d.lo + margin_lo : -kInf,
                  d.hi_finite() ? d.hi - margin_hi : kInf)) > ip.f_cap)
      return true;
    return false;
  };

  double t_end = std::min(t_span, ip.t_cap);
  detail::StateVec<3> y_prev = y;
  double t_prev = t;
  out.stop = IvpResult::Stop::t_end;
  bool done = false;

  out.tau_max = out.tau_min = tau0;
  detail::dopri_integrate<3>(rhs, y, t, t_end, ip.rtol, ip.atol,
    [&](double tc, const detail::StateVec<3>& yc) {
      ++accepted;
      if (hit_boundary(yc)) {
        out.stop = IvpResult::Stop::boundary;
        done = true;
        out.t = tc;
        out.tau = yc[0];
        out.dtau = yc[1];
        out.r = yc[2];
        return false;
      }
      double D = -yc[1] * yc[1] + c * detail::p_clamped(w, yc[0]);
      out.D_drift = std::max(out.D_drift, std::abs(D - D0));
      if (ip.record && accepted % ip.record_stride == 0)
        out.trace.push_back(IvpSample{tc, yc[0], yc[1], yc[2]});
      out.tau_max = std::max(out.tau_max, yc[0]);
      out.tau_min = std::min(out.tau_min, yc[0]);
      // bounce refinement: locate the vanishing of dtau/dt inside the step
      if (y_prev[1] * yc[1] < 0) {
        double lo = t_prev, hi = tc;
        detail::StateVec<3> ys = y_prev;
        bool want_pos = y_prev[1] > 0;  // tau still rising at the step start
        for (int it = 0; it < 50 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
          double mid = 0.5 * (lo + hi);
          auto ym = detail::dopri_to<3>(rhs, ys, lo, mid, ip.rtol, ip.atol);
          if ((ym[1] > 0) == want_pos) {
            lo = mid;
            ys = ym;
          } else {
            hi = mid;
          }
        }
        out.tau_max = std::max(out.tau_max, ys[0]);
        out.tau_min = std::min(out.tau_min, ys[0]);
      }
      // fiber arclength marks: r is strictly increasing, locate by bisection
      auto locate_arc = [&](double r_target) {
        double lo = t_prev, hi = tc;
        detail::StateVec<3> ys = y_prev;
        for (int it = 0; it < 60 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
          double mid = 0.5 * (lo + hi);
          auto ym = detail::dopri_to<3>(rhs, ys, lo, mid, ip.rtol, ip.atol);
          if (ym[2] < r_target) {
            lo = mid;
            ys = ym;
          } else {
            hi = mid;
          }
        }
        auto ym = detail::dopri_to<3>(rhs, ys, lo, 0.5 * (lo + hi), ip.rtol, ip.atol);
        return std::make_pair(0.5 * (lo + hi), ym);
      };
      while (next_mark < arc_marks.size() && yc[2] >= arc_marks[next_mark]) {
        auto [tm, ym] = locate_arc(arc_marks[next_mark]);
        (void)tm;
        out.tau_at_arc[next_mark] = ym[0];
        ++next_mark;
      }
      if (stop_at_arc && yc[2] >= *stop_at_arc) {
        auto [tm, ym] = locate_arc(*stop_at_arc);
        out.t = tm;
        out.tau = ym[0];
        out.dtau = ym[1];
        out.r = *stop_at_arc;
        out.stop = IvpResult::Stop::fiber_arc;
        done = true;
        return false;
      }
      // tangential dwell: negligible base motion while the level gap and
      // slope both vanish
      if (std::abs(yc[1]) < 1e-12 && std::abs(detail::dp_clamped(w, yc[0])) < 1e-12) {
        if (dwell_t0 < 0) dwell_t0 = tc;
        if (tc - dwell_t0 > 0.05 * (t_end - 0.0) + 10.0) {
          out.stop = IvpResult::Stop::dwell;
          done = true;
          out.t = tc;
          out.tau = yc[0];
          out.dtau = yc[1];
          out.r = yc[2];
          return false;
        }
      } else {
        dwell_t0 = -1.0;
      }
      t_prev = tc;
      y_prev = yc;
      return true;
    },
    ip.max_steps);
  if (!done) {
    out.t = t;
    out.tau = y[0];
    out.dtau = y[1];
    out.r = y[2];
    if (t < t_end * (1.0 - 1e-12) && out.stop == IvpResult::Stop::t_end)
      out.stop = IvpResult::Stop::step_limit;
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SweepHit {
  double K;
  double L;
  double tau_at_L;   // NaN when the arclength was never reached
  double residual;   // |tau_at_L - tau_target|, +inf when unreachable
  bool hit;
};

struct SweepResult {
  std::vector<SweepHit> entries;      // one per (K, L)
  std::vector<SweepHit> hits;         // residual < tol
  double min_residual = kInf;
};

// Shoot over a K-grid from z0 = (tau0, x0) and record the achieved tau at
// each fiber length in `lengths`; a target is hit when the residual against
// tau_target falls below tol. K encodes the initial data: dtau0 =
// sign(K) sqrt(|K|), c = 1.
inline SweepResult sweep_oracle(const WarpFunction& w, double tau0, double tau_target,
                                const std::vector<double>& K_grid,
                                const std::vector<double>& lengths, double tol,
                                const IvpParams& ip = {}) {
  SweepResult out;
  if (lengths.empty()) return out;
  std::vector<double> marks = lengths;
  std::sort(marks.begin(), marks.end());
  double arc_max = marks.back();
  for (double K : K_grid) {
    double dtau0 = (K >= 0 ? 1.0 : -1.0) * std::sqrt(std::abs(K));
    auto res = integrate_ivp(w, tau0, dtau0, 1.0, kInf, ip, arc_max, marks);
    for (size_t j = 0; j < marks.size(); ++j) {
      SweepHit h;
      h.K = K;
      h.L = marks[j];
      h.tau_at_L = res.tau_at_arc[j];
      h.residual = std::isnan(h.tau_at_L) ? kInf : std::abs(h.tau_at_L - tau_target);
      h.hit = h.residual < tol;
      out.entries.push_back(h);
      if (h.hit) out.hits.push_back(h);
      out.min_residual = std::min(out.min_residual, h.residual);
    }
  }
  return out;
}

}  // namespace grw
