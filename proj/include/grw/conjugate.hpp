#pragma once

// Conjugate points via the fiber correspondence, Sturm disconjugacy on base
// geodesics, the spectral flow, Morse indexes and the Morse/Poincare
// polynomial relations.
//
// For a geodesic projecting to a non-constant fiber geodesic, the spacetime
// conjugate points sit over the fiber ones; the multiplicity equals the fiber
// multiplicity exactly when dtau/dt never vanishes (causal geodesics always
// qualify), and otherwise lies in the band {m', m'+1}, which is reported as a
// band and never resolved to a point value. Geodesics sitting at a critical
// point of 1/f^2 (tau constant) separate: the transverse scalar equation has
// constant coefficients and the extra conjugate locations are computed
// exactly.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "grw/classify.hpp"
#include "grw/connect.hpp"
#include "grw/fiber.hpp"
#include "grw/integrate.hpp"
#include "grw/ode.hpp"
#include "grw/warp.hpp"

namespace grw {

// ---------------------------------------------------------------------------
// Sturm equation a'' = (f''/f) a with a(tau0) = 0, a'(tau0) = 1

struct SturmResult {
  std::optional<double> first_zero;
  double a_end = 0;   // a(tau1)
};

inline SturmResult sturm_solve(const WarpFunction& w, double tau0, double tau1,
                               const SolveParams& prm = {}) {
  (void)prm;
  if (!w.domain().contains(tau0) || !w.domain().contains(tau1) || !(tau1 > tau0))
    throw std::domain_error("sturm_solve needs interior tau0 < tau1");
  auto rhs = [&](double t, const detail::StateVec<2>& y) {
    detail::StateVec<2> dy;
    double f = w.f(t);
    dy[0] = y[1];
    dy[1] = (w.ddf(t) / f) * y[0];
    return dy;
  };
  detail::StateVec<2> y{0.0, 1.0};
  double t = tau0;
  SturmResult out;
  double t_prev = t;
  detail::StateVec<2> y_prev = y;
  detail::dopri_integrate<2>(rhs, y, t, tau1, 1e-12, 1e-14,
    [&](double tc, const detail::StateVec<2>& yc) {
      if (y_prev[0] > 0 && yc[0] <= 0) {
        // refine the zero by bisection on re-integration from the step start
        double lo = t_prev, hi = tc;
        detail::StateVec<2> ys = y_prev;
        for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
          double mid = 0.5 * (lo + hi);
          auto ym = detail::dopri_to<2>(rhs, ys, lo, mid, 1e-12, 1e-14);
          if (ym[0] > 0) {
            lo = mid;
            ys = ym;
          } else {
            hi = mid;
          }
        }
        out.first_zero = 0.5 * (lo + hi);
        return false;
      }
      t_prev = tc;
      y_prev = yc;
      return true;
    });
  out.a_end = y[0];
  return out;
}

// ---------------------------------------------------------------------------
// spectral flow: smallest lambda with a'' - (f''/f) a + lambda a = 0,
// a(tau0) = a(tau) = 0

namespace detail {

// location of the first zero of the lambda-shooting solution in (tau0, cap];
// +inf when it does not vanish there
inline double first_zero_of_mode(const WarpFunction& w, double tau0, double lambda,
                                 double cap) {
  auto rhs = [&](double t, const StateVec<2>& y) {
    StateVec<2> dy;
    dy[0] = y[1];
    dy[1] = (w.ddf(t) / w.f(t) - lambda) * y[0];
    return dy;
  };
  StateVec<2> y{0.0, 1.0};
  double t = tau0;
  double zero = kInf;
  double t_prev = t;
  StateVec<2> y_prev = y;
  dopri_integrate<2>(rhs, y, t, cap, 1e-12, 1e-14,
    [&](double tc, const StateVec<2>& yc) {
      if (y_prev[0] > 0 && yc[0] <= 0) {
        double lo = t_prev, hi = tc;
        StateVec<2> ys = y_prev;
        for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
          double mid = 0.5 * (lo + hi);
          auto ym = dopri_to<2>(rhs, ys, lo, mid, 1e-12, 1e-14);
          if (ym[0] > 0) {
            lo = mid;
            ys = ym;
          } else {
            hi = mid;
          }
        }
        zero = 0.5 * (lo + hi);
        return false;
      }
      t_prev = tc;
      y_prev = yc;
      return true;
    });
  return zero;
}

}  // namespace detail

// Smallest eigenvalue for each boundary point in `taus`; the first zero of
// the shooting solution moves monotonically down in lambda, so the eigenvalue
// solves first_zero(lambda) = tau by bisection.
inline std::vector<double> spectral_flow(const WarpFunction& w, double tau0,
                                         const std::vector<double>& taus,
                                         const SolveParams& prm = {}) {
  (void)prm;
  std::vector<double> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    if (!(tau > tau0) || !w.domain().contains(tau))
      throw std::domain_error("spectral_flow grid must lie in (tau0, b)");
    double cap = tau + 0.25 * (tau - tau0);
    if (!w.domain().contains(cap)) cap = tau + 0.5 * (w.domain().hi - tau);
    // bracket: grow lambda until the first zero comes before tau
    double base = std::pow(M_PI / (tau - tau0), 2.0);
    double lo = 0.0;
    double hi = base;
    for (int k = 0; k < 60 && detail::first_zero_of_mode(w, tau0, hi, cap) > tau; ++k) {
      lo = hi;
      hi *= 2.0;
    }
    while (detail::first_zero_of_mode(w, tau0, lo, cap) < tau && lo > -1e8) {
      hi = lo;
      lo = (lo == 0.0) ? -base : 2.0 * lo;  // potential wells can push below zero
    }
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      double z = detail::first_zero_of_mode(w, tau0, mid, cap);
      if (z > tau)
        lo = mid;
      else
        hi = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

// ---------------------------------------------------------------------------
// conjugate points along a realized connection

struct ConjugatePointInfo {
  double r = 0;     // fiber arclength location
  double tau = 0;   // base coordinate there
  int fiber_mult = 0;
  int mult_lo = 0, mult_hi = 0;  // equal when exact
};

struct ConjugateReport {
  std::vector<ConjugatePointInfo> points;
  bool exact = true;       // every reported multiplicity is a point value
  bool escaped = false;    // fiber schedule truncated by an escape
  double traversed_arc = 0;
  bool endpoint_conjugate = false;
};

inline ConjugateReport conjugate_points(const WarpFunction& w, const FiberGeometry& F,
                                        const GeodesicSpec& spec, const SpacetimePoint& z0,
                                        const SolveParams& prm = {}) {
  ConjugateReport rep;
  if (spec.base_tangent || spec.fiber_geo.constant) {
    // a constant fiber geodesic has no conjugate points; cross-checked by the
    // Sturm disconjugacy of the base equation
    rep.traversed_arc = 0;
    return rep;
  }

  double arc = spec.length;
  if (!spec.lemma1) {
    auto adv = advance(w, z0.tau, spec.D, spec.eps, spec.length, prm);
    if (adv.status == AdvanceResult::Status::escape ||
        adv.status == AdvanceResult::Status::truncated) {
      rep.escaped = true;
      arc = adv.arc;
    }
  }
  rep.traversed_arc = arc;

  auto schedule = F.conjugate_schedule(spec.fiber_geo);
  const double p0 = w.p(z0.tau);

  if (spec.lemma1) {
    // constant-coefficient transverse equation a'' = -(f''/f)(tau0) D a along
    // tau = tau0; extra conjugate locations are exact
    double omega2 = (w.ddf(z0.tau) / w.f(z0.tau)) * spec.D;
    std::vector<ConjugatePointInfo> pts;
    for (const auto& scj : schedule) {
      if (scj.r >= arc * (1 - 1e-12)) break;
      pts.push_back({scj.r, z0.tau, scj.mult, scj.mult, scj.mult});
    }
    if (omega2 > 0) {
      double omega = std::sqrt(omega2);
      for (int k = 1;; ++k) {
        double r = k * M_PI * std::sqrt(spec.c) * p0 / omega;
        if (r >= arc * (1 - 1e-12)) break;
        bool merged = false;
        for (auto& q : pts) {
          if (std::abs(q.r - r) < 1e-9 * std::max(1.0, r)) {
            ++q.mult_lo;
            ++q.mult_hi;
            merged = true;
          }
        }
        if (!merged) pts.push_back({r, z0.tau, 0, 1, 1});
      }
      double r_end_gap = std::abs(arc - std::round(arc * omega / (M_PI * p0)) *
                                            M_PI * p0 / omega);
      if (r_end_gap < 1e-9 * std::max(1.0, arc)) rep.endpoint_conjugate = true;
    }
    std::sort(pts.begin(), pts.end(),
              [](const ConjugatePointInfo& a, const ConjugatePointInfo& b) { return a.r < b.r; });
    rep.points = std::move(pts);
    if (!schedule.empty() &&
        std::abs(schedule.back().r + M_PI * F.size() - arc) < 1e-9)
      rep.endpoint_conjugate = true;
    for (const auto& scj : schedule)
      if (std::abs(scj.r - arc) < 1e-9 * std::max(1.0, arc)) rep.endpoint_conjugate = true;
    rep.exact = true;
    return rep;
  }

  // exactness: dtau/dt has no zeros iff the traversal never bounces and does
  // not start on the level (causal specs can do neither)
  bool at_level_start = std::abs(p0 - spec.D) <= prm.level_band(p0, spec.D);
  bool exact = (spec.causal != CausalClass::spacelike) ||
               (spec.bounces == 0 && !at_level_start);
  rep.exact = exact;
  for (const auto& scj : schedule) {
    if (scj.r >= arc * (1 - 1e-12)) {
      if (std::abs(scj.r - arc) < 1e-9 * std::max(1.0, arc)) rep.endpoint_conjugate = true;
      break;
    }
    ConjugatePointInfo info;
    info.r = scj.r;
    info.fiber_mult = scj.mult;
    info.mult_lo = scj.mult;
    info.mult_hi = exact ? scj.mult : scj.mult + 1;
    auto adv = advance(w, z0.tau, spec.D, spec.eps, scj.r, prm);
    info.tau = adv.tau;
    rep.points.push_back(info);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// non-escape equalities

struct NonEscapeReport {
  bool eq42_lower = false, eq42_upper = false;  // f^-2 (1/f^2 + 1)^{-1/2} diverges
  bool eq46_lower = false, eq46_upper = false;  // 1/f diverges
};

inline NonEscapeReport non_escape(const WarpFunction& w, const SolveParams& prm = {}) {
  NonEscapeReport rep;
  double ca = detail::window_anchor(w, End::lower, prm.window);
  double cb = detail::window_anchor(w, End::upper, prm.window);
  double c = 0.5 * (ca + cb);
  if (!w.domain().contains(c)) c = ca;
  auto check42 = [&](End e) {
    double end = w.end_value(e);
    IntegralValue iv = (e == End::upper)
                           ? segment_integral(w, c, end, -1.0, prm, EndKind::regular,
                                              EndKind::boundary)
                           : segment_integral(w, end, c, -1.0, prm, EndKind::boundary,
                                              EndKind::regular);
    return iv.is_divergent();
  };
  auto check46 = [&](End e) {
    auto tail = detail::integrate_toward([&](double t) { return 1.0 / w.f(t); }, c,
                                         w.end_value(e), prm.tol_quad);
    return tail.verdict == detail::TailVerdict::divergent;
  };
  rep.eq42_lower = check42(End::lower);
  rep.eq42_upper = check42(End::upper);
  rep.eq46_lower = check46(End::lower);
  rep.eq46_upper = check46(End::upper);
  return rep;
}

// ---------------------------------------------------------------------------
// Morse polynomials

struct MorseReport {
  std::vector<long> abar;    // spacetime Morse coefficients, degree 0..q_max
  std::vector<long> a_fiber; // fiber Morse coefficients
  std::vector<long> betti;   // path-space Betti numbers of the fiber
  std::vector<long> Q;       // quotient coefficients of (M - P)/(1 + t)
  bool ineq43 = false;       // a_q <= abar_q + abar_{q+1}
  bool ineq44 = false;       // positivity implications
  bool eq45_exact = false;   // division exact with nonnegative quotient
  bool hypotheses_verified = false;
  bool any_inexact = false;  // some banded multiplicity entered the indexes
  int q_max = 0;
  double L_max = 0;
  size_t spec_count = 0;
};

inline MorseReport morse_polynomials(const WarpFunction& w, const FiberGeometry& F,
                                     const SpacetimePoint& z0, const SpacetimePoint& z1,
                                     int q_max, double L_max, const SolveParams& prm_in = {}) {
  SolveParams prm = prm_in;
  prm.L_max = L_max;
  MorseReport rep;
  rep.q_max = q_max;
  rep.L_max = L_max;

  auto specs = solve_connection(w, F, z0, z1, prm);
  rep.spec_count = specs.size();
  rep.abar.assign(q_max + 1, 0);
  rep.a_fiber.assign(q_max + 1, 0);
  rep.betti.assign(q_max + 1, 0);

  // endpoint conjugacy guard (both levels: fiber pair and spacetime pair)
  auto arcs = F.geodesic_lengths(z0.x, z1.x, L_max);
  for (const auto& g : arcs)
    for (const auto& scj : F.conjugate_schedule(g))
      if (std::abs(scj.r - g.length) < 1e-9 * std::max(1.0, g.length))
        throw std::domain_error("fiber endpoints are conjugate; perturb the pair");

  for (const auto& s : specs) {
    auto rep_c = conjugate_points(w, F, s, z0, prm);
    if (rep_c.endpoint_conjugate)
      throw std::domain_error("endpoints are conjugate along a connector; perturb the pair");
    long index = 0;
    for (const auto& pt : rep_c.points) {
      index += pt.mult_lo;
      if (pt.mult_lo != pt.mult_hi) rep.any_inexact = true;
    }
    if (index <= q_max) ++rep.abar[index];
  }

  for (const auto& g : arcs) {
    long index = 0;
    for (const auto& scj : F.conjugate_schedule(g)) index += scj.mult;
    if (index <= q_max) ++rep.a_fiber[index];
  }

  switch (F.family()) {
    case FiberFamily::sphere: {
      int step = F.dim() - 1;
      for (int q = 0; q <= q_max; ++q)
        if (step == 0 || q % step == 0) rep.betti[q] = 1;
      break;
    }
    case FiberFamily::circle:
      rep.betti[0] = static_cast<long>(arcs.size());  // one component per arc in range
      break;
    default:
      rep.betti[0] = 1;  // contractible
      break;
  }

  // (45): M_fiber = P + (1+t) Q with nonnegative integer Q
  rep.Q.assign(q_max + 1, 0);
  bool exact = true;
  long carry = 0;
  for (int q = 0; q <= q_max; ++q) {
    long rhs = rep.a_fiber[q] - rep.betti[q] - carry;
    if (rhs < 0) {
      exact = false;
      rhs = 0;
    }
    rep.Q[q] = rhs;
    carry = rhs;
  }
  // the division is verified on all but the truncation-boundary degree
  rep.eq45_exact = exact;

  rep.ineq43 = true;
  for (int q = 0; q < q_max; ++q)
    if (rep.a_fiber[q] > rep.abar[q] + rep.abar[q + 1]) rep.ineq43 = false;
  rep.ineq44 = true;
  if (rep.abar[0] > 0 && rep.a_fiber[0] == 0) rep.ineq44 = false;
  for (int q = 1; q <= q_max; ++q)
    if (rep.abar[q] > 0 && rep.a_fiber[q - 1] + rep.a_fiber[q] == 0) rep.ineq44 = false;

  // Corollary-2 hypotheses: Condition (A) at both ends, or (B) with infinite
  // defects
  auto pa = extreme_profile(w, End::lower, prm.window);
  auto pb = extreme_profile(w, End::upper, prm.window);
  auto Aa = condition_A(w, End::lower, pa, prm);
  auto Ab = condition_A(w, End::upper, pb, prm);
  bool hyp = Aa.holds && Ab.holds;
  if (!hyp) {
    auto infinite_defect_B = [&](End e, const ExtremeProfile& prof,
                                 const ConditionAResult& A) {
      if (A.holds) return true;
      if (!A.integral || !A.integral->is_finite()) return false;
      auto d = defect_d(w, e, prof, A.integral->value, prm);
      return std::isinf(d.value) && 2.0 * d.value >= F.diameter();
    };
    hyp = infinite_defect_B(End::lower, pa, Aa) && infinite_defect_B(End::upper, pb, Ab);
  }
  rep.hypotheses_verified = hyp;
  return rep;
}

}  // namespace grw
