#pragma once

// Causal relation of point pairs and construction of all connecting
// geodesics by root-finding over the parameter K. K > 0 encodes eps = +1
// with D = 1/f^2(tau0) - K, K < 0 encodes eps = -1 with D = 1/f^2(tau0) + K;
// for fixed fiber length L the map K -> tau(K) is continuous on its domain,
// so roots of tau(K) = tau'_0 are bracketed per continuity segment and
// bisected.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "grw/classify.hpp"
#include "grw/fiber.hpp"
#include "grw/integrate.hpp"
#include "grw/numeric.hpp"
#include "grw/quadrature.hpp"
#include "grw/warp.hpp"

namespace grw {

struct SpacetimePoint {
  double tau;
  FiberPoint x;
};

enum class CausalClass { timelike, lightlike, spacelike };

inline const char* to_string(CausalClass c) {
  switch (c) {
    case CausalClass::timelike: return "timelike";
    case CausalClass::lightlike: return "lightlike";
    case CausalClass::spacelike: return "spacelike";
  }
  return "?";
}

struct RelationReport {
  enum class Kind { timelike, lightlike_within_tol, not_causal };
  Kind kind = Kind::not_causal;
  bool future = true;          // z1 lies to the future of z0 (after ordering)
  double integral_f_inv = 0;   // integral of 1/f between the tau values
  double fiber_distance = 0;
  double margin = 0;           // integral - distance
};

inline const char* to_string(RelationReport::Kind k) {
  switch (k) {
    case RelationReport::Kind::timelike: return "timelike-related";
    case RelationReport::Kind::lightlike_within_tol: return "lightlike within tolerance";
    case RelationReport::Kind::not_causal: return "not causally related";
  }
  return "?";
}

inline double integral_f_inverse(const WarpFunction& w, double a, double b,
                                 const SolveParams& prm = {}) {
  if (a == b) return 0.0;
  if (a > b) std::swap(a, b);
  return detail::tanh_sinh([&](double t) { return 1.0 / w.f(t); }, a, b, prm.tol_quad).value;
}

inline RelationReport relate(const WarpFunction& w, const FiberGeometry& F,
                             const SpacetimePoint& z0, const SpacetimePoint& z1,
                             const SolveParams& prm = {}) {
  RelationReport rep;
  rep.future = z1.tau >= z0.tau;
  rep.integral_f_inv = integral_f_inverse(w, z0.tau, z1.tau, prm);
  rep.fiber_distance = F.distance(z0.x, z1.x);
  rep.margin = rep.integral_f_inv - rep.fiber_distance;
  double band = prm.tol_rel * std::max(1.0, rep.fiber_distance);
  if (std::abs(rep.margin) <= band)
    rep.kind = RelationReport::Kind::lightlike_within_tol;
  else if (rep.margin > 0)
    rep.kind = RelationReport::Kind::timelike;
  else
    rep.kind = RelationReport::Kind::not_causal;
  return rep;
}

// ---------------------------------------------------------------------------

struct TauOfK {
  enum class Status { ok, escape, inadmissible, truncated, continuity_point };
  Status status = Status::inadmissible;
  double tau = 0;
  int bounces = 0;
  double arc = 0;
  bool divergent_leg = false;
};

inline TauOfK tau_of_K(const WarpFunction& w, double tau0, double L, double K,
                       const SolveParams& prm = {}) {
  TauOfK out;
  double p0 = w.p(tau0);
  double D;
  int eps;
  if (K == 0.0) {
    double slope = w.dp(tau0);
    if (std::abs(slope) <= prm.slope_band(p0, p0)) {
      out.status = TauOfK::Status::continuity_point;
      out.tau = tau0;  // Lemma-5 continuous extension
      return out;
    }
    D = p0;
    eps = slope > 0 ? +1 : -1;
  } else {
    D = p0 - std::abs(K);
    eps = K > 0 ? +1 : -1;
  }
  try {
    auto adv = advance(w, tau0, D, eps, L, prm);
    out.bounces = adv.bounces;
    out.arc = adv.arc;
    out.tau = adv.tau;
    out.divergent_leg = adv.in_divergent_leg;
    switch (adv.status) {
      case AdvanceResult::Status::ok: out.status = TauOfK::Status::ok; break;
      case AdvanceResult::Status::escape: out.status = TauOfK::Status::escape; break;
      case AdvanceResult::Status::truncated: out.status = TauOfK::Status::truncated; break;
    }
  } catch (const std::exception&) {
    out.status = TauOfK::Status::inadmissible;
  }
  return out;
}

// ---------------------------------------------------------------------------

struct GeodesicSpec {
  double D = 0;
  double c = 1.0;
  int eps = 0;          // 0 for Lemma-1 and base-tangent specs
  double K = 0;
  int bounces = 0;
  double length = 0;    // fiber geodesic length (0 for base-tangent)
  FiberGeodesic fiber_geo;
  bool lemma1 = false;
  bool base_tangent = false;
  double residual = 0;
  CausalClass causal = CausalClass::spacelike;
};

inline CausalClass causal_class(double D, double band = 1e-9) {
  if (D < -band) return CausalClass::timelike;
  if (D > band) return CausalClass::spacelike;
  return CausalClass::lightlike;
}

namespace detail {

inline double auto_L_max(const WarpFunction& w, const FiberGeometry& F,
                         const SpacetimePoint& z0, const SpacetimePoint& z1,
                         const SolveParams& prm) {
  if (prm.L_max > 0) return prm.L_max;
  double budget = integral_f_inverse(w, z0.tau, z1.tau, prm);
  double diam = F.diameter();
  double d = F.distance(z0.x, z1.x);
  if (std::isfinite(diam)) return 4.0 * diam + budget;
  return d + budget + 1.0;
}

inline std::vector<double> k_scan_grid(double K_scale, double K_max, int n) {
  std::vector<double> g;
  int n_log = n / 4;
  int n_uni = n / 2;
  double K_min = 1e-9 * K_scale;
  for (int s : {-1, +1}) {
    for (int j = 0; j <= n_log; ++j) {
      double K = K_min * std::pow(K_max / K_min, double(j) / n_log);
      g.push_back(s * K);
    }
    for (int j = 1; j <= n_uni; ++j) g.push_back(s * K_max * double(j) / n_uni);
  }
  g.push_back(0.0);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

}  // namespace detail

// All connecting geodesics from z0 to z1 found by the K-scan, plus the
// Lemma-1 constant-fiber connections and the base-tangent special case.
inline std::vector<GeodesicSpec> solve_connection(const WarpFunction& w,
                                                  const FiberGeometry& F,
                                                  const SpacetimePoint& z0,
                                                  const SpacetimePoint& z1,
                                                  const SolveParams& prm = {}) {
  if (!w.domain().contains(z0.tau) || !w.domain().contains(z1.tau))
    throw std::domain_error("spacetime points must have interior tau");
  if (!F.weakly_convex_for_pair(z0.x, z1.x))
    throw std::domain_error("fiber pair is not weakly convex");

  std::vector<GeodesicSpec> specs;
  const double tau0 = z0.tau, tau1 = z1.tau;
  const double p0 = w.p(tau0);
  const double scale = w.domain().scale();
  const double d = F.distance(z0.x, z1.x);
  const double L_max = detail::auto_L_max(w, F, z0, z1, prm);

  if (d < 1e-12) {
    if (std::abs(tau1 - tau0) > 1e-14 * scale) {
      GeodesicSpec s;
      s.base_tangent = true;
      s.c = 0.0;
      s.D = -(tau1 - tau0) * (tau1 - tau0);
      s.length = 0;
      s.fiber_geo = F.constant_geodesic(z0.x);
      s.causal = CausalClass::timelike;
      s.residual = 0;
      specs.push_back(s);
    }
    return specs;
  }

  auto lengths = F.geodesic_lengths(z0.x, z1.x, L_max);
  const bool same_tau = std::abs(tau1 - tau0) <= 1e-12 * std::max(1.0, std::abs(tau0));
  const bool critical = std::abs(w.dp(tau0)) <= prm.slope_band(p0, p0);

  if (same_tau && critical) {
    for (const auto& g : lengths) {
      GeodesicSpec s;
      s.lemma1 = true;
      s.D = p0;
      s.K = 0;
      s.eps = 0;
      s.bounces = 0;
      s.length = g.length;
      s.fiber_geo = g;
      s.residual = 0;
      s.causal = CausalClass::spacelike;
      specs.push_back(s);
    }
  }

  const double K_scale = std::max(1.0, p0);
  const double K_cap = prm.K_max * K_scale;
  auto grid = detail::k_scan_grid(K_scale, K_cap, prm.scan_points);

  // coarse parameters for the bracketing sweep; roots are re-polished at the
  // requested precision afterwards
  SolveParams coarse = prm;
  coarse.tol_quad = std::max(prm.tol_quad, 1e-7);
  coarse.turn_scan = std::max(256, prm.turn_scan / 4);

  // one leg structure per K, shared by all fiber lengths
  auto eval_K = [&](double K, const SolveParams& pp) -> std::optional<LegSums> {
    double D;
    int eps;
    if (K == 0.0) {
      double slope = w.dp(tau0);
      if (std::abs(slope) <= pp.slope_band(p0, p0)) return std::nullopt;
      D = p0;
      eps = slope > 0 ? +1 : -1;
    } else {
      D = p0 - std::abs(K);
      eps = K > 0 ? +1 : -1;
    }
    try {
      check_admissible(w, tau0, D, pp);
      return leg_sums(w, tau0, D, eps, pp.n_max, pp);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };

  struct KEval {
    double K;
    bool has_legs = false;
    LegSums legs;
  };
  std::vector<KEval> evals;
  evals.reserve(grid.size());
  for (double K : grid) {
    KEval e;
    e.K = K;
    auto ls = eval_K(K, coarse);
    if (ls) {
      e.has_legs = true;
      e.legs = std::move(*ls);
    } else if (K == 0.0 && same_tau && critical) {
      // Lemma-5 continuity point, already handled by the Lemma-1 branch
    }
    evals.push_back(std::move(e));
  }

  auto tau_at = [&](const KEval& e, double L, const SolveParams& pp,
                    TauOfK& out) -> bool {
    if (!e.has_legs) {
      if (e.K == 0.0 && same_tau && critical) {
        out.status = TauOfK::Status::continuity_point;
        out.tau = tau0;
        return true;
      }
      return false;
    }
    double D = p0 - std::abs(e.K);
    if (e.K == 0.0) D = p0;
    auto adv = advance_on_legs(w, e.legs, D, L, pp);
    out.bounces = adv.bounces;
    out.arc = adv.arc;
    out.tau = adv.tau;
    switch (adv.status) {
      case AdvanceResult::Status::ok: out.status = TauOfK::Status::ok; return true;
      case AdvanceResult::Status::escape:
        out.status = TauOfK::Status::escape;
        return true;  // the boundary tau still orients the bracketing (Lemma 6)
      case AdvanceResult::Status::truncated:
        out.status = TauOfK::Status::truncated;
        return false;
    }
    return false;
  };

  for (const auto& g : lengths) {
    const double L = g.length;
    std::vector<TauOfK> vals(evals.size());
    std::vector<bool> ok(evals.size());
    for (size_t i = 0; i < evals.size(); ++i) ok[i] = tau_at(evals[i], L, coarse, vals[i]);
    auto sval = [&](const TauOfK& v) { return v.tau - tau1; };
    auto eval_once = [&](double K, const SolveParams& pp, TauOfK& vm) -> bool {
      auto ls = eval_K(K, pp);
      if (!ls) return false;
      double D = (K == 0.0) ? p0 : p0 - std::abs(K);
      auto adv = advance_on_legs(w, *ls, D, L, pp);
      vm.bounces = adv.bounces;
      vm.tau = adv.tau;
      vm.status = adv.status == AdvanceResult::Status::ok ? TauOfK::Status::ok
                  : adv.status == AdvanceResult::Status::escape
                      ? TauOfK::Status::escape
                      : TauOfK::Status::truncated;
      return vm.status != TauOfK::Status::truncated;
    };
    for (size_t i = 0; i + 1 < evals.size(); ++i) {
      if (!ok[i] || !ok[i + 1]) continue;
      double s0 = sval(vals[i]), s1 = sval(vals[i + 1]);
      if ((s0 > 0) == (s1 > 0)) continue;
      // phase 1: narrow the bracket at scan precision
      double lo = evals[i].K, hi = evals[i + 1].K;
      double slo = s0;
      for (int it = 0; it < 60 && std::abs(hi - lo) > 1e-4 * K_scale; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        TauOfK vm;
        if (!eval_once(mid, coarse, vm)) {
          hi = mid;
          continue;
        }
        double sm = sval(vm);
        if ((sm > 0) == (slo > 0)) {
          lo = mid;
          slo = sm;
        } else {
          hi = mid;
        }
      }
      // phase 2: re-seed at full precision (the coarse signs carry the scan's
      // tau error, so the fine bracket must be re-established)
      double width = std::max(hi - lo, 1e-12 * K_scale);
      double flo = std::max(evals[i].K, lo - 2.0 * width);
      double fhi = std::min(evals[i + 1].K, hi + 2.0 * width);
      TauOfK vlo, vhi;
      bool glo = eval_once(flo, prm, vlo);
      bool ghi = eval_once(fhi, prm, vhi);
      TauOfK best;
      double bestK = 0;
      bool have_best = false;
      auto note = [&](double K, const TauOfK& v) {
        if (v.status != TauOfK::Status::ok) return;
        if (!have_best || std::abs(sval(v)) < std::abs(sval(best))) {
          best = v;
          bestK = K;
          have_best = true;
        }
      };
      if (glo) note(flo, vlo);
      if (ghi) note(fhi, vhi);
      if (!(glo && ghi && (sval(vlo) > 0) != (sval(vhi) > 0))) {
        // no fine sign change at the re-seeded ends: sample inside
        bool found = false;
        TauOfK prev_v = vlo;
        double prev_K = flo;
        bool prev_good = glo;
        for (int j = 1; j <= 16 && !found; ++j) {
          double K = flo + (fhi - flo) * j / 16.0;
          TauOfK v;
          if (!eval_once(K, prm, v)) continue;
          note(K, v);
          if (prev_good && (sval(prev_v) > 0) != (sval(v) > 0)) {
            flo = prev_K;
            vlo = prev_v;
            fhi = K;
            vhi = v;
            found = true;
          }
          prev_v = v;
          prev_K = K;
          prev_good = true;
        }
        if (!found) {
          if (have_best && std::abs(sval(best)) <= prm.tol_root) {
            // grazing root resolved at an endpoint
          } else {
            continue;
          }
        }
      }
      if (!(have_best && std::abs(sval(best)) <= prm.tol_root)) {
        double fslo = sval(vlo);
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (flo + fhi);
          if (mid == flo || mid == fhi) break;
          TauOfK vm;
          if (!eval_once(mid, prm, vm)) {
            fhi = mid;
            continue;
          }
          double sm = sval(vm);
          note(mid, vm);
          if (have_best && std::abs(sval(best)) <= prm.tol_root * 1e-2) break;
          if ((sm > 0) == (fslo > 0)) {
            flo = mid;
            fslo = sm;
          } else {
            fhi = mid;
          }
        }
      }
      if (!have_best) continue;
      if (std::abs(sval(best)) > prm.tol_root) continue;
      if (std::abs(bestK) < 1e-11 * K_scale && same_tau && critical)
        continue;  // the Lemma-1 connection, already emitted
      GeodesicSpec s;
      s.K = bestK;
      s.D = p0 - std::abs(bestK);
      s.eps = bestK > 0 ? +1 : (bestK < 0 ? -1 : (w.dp(tau0) > 0 ? +1 : -1));
      s.bounces = best.bounces;
      s.length = L;
      s.fiber_geo = g;
      s.residual = std::abs(sval(best));
      s.causal = causal_class(s.D);
      specs.push_back(s);
    }
  }

  // dedup by (L, eps, bounces, D)
  std::sort(specs.begin(), specs.end(), [](const GeodesicSpec& a, const GeodesicSpec& b) {
    if (a.length != b.length) return a.length < b.length;
    if (a.eps != b.eps) return a.eps < b.eps;
    if (a.bounces != b.bounces) return a.bounces < b.bounces;
    return a.D < b.D;
  });
  std::vector<GeodesicSpec> out;
  for (const auto& s : specs) {
    bool dup = false;
    for (const auto& t : out) {
      if (std::abs(t.length - s.length) < 1e-9 && t.eps == s.eps &&
          t.bounces == s.bounces &&
          std::abs(t.D - s.D) < 1e-6 * std::max(1.0, std::abs(t.D)))
        dup = true;
    }
    if (!dup) out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// realized curves

struct CurveSample {
  double t, tau, r, dtau_dt;
};

struct GeodesicCurve {
  std::vector<CurveSample> samples;
  double endpoint_residual = 0;
  CausalClass causal = CausalClass::spacelike;
};

inline GeodesicCurve build_geodesic(const WarpFunction& w, const FiberGeometry& F,
                                    const GeodesicSpec& spec, const SpacetimePoint& z0,
                                    const SpacetimePoint& z1, int N = 201,
                                    const SolveParams& prm = {}) {
  (void)F;
  GeodesicCurve out;
  out.causal = spec.causal;
  if (N < 2) N = 2;
  if (spec.base_tangent) {
    double dtau = z1.tau - z0.tau;
    for (int i = 0; i < N; ++i) {
      double t = double(i) / (N - 1);
      out.samples.push_back({t, z0.tau + dtau * t, 0.0, dtau});
    }
    out.endpoint_residual = 0.0;
    return out;
  }
  if (spec.lemma1) {
    double p0 = w.p(z0.tau);
    for (int i = 0; i < N; ++i) {
      double r = spec.length * double(i) / (N - 1);
      double t = r / (std::sqrt(spec.c) * p0);
      out.samples.push_back({t, z0.tau, r, 0.0});
    }
    out.endpoint_residual = std::abs(z1.tau - z0.tau);
    return out;
  }
  // sample the fiber arclength uniformly plus the exact bounce arcs, so the
  // folds of the profile land on samples
  std::vector<double> r_grid;
  r_grid.reserve(N + 8);
  for (int i = 0; i < N; ++i) r_grid.push_back(spec.length * double(i) / (N - 1));
  {
    auto ls = leg_sums(w, z0.tau, spec.D, spec.eps, prm.n_max, prm);
    for (double cumulative : ls.cumulative)
      if (std::isfinite(cumulative) && cumulative > 0 && cumulative < spec.length)
        r_grid.push_back(cumulative);
  }
  std::sort(r_grid.begin(), r_grid.end());
  r_grid.erase(std::unique(r_grid.begin(), r_grid.end()), r_grid.end());

  double t_acc = 0.0;
  double prev_r = 0.0, prev_rate = 0.0;
  for (size_t i = 0; i < r_grid.size(); ++i) {
    double r = r_grid[i];
    double tau;
    int bounces = 0;
    if (r == 0.0) {
      tau = z0.tau;
    } else {
      auto adv = advance(w, z0.tau, spec.D, spec.eps, r, prm);
      tau = adv.tau;
      bounces = adv.bounces;
    }
    double gap = std::max(0.0, w.p(tau) - spec.D);
    int dir = spec.eps * ((bounces % 2 == 0) ? 1 : -1);
    double v = dir * std::sqrt(gap);
    double rate = 1.0 / (std::sqrt(spec.c) * w.p(tau));  // dt/dr = f^2/sqrt(c)
    if (i > 0) t_acc += 0.5 * (rate + prev_rate) * (r - prev_r);
    out.samples.push_back({t_acc, tau, r, v});
    prev_r = r;
    prev_rate = rate;
  }
  out.endpoint_residual = std::abs(out.samples.back().tau - z1.tau);
  return out;
}

// ---------------------------------------------------------------------------
// Theorem 2(i): unique causal connector for strongly convex fibers

struct UniquenessReport {
  double D0 = 0;
  double residual = 0;
  int monotonicity_violations = 0;
  bool base_tangent = false;
  CausalClass causal = CausalClass::timelike;
};

inline UniquenessReport causal_uniqueness(const WarpFunction& w, const FiberGeometry& F,
                                          const SpacetimePoint& za, const SpacetimePoint& zb,
                                          const SolveParams& prm = {}) {
  if (!F.strongly_convex())
    throw std::domain_error("causal_uniqueness requires a strongly convex fiber");
  SpacetimePoint z0 = za, z1 = zb;
  if (z1.tau < z0.tau) std::swap(z0, z1);
  auto rel = relate(w, F, z0, z1, prm);
  if (rel.kind == RelationReport::Kind::not_causal)
    throw std::domain_error("causal_uniqueness requires a causally related pair");
  UniquenessReport rep;
  double d = F.distance(z0.x, z1.x);
  if (d < 1e-12) {
    rep.base_tangent = true;
    rep.D0 = -(z1.tau - z0.tau) * (z1.tau - z0.tau);
    rep.causal = causal_class(rep.D0);
    return rep;
  }
  auto I = [&](double D) {
    auto v = segment_integral(w, z0.tau, z1.tau, D, prm, EndKind::regular, EndKind::regular);
    return v.is_finite() ? v.value : kInf;
  };
  // monotonicity of the integral in D on a grid
  double prev = -kInf;
  for (int i = 0; i <= 32; ++i) {
    double D = -50.0 + 50.0 * i / 32.0;
    double v = I(D);
    if (v < prev - 1e-12) ++rep.monotonicity_violations;
    prev = v;
  }
  double hi = 0.0;
  double fhi = I(hi) - d;
  if (fhi <= 0) {
    // lightlike equality (within tolerance): the root sits at D = 0
    rep.D0 = 0.0;
    rep.residual = std::abs(fhi);
    rep.causal = CausalClass::lightlike;
    return rep;
  }
  double lo = -1.0;
  while (I(lo) > d && lo > -1e7) lo *= 2.0;
  double root = bisect([&](double D) { return I(D) - d; }, lo, hi, I(lo) - d, fhi, 0.0, 200);
  rep.D0 = root;
  rep.residual = std::abs(I(root) - d);
  rep.causal = causal_class(rep.D0, prm.tol_rel);
  return rep;
}

// ---------------------------------------------------------------------------
// Discussion-style obstruction windows

struct ObstructionReport {
  bool applicable = false;
  std::vector<Interval1D> A_window, B_window;
  std::vector<double> lengths;
  bool joinable_mid = false;     // some length in A cap B
  bool eq26_certificate = false; // all lengths avoid both unions
  bool certificate_complete = false;  // every length below the computed coverage
  ResidualTable table;
};

inline ObstructionReport obstruction_windows(const WarpFunction& w, double tau0,
                                             const ResidualWindow& window,
                                             const std::vector<double>& lengths,
                                             const SolveParams& prm = {}) {
  ObstructionReport rep;
  rep.lengths = lengths;
  rep.table = residual_sequences(w, tau0, prm.n_max, window, prm);
  rep.applicable = rep.table.applicable;
  if (!rep.applicable) return rep;
  rep.A_window = residual_union_r(rep.table);
  rep.B_window = residual_union_l(rep.table);
  bool all_avoid = true, any_mid = false, all_below = true;
  double coverage = std::min(rep.table.r_s.back().value, rep.table.l_s.back().value);
  for (double L : lengths) {
    bool inA = union_contains(rep.A_window, L);
    bool inB = union_contains(rep.B_window, L);
    if (inA && inB) any_mid = true;
    if (inA || inB) all_avoid = false;
    if (L > coverage) all_below = false;
  }
  rep.joinable_mid = any_mid;
  rep.eq26_certificate = all_avoid && !lengths.empty();
  rep.certificate_complete = all_below;
  return rep;
}

// ---------------------------------------------------------------------------
// static dual reading for 1-D fibers (the reversed metric dy^2 - f^2 dx^2)

struct StaticDualReport {
  // relation labels in the static reading (Definition 5 swapped)
  enum class Kind { spacelike, lightlike, timelike };
  Kind kind = Kind::spacelike;
  double integral_f_inv = 0;
  double separation = 0;
  std::vector<GeodesicSpec> specs;  // causal classes still carry the GRW labels
  bool unique_connector = false;
  bool connector_conjugate_free = false;
};

inline const char* to_string(StaticDualReport::Kind k) {
  switch (k) {
    case StaticDualReport::Kind::spacelike: return "spacelike-related";
    case StaticDualReport::Kind::lightlike: return "lightlike-related";
    case StaticDualReport::Kind::timelike: return "timelike-related";
  }
  return "?";
}

inline StaticDualReport static_dual(const WarpFunction& w, const FiberGeometry& F,
                                    const SpacetimePoint& z0, const SpacetimePoint& z1,
                                    const SolveParams& prm = {}) {
  if (F.dim() != 1)
    throw std::domain_error("static dual requires a 1-dimensional fiber");
  StaticDualReport rep;
  rep.integral_f_inv = integral_f_inverse(w, z0.tau, z1.tau, prm);
  rep.separation = F.distance(z0.x, z1.x);
  double band = prm.tol_rel * std::max(1.0, rep.separation);
  double margin = rep.integral_f_inv - rep.separation;
  if (std::abs(margin) <= band)
    rep.kind = StaticDualReport::Kind::lightlike;
  else if (margin > 0)
    rep.kind = StaticDualReport::Kind::spacelike;
  else
    rep.kind = StaticDualReport::Kind::timelike;
  rep.specs = solve_connection(w, F, z0, z1, prm);
  if (rep.kind != StaticDualReport::Kind::timelike) {
    rep.unique_connector = rep.specs.size() == 1;
    // Corollary 4/5: the connector has no zeros of the base derivative, hence
    // no conjugate points
    rep.connector_conjugate_free =
        rep.unique_connector && rep.specs[0].bounces == 0 && !rep.specs[0].lemma1;
  }
  return rep;
}

}  // namespace grw
