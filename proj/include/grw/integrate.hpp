#pragma once

// The singular reparameterization integrals of h^eps with turning points and
// the generalized bounce integral. Everything here is a function of
// p = 1/f^2 and a level D: the integrand is p (p - D)^{-1/2}, integrable at
// simple turning points (gap ~ |tau - tau*|) and divergent at tangential
// ones (gap ~ |tau - tau*|^2).

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "grw/numeric.hpp"
#include "grw/quadrature.hpp"
#include "grw/warp.hpp"

namespace grw {

struct SolveParams {
  double tol_quad = 1e-10;   // absolute quadrature target per leg
  double tol_root = 1e-8;    // endpoint residual target for connections
  double tol_level = 1e-9;   // relative band for "1/f^2 equals D"
  double tol_rel = 1e-8;     // relative band for the lightlike relation
  double slope_tol = 1e-8;   // |dp/dtau| below this counts as tangential
  int scan_points = 400;     // K-scan grid size
  int turn_scan = 1024;      // turning-point search grid size
  double K_max = 1e3;        // K-scan half-range (rescaled by p(tau0))
  int n_max = 8;             // bounce cap
  double L_max = 0;          // fiber length budget; 0 = automatic
  int q_max = 5;             // Morse polynomial truncation degree
  int n_grid = 33;           // tau0 sample grid for Condition (R)
  WindowParams window{};     // Definition-1 windows
  int d_octaves = 40;        // depth of the D -> m probe sequence

  // "1/f^2 equals D" bands are relative to the local scale of the two values;
  // an absolute floor of 1 would swamp exponentially small levels
  double level_band(double D) const { return tol_level * std::max(1.0, std::abs(D)); }
  double level_band(double pval, double D) const {
    return tol_level * std::max({std::abs(pval), std::abs(D), 1e-300});
  }
  double slope_band(double pval, double D) const {
    return slope_tol * std::max({std::abs(pval), std::abs(D), 1e-300});
  }
};

// ---------------------------------------------------------------------------

enum class DivergenceReason {
  none,
  tangential_turning,
  interior_tangency,
  nonintegrable_tail,
  tail_inconclusive,
  below_level,
};

struct IntegralValue {
  enum class Kind { finite, divergent, undefined };
  Kind kind = Kind::finite;
  double value = 0.0;
  DivergenceReason reason = DivergenceReason::none;

  static IntegralValue finite(double v) { return {Kind::finite, v, DivergenceReason::none}; }
  static IntegralValue divergent(DivergenceReason r) { return {Kind::divergent, kInf, r}; }
  static IntegralValue undefined(DivergenceReason r) { return {Kind::undefined, 0.0, r}; }
  bool is_finite() const { return kind == Kind::finite; }
  bool is_divergent() const { return kind == Kind::divergent; }
  // extended-real view: finite value, +inf when divergent
  double extended() const { return is_finite() ? value : kInf; }
};

struct TurningPoints {
  double a_star = -kInf, b_star = kInf;
  bool tangent_at_a = false, tangent_at_b = false;
  bool a_is_boundary = true, b_is_boundary = true;  // hit the interval end, no crossing
};

namespace detail {

struct CrossingResult {
  bool found = false;      // a crossing strictly before the interval end
  double location = 0.0;
  bool tangent = false;
};

// Scale-free tangency classifier at a level crossing: fit the dyadic decay
// exponent of the gap p - D on the side where the gap is positive. A simple
// crossing has exponent 1, a tangential one >= 2; the threshold sits at 1.5.
// Raw |dp| thresholds fail here because transversal crossings of a deep level
// have slope proportional to the level itself.
inline bool tangential_crossing(const WarpFunction& w, double root, int inside,
                                double D, double h_scale) {
  const double eta = 1e-14 * (std::abs(D) + std::abs(w.p(root))) + 1e-320;
  const double h_floor = 1e4 * std::abs(root) * 1e-16 + 1e-30;
  double h = std::max(h_scale, h_floor);
  // descend to the smallest scale where all samples sit cleanly above the
  // noise; a wide window can straddle structure (narrow plateaus) and fake a
  // superlinear exponent, so only the deepest clean fit decides
  double fit = -1.0;
  for (int attempt = 0; attempt < 40 && h > h_floor * 0.5; ++attempt, h *= 0.5) {
    std::vector<double> gs;
    bool good = true;
    for (int j = 0; j <= 4; ++j) {
      double hj = h * std::pow(2.0, -j);
      double tau = root + inside * hj;
      if (!w.domain().contains(tau)) {
        good = false;
        break;
      }
      double g = w.p(tau) - D;
      if (!(g > 100.0 * eta)) {
        good = false;
        break;
      }
      gs.push_back(g);
    }
    if (!good) {
      if (fit >= 0) break;  // keep the deepest clean fit found so far
      continue;
    }
    std::vector<double> es;
    for (size_t j = 0; j + 1 < gs.size(); ++j)
      es.push_back(std::log2(gs[j] / gs[j + 1]));
    std::nth_element(es.begin(), es.begin() + es.size() / 2, es.end());
    fit = es[es.size() / 2];
  }
  if (fit < 0) return true;  // cannot certify transversality
  return fit >= 1.5;
}

// First crossing of p = D moving from `from` in direction `dir`, with
// near-machine bisection refinement and tangency detection.
inline CrossingResult first_crossing(const WarpFunction& w, double from, int dir,
                                     double D, const SolveParams& prm) {
  CrossingResult res;
  const double end = dir > 0 ? w.domain().hi : w.domain().lo;
  auto g = [&](double t) { return w.p(t) - D; };
  const int N = prm.turn_scan;
  const int N_tail = 44;  // geometric nodes packed against a finite end
  const double scale = std::max(1.0, std::abs(from));
  auto node = [&](int i) {
    if (std::isfinite(end)) {
      if (i <= N) return from + (end - from) * double(i) / (N + 1);
      // approach the end geometrically so crossings in the last uniform
      // sliver are still seen
      return end - (end - from) / (N + 1) * std::pow(2.0, -(i - N));
    }
    double s = double(i) / N;
    double u = s / (1.0 - s * 0.999999);
    return from + dir * scale * 2.0 * u;
  };
  const int i_max = std::isfinite(end) ? N + N_tail : N;
  double t_prev = from;
  double g_prev = g(from);
  int touch_budget = 16;  // golden refinements of dip candidates per scan
  // last node with a strictly positive gap; exact zeros can be underflow of
  // a positive quantity and never count as crossings by themselves
  bool anchor_set = g_prev > 0;
  double t_pos = from, g_pos = g_prev;
  auto refine_root = [&](double lo, double hi, double glo, double ghi) {
    double root = bisect(g, lo, hi, glo, ghi, 0.0);
    res.found = true;
    res.location = root;
    // fit scale: the run back toward the anchor; the fit shrinks it itself
    double h_scale = 0.125 * (std::abs(root - from) + 1e-12);
    res.tangent = tangential_crossing(w, root, -dir, D, std::min(h_scale, 1.0));
  };
  for (int i = 1; i <= i_max; ++i) {
    double t = node(i);
    if (dir > 0 ? t >= end : t <= end) break;
    if (!w.domain().contains(t)) break;
    if (dir > 0 ? t <= t_prev : t >= t_prev) continue;  // tail nodes at resolution limit
    double gt = g(t);
    if (gt < 0 && anchor_set) {
      if (dir > 0)
        refine_root(t_pos, t, g_pos, gt);
      else
        refine_root(t, t_pos, gt, g_pos);
      return res;
    }
    // near-touch: a strictly interior local dip onto the level without a
    // sign change is a tangential turning point; every strict local minimum
    // gets refined because the scan resolution says nothing about how close
    // the dip comes to the level
    if (i >= 2 && gt > 0 && touch_budget > 0) {
      double t_next = node(i + 1);
      bool next_in = w.domain().contains(t_next) && (dir > 0 ? t_next < end : t_next > end);
      if (next_in) {
        double gn = g(t_next);
        if (gt < g_prev && gt <= gn) {
          --touch_budget;
          double lo = std::min(t_prev, t_next);
          double hi = std::max(t_prev, t_next);
          double tm = golden_min(g, lo, hi, 1e-14 * std::max(1.0, std::abs(t)));
          double gm = g(tm);
          double h2 = 0.01 * (hi - lo);
          bool local_min = tm > lo + h2 && tm < hi - h2 && g(tm - h2) > gm && g(tm + h2) > gm;
          if (local_min && gm <= prm.level_band(w.p(tm), D)) {
            res.found = true;
            res.location = tm;
            res.tangent = true;
            return res;
          }
        }
      }
    }
    t_prev = t;
    g_prev = gt;
    if (gt > 0) {
      anchor_set = true;
      t_pos = t;
      g_pos = gt;
    }
  }
  res.found = false;
  res.location = end;
  return res;
}

}  // namespace detail

// Turning points a*(D), b*(D) relative to tau0, following the slope rule at
// tau0 when 1/f^2(tau0) sits on the level.
inline TurningPoints turning_points(const WarpFunction& w, double tau0, double D,
                                    const SolveParams& prm = {}) {
  if (!w.domain().contains(tau0)) throw std::domain_error("tau0 outside interval");
  const double p0 = w.p(tau0);
  const double band = prm.level_band(p0, D);
  if (p0 < D - band) throw std::domain_error("point below level: 1/f^2(tau0) < D");
  TurningPoints tp;
  const bool at_level = std::abs(p0 - D) <= band;
  const double slope = w.dp(tau0);

  auto search = [&](int dir) {
    auto c = detail::first_crossing(w, tau0, dir, D, prm);
    return c;
  };

  if (at_level) {
    if (std::abs(slope) <= prm.slope_band(p0, D)) {
      tp.a_star = tp.b_star = tau0;
      tp.tangent_at_a = tp.tangent_at_b = true;
      tp.a_is_boundary = tp.b_is_boundary = false;
      return tp;
    }
    if (slope > 0) {
      // moving right leaves the level; the right turning point is the next
      // crossing, the left one is tau0 itself
      auto c = search(+1);
      tp.b_star = c.location;
      tp.tangent_at_b = c.tangent;
      tp.b_is_boundary = !c.found;
      tp.a_star = tau0;
      tp.a_is_boundary = false;
    } else {
      auto c = search(-1);
      tp.a_star = c.location;
      tp.tangent_at_a = c.tangent;
      tp.a_is_boundary = !c.found;
      tp.b_star = tau0;
      tp.b_is_boundary = false;
    }
    return tp;
  }
  auto cr = search(+1);
  tp.b_star = cr.location;
  tp.tangent_at_b = cr.tangent;
  tp.b_is_boundary = !cr.found;
  auto cl = search(-1);
  tp.a_star = cl.location;
  tp.tangent_at_a = cl.tangent;
  tp.a_is_boundary = !cl.found;
  return tp;
}

// ---------------------------------------------------------------------------
// segment_integral

enum class EndKind { auto_detect, regular, turning, boundary };

namespace detail {

// Piece with a simple turning point at the upper end: substitute
// tau = beta - s^2 and evaluate the level gap as s^2 q(s^2) with the ratio q
// clamped near the root, which keeps the integrand finite and accurate to
// ~1e-12 even though beta is only known to a few ulp.
inline double turning_piece(const WarpFunction& w, double alpha, double beta, double D,
                            bool turning_at_upper, double tol) {
  const double h = beta - alpha;
  if (!(h > 0)) return 0.0;
  const double root = turning_at_upper ? beta : alpha;
  const double d_sw = std::max(h * 1e-9, 512.0 * std::abs(root) * 1e-16) + 1e-300;
  auto q_of = [&](double d) {
    double dd = std::max(d, d_sw);
    double tau = turning_at_upper ? root - dd : root + dd;
    double gap = w.p(tau) - D;
    double q = gap / dd;
    return q > 0 ? q : 1e-300;
  };
  auto G = [&](double s) {
    double d = s * s;
    double tau = turning_at_upper ? root - d : root + d;
    if (!w.domain().contains(tau)) tau = turning_at_upper ? root - d_sw : root + d_sw;
    double pv = w.p(tau);
    return 2.0 * pv / std::sqrt(q_of(d));
  };
  return tanh_sinh(G, 0.0, std::sqrt(h), tol).value;
}

}  // namespace detail

// Integral of p (p - D)^{-1/2} over (alpha, beta). Endpoint kinds may be
// forced by callers that already know the geometry (leg construction does);
// auto_detect classifies by the level gap and domain boundary. Callers that
// integrate within an already-verified leg set `trusted_interior` to skip
// the interior level scan.
inline IntegralValue segment_integral(const WarpFunction& w, double alpha, double beta,
                                      double D, const SolveParams& prm = {},
                                      EndKind kind_lo = EndKind::auto_detect,
                                      EndKind kind_hi = EndKind::auto_detect,
                                      bool trusted_interior = false) {
  if (!(alpha < beta)) return IntegralValue::finite(0.0);

  bool end_below = false;
  auto classify = [&](double t) -> EndKind {
    if (t <= w.domain().lo || t >= w.domain().hi || !std::isfinite(t))
      return EndKind::boundary;
    double pt = w.p(t);
    double gap = pt - D;
    double band = prm.level_band(pt, D);
    if (gap < -band) end_below = true;
    if (gap <= band) return EndKind::turning;
    return EndKind::regular;
  };
  if (kind_lo == EndKind::auto_detect) kind_lo = classify(alpha);
  if (kind_hi == EndKind::auto_detect) kind_hi = classify(beta);
  if (end_below) return IntegralValue::undefined(DivergenceReason::below_level);

  // tangential turning endpoints diverge (local exponent 2 in the gap)
  auto tangential = [&](double t, int inside) {
    if (t <= w.domain().lo || t >= w.domain().hi) return false;
    double pt = w.p(t);
    if (std::abs(pt - D) > prm.level_band(pt, D)) return false;
    double h_scale = std::min(1.0, 0.125 * std::min(beta - alpha, 1e12));
    return detail::tangential_crossing(w, t, inside, D, h_scale);
  };
  if (kind_lo == EndKind::turning && tangential(alpha, +1))
    return IntegralValue::divergent(DivergenceReason::tangential_turning);
  if (kind_hi == EndKind::turning && tangential(beta, -1))
    return IntegralValue::divergent(DivergenceReason::tangential_turning);

  // interior sanity scan: the level must not be crossed inside, and interior
  // tangencies make the integral infinite
  std::vector<double> splits;
  if (!trusted_interior) {
    const int n = 64;
    std::vector<double> ts, gs;
    ts.reserve(n);
    gs.reserve(n);
    for (int i = 1; i < n; ++i) {
      double t;
      if (std::isfinite(alpha) && std::isfinite(beta)) {
        t = alpha + (beta - alpha) * i / double(n);
      } else {
        double s = -1.0 + 2.0 * i / double(n);
        double c = std::isfinite(alpha) ? alpha + 1.0 : (std::isfinite(beta) ? beta - 1.0 : 0.0);
        t = c + 30.0 * s / (1.0 - s * s);
      }
      if (!w.domain().contains(t) || t <= alpha || t >= beta) continue;
      double gt = w.p(t) - D;
      if (gt < -prm.level_band(w.p(t), D))
        return IntegralValue::undefined(DivergenceReason::below_level);
      ts.push_back(t);
      gs.push_back(gt);
    }
    // local-minimum triples near the level: candidate tangencies / splits;
    // monotone approaches to a boundary are left to the tail machinery
    for (size_t i = 1; i + 1 < ts.size(); ++i) {
      if (!(gs[i] <= gs[i - 1] && gs[i] <= gs[i + 1])) continue;
      if (gs[i] > 1e-4 * std::max(1.0, std::abs(D))) continue;
      double r_lo = ts[i - 1], r_hi = ts[i + 1];
      double tm = golden_min([&](double x) { return w.p(x) - D; }, r_lo, r_hi,
                             1e-13 * std::max(1.0, std::abs(ts[i])));
      double width = r_hi - r_lo;
      bool interior_min = tm > r_lo + 0.02 * width && tm < r_hi - 0.02 * width;
      if (interior_min && tm > alpha && tm < beta) {
        double gm = w.p(tm) - D;
        double h2 = 0.01 * width;
        interior_min = (w.p(tm - h2) - D > gm) && (w.p(tm + h2) - D > gm);
        if (interior_min) {
          double band_m = prm.level_band(w.p(tm), D);
          if (gm < -band_m) return IntegralValue::undefined(DivergenceReason::below_level);
          if (gm <= band_m) return IntegralValue::divergent(DivergenceReason::interior_tangency);
          splits.push_back(tm);
        }
      }
    }
  }

  auto integrand = [&](double t) {
    double gap = w.p(t) - D;
    if (gap <= 0) return kInf;  // clamped by the quadrature at endpoint dust
    return w.p(t) / std::sqrt(gap);
  };

  // piecewise assembly over [alpha, beta] with split points
  std::vector<double> knots;
  knots.push_back(alpha);
  for (double s : splits)
    if (s > alpha && s < beta) knots.push_back(s);
  knots.push_back(beta);
  std::sort(knots.begin(), knots.end());

  double total = 0.0;
  for (size_t j = 0; j + 1 < knots.size(); ++j) {
    double a = knots[j], b = knots[j + 1];
    EndKind ka = (j == 0) ? kind_lo : EndKind::regular;
    EndKind kb = (j + 2 == knots.size()) ? kind_hi : EndKind::regular;
    bool a_special = ka != EndKind::regular;
    bool b_special = kb != EndKind::regular;

    auto do_side = [&](double from, double to, EndKind kind_far) -> IntegralValue {
      // integrate [min,max] where `to` is the special far end
      if (kind_far == EndKind::turning) {
        double lo2 = std::min(from, to), hi2 = std::max(from, to);
        return IntegralValue::finite(
            detail::turning_piece(w, lo2, hi2, D, to > from, prm.tol_quad));
      }
      // boundary: unknown behavior, classify by geometric chunks
      auto tr = detail::integrate_toward(integrand, from, to, prm.tol_quad);
      if (tr.verdict == detail::TailVerdict::convergent) return IntegralValue::finite(tr.value);
      if (tr.verdict == detail::TailVerdict::divergent)
        return IntegralValue::divergent(DivergenceReason::nonintegrable_tail);
      return IntegralValue::undefined(DivergenceReason::tail_inconclusive);
    };

    IntegralValue piece;
    if (!a_special && !b_special) {
      piece = IntegralValue::finite(detail::tanh_sinh(integrand, a, b, prm.tol_quad).value);
    } else if (a_special && !b_special) {
      piece = do_side(b, a, ka);
    } else if (!a_special && b_special) {
      piece = do_side(a, b, kb);
    } else {
      // both ends special: split at an interior anchor
      double mid;
      if (std::isfinite(a) && std::isfinite(b)) {
        mid = 0.5 * (a + b);
        if (ka == EndKind::turning && kb == EndKind::turning) {
          // split at the widest gap for better conditioning
          double best = -kInf;
          for (int i = 1; i < 32; ++i) {
            double t = a + (b - a) * i / 32.0;
            double gp = w.p(t) - D;
            if (gp > best) {
              best = gp;
              mid = t;
            }
          }
        }
      } else if (std::isfinite(a)) {
        mid = a + std::max(1.0, std::abs(a));
      } else if (std::isfinite(b)) {
        mid = b - std::max(1.0, std::abs(b));
      } else {
        mid = 0.0;
        if (!w.domain().contains(mid)) mid = 0.5 * (clamp(a, -1e6, 1e6) + clamp(b, -1e6, 1e6));
      }
      auto p1 = do_side(mid, a, ka);
      if (!p1.is_finite()) {
        piece = p1;
      } else {
        auto p2 = do_side(mid, b, kb);
        piece = p2.is_finite() ? IntegralValue::finite(p1.value + p2.value) : p2;
      }
    }
    if (!piece.is_finite()) return piece;
    total += piece.value;
  }
  return IntegralValue::finite(total);
}

// ---------------------------------------------------------------------------
// Convention-1 leg sums and the generalized advance.

struct Leg {
  double from, to;
  int dir;  // +1 toward b, -1 toward a
  IntegralValue value;
  bool ends_at_boundary = false;
  bool tangent_end = false;
};

struct LegSums {
  enum class Termination { bounce_cap, escape, divergent_leg };
  std::vector<Leg> legs;
  std::vector<double> cumulative;  // after each finite leg; kInf entry for a divergent one
  TurningPoints turns;
  Termination termination = Termination::bounce_cap;
};

inline LegSums leg_sums(const WarpFunction& w, double tau0, double D, int eps,
                        int n_max, const SolveParams& prm = {}) {
  if (eps != 1 && eps != -1) throw std::invalid_argument("eps must be +-1");
  LegSums out;
  out.turns = turning_points(w, tau0, D, prm);
  const auto& tp = out.turns;
  double cum = 0.0;
  double cur = tau0;
  int dir = eps;
  std::optional<double> full_leg;  // cached a* <-> b* value

  for (int k = 0; k <= n_max; ++k) {
    double target = dir > 0 ? tp.b_star : tp.a_star;
    bool boundary = dir > 0 ? tp.b_is_boundary : tp.a_is_boundary;
    bool tangent = dir > 0 ? tp.tangent_at_b : tp.tangent_at_a;
    Leg leg;
    leg.from = cur;
    leg.to = target;
    leg.dir = dir;
    leg.ends_at_boundary = boundary;
    leg.tangent_end = tangent;

    if (tangent && !boundary) {
      leg.value = IntegralValue::divergent(DivergenceReason::tangential_turning);
      out.legs.push_back(leg);
      out.cumulative.push_back(kInf);
      out.termination = LegSums::Termination::divergent_leg;
      return out;
    }

    double lo = std::min(cur, target), hi = std::max(cur, target);
    if (lo == hi) {
      leg.value = IntegralValue::finite(0.0);
    } else if (k >= 1 && !boundary && full_leg &&
               ((dir > 0 && cur == tp.a_star) || (dir < 0 && cur == tp.b_star))) {
      leg.value = IntegralValue::finite(*full_leg);
    } else {
      EndKind kind_near = std::abs(w.p(cur) - D) <= prm.level_band(w.p(cur), D)
                              ? EndKind::turning
                              : EndKind::regular;
      EndKind kind_far = boundary ? EndKind::boundary : EndKind::turning;
      EndKind klo = (cur < target) ? kind_near : kind_far;
      EndKind khi = (cur < target) ? kind_far : kind_near;
      leg.value = segment_integral(w, lo, hi, D, prm, klo, khi, !boundary);
      if (k >= 1 && !boundary && leg.value.is_finite() && cur != tau0)
        full_leg = leg.value.value;
    }

    out.legs.push_back(leg);
    if (leg.value.is_divergent()) {
      out.cumulative.push_back(kInf);
      out.termination = LegSums::Termination::divergent_leg;
      return out;
    }
    if (leg.value.kind == IntegralValue::Kind::undefined)
      throw std::runtime_error("leg integral undefined (level crossed inside a leg)");
    cum += leg.value.value;
    out.cumulative.push_back(cum);
    if (boundary) {
      out.termination = LegSums::Termination::escape;
      return out;
    }
    cur = target;
    dir = -dir;
  }
  out.termination = LegSums::Termination::bounce_cap;
  return out;
}

struct AdvanceResult {
  enum class Status { ok, escape, truncated };
  Status status = Status::ok;
  double tau = 0.0;        // achieved tau (the interval end for escapes)
  int bounces = 0;
  double arc = 0.0;        // fiber arclength actually accumulated
  bool in_divergent_leg = false;
};

namespace detail {

// Invert the partial integral within one leg: find tau' between `from` and
// `limit` (exclusive) with integral from `from` equal to `needed`.
inline double invert_in_leg(const WarpFunction& w, double from, double limit, int dir,
                            double D, double needed, bool limit_divergent,
                            const SolveParams& prm) {
  EndKind kind_from = std::abs(w.p(from) - D) <= prm.level_band(w.p(from), D)
                          ? EndKind::turning
                          : EndKind::regular;
  // within a divergent leg the divergence point may be interior (an interior
  // tangency past a boundary turning), so those partials keep the full scan
  auto partial = [&](double t) {
    double lo = std::min(from, t), hi = std::max(from, t);
    EndKind klo = (from <= t) ? kind_from : EndKind::regular;
    EndKind khi = (from <= t) ? EndKind::regular : kind_from;
    auto v = segment_integral(w, lo, hi, D, prm, klo, khi, !limit_divergent);
    return v.is_finite() ? v.value : kInf;
  };
  // bracket
  double hi_t;
  if (std::isfinite(limit)) {
    hi_t = limit;
    if (limit_divergent) {
      double width = std::abs(limit - from);
      int j = 1;
      do {
        hi_t = limit - dir * width * std::pow(2.0, -j);
        ++j;
      } while (partial(hi_t) < needed && j < 60);
    }
  } else {
    double step = std::max(1.0, std::abs(from));
    hi_t = from + dir * step;
    int j = 0;
    while (partial(hi_t) < needed && j < 80) {
      step *= 2.0;
      hi_t = from + dir * step;
      ++j;
    }
  }
  double lo_t = from;
  // bisection on the monotone partial integral
  const double xtol = 1e-13 * std::max({1.0, std::abs(lo_t), std::abs(hi_t)});
  double result = 0.5 * (lo_t + hi_t);
  bool hit = false;
  for (int it = 0; it < 90 && std::abs(hi_t - lo_t) > xtol; ++it) {
    double mid = 0.5 * (lo_t + hi_t);
    if (mid == lo_t || mid == hi_t) break;
    double v = partial(mid);
    if (std::abs(v - needed) <= std::max(2.0 * prm.tol_quad, 1e-13 * needed)) {
      result = mid;
      hit = true;
      break;
    }
    if (v < needed)
      lo_t = mid;
    else
      hi_t = mid;
  }
  if (!hit) result = 0.5 * (lo_t + hi_t);
  // the divergence point is never crossed
  if (limit_divergent && std::isfinite(limit))
    result = (dir > 0) ? std::min(result, limit) : std::max(result, limit);
  return result;
}

}  // namespace detail

// Consume an already-built leg structure until the accumulated generalized
// integral reaches L.
inline AdvanceResult advance_on_legs(const WarpFunction& w, const LegSums& ls, double D,
                                     double L, const SolveParams& prm = {}) {
  double remaining = L;
  AdvanceResult res;
  for (size_t k = 0; k < ls.legs.size(); ++k) {
    const Leg& leg = ls.legs[k];
    double avail = leg.value.is_finite() ? leg.value.value : kInf;
    if (avail >= remaining) {
      res.status = AdvanceResult::Status::ok;
      res.bounces = static_cast<int>(k);
      res.arc = L;
      res.in_divergent_leg = leg.value.is_divergent();
      if (remaining == 0.0) {
        res.tau = leg.from;
      } else if (avail == remaining && leg.value.is_finite()) {
        res.tau = leg.to;
      } else {
        res.tau = detail::invert_in_leg(w, leg.from, leg.to, leg.dir, D, remaining,
                                        leg.value.is_divergent(), prm);
      }
      return res;
    }
    remaining -= avail;
    if (leg.ends_at_boundary) {
      res.status = AdvanceResult::Status::escape;
      res.tau = leg.to;
      res.bounces = static_cast<int>(k);
      res.arc = L - remaining;
      return res;
    }
  }
  res.status = AdvanceResult::Status::truncated;
  res.tau = ls.legs.empty() ? 0.0 : ls.legs.back().to;
  res.bounces = static_cast<int>(ls.legs.size()) - 1;
  res.arc = L - remaining;
  return res;
}

inline void check_admissible(const WarpFunction& w, double tau0, double D,
                             const SolveParams& prm) {
  const double p0 = w.p(tau0);
  const double band = prm.level_band(p0, D);
  if (p0 < D - band) throw std::domain_error("inadmissible (D, eps): point below level");
  if (std::abs(p0 - D) <= band && std::abs(w.dp(tau0)) <= prm.slope_band(p0, D))
    throw std::domain_error("inadmissible (D, eps): tangential start (Lemma 2(i))");
}

// Follow the Convention-1 traversal from tau0 with parameters (D, eps) until
// the accumulated generalized integral reaches L; a divergent leg absorbs all
// remaining arclength, a boundary reached with budget left is an escape.
inline AdvanceResult advance(const WarpFunction& w, double tau0, double D, int eps,
                             double L, const SolveParams& prm = {}) {
  if (!(L > 0)) throw std::invalid_argument("advance needs L > 0");
  check_admissible(w, tau0, D, prm);
  auto ls = leg_sums(w, tau0, D, eps, prm.n_max, prm);
  return advance_on_legs(w, ls, D, L, prm);
}

}  // namespace grw
