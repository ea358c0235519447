#pragma once

// Warping functions f > 0 on an open interval I = (a, b), with exact first
// and second derivatives per family and numeric analysis of the behavior of
// 1/f^2 at the interval ends. All connectivity conditions downstream are
// integral conditions on p = 1/f^2, so p and dp/dtau get first-class,
// numerically stable evaluators.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grw/numeric.hpp"
#include "grw/spline.hpp"

namespace grw {

struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool lo_finite() const { return std::isfinite(lo); }
  bool hi_finite() const { return std::isfinite(hi); }
  bool contains(double t) const { return t > lo && t < hi; }
  // characteristic length used for window defaults and scan scales
  double scale() const {
    if (lo_finite() && hi_finite()) return hi - lo;
    double s = 1.0;
    if (lo_finite()) s = std::max(s, std::abs(lo));
    if (hi_finite()) s = std::max(s, std::abs(hi));
    return 10.0 * s;
  }
};

enum class End { lower, upper };

inline End other_end(End e) { return e == End::lower ? End::upper : End::lower; }

struct WarpEval {
  double f, df, ddf;
};

enum class WarpFamily {
  constant,
  hyperbolic_cosine,
  polynomial,
  invsq_polynomial,
  power_quadratic,
  trig_polynomial,
  spline_table,
  custom,
};

inline const char* family_name(WarpFamily f) {
  switch (f) {
    case WarpFamily::constant: return "constant";
    case WarpFamily::hyperbolic_cosine: return "cosh";
    case WarpFamily::polynomial: return "polynomial";
    case WarpFamily::invsq_polynomial: return "invsq_polynomial";
    case WarpFamily::power_quadratic: return "power_quadratic";
    case WarpFamily::trig_polynomial: return "trig_polynomial";
    case WarpFamily::spline_table: return "spline";
    case WarpFamily::custom: return "custom";
  }
  return "?";
}

class WarpFunction {
 public:
  using Fn = std::function<double(double)>;

  static WarpFunction constant(double value, Interval dom = {}) {
    require(value > 0, "constant warp must be positive");
    WarpFunction w(WarpFamily::constant, dom);
    w.params_ = {value};
    w.f_ = [value](double) { return value; };
    w.df_ = [](double) { return 0.0; };
    w.ddf_ = [](double) { return 0.0; };
    double pv = 1.0 / (value * value);
    w.p_ = [pv](double) { return pv; };
    w.dp_ = [](double) { return 0.0; };
    return w;
  }

  // f = A cosh(k (tau - c)); p = sech^2 / A^2 evaluated in exponential form
  // so it underflows gracefully instead of dividing infinities.
  static WarpFunction hyperbolic_cosine(double amplitude = 1.0, double rate = 1.0,
                                        double center = 0.0, Interval dom = {}) {
    require(amplitude > 0 && rate > 0, "cosh warp needs positive amplitude and rate");
    WarpFunction w(WarpFamily::hyperbolic_cosine, dom);
    w.params_ = {amplitude, rate, center};
    const double A = amplitude, k = rate, c = center;
    w.f_ = [=](double t) { return A * std::cosh(k * (t - c)); };
    w.df_ = [=](double t) { return A * k * std::sinh(k * (t - c)); };
    w.ddf_ = [=](double t) { return A * k * k * std::cosh(k * (t - c)); };
    auto sech = [=](double t) {
      double u = std::abs(k * (t - c));
      double e = std::exp(-u);
      return 2.0 * e / (1.0 + e * e);
    };
    w.p_ = [=](double t) {
      double s = sech(t);
      return s * s / (A * A);
    };
    w.dp_ = [=](double t) {
      double s = sech(t);
      return -2.0 * k * s * s * std::tanh(k * (t - c)) / (A * A);
    };
    return w;
  }

  // f = sum c_j tau^j
  static WarpFunction polynomial(std::vector<double> coeffs, Interval dom) {
    require(!coeffs.empty(), "polynomial warp needs coefficients");
    WarpFunction w(WarpFamily::polynomial, dom);
    w.params_ = coeffs;
    w.f_ = [coeffs](double t) { return horner(coeffs, t); };
    w.df_ = [coeffs](double t) { return horner_d(coeffs, t); };
    w.ddf_ = [coeffs](double t) { return horner_dd(coeffs, t); };
    w.check_positive_sampled();
    return w;
  }

  // 1/f^2 = sum c_j tau^j; several canonical test spacetimes are specified
  // through p rather than f.
  static WarpFunction invsq_polynomial(std::vector<double> coeffs, Interval dom) {
    require(!coeffs.empty(), "invsq_polynomial warp needs coefficients");
    WarpFunction w(WarpFamily::invsq_polynomial, dom);
    w.params_ = coeffs;
    auto p = [coeffs](double t) { return horner(coeffs, t); };
    auto dp = [coeffs](double t) { return horner_d(coeffs, t); };
    auto ddp = [coeffs](double t) { return horner_dd(coeffs, t); };
    w.f_ = [p](double t) { return 1.0 / std::sqrt(p(t)); };
    // f = p^{-1/2}: f' = -p' p^{-3/2} / 2, f'' = (3 p'^2 / 4 - p p'' / 2) p^{-5/2}
    w.df_ = [p, dp](double t) { return -0.5 * dp(t) * std::pow(p(t), -1.5); };
    w.ddf_ = [p, dp, ddp](double t) {
      double pv = p(t);
      return (0.75 * dp(t) * dp(t) - 0.5 * pv * ddp(t)) * std::pow(pv, -2.5);
    };
    w.p_ = p;
    w.dp_ = dp;
    w.check_p_positive_sampled();
    return w;
  }

  // f = (1 + tau^2)^q
  static WarpFunction power_quadratic(double exponent, Interval dom = {}) {
    WarpFunction w(WarpFamily::power_quadratic, dom);
    w.params_ = {exponent};
    const double q = exponent;
    w.f_ = [q](double t) { return std::pow(1.0 + t * t, q); };
    w.df_ = [q](double t) { return 2.0 * q * t * std::pow(1.0 + t * t, q - 1.0); };
    w.ddf_ = [q](double t) {
      double u = 1.0 + t * t;
      return 2.0 * q * std::pow(u, q - 2.0) * (u + 2.0 * (q - 1.0) * t * t);
    };
    w.p_ = [q](double t) { return std::pow(1.0 + t * t, -2.0 * q); };
    w.dp_ = [q](double t) { return -4.0 * q * t * std::pow(1.0 + t * t, -2.0 * q - 1.0); };
    return w;
  }

  // f = a0 + sum_k (A_k cos(k w tau) + B_k sin(k w tau)); positivity checked
  // by sampling only.
  static WarpFunction trig_polynomial(double a0, std::vector<double> cos_coeffs,
                                      std::vector<double> sin_coeffs, double omega,
                                      Interval dom) {
    WarpFunction w(WarpFamily::trig_polynomial, dom);
    w.params_ = {a0, omega};
    w.params_.insert(w.params_.end(), cos_coeffs.begin(), cos_coeffs.end());
    w.params_.insert(w.params_.end(), sin_coeffs.begin(), sin_coeffs.end());
    auto F = [=](double t, int deriv) {
      double v = (deriv == 0) ? a0 : 0.0;
      for (size_t k = 0; k < std::max(cos_coeffs.size(), sin_coeffs.size()); ++k) {
        double kk = (k + 1) * omega;
        double A = k < cos_coeffs.size() ? cos_coeffs[k] : 0.0;
        double B = k < sin_coeffs.size() ? sin_coeffs[k] : 0.0;
        switch (deriv) {
          case 0: v += A * std::cos(kk * t) + B * std::sin(kk * t); break;
          case 1: v += kk * (-A * std::sin(kk * t) + B * std::cos(kk * t)); break;
          default: v += kk * kk * (-A * std::cos(kk * t) - B * std::sin(kk * t)); break;
        }
      }
      return v;
    };
    w.f_ = [F](double t) { return F(t, 0); };
    w.df_ = [F](double t) { return F(t, 1); };
    w.ddf_ = [F](double t) { return F(t, 2); };
    w.check_positive_sampled();
    return w;
  }

  // Twice-differentiable interpolant through a (tau, f) table; the open
  // interval is spanned by the knots.
  static WarpFunction spline_table(std::vector<double> tau, std::vector<double> f) {
    for (double v : f) require(v > 0, "spline warp table must have f > 0");
    auto sp = std::make_shared<detail::CubicSpline>(std::move(tau), std::move(f));
    WarpFunction w(WarpFamily::spline_table, Interval{sp->lo(), sp->hi()});
    w.f_ = [sp](double t) { double a, b, c; sp->eval(t, a, b, c); return a; };
    w.df_ = [sp](double t) { double a, b, c; sp->eval(t, a, b, c); return b; };
    w.ddf_ = [sp](double t) { double a, b, c; sp->eval(t, a, b, c); return c; };
    w.check_positive_sampled();
    return w;
  }

  // Extension point for test constructions; positivity is checked by
  // sampling only (documented heuristic).
  static WarpFunction from_callables(Interval dom, Fn f, Fn df, Fn ddf,
                                     std::string label = "custom") {
    WarpFunction w(WarpFamily::custom, dom);
    w.f_ = std::move(f);
    w.df_ = std::move(df);
    w.ddf_ = std::move(ddf);
    w.label_ = std::move(label);
    w.check_positive_sampled();
    return w;
  }

  WarpEval eval(double tau) const {
    if (!dom_.contains(tau))
      throw std::domain_error("warp eval outside the open interval");
    WarpEval e{f_(tau), df_(tau), ddf_(tau)};
    if (!(e.f > 0)) throw std::runtime_error("warp function is not positive at tau");
    return e;
  }

  double f(double t) const { return f_(t); }
  double df(double t) const { return df_(t); }
  double ddf(double t) const { return ddf_(t); }

  // p = 1/f^2 and its derivative dp = -2 f'/f^3
  double p(double t) const {
    if (p_) return p_(t);
    double v = f_(t);
    return 1.0 / (v * v);
  }
  double dp(double t) const {
    if (dp_) return dp_(t);
    double v = f_(t);
    return -2.0 * df_(t) / (v * v * v);
  }

  const Interval& domain() const { return dom_; }
  WarpFamily family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  const std::string& label() const { return label_; }

  double end_value(End e) const { return e == End::lower ? dom_.lo : dom_.hi; }
  bool end_finite(End e) const { return std::isfinite(end_value(e)); }

 private:
  WarpFunction(WarpFamily fam, Interval dom) : family_(fam), dom_(dom) {
    require(dom_.lo < dom_.hi, "warp interval must satisfy a < b");
    label_ = family_name(fam);
  }

  static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  }

  static double horner(const std::vector<double>& c, double t) {
    double v = 0;
    for (size_t i = c.size(); i-- > 0;) v = v * t + c[i];
    return v;
  }
  static double horner_d(const std::vector<double>& c, double t) {
    double v = 0;
    for (size_t i = c.size(); i-- > 1;) v = v * t + i * c[i];
    return v;
  }
  static double horner_dd(const std::vector<double>& c, double t) {
    double v = 0;
    for (size_t i = c.size(); i-- > 2;) v = v * t + i * (i - 1) * c[i];
    return v;
  }

  std::vector<double> sample_grid(int n) const {
    // interior samples, geometric fan-out for unbounded intervals
    std::vector<double> g;
    g.reserve(n);
    if (dom_.lo_finite() && dom_.hi_finite()) {
      for (int i = 1; i < n; ++i)
        g.push_back(dom_.lo + (dom_.hi - dom_.lo) * i / double(n));
    } else {
      double c = 0.0;
      if (dom_.lo_finite()) c = dom_.lo + 1.0;
      if (dom_.hi_finite()) c = dom_.hi - 1.0;
      for (int i = 1; i < n; ++i) {
        double s = -1.0 + 2.0 * i / double(n);
        double t = c + 40.0 * s / (1.0 - s * s);  // compactified fan
        if (dom_.contains(t)) g.push_back(t);
      }
    }
    return g;
  }

  void check_positive_sampled() const {
    for (double t : sample_grid(2048))
      if (!(f_(t) > 0))
        throw std::invalid_argument("warp function is not positive on sampled grid");
  }
  void check_p_positive_sampled() const {
    for (double t : sample_grid(2048))
      if (!(p_(t) > 0))
        throw std::invalid_argument("1/f^2 is not positive on sampled grid");
  }

  WarpFamily family_;
  Interval dom_;
  std::vector<double> params_;
  std::string label_;
  Fn f_, df_, ddf_;
  Fn p_, dp_;  // optional stable closed forms
};

// ---------------------------------------------------------------------------
// Extreme behavior of p = 1/f^2 at an interval end (Definition-1 style data).

struct WindowParams {
  double eps_frac = 1e-2;  // window size fraction of the span at a finite end
  double M = 10.0;         // window threshold at an infinite end
};

struct LimitEstimate {
  bool exists = false;
  double value = 0.0;  // may be +-inf
};

struct ExtremeProfile {
  End end = End::upper;
  double level_liminf = 0.0;  // liminf of 1/f^2 at the end (may be +inf)
  bool liminf_converged = false;
  LimitEstimate limit_f;       // limit of f if detectable
  LimitEstimate limit_df;      // limit of f' if detectable
  bool relative_min = false;   // strict relative minimum of 1/f^2 at the end
  double probe_lo = 0, probe_hi = 0;  // range actually sampled
};

namespace detail {

// Geometric approach grid toward an end: finite ends shrink a window, infinite
// ends grow the coordinate; returns interior points ordered toward the end.
inline std::vector<double> approach_grid(const WarpFunction& w, End e,
                                         const WindowParams& win, int per_octave,
                                         int octaves) {
  std::vector<double> pts;
  double b = w.end_value(e);
  double sgn = (e == End::upper) ? 1.0 : -1.0;
  if (std::isfinite(b)) {
    double span = w.domain().scale();
    double d0 = win.eps_frac * span;
    double d_min = std::max(std::abs(b) * 1e-13, span * 1e-13) + 1e-300;
    for (int j = 0;; ++j) {
      double d = d0 * std::pow(2.0, -double(j) / per_octave);
      if (d < d_min || j > octaves * per_octave) break;
      double t = b - sgn * d;
      if (w.domain().contains(t)) pts.push_back(t);
    }
  } else {
    double m0 = win.M;
    for (int j = 0; j <= octaves * per_octave; ++j) {
      double m = m0 * std::pow(2.0, double(j) / per_octave);
      if (m > 1e12) break;
      pts.push_back(sgn * m);
    }
  }
  return pts;
}

inline LimitEstimate detect_limit(const std::vector<double>& vals) {
  LimitEstimate est;
  size_t n = vals.size();
  if (n < 8) return est;
  // Cauchy over the deepest stretch
  bool cauchy = true;
  for (size_t i = n - 6; i + 1 < n; ++i) {
    double diff = std::abs(vals[i + 1] - vals[i]);
    if (!std::isfinite(diff) || diff > 1e-7 * std::max(1.0, std::abs(vals[i])))
      cauchy = false;
  }
  if (cauchy) {
    est.exists = true;
    est.value = vals.back();
    return est;
  }
  // monotone blow-up: sustained growth over the deep tail counts as an
  // infinite limit even when the magnitude is still moderate (slow powers)
  bool grow_pos = true, grow_neg = true;
  size_t tail = n >= 24 ? n - 24 : 0;
  for (size_t i = tail; i + 1 < n; ++i) {
    if (!(vals[i + 1] >= vals[i])) grow_pos = false;
    if (!(vals[i + 1] <= vals[i])) grow_neg = false;
  }
  double ref = std::abs(vals[tail]);
  double last = std::abs(vals.back());
  bool sustained = std::isinf(last) || last > 1e8 || last > 1.5 * std::max(ref, 1e-12);
  if (grow_pos && vals.back() > 0 && sustained) {
    est.exists = true;
    est.value = kInf;
    return est;
  }
  if (grow_neg && vals.back() < 0 && sustained) {
    est.exists = true;
    est.value = -kInf;
    return est;
  }
  return est;
}

}  // namespace detail

inline ExtremeProfile extreme_profile(const WarpFunction& w, End e,
                                      const WindowParams& win = {}) {
  ExtremeProfile out;
  out.end = e;
  // Deep approach grid: eighth-octave spacing, many octaves.
  auto grid = detail::approach_grid(w, e, win, 8, 46);
  if (grid.empty()) throw std::runtime_error("empty approach grid at extreme");
  out.probe_lo = grid.front();
  out.probe_hi = grid.back();

  std::vector<double> pv(grid.size()), fv(grid.size()), dv(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    pv[i] = w.p(grid[i]);
    fv[i] = w.f(grid[i]);
    dv[i] = w.df(grid[i]);
  }
  out.limit_f = detail::detect_limit(fv);
  out.limit_df = detail::detect_limit(dv);

  // liminf of p: tail_min[i] = inf over all samples at least as deep as i,
  // so tail_min[half] is the inf over the deep half -- the window-inf view.
  std::vector<double> tail_min(grid.size());
  double cur = kInf;
  for (size_t i = grid.size(); i-- > 0;) {
    cur = std::min(cur, pv[i]);
    tail_min[i] = cur;
  }
  size_t half = grid.size() / 2;
  double liminf = tail_min[half];
  if (out.limit_f.exists) {
    // reconcile: liminf of 1/f^2 from the limit of f where available
    if (std::isinf(out.limit_f.value))
      liminf = 0.0;
    else if (out.limit_f.value > 0)
      liminf = 1.0 / (out.limit_f.value * out.limit_f.value);
    out.liminf_converged = true;
  } else {
    size_t q3 = (3 * grid.size()) / 4;
    out.liminf_converged =
        std::abs(tail_min[half] - tail_min[q3]) <=
        1e-6 * std::max(1.0, std::abs(tail_min[q3]));
  }
  out.level_liminf = liminf;

  // Definition-1 strictness on the configured window: every probe strictly
  // above the liminf level. Probes stay within the first few octaves past the
  // window so the deepest (liminf-defining) samples do not defeat strictness
  // by round-off equality. A probe that underflowed to exactly zero against a
  // zero liminf is strictly positive in exact arithmetic and passes.
  bool strict = true;
  size_t probe_count = std::min<size_t>(grid.size(), 5 * 8);
  for (size_t i = 0; i < probe_count; ++i) {
    bool above = pv[i] > out.level_liminf ||
                 (out.level_liminf == 0.0 && pv[i] == 0.0);
    if (!above) strict = false;
  }
  out.relative_min = strict;
  return out;
}

struct Infima {
  double global, right, left;
};

// Infima of p over (a,b), [tau0, b), (a, tau0]; sampled with local refinement
// and combined with the end liminfs.
inline Infima infima(const WarpFunction& w, double tau0, const WindowParams& win = {}) {
  if (!w.domain().contains(tau0)) throw std::domain_error("tau0 outside interval");
  auto side_inf = [&](End e) {
    double end = w.end_value(e);
    double sgn = (e == End::upper) ? 1.0 : -1.0;
    double lim = extreme_profile(w, e, win).level_liminf;
    // dense interior grid between tau0 and the end
    double best = w.p(tau0);
    double best_t = tau0;
    const int n = 600;
    for (int i = 1; i <= n; ++i) {
      double t;
      if (std::isfinite(end)) {
        t = tau0 + (end - tau0) * i / double(n + 1);
      } else {
        double s = i / double(n + 1);
        t = tau0 + sgn * 60.0 * s / (1.0 - s);
      }
      if (!w.domain().contains(t)) continue;
      double v = w.p(t);
      if (v < best) {
        best = v;
        best_t = t;
      }
    }
    // refine around the best sample
    double h = std::isfinite(end) ? std::abs(end - tau0) / (n + 1)
                                  : std::max(1.0, std::abs(best_t)) * 0.05;
    double lo = best_t - h, hi = best_t + h;
    if (!w.domain().contains(lo)) lo = best_t;
    if (!w.domain().contains(hi)) hi = best_t;
    if (hi > lo) {
      double t = golden_min([&](double x) { return w.p(x); }, lo, hi, 1e-13 * std::max(1.0, std::abs(best_t)));
      best = std::min(best, w.p(t));
    }
    return std::min(best, lim);
  };
  Infima out{};
  out.right = side_inf(End::upper);
  out.left = side_inf(End::lower);
  out.global = std::min(out.right, out.left);
  return out;
}

}  // namespace grw
