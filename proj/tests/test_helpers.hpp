#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// here (composite Simpson, central differences, scalar Newton) deliberately
// avoid the library's own quadrature and root-finding paths.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "grw/warp.hpp"

namespace grwtest {

// Composite Simpson on a fixed grid; refine until two refinements agree.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n_min = 512) {
  auto pass = [&](int n) {
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  int n = n_min;
  double prev = pass(n);
  for (int k = 0; k < 8; ++k) {
    n *= 2;
    double cur = pass(n);
    if (std::abs(cur - prev) < 1e-12 * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

inline double central_diff(const std::function<double(double)>& f, double x,
                           double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double central_diff2(const std::function<double(double)>& f, double x,
                            double h = 1e-4) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

inline double newton(const std::function<double(double)>& f,
                     const std::function<double(double)>& df, double x0,
                     int iters = 60) {
  double x = x0;
  for (int i = 0; i < iters; ++i) {
    double step = f(x) / df(x);
    x -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

// The canonical linear-level warp 1/f^2 = 1 - tau "on (0,1)"; the lower end
// sits a hair below zero so tau0 = 0 is interior.
inline grw::WarpFunction linear_level_warp() {
  return grw::WarpFunction::invsq_polynomial({1.0, -1.0},
                                             grw::Interval{-9.094947017729282e-13, 1.0});
}

// Self-similar staircase on (0,1): 1/f^2 = q(1-tau) with
// q(u) = u (1 + 0.5 sin(lambda ln u)). The oscillation amplitude exceeds the
// drift, so q has local minima at a geometric sequence of scales; each local
// minimum is a first, tangential touch of its own level, which drives the
// defect at the upper end to infinity while the level integral stays finite.
inline grw::WarpFunction tangential_staircase_warp(double lambda = 4.0) {
  auto q = [lambda](double u) { return u * (1.0 + 0.5 * std::sin(lambda * std::log(u))); };
  auto qp = [lambda](double u) {
    double th = lambda * std::log(u);
    return 1.0 + 0.5 * std::sin(th) + 0.5 * lambda * std::cos(th);
  };
  auto qpp = [lambda](double u) {
    double th = lambda * std::log(u);
    return (0.5 * lambda * std::cos(th) - 0.5 * lambda * lambda * std::sin(th)) / u;
  };
  auto p = [q](double t) { return q(1.0 - t); };
  auto dp = [qp](double t) { return -qp(1.0 - t); };
  auto ddp = [qpp](double t) { return qpp(1.0 - t); };
  auto f = [p](double t) { return 1.0 / std::sqrt(p(t)); };
  auto df = [p, dp](double t) { return -0.5 * dp(t) * std::pow(p(t), -1.5); };
  auto ddf = [p, dp, ddp](double t) {
    double pv = p(t);
    return (0.75 * dp(t) * dp(t) - 0.5 * pv * ddp(t)) * std::pow(pv, -2.5);
  };
  return grw::WarpFunction::from_callables(grw::Interval{1e-9, 1.0}, f, df, ddf,
                                           "tangential staircase");
}

// Quintic Hermite segment with prescribed value/slope/curvature at both ends.
struct HermiteSeg {
  double a, b;           // segment range
  double y0, m0, c0;     // value, dy/dtau, d2y/dtau2 at a
  double y1, m1, c1;     // at b

  void eval(double tau, double& y, double& dy, double& ddy) const {
    double h = b - a;
    double t = (tau - a) / h;
    double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    double h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    double h01 = 10 * t3 - 15 * t4 + 6 * t5;
    double h10 = t - 6 * t3 + 8 * t4 - 3 * t5;
    double h11 = -4 * t3 + 7 * t4 - 3 * t5;
    double h20 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    double h21 = 0.5 * t3 - t4 + 0.5 * t5;
    y = y0 * h00 + y1 * h01 + h * (m0 * h10 + m1 * h11) + h * h * (c0 * h20 + c1 * h21);
    double d00 = -30 * t2 + 60 * t3 - 30 * t4;
    double d01 = 30 * t2 - 60 * t3 + 30 * t4;
    double d10 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    double d11 = -12 * t2 + 28 * t3 - 15 * t4;
    double d20 = t - 4.5 * t2 + 6 * t3 - 2.5 * t4;
    double d21 = 1.5 * t2 - 4 * t3 + 2.5 * t4;
    dy = (y0 * d00 + y1 * d01) / h + (m0 * d10 + m1 * d11) + h * (c0 * d20 + c1 * d21);
    double e00 = -60 * t + 180 * t2 - 120 * t3;
    double e01 = 60 * t - 180 * t2 + 120 * t3;
    double e10 = -36 * t + 96 * t2 - 60 * t3;
    double e11 = -24 * t + 84 * t2 - 60 * t3;
    double e20 = 1 - 9 * t + 18 * t2 - 10 * t3;
    double e21 = 3 * t - 12 * t2 + 10 * t3;
    ddy = (y0 * e00 + y1 * e01) / (h * h) + (m0 * e10 + m1 * e11) / h +
          (c0 * e20 + c1 * e21);
  }
};

// Piecewise C2 profile assembled from Hermite segments plus linear pieces.
struct PiecewiseProfile {
  std::vector<HermiteSeg> segs;
  void eval(double tau, double& y, double& dy, double& ddy) const {
    size_t lo = 0, hi = segs.size() - 1;
    while (hi > lo) {
      size_t mid = (lo + hi) / 2;
      if (tau <= segs[mid].b)
        hi = mid;
      else
        lo = mid + 1;
    }
    segs[lo].eval(tau, y, dy, ddy);
  }
};

// Finite-defect staircase shifted to sit above a base level: 1/f^2 descends
// from base+1 toward base through alternating fast drops and near-plateaus
// whose slopes are tuned so every plateau crossing carries a bounce integral
// of roughly 2 * L_target. The result has a finite defect of order L_target
// at the upper end.
inline PiecewiseProfile finite_staircase_profile(double base, double L_target,
                                                 int levels = 14) {
  PiecewiseProfile prof;
  double sigma_prev = 1.0;
  // lead-in: linear from (0, base+1) to (0.5, base+1/2) with slope -1
  {
    HermiteSeg s;
    s.a = 0.0;
    s.b = 0.5;
    s.y0 = base + 1.0;
    s.m0 = -1.0;
    s.c0 = 0.0;
    s.y1 = base + 0.5;
    s.m1 = -1.0;
    s.c1 = 0.0;
    prof.segs.push_back(s);
  }
  for (int n = 1; n <= levels; ++n) {
    double x_n = 1.0 - std::pow(2.0, -n);
    double x_np = 1.0 - std::pow(2.0, -n - 1);
    double mid = 0.5 * (x_n + x_np);
    double W = x_np - mid;  // slow width
    double A_n = std::pow(2.0, -n);
    double A_np = std::pow(2.0, -n - 1);
    double pbar = base + A_np;
    double sigma = std::min(0.25 * A_np / W, W * pbar * pbar / (L_target * L_target));
    double B_n = A_np + sigma * W;  // plateau entry level
    // fast drop
    HermiteSeg fast;
    fast.a = x_n;
    fast.b = mid;
    fast.y0 = base + A_n;
    fast.m0 = -sigma_prev;
    fast.c0 = 0.0;
    fast.y1 = base + B_n;
    fast.m1 = -sigma;
    fast.c1 = 0.0;
    prof.segs.push_back(fast);
    // linear near-plateau
    HermiteSeg slow;
    slow.a = mid;
    slow.b = x_np;
    slow.y0 = base + B_n;
    slow.m0 = -sigma;
    slow.c0 = 0.0;
    slow.y1 = base + A_np;
    slow.m1 = -sigma;
    slow.c1 = 0.0;
    prof.segs.push_back(slow);
    sigma_prev = sigma;
  }
  // closing wedge: run the level gap linearly to zero at tau = 1, so the
  // liminf equals the base exactly and the level integral stays sqrt-type
  {
    double x_last = prof.segs.back().b;
    double y_last = base + std::pow(2.0, -levels - 1);
    double slope_end = 1.5 * (y_last - base) / (1.0 - x_last);
    HermiteSeg tail;
    tail.a = x_last;
    tail.b = 1.0;
    tail.y0 = y_last;
    tail.m0 = -sigma_prev;
    tail.c0 = 0.0;
    tail.y1 = base;
    tail.m1 = -slope_end;
    tail.c1 = 0.0;
    prof.segs.push_back(tail);
  }
  return prof;
}

// Fig-2-style warp on (-1/N, 1): 1/f^2 rises from 0 to N+1 at tau = 0 and
// follows the finite-defect staircase above level N on (0, 1).
inline grw::WarpFunction shifted_staircase_warp(double N, double L_target,
                                                std::shared_ptr<PiecewiseProfile>& keep) {
  keep = std::make_shared<PiecewiseProfile>(finite_staircase_profile(N, L_target));
  auto prof = keep;
  double a_end = -1.0 / N;
  auto p_all = [prof, N, a_end](double t, int deriv) {
    if (t >= 0.0) {
      double y, dy, ddy;
      prof->eval(t, y, dy, ddy);
      return deriv == 0 ? y : (deriv == 1 ? dy : ddy);
    }
    // rise piece: quintic from (a_end, 0+) to (0, N+1) matching the lead-in
    HermiteSeg rise;
    rise.a = a_end;
    rise.b = 0.0;
    rise.y0 = 1e-10;
    rise.m0 = 0.0;
    rise.c0 = 0.0;
    rise.y1 = N + 1.0;
    rise.m1 = -1.0;
    rise.c1 = 0.0;
    double y, dy, ddy;
    rise.eval(t, y, dy, ddy);
    return deriv == 0 ? y : (deriv == 1 ? dy : ddy);
  };
  auto p = [p_all](double t) { return p_all(t, 0); };
  auto dp = [p_all](double t) { return p_all(t, 1); };
  auto ddp = [p_all](double t) { return p_all(t, 2); };
  auto f = [p](double t) { return 1.0 / std::sqrt(p(t)); };
  auto df = [p, dp](double t) { return -0.5 * dp(t) * std::pow(p(t), -1.5); };
  auto ddf = [p, dp, ddp](double t) {
    double pv = p(t);
    return (0.75 * dp(t) * dp(t) - 0.5 * pv * ddp(t)) * std::pow(pv, -2.5);
  };
  return grw::WarpFunction::from_callables(grw::Interval{a_end + 1e-6, 1.0 - 1e-12}, f,
                                           df, ddf, "shifted staircase");
}

// Random positive trig-polynomial warp on a finite interval.
inline grw::WarpFunction random_trig_warp(std::mt19937& rng, double half_width = 2.0) {
  std::uniform_real_distribution<double> amp(-0.12, 0.12);
  std::uniform_real_distribution<double> base(1.2, 2.0);
  double a0 = base(rng);
  std::vector<double> cs(3), ss(3);
  for (int k = 0; k < 3; ++k) {
    cs[k] = amp(rng) * a0 / ((k + 1) * (k + 1));
    ss[k] = amp(rng) * a0 / ((k + 1) * (k + 1));
  }
  return grw::WarpFunction::trig_polynomial(a0, cs, ss, 1.0,
                                            grw::Interval{-half_width, half_width});
}

}  // namespace grwtest
