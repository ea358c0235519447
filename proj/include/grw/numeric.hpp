#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace grw {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_finite(double x) { return std::isfinite(x); }

// Relative closeness with an absolute floor, used for level/root comparisons.
inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline double clamp(double x, double lo, double hi) {
  return std::min(std::max(x, lo), hi);
}

// Bisection on a sign change of fn over [lo, hi]; fn(lo) and fn(hi) must have
// opposite (non-zero) signs. Refines until the bracket is below xtol.
template <typename F>
double bisect(F&& fn, double lo, double hi, double flo, double fhi,
              double xtol, int max_iter = 200) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw std::invalid_argument("bisect: no sign change");
  for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at representability limit
    double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section minimization of fn on [lo, hi].
template <typename F>
double golden_min(F&& fn, double lo, double hi, double xtol, int max_iter = 120) {
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = fn(x1), f2 = fn(x2);
  for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = fn(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = fn(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

// Chebyshev points on [-1,1], endpoints excluded.
inline std::vector<double> chebyshev_nodes(int n) {
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k)
    out[k] = std::cos(M_PI * (2.0 * k + 1.0) / (2.0 * n));
  std::sort(out.begin(), out.end());
  return out;
}

// Closed interval union bookkeeping for the residual windows.
struct Interval1D {
  double lo, hi;
};

inline std::vector<Interval1D> merge_intervals(std::vector<Interval1D> v) {
  std::sort(v.begin(), v.end(),
            [](const Interval1D& p, const Interval1D& q) { return p.lo < q.lo; });
  std::vector<Interval1D> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi + 1e-12) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

inline bool union_contains(const std::vector<Interval1D>& u, double x, double tol = 1e-9) {
  for (const auto& iv : u)
    if (x >= iv.lo - tol && x <= iv.hi + tol) return true;
  return false;
}

// Does the union cover [lo, hi] up to gaps smaller than tol?
inline bool union_covers(const std::vector<Interval1D>& u, double lo, double hi,
                         double tol = 1e-9) {
  if (hi < lo) return true;
  auto merged = merge_intervals(u);
  double reach = lo;
  for (const auto& iv : merged) {
    if (iv.lo > reach + tol) break;
    reach = std::max(reach, iv.hi);
    if (reach >= hi - tol) return true;
  }
  return reach >= hi - tol;
}

}  // namespace grw
