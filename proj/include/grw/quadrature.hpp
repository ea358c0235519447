#pragma once

// Double-exponential (tanh-sinh) quadrature plus a geometric tail scheme for
// improper integrals. The tanh-sinh nodes are stored as distances from the
// interval endpoints so that inverse-square-root endpoint singularities are
// sampled without catastrophic rounding.

#include <cmath>
#include <functional>
#include <vector>

#include "grw/numeric.hpp"

namespace grw::detail {

struct TanhSinhNode {
  double rel_center;  // abscissa relative to interval center, in units of half-width
  double dist_lo;     // distance from the lower endpoint, units of half-width
  double dist_hi;     // distance from the upper endpoint, units of half-width
  double weight;      // in units of half-width
};

// Node table per refinement level; level k has step h = 2^-k over the
// transformation variable. Level 0 holds the trapezoid base points, deeper
// levels hold only the new midpoints.
inline const std::vector<std::vector<TanhSinhNode>>& tanh_sinh_table() {
  static const std::vector<std::vector<TanhSinhNode>> table = [] {
    std::vector<std::vector<TanhSinhNode>> t;
    const double tmax = 5.0;
    const int max_level = 12;
    auto make_node = [](double u) {
      TanhSinhNode n;
      double s = std::sinh(u);
      double cs = std::cosh(u);
      double w = 0.5 * M_PI * s;
      n.rel_center = std::tanh(w);
      // 1 -+ tanh(w) computed in stable exponential form
      double e = std::exp(-2.0 * std::abs(w));
      double gap = 2.0 * e / (1.0 + e);
      n.dist_lo = (w >= 0) ? 2.0 - gap : gap;
      n.dist_hi = (w >= 0) ? gap : 2.0 - gap;
      double ch = std::cosh(w);
      n.weight = 0.5 * M_PI * cs / (ch * ch);
      return n;
    };
    for (int level = 0; level <= max_level; ++level) {
      std::vector<TanhSinhNode> nodes;
      double h = std::pow(2.0, -level);
      if (level == 0) {
        for (double u = -tmax; u <= tmax + 1e-12; u += h) nodes.push_back(make_node(u));
      } else {
        // new points interleave the level-(k-1) grid: odd multiples of h
        for (double u = -tmax + h; u <= tmax - h + 1e-12; u += 2.0 * h)
          nodes.push_back(make_node(u));
      }
      t.push_back(std::move(nodes));
    }
    return t;
  }();
  return table;
}

struct QuadResult {
  double value = 0.0;
  double error = kInf;
  bool converged = false;
  long bad_evals = 0;  // non-finite integrand samples (clamped to zero)
};

// Integrate g over the finite interval [a, b]. Integrable endpoint
// singularities (up to ~x^-0.99) are handled by the double-exponential decay
// of the weights.
template <typename F>
QuadResult tanh_sinh(F&& g, double a, double b, double tol, int max_level = 12) {
  QuadResult res;
  if (!(b > a)) {
    res.value = 0.0;
    res.error = 0.0;
    res.converged = true;
    return res;
  }
  const auto& table = tanh_sinh_table();
  const double half = 0.5 * (b - a);
  auto eval = [&](const TanhSinhNode& n) -> double {
    double x;
    if (n.rel_center <= 0)
      x = a + half * n.dist_lo;
    else
      x = b - half * n.dist_hi;
    if (x <= a) x = a + half * n.dist_lo;  // fell onto the endpoint: keep offset form
    if (x >= b) x = b - half * n.dist_hi;
    if (x <= a || x >= b) return 0.0;
    double v = g(x);
    if (!std::isfinite(v)) {
      ++res.bad_evals;
      return 0.0;
    }
    return v * n.weight;
  };
  double h = 1.0;
  double sum = 0.0;
  for (const auto& n : table[0]) sum += eval(n);
  double prev = sum * h * half;
  for (int level = 1; level < static_cast<int>(table.size()) && level <= max_level; ++level) {
    double add = 0.0;
    for (const auto& n : table[level]) add += eval(n);
    sum += add;
    h *= 0.5;
    double cur = sum * h * half;
    double err = std::abs(cur - prev);
    prev = cur;
    if (level >= 3 && err < tol) {
      res.value = cur;
      res.error = err;
      res.converged = true;
      return res;
    }
    res.error = err;
  }
  res.value = prev;
  res.converged = res.error < 8 * tol;
  return res;
}

enum class TailVerdict { convergent, divergent, inconclusive };

struct TailResult {
  TailVerdict verdict = TailVerdict::inconclusive;
  double value = 0.0;        // meaningful when convergent
  double last_ratio = 0.0;
  int chunks = 0;
};

// Integral of g from `from` toward `end` (an open interval boundary, finite
// or +-inf), where g may be singular or slowly decaying at `end`. The range
// is cut into geometrically shrinking (finite end) or growing (infinite end)
// chunks; the chunk-sum ratio classifies convergence and a geometric
// extrapolation closes the remainder.
template <typename F>
TailResult integrate_toward(F&& g, double from, double end, double tol,
                            int max_chunks = 160) {
  TailResult out;
  const bool upper = end > from;
  double total = 0.0;
  double prev_chunk = -1.0;
  int hot_ratios = 0;   // consecutive chunk ratios >= divergence threshold
  int calm_chunks = 0;  // consecutive chunk ratios clearly < 1
  const double diverge_ratio = 0.97;
  double ratio = 0.0;
  auto piece = [&](double x0, double x1) {
    if (x1 < x0) std::swap(x0, x1);
    return tanh_sinh(g, x0, x1, tol * 0.02).value;
  };
  if (std::isfinite(end)) {
    double span = std::abs(end - from);
    if (span <= 0) {
      out.verdict = TailVerdict::convergent;
      return out;
    }
    // Close the remaining [end -+ d, end] range by the substitution
    // tau = end -+ s^2, which regularizes inverse-square-root behavior and
    // keeps the endpoint distance accurate in the s coordinate.
    auto close_by_substitution = [&](double d) {
      double s_hi = std::sqrt(d);
      auto sub = [&](double s) {
        double x2 = upper ? end - s * s : end + s * s;
        return 2.0 * s * g(x2);
      };
      return tanh_sinh(sub, 0.0, s_hi, tol * 0.1).value;
    };
    // distances from the end: span -> span/2 -> span/4 ...
    double d_prev = span;
    const double d_floor = std::max(span * 1e-12, std::abs(end) * 1e-13 + 1e-300);
    for (int k = 0; k < max_chunks; ++k) {
      double d_next = 0.5 * d_prev;
      double x0 = upper ? end - d_prev : end + d_prev;
      double x1 = upper ? end - d_next : end + d_next;
      double c = piece(x0, x1);
      total += c;
      ++out.chunks;
      if (prev_chunk > 0 && c > 0) {
        ratio = c / prev_chunk;
        out.last_ratio = ratio;
        if (ratio >= diverge_ratio) {
          ++hot_ratios;
          calm_chunks = 0;
        } else {
          hot_ratios = 0;
          ++calm_chunks;
        }
        if (hot_ratios >= 5 || total > 1e13) {
          out.verdict = TailVerdict::divergent;
          out.value = total;
          return out;
        }
        if (calm_chunks >= 3 && ratio < 0.9 &&
            (c * ratio / (1.0 - ratio) < 0.01 * tol || d_next <= span * 1e-7)) {
          out.verdict = TailVerdict::convergent;
          out.value = total + close_by_substitution(d_next);
          return out;
        }
      }
      prev_chunk = (c > 0) ? c : prev_chunk;
      d_prev = d_next;
      if (d_prev <= d_floor) {
        if (ratio > 0 && ratio < 0.95) {
          out.verdict = TailVerdict::convergent;
          out.value = total + close_by_substitution(d_prev);
        } else {
          out.verdict = TailVerdict::inconclusive;
          out.value = total;
        }
        return out;
      }
      if (c <= tol * 1e-3 && k > 2 && ratio < 0.9) {
        out.verdict = TailVerdict::convergent;
        out.value = total + ((prev_chunk > 0 && ratio > 0) ? prev_chunk * ratio / (1.0 - ratio) : 0.0);
        return out;
      }
    }
  } else {
    double m_prev = std::max(1.0, 2.0 * std::abs(from));
    double first_to = upper ? from + m_prev : from - m_prev;
    total += piece(from, first_to);
    ++out.chunks;
    for (int k = 0; k < max_chunks; ++k) {
      double m_next = 2.0 * m_prev;
      double x0 = upper ? from + m_prev : from - m_prev;
      double x1 = upper ? from + m_next : from - m_next;
      double c = piece(x0, x1);
      total += c;
      ++out.chunks;
      if (prev_chunk > 0 && c > 0) {
        ratio = c / prev_chunk;
        out.last_ratio = ratio;
        if (ratio >= diverge_ratio) {
          ++hot_ratios;
          calm_chunks = 0;
        } else {
          hot_ratios = 0;
          ++calm_chunks;
        }
        if (hot_ratios >= 5 || total > 1e13) {
          out.verdict = TailVerdict::divergent;
          out.value = total;
          return out;
        }
        if (calm_chunks >= 2 && ratio < 0.9) {
          double remainder = c * ratio / (1.0 - ratio);
          if (remainder < tol) {
            out.verdict = TailVerdict::convergent;
            out.value = total + remainder;
            return out;
          }
        }
      } else if (c <= tol * 1e-3 && k > 3) {
        out.verdict = TailVerdict::convergent;
        out.value = total;
        return out;
      }
      prev_chunk = (c > 0) ? c : prev_chunk;
      m_prev = m_next;
      if (m_prev > 1e30) {
        out.verdict = (ratio > 0 && ratio < 0.95) ? TailVerdict::convergent
                                                  : TailVerdict::inconclusive;
        out.value = total;
        return out;
      }
    }
  }
  out.verdict = TailVerdict::inconclusive;
  out.value = total;
  return out;
}

}  // namespace grw::detail
