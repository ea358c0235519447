#pragma once

// Natural cubic spline through (x_i, y_i); C2, with analytic first and second
// derivatives of the interpolant.

#include <stdexcept>
#include <vector>

namespace grw::detail {

class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 3 || y_.size() != n) throw std::invalid_argument("spline: need >= 3 knots");
    for (size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("spline: knots must increase");
    m_.assign(n, 0.0);
    // tridiagonal solve for second derivatives, natural end conditions
    std::vector<double> u(n, 0.0), z(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
      double hi = x_[i] - x_[i - 1];
      double hip = x_[i + 1] - x_[i];
      double g = 2.0 * (x_[i + 1] - x_[i - 1]) - hi * u[i - 1];
      u[i] = hip / g;
      double d = 6.0 * ((y_[i + 1] - y_[i]) / hip - (y_[i] - y_[i - 1]) / hi);
      z[i] = (d - hi * z[i - 1]) / g;
    }
    for (size_t i = n - 1; i-- > 1;) m_[i] = z[i] - u[i] * m_[i + 1];
  }

  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }

  void eval(double x, double& f, double& df, double& ddf) const {
    size_t j = locate(x);
    double h = x_[j + 1] - x_[j];
    double A = (x_[j + 1] - x) / h;
    double B = (x - x_[j]) / h;
    f = A * y_[j] + B * y_[j + 1] +
        ((A * A * A - A) * m_[j] + (B * B * B - B) * m_[j + 1]) * h * h / 6.0;
    df = (y_[j + 1] - y_[j]) / h -
         (3.0 * A * A - 1.0) / 6.0 * h * m_[j] + (3.0 * B * B - 1.0) / 6.0 * h * m_[j + 1];
    ddf = A * m_[j] + B * m_[j + 1];
  }

 private:
  size_t locate(double x) const {
    size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      size_t mid = (lo + hi) / 2;
      (x_[mid] <= x ? lo : hi) = mid;
    }
    return lo;
  }
  std::vector<double> x_, y_, m_;
};

}  // namespace grw::detail
