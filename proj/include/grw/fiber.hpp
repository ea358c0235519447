#pragma once

// Model fiber geometries (F, g). Only four pieces of fiber data enter the
// spacetime computations: the distance, the set of connecting geodesic
// lengths, the conjugate schedule along a geodesic, and the convexity class.
// FiberModel is the extension interface carrying exactly those; the shipped
// families implement it in closed form.

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grw/numeric.hpp"

namespace grw {

enum class FiberFamily { line, bounded_interval, circle, sphere, euclidean };

inline const char* family_name(FiberFamily f) {
  switch (f) {
    case FiberFamily::line: return "line";
    case FiberFamily::bounded_interval: return "interval";
    case FiberFamily::circle: return "circle";
    case FiberFamily::sphere: return "sphere";
    case FiberFamily::euclidean: return "euclidean";
  }
  return "?";
}

struct FiberPoint {
  std::vector<double> coords;
};

struct FiberGeodesic {
  FiberPoint from, to;
  double length = 0;
  int branch = 0;       // 0 = minimizing, then alternating reversed arc / windings
  bool constant = false;  // equal endpoints marker (Lemma-1 connections)
};

struct FiberConjugate {
  double r;   // arclength location
  int mult;
};

// Extension interface: users may plug custom fibers by implementing this.
class FiberModel {
 public:
  virtual ~FiberModel() = default;
  virtual FiberFamily family() const = 0;
  virtual int dim() const = 0;
  virtual double size() const = 0;  // radius or interval length; 0 if n/a
  virtual double diameter() const = 0;
  virtual bool weakly_convex() const = 0;
  virtual bool strongly_convex() const = 0;
  virtual void validate(const FiberPoint& x) const = 0;
  virtual double distance(const FiberPoint& x, const FiberPoint& y) const = 0;
  virtual std::vector<FiberGeodesic> geodesic_lengths(const FiberPoint& x,
                                                      const FiberPoint& y,
                                                      double L_max) const = 0;
  virtual std::vector<FiberConjugate> conjugate_schedule(const FiberGeodesic& g) const = 0;
  virtual bool weakly_convex_for_pair(const FiberPoint&, const FiberPoint&) const {
    return weakly_convex();
  }
  virtual std::optional<std::pair<FiberPoint, FiberPoint>> pair_at_distance(double L) const = 0;
};

namespace detail {

constexpr double kManifoldTol = 1e-12;

class LineFiber : public FiberModel {
 public:
  FiberFamily family() const override { return FiberFamily::line; }
  int dim() const override { return 1; }
  double size() const override { return 0; }
  double diameter() const override { return kInf; }
  bool weakly_convex() const override { return true; }
  bool strongly_convex() const override { return true; }
  void validate(const FiberPoint& x) const override {
    if (x.coords.size() != 1) throw std::domain_error("line fiber point needs 1 coordinate");
  }
  double distance(const FiberPoint& x, const FiberPoint& y) const override {
    validate(x);
    validate(y);
    return std::abs(x.coords[0] - y.coords[0]);
  }
  std::vector<FiberGeodesic> geodesic_lengths(const FiberPoint& x, const FiberPoint& y,
                                              double L_max) const override {
    double d = distance(x, y);
    if (d == 0 || d > L_max) return {};
    return {FiberGeodesic{x, y, d, 0, false}};
  }
  std::vector<FiberConjugate> conjugate_schedule(const FiberGeodesic&) const override {
    return {};
  }
  std::optional<std::pair<FiberPoint, FiberPoint>> pair_at_distance(double L) const override {
    return std::make_pair(FiberPoint{{0.0}}, FiberPoint{{L}});
  }
};

class BoundedIntervalFiber : public FiberModel {
 public:
  explicit BoundedIntervalFiber(double len) : len_(len) {
    if (!(len > 0)) throw std::invalid_argument("interval fiber needs positive length");
  }
  FiberFamily family() const override { return FiberFamily::bounded_interval; }
  int dim() const override { return 1; }
  double size() const override { return len_; }
  double diameter() const override { return len_; }
  bool weakly_convex() const override { return true; }
  bool strongly_convex() const override { return true; }
  void validate(const FiberPoint& x) const override {
    if (x.coords.size() != 1) throw std::domain_error("interval fiber point needs 1 coordinate");
    if (!(x.coords[0] > 0 && x.coords[0] < len_))
      throw std::domain_error("interval fiber point outside (0, length)");
  }
  double distance(const FiberPoint& x, const FiberPoint& y) const override {
    validate(x);
    validate(y);
    return std::abs(x.coords[0] - y.coords[0]);
  }
  std::vector<FiberGeodesic> geodesic_lengths(const FiberPoint& x, const FiberPoint& y,
                                              double L_max) const override {
    double d = distance(x, y);
    if (d == 0 || d > L_max) return {};
    return {FiberGeodesic{x, y, d, 0, false}};
  }
  std::vector<FiberConjugate> conjugate_schedule(const FiberGeodesic&) const override {
    return {};
  }
  std::optional<std::pair<FiberPoint, FiberPoint>> pair_at_distance(double L) const override {
    if (L >= len_) return std::nullopt;
    double pad = 0.5 * (len_ - L);
    return std::make_pair(FiberPoint{{pad}}, FiberPoint{{pad + L}});
  }

 private:
  double len_;
};

class EuclideanFiber : public FiberModel {
 public:
  explicit EuclideanFiber(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("euclidean fiber needs dim >= 1");
  }
  FiberFamily family() const override { return FiberFamily::euclidean; }
  int dim() const override { return n_; }
  double size() const override { return 0; }
  double diameter() const override { return kInf; }
  bool weakly_convex() const override { return true; }
  bool strongly_convex() const override { return true; }
  void validate(const FiberPoint& x) const override {
    if (static_cast<int>(x.coords.size()) != n_)
      throw std::domain_error("euclidean fiber point dimension mismatch");
  }
  double distance(const FiberPoint& x, const FiberPoint& y) const override {
    validate(x);
    validate(y);
    double s = 0;
    for (int i = 0; i < n_; ++i) {
      double d = x.coords[i] - y.coords[i];
      s += d * d;
    }
    return std::sqrt(s);
  }
  std::vector<FiberGeodesic> geodesic_lengths(const FiberPoint& x, const FiberPoint& y,
                                              double L_max) const override {
    double d = distance(x, y);
    if (d == 0 || d > L_max) return {};
    return {FiberGeodesic{x, y, d, 0, false}};
  }
  std::vector<FiberConjugate> conjugate_schedule(const FiberGeodesic&) const override {
    return {};
  }
  std::optional<std::pair<FiberPoint, FiberPoint>> pair_at_distance(double L) const override {
    FiberPoint a, b;
    a.coords.assign(n_, 0.0);
    b.coords.assign(n_, 0.0);
    b.coords[0] = L;
    return std::make_pair(a, b);
  }

 private:
  int n_;
};

class CircleFiber : public FiberModel {
 public:
  explicit CircleFiber(double R) : R_(R) {
    if (!(R > 0)) throw std::invalid_argument("circle fiber needs positive radius");
  }
  FiberFamily family() const override { return FiberFamily::circle; }
  int dim() const override { return 1; }
  double size() const override { return R_; }
  double diameter() const override { return M_PI * R_; }
  bool weakly_convex() const override { return true; }
  bool strongly_convex() const override { return false; }
  void validate(const FiberPoint& x) const override {
    if (x.coords.size() != 1) throw std::domain_error("circle fiber point needs 1 angle");
  }
  double angular_gap(const FiberPoint& x, const FiberPoint& y) const {
    double d = std::remainder(y.coords[0] - x.coords[0], 2.0 * M_PI);
    return std::abs(d);  // in [0, pi]
  }
  double distance(const FiberPoint& x, const FiberPoint& y) const override {
    validate(x);
    validate(y);
    return R_ * angular_gap(x, y);
  }
  std::vector<FiberGeodesic> geodesic_lengths(const FiberPoint& x, const FiberPoint& y,
                                              double L_max) const override {
    validate(x);
    validate(y);
    double th = angular_gap(x, y);
    if (th == 0) return {};
    std::vector<FiberGeodesic> out;
    int branch = 0;
    for (int k = 0;; ++k) {
      double l1 = R_ * (th + 2.0 * M_PI * k);
      double l2 = R_ * ((2.0 * M_PI - th) + 2.0 * M_PI * k);
      bool any = false;
      if (l1 <= L_max) {
        out.push_back(FiberGeodesic{x, y, l1, branch, false});
        any = true;
      }
      ++branch;
      if (l2 <= L_max) {
        out.push_back(FiberGeodesic{x, y, l2, branch, false});
        any = true;
      }
      ++branch;
      if (!any) break;
    }
    std::sort(out.begin(), out.end(),
              [](const FiberGeodesic& a, const FiberGeodesic& b) { return a.length < b.length; });
    return out;
  }
  std::vector<FiberConjugate> conjugate_schedule(const FiberGeodesic&) const override {
    return {};  // flat 1-D
  }
  std::optional<std::pair<FiberPoint, FiberPoint>> pair_at_distance(double L) const override {
    if (L > M_PI * R_) return std::nullopt;
    return std::make_pair(FiberPoint{{0.0}}, FiberPoint{{L / R_}});
  }

 private:
  double R_;
};

class SphereFiber : public FiberModel {
 public:
  SphereFiber(int n, double R) : n_(n), R_(R) {
    if (n < 2) throw std::invalid_argument("sphere fiber needs dim >= 2");
    if (!(R > 0)) throw std::invalid_argument("sphere fiber needs positive radius");
  }
  FiberFamily family() const override { return FiberFamily::sphere; }
  int dim() const override { return n_; }
  double size() const override { return R_; }
  double diameter() const override { return M_PI * R_; }
  bool weakly_convex() const override { return true; }
  bool strongly_convex() const override { return false; }
  void validate(const FiberPoint& x) const override {
    if (static_cast<int>(x.coords.size()) != n_ + 1)
      throw std::domain_error("sphere fiber point needs dim+1 ambient coordinates");
    double s = 0;
    for (double c : x.coords) s += c * c;
    if (std::abs(std::sqrt(s) - R_) > kManifoldTol * std::max(1.0, R_))
      throw std::domain_error("sphere fiber point is not on the sphere");
  }
  double angle(const FiberPoint& x, const FiberPoint& y) const {
    double dot = 0;
    for (size_t i = 0; i < x.coords.size(); ++i) dot += x.coords[i] * y.coords[i];
    return std::acos(clamp(dot / (R_ * R_), -1.0, 1.0));
  }
  double distance(const FiberPoint& x, const FiberPoint& y) const override {
    validate(x);
    validate(y);
    return R_ * angle(x, y);
  }
  std::vector<FiberGeodesic> geodesic_lengths(const FiberPoint& x, const FiberPoint& y,
                                              double L_max) const override {
    validate(x);
    validate(y);
    double th = angle(x, y);
    if (th == 0) return {};
    std::vector<FiberGeodesic> out;
    if (std::abs(th - M_PI) < 1e-9) {
      // antipodal pair: a geodesic of length (2k+1) pi R for every great circle
      for (int k = 0;; ++k) {
        double l = (2.0 * k + 1.0) * M_PI * R_;
        if (l > L_max) break;
        out.push_back(FiberGeodesic{x, y, l, k, false});
      }
      return out;
    }
    int branch = 0;
    for (int k = 0;; ++k) {
      double l1 = R_ * (2.0 * M_PI * k + th);
      double l2 = R_ * (2.0 * M_PI * (k + 1) - th);
      bool any = false;
      if (l1 <= L_max) {
        out.push_back(FiberGeodesic{x, y, l1, branch, false});
        any = true;
      }
      ++branch;
      if (l2 <= L_max) {
        out.push_back(FiberGeodesic{x, y, l2, branch, false});
        any = true;
      }
      ++branch;
      if (!any) break;
    }
    std::sort(out.begin(), out.end(),
              [](const FiberGeodesic& a, const FiberGeodesic& b) { return a.length < b.length; });
    return out;
  }
  std::vector<FiberConjugate> conjugate_schedule(const FiberGeodesic& g) const override {
    std::vector<FiberConjugate> out;
    if (g.constant) return out;
    for (int k = 1;; ++k) {
      double r = k * M_PI * R_;
      if (r >= g.length * (1.0 - 1e-12)) break;
      out.push_back(FiberConjugate{r, n_ - 1});
    }
    return out;
  }
  std::optional<std::pair<FiberPoint, FiberPoint>> pair_at_distance(double L) const override {
    if (L > M_PI * R_) return std::nullopt;
    double th = L / R_;
    FiberPoint a, b;
    a.coords.assign(n_ + 1, 0.0);
    b.coords.assign(n_ + 1, 0.0);
    a.coords[0] = R_;
    b.coords[0] = R_ * std::cos(th);
    b.coords[1] = R_ * std::sin(th);
    return std::make_pair(a, b);
  }

 private:
  int n_;
  double R_;
};

}  // namespace detail

// Value wrapper over the model interface.
class FiberGeometry {
 public:
  static FiberGeometry line() { return FiberGeometry(std::make_shared<detail::LineFiber>()); }
  static FiberGeometry bounded_interval(double len) {
    return FiberGeometry(std::make_shared<detail::BoundedIntervalFiber>(len));
  }
  static FiberGeometry circle(double R) {
    return FiberGeometry(std::make_shared<detail::CircleFiber>(R));
  }
  static FiberGeometry sphere(int n, double R) {
    return FiberGeometry(std::make_shared<detail::SphereFiber>(n, R));
  }
  static FiberGeometry euclidean(int n) {
    return FiberGeometry(std::make_shared<detail::EuclideanFiber>(n));
  }
  static FiberGeometry custom(std::shared_ptr<const FiberModel> m) { return FiberGeometry(std::move(m)); }

  const FiberModel& model() const { return *m_; }
  FiberFamily family() const { return m_->family(); }
  int dim() const { return m_->dim(); }
  double size() const { return m_->size(); }
  double diameter() const { return m_->diameter(); }
  bool weakly_convex() const { return m_->weakly_convex(); }
  bool strongly_convex() const { return m_->strongly_convex(); }
  double distance(const FiberPoint& x, const FiberPoint& y) const { return m_->distance(x, y); }
  std::vector<FiberGeodesic> geodesic_lengths(const FiberPoint& x, const FiberPoint& y,
                                              double L_max) const {
    return m_->geodesic_lengths(x, y, L_max);
  }
  std::vector<FiberConjugate> conjugate_schedule(const FiberGeodesic& g) const {
    return m_->conjugate_schedule(g);
  }
  bool weakly_convex_for_pair(const FiberPoint& x, const FiberPoint& y) const {
    return m_->weakly_convex_for_pair(x, y);
  }
  std::optional<std::pair<FiberPoint, FiberPoint>> pair_at_distance(double L) const {
    return m_->pair_at_distance(L);
  }
  FiberGeodesic constant_geodesic(const FiberPoint& x) const {
    return FiberGeodesic{x, x, 0.0, 0, true};
  }

 private:
  explicit FiberGeometry(std::shared_ptr<const FiberModel> m) : m_(std::move(m)) {}
  std::shared_ptr<const FiberModel> m_;
};

}  // namespace grw
