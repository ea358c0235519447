#include <gtest/gtest.h>

#include <random>

#include "grw/integrate.hpp"
#include "grw/shoot.hpp"
#include "test_helpers.hpp"

using namespace grw;

namespace {
const SolveParams kPrm;
const IvpParams kIvp;
}

TEST(Ivp, MinkowskiLine) {
  auto w = WarpFunction::constant(1.0);
  auto r = integrate_ivp(w, 0.0, 2.0, 1.0, 1.0, kIvp);
  EXPECT_NEAR(r.tau, 2.0, 1e-10);
  EXPECT_NEAR(r.r, 1.0, 1e-10);
  EXPECT_LT(r.D_drift, 1e-10);
}

TEST(Ivp, CoshLightlikeSaturates) {
  // D = 0 from tau0 = 0: the fiber arclength approaches pi/2 from below
  auto w = WarpFunction::hyperbolic_cosine();
  auto r = integrate_ivp(w, 0.0, 1.0, 1.0, kInf, kIvp);
  EXPECT_LT(r.r, M_PI_2);
  EXPECT_GT(r.r, M_PI_2 - 1e-4);
}

TEST(Ivp, LinearLevelBounceMatchesAdvance) {
  auto w = grwtest::linear_level_warp();
  double K = 0.25;  // D = 0.75
  auto r = integrate_ivp(w, 0.0, std::sqrt(K), 1.0, kInf, kIvp, 1.0);
  ASSERT_EQ(r.stop, IvpResult::Stop::fiber_arc);
  auto a = advance(w, 0.0, 0.75, +1, 1.0, kPrm);
  EXPECT_NEAR(r.tau, a.tau, 1e-6);
  EXPECT_LT(r.dtau, 0.0);  // the bounce reversed the base motion
}

TEST(Ivp, ConservationDriftSmall) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    auto w = grwtest::random_trig_warp(rng);
    double tau0 = 0.5 * u(rng);
    double v0 = 1.5 * u(rng);
    auto r = integrate_ivp(w, tau0, v0, 1.0, 5.0, kIvp);
    EXPECT_LT(r.D_drift, 1e-8) << "warp " << i;
  }
}

TEST(Ivp, BaseTangentLine) {
  auto w = WarpFunction::polynomial({1.0, 0.0, -0.5}, Interval{-1.0, 1.0});
  auto r = integrate_ivp(w, 0.0, 0.5, 0.0, 1.0, kIvp);
  EXPECT_NEAR(r.tau, 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(r.r, 0.0);
  auto r2 = integrate_ivp(w, 0.0, 2.0, 0.0, 1.0, kIvp);
  EXPECT_EQ(r2.stop, IvpResult::Stop::boundary);
}

TEST(Ivp, TurningPointConsistency) {
  // the maximum tau reached matches b*(D) for non-tangential bounces
  auto w = WarpFunction::hyperbolic_cosine();
  double D = std::pow(1.0 / std::cosh(1.0), 2);
  auto r = integrate_ivp(w, 0.0, std::sqrt(w.p(0.0) - D), 1.0, kInf, kIvp, 2.5);
  auto tp = turning_points(w, 0.0, D, kPrm);
  EXPECT_NEAR(r.tau_max, tp.b_star, 1e-6);
}

TEST(Ivp, AdvanceAgreesAcrossWarps) {
  // quadrature traversal vs the independent ODE oracle on random data
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 120 && checked < 100; ++i) {
    auto w = grwtest::random_trig_warp(rng);
    double tau0 = -0.5 + u(rng);
    double p0 = w.p(tau0);
    double K = (u(rng) < 0.5 ? -1 : 1) * (0.02 + 2.0 * u(rng)) * p0;
    double D = p0 - std::abs(K);
    int eps = K > 0 ? +1 : -1;
    double L = 0.2 + 1.5 * u(rng);
    AdvanceResult a;
    try {
      a = advance(w, tau0, D, eps, L, kPrm);
    } catch (const std::domain_error&) {
      continue;
    }
    if (a.status != AdvanceResult::Status::ok) continue;
    auto r = integrate_ivp(w, tau0, eps * std::sqrt(std::abs(K)), 1.0, kInf, kIvp, L);
    if (r.stop != IvpResult::Stop::fiber_arc) continue;
    EXPECT_NEAR(a.tau, r.tau, 1e-6) << "warp " << i << " K=" << K << " L=" << L;
    ++checked;
  }
  EXPECT_GE(checked, 60);
}

TEST(Sweep, MinkowskiHit) {
  auto w = WarpFunction::constant(1.0);
  std::vector<double> Ks;
  for (int i = 0; i <= 400; ++i) Ks.push_back(0.05 * i);
  auto sw = sweep_oracle(w, 0.0, 2.0, Ks, {1.0}, 1e-8, kIvp);
  bool hit_at_4 = false;
  for (const auto& h : sw.hits)
    if (std::abs(h.K - 4.0) < 0.05) hit_at_4 = true;
  EXPECT_TRUE(hit_at_4);
}

TEST(Sweep, DeSitterAntipodeNeverHit) {
  auto w = WarpFunction::hyperbolic_cosine();
  std::vector<double> Ks;
  for (int i = -300; i <= 300; ++i) Ks.push_back(i * 0.02);
  auto sw = sweep_oracle(w, 0.0, 1.0, Ks, {M_PI, 3 * M_PI}, 1e-3, kIvp);
  EXPECT_TRUE(sw.hits.empty());
  EXPECT_GT(sw.min_residual, 0.05);
}

TEST(Sweep, StripUnreachableTarget) {
  // strip of the parabola warp: reachable fiber arclength is bounded, so far
  // targets are never hit
  auto strip = WarpFunction::polynomial({1.0, 0.0, -0.5}, Interval{0.2, 0.8});
  std::vector<double> Ks;
  for (int i = -200; i <= 200; ++i) Ks.push_back(i * 0.05);
  auto sw = sweep_oracle(strip, 0.5, 0.6, Ks, {40.0}, 1e-3, kIvp);
  EXPECT_TRUE(sw.hits.empty());
}
