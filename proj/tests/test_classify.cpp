#include <gtest/gtest.h>

#include "grw/classify.hpp"
#include "test_helpers.hpp"

using namespace grw;

namespace {
const SolveParams kPrm;
}

TEST(ConditionA, CoshFailsWithFiniteIntegral) {
  auto w = WarpFunction::hyperbolic_cosine();
  auto prof = extreme_profile(w, End::upper, kPrm.window);
  auto A = condition_A(w, End::upper, prof, kPrm);
  EXPECT_FALSE(A.holds);
  ASSERT_TRUE(A.integral.has_value());
  EXPECT_TRUE(A.integral->is_finite());
}

TEST(ConditionA, PowerQuadraticDiverges) {
  auto w = WarpFunction::power_quadratic(0.25);
  auto prof = extreme_profile(w, End::upper, kPrm.window);
  auto A = condition_A(w, End::upper, prof, kPrm);
  EXPECT_TRUE(A.holds);
  ASSERT_TRUE(A.integral.has_value());
  EXPECT_TRUE(A.integral->is_divergent());
}

TEST(ConditionA, ParabolaNotARelativeMin) {
  // f = 1 - tau^2/2 on (-1,1): 1/f^2 increases into b, not a relative min
  auto w = WarpFunction::polynomial({1.0, 0.0, -0.5}, Interval{-1.0, 1.0});
  auto prof = extreme_profile(w, End::upper, kPrm.window);
  auto A = condition_A(w, End::upper, prof, kPrm);
  EXPECT_TRUE(A.holds);
  EXPECT_FALSE(A.relative_min);
}

TEST(Defect, CoshIsZero) {
  auto w = WarpFunction::hyperbolic_cosine();
  auto prof = extreme_profile(w, End::upper, kPrm.window);
  auto A = condition_A(w, End::upper, prof, kPrm);
  auto d = defect_d(w, End::upper, prof, A.integral->value, kPrm);
  EXPECT_TRUE(d.converged);
  EXPECT_NEAR(d.value, 0.0, 1e-6);
}

TEST(Defect, LinearLevelIsZero) {
  // 1/f^2 = 1 - tau near b = 1: the near-level integral is continuous in D
  auto w = grwtest::linear_level_warp();
  auto prof = extreme_profile(w, End::upper, kPrm.window);
  ASSERT_TRUE(prof.relative_min);
  auto A = condition_A(w, End::upper, prof, kPrm);
  ASSERT_FALSE(A.holds);
  auto d = defect_d(w, End::upper, prof, A.integral->value, kPrm);
  EXPECT_NEAR(d.value, 0.0, 1e-6);
}

TEST(Defect, TangentialStaircaseInfinite) {
  // staircase with tangential touch levels accumulating at the end: the
  // defect is infinite and exceeds the total length L = int f^-1
  auto w = grwtest::tangential_staircase_warp();
  auto prof = extreme_profile(w, End::upper, kPrm.window);
  ASSERT_TRUE(prof.relative_min);
  EXPECT_NEAR(prof.level_liminf, 0.0, 1e-9);
  auto A = condition_A(w, End::upper, prof, kPrm);
  ASSERT_FALSE(A.holds) << "level integral must stay finite";
  auto d = defect_d(w, End::upper, prof, A.integral->value, kPrm);
  EXPECT_TRUE(d.divergent_probe);
  EXPECT_TRUE(std::isinf(d.value));
  double L = grwtest::simpson([&](double t) { return 1.0 / w.f(t); }, 1e-6, 1.0 - 1e-9);
  EXPECT_GE(d.value, L);
  // Condition (B) then holds at b for any fiber diameter
  auto rep = classify_all(w, FiberGeometry::line(), kPrm);
  EXPECT_FALSE(rep.at_b.A.holds);
  EXPECT_TRUE(rep.at_b.condition_B);
}

TEST(Index, InapplicableWhenLevelsMeet) {
  // cosh: m = m_b = 0, so Definition 3 does not apply
  auto w = WarpFunction::hyperbolic_cosine();
  auto prof = extreme_profile(w, End::upper, kPrm.window);
  auto idx = index_i(w, End::upper, prof, 0.0, kPrm);
  EXPECT_FALSE(idx.defined);
}

TEST(Index, QuarticWellGridOracle) {
  // 1/f^2 = (tau^2-1)^2 + 0.2 on (-2, 0.5): i_b from a D-grid over
  // (0.2, 0.7625) with the analytic left turning point
  auto w =
      WarpFunction::invsq_polynomial({1.2, 0.0, -2.0, 0.0, 1.0}, Interval{-2.0, 0.5});
  auto prof = extreme_profile(w, End::upper, kPrm.window);
  ASSERT_TRUE(prof.relative_min);
  EXPECT_NEAR(prof.level_liminf, 0.7625, 1e-6);
  auto idx = index_i(w, End::upper, prof, 0.2, kPrm);
  ASSERT_TRUE(idx.defined);
  // oracle: dense grid, analytic a*(D) = -sqrt(1 - sqrt(D - 0.2)) and plain
  // Simpson with the square-root substitution near the turning point
  double best = kInf;
  for (int i = 1; i < 400; ++i) {
    double D = 0.2 + (0.7625 - 0.2) * i / 400.0;
    double astar = -std::sqrt(1.0 - std::sqrt(D - 0.2));
    double h = 0.5 - astar;
    auto G = [&](double s) {
      double tau = astar + s * s;
      double gap = w.p(tau) - D;
      if (gap <= 0) return 0.0;
      return 2.0 * s * w.p(tau) / std::sqrt(gap);
    };
    double v = grwtest::simpson(G, 1e-9, std::sqrt(h), 4096);
    best = std::min(best, v);
  }
  EXPECT_NEAR(idx.value, best, 2e-3 * std::max(1.0, best));
}

TEST(Index, ShiftedStaircaseBoundsDefect) {
  // Fig-2 style: finite defect above a base level; i_b <= d_b makes (C) hold
  // at b while (B) fails there
  std::shared_ptr<grwtest::PiecewiseProfile> keep;
  double N = 16.0;
  double Lt = 3.0 * std::sqrt(N);
  auto w = grwtest::shifted_staircase_warp(N, Lt, keep);
  auto prof = extreme_profile(w, End::upper, kPrm.window);
  ASSERT_TRUE(prof.relative_min);
  EXPECT_NEAR(prof.level_liminf, N, 1e-3 * N);
  auto A = condition_A(w, End::upper, prof, kPrm);
  ASSERT_FALSE(A.holds);
  ASSERT_TRUE(A.integral->is_finite());
  auto d = defect_d(w, End::upper, prof, A.integral->value, kPrm);
  ASSERT_TRUE(std::isfinite(d.value));
  EXPECT_GT(d.value, 0.5 * Lt);
  auto idx = index_i(w, End::upper, prof, 0.0, kPrm);
  ASSERT_TRUE(idx.defined);
  ASSERT_TRUE(std::isfinite(idx.value));
  EXPECT_LE(idx.value, d.value);
  // condition assembly at b with an infinite-diameter fiber
  auto rep = classify_all(w, FiberGeometry::line(), kPrm);
  EXPECT_FALSE(rep.at_b.A.holds);
  EXPECT_FALSE(rep.at_b.condition_B);
  EXPECT_TRUE(rep.at_b.condition_C);
  // the lower end fails (C): rising 1/f^2 with zero defect
  EXPECT_FALSE(rep.at_a.condition_C);
  EXPECT_EQ(rep.verdict, ConnectedVerdict::no);
  ASSERT_TRUE(rep.witness.has_value());
}

TEST(Residuals, DeSitterWindowLimit) {
  auto w = WarpFunction::hyperbolic_cosine();
  auto t = residual_sequences(w, 0.0, 3, ResidualWindow{true, 0}, kPrm);
  ASSERT_TRUE(t.applicable);
  for (int n = 0; n <= 3; ++n) {
    double expect = M_PI_2 + n * M_PI;
    EXPECT_NEAR(t.r_i[n].value, expect, 1e-6);
    EXPECT_NEAR(t.r_s[n].value, expect, 1e-6);
    EXPECT_NEAR(t.l_i[n].value, expect, 1e-6);
    EXPECT_NEAR(t.l_s[n].value, expect, 1e-6);
  }
}

TEST(Residuals, DeSitterFixedWindowZero) {
  auto w = WarpFunction::hyperbolic_cosine();
  auto t = residual_sequences(w, 0.0, 2, ResidualWindow{false, 0.0}, kPrm);
  ASSERT_TRUE(t.applicable);
  for (int n = 0; n <= 2; ++n) {
    EXPECT_NEAR(t.r_i[n].value, n * M_PI, 1e-6);
    EXPECT_NEAR(t.r_s[n].value, (n + 1) * M_PI, 1e-6);
    EXPECT_NEAR(t.l_i[n].value, n * M_PI, 1e-6);
    EXPECT_NEAR(t.l_s[n].value, (n + 1) * M_PI, 1e-6);
  }
}

TEST(Residuals, ConstantInapplicable) {
  auto w = WarpFunction::constant(1.0);
  auto t = residual_sequences(w, 0.0, 2, ResidualWindow{true, 0}, kPrm);
  EXPECT_FALSE(t.applicable);
}

TEST(Residuals, MonotoneAndOrdered) {
  auto w = WarpFunction::hyperbolic_cosine();
  for (double tau0 : {-0.7, 0.0, 1.3}) {
    auto t = residual_sequences(w, tau0, 4, ResidualWindow{false, 6.0}, kPrm);
    ASSERT_TRUE(t.applicable);
    for (int n = 0; n <= 4; ++n) {
      EXPECT_LE(t.r_i[n].value, t.r_s[n].value + 1e-9);
      EXPECT_LE(t.l_i[n].value, t.l_s[n].value + 1e-9);
      if (n > 0) {
        EXPECT_GT(t.r_i[n].value, t.r_i[n - 1].value);
        EXPECT_GT(t.l_i[n].value, t.l_i[n - 1].value);
      }
    }
  }
}

TEST(Residuals, LevelIntegralMatchesFirstEntry) {
  // r_i^0(tau0) equals the level integral from tau0 to b directly
  auto w = WarpFunction::hyperbolic_cosine();
  double tau0 = 0.4;
  auto t = residual_sequences(w, tau0, 1, ResidualWindow{true, 0}, kPrm);
  ASSERT_TRUE(t.applicable);
  auto direct = segment_integral(w, tau0, kInf, 0.0, kPrm, EndKind::regular,
                                 EndKind::boundary);
  ASSERT_TRUE(direct.is_finite());
  EXPECT_NEAR(t.r_i[0].value, direct.value, 1e-8);
}

TEST(Residuals, Remark2AutoSatisfied) {
  // Condition (A) holds for (1+tau^2)^{1/4}: r_i^0 = inf, so (R) is
  // automatic wherever Definition 4 applies
  auto w = WarpFunction::power_quadratic(0.25);
  auto t = residual_sequences(w, 0.0, 2, ResidualWindow{true, 0}, kPrm);
  ASSERT_TRUE(t.applicable);
  EXPECT_TRUE(std::isinf(t.r_i[0].value));
  auto rep = classify_all(w, FiberGeometry::sphere(2, 1.0), kPrm);
  EXPECT_TRUE(rep.R_applicable);
  EXPECT_TRUE(rep.R_holds);
}

TEST(ClassifyAll, DeSitterNotConnected) {
  auto w = WarpFunction::hyperbolic_cosine();
  auto rep = classify_all(w, FiberGeometry::sphere(2, 1.0), kPrm);
  EXPECT_FALSE(rep.at_a.A.holds);
  EXPECT_FALSE(rep.at_b.A.holds);
  EXPECT_FALSE(rep.at_a.condition_B);
  EXPECT_FALSE(rep.at_b.condition_B);
  EXPECT_FALSE(rep.at_a.condition_C);
  EXPECT_FALSE(rep.at_b.condition_C);
  EXPECT_TRUE(rep.R_applicable);
  EXPECT_FALSE(rep.R_holds);  // [pi/2, pi] is not covered by {pi/2 + n pi}
  EXPECT_NE(rep.verdict, ConnectedVerdict::yes);
}

TEST(ClassifyAll, PowerQuadraticConnected) {
  auto w = WarpFunction::power_quadratic(0.25);
  auto rep = classify_all(w, FiberGeometry::sphere(2, 1.0), kPrm);
  EXPECT_TRUE(rep.at_a.A.holds);
  EXPECT_TRUE(rep.at_b.A.holds);
  EXPECT_EQ(rep.verdict, ConnectedVerdict::yes);
}

TEST(ClassifyAll, MinkowskiProductConnected) {
  auto w = WarpFunction::constant(1.0);
  auto rep = classify_all(w, FiberGeometry::line(), kPrm);
  EXPECT_TRUE(rep.at_a.A.holds);
  EXPECT_TRUE(rep.at_b.A.holds);
  EXPECT_FALSE(rep.at_a.profile.relative_min);
  EXPECT_EQ(rep.verdict, ConnectedVerdict::yes);
}

TEST(ClassifyAll, ConditionChainHolds) {
  // A => B => C on a spread of warps and fibers
  std::vector<WarpFunction> warps;
  warps.push_back(WarpFunction::hyperbolic_cosine());
  warps.push_back(WarpFunction::constant(2.0));
  warps.push_back(WarpFunction::power_quadratic(0.25));
  warps.push_back(grwtest::linear_level_warp());
  for (const auto& w : warps) {
    for (const auto& F : {FiberGeometry::line(), FiberGeometry::sphere(2, 1.0)}) {
      auto rep = classify_all(w, F, kPrm);
      for (const auto* er : {&rep.at_a, &rep.at_b}) {
        if (er->A.holds) EXPECT_TRUE(er->condition_B);
        if (er->condition_B) EXPECT_TRUE(er->condition_C);
      }
    }
  }
}

TEST(ClassifyAll, Lemma3ContrapositiveDiagnostics) {
  // wherever Condition (B) fails at b, f has a limit in (0, inf] and f' > 0
  // on a terminal window
  auto ch = WarpFunction::hyperbolic_cosine();
  auto rep = classify_all(ch, FiberGeometry::sphere(2, 1.0), kPrm);
  ASSERT_FALSE(rep.at_b.condition_B);
  ASSERT_TRUE(rep.at_b.lemma3.has_value());
  EXPECT_TRUE(rep.at_b.lemma3->limit_exists);
  EXPECT_TRUE(rep.at_b.lemma3->window_found);
  EXPECT_GT(rep.at_b.lemma3->min_fprime, 0.0);
}

TEST(Table1, FiniteEndRows) {
  // f = 1 - tau on (0,1): lim f = 0 -> Yes
  auto w1 = WarpFunction::polynomial({1.0, -1.0}, Interval{0.0, 1.0});
  auto r1 = table1_classify(w1, End::upper, kPrm);
  ASSERT_TRUE(r1.classifiable);
  EXPECT_EQ(r1.verdict, Table1Verdict::yes);

  // f = 1 - tau^2/2 at b = 1: lim f = 1/2, lim f' = -1 -> Yes
  auto w2 = WarpFunction::polynomial({1.0, 0.0, -0.5}, Interval{-1.0, 1.0});
  auto r2 = table1_classify(w2, End::upper, kPrm);
  EXPECT_EQ(r2.verdict, Table1Verdict::yes);

  // f = 1 + tau on (0,1): lim f' = 1 > 0 -> No*
  auto w3 = WarpFunction::polynomial({1.0, 1.0}, Interval{0.0, 1.0});
  auto r3 = table1_classify(w3, End::upper, kPrm);
  EXPECT_EQ(r3.verdict, Table1Verdict::no_star);

  // f = 1 + (1-tau)^2 on (0,1): lim f' = 0, f'' bounded -> Yes
  auto w4 = WarpFunction::polynomial({2.0, -2.0, 1.0}, Interval{0.0, 1.0});
  auto r4 = table1_classify(w4, End::upper, kPrm);
  EXPECT_EQ(r4.verdict, Table1Verdict::yes);

  // f = 1/(1-tau) on (0,1): lim f = inf at a finite end -> No
  auto w5 = WarpFunction::from_callables(
      Interval{0.0, 1.0}, [](double t) { return 1.0 / (1.0 - t); },
      [](double t) { return 1.0 / ((1.0 - t) * (1.0 - t)); },
      [](double t) { return 2.0 / std::pow(1.0 - t, 3); }, "pole");
  auto r5 = table1_classify(w5, End::upper, kPrm);
  EXPECT_EQ(r5.verdict, Table1Verdict::no);

  // oscillating derivative: f' has no limit -> NoInformation
  auto w6 = WarpFunction::from_callables(
      Interval{0.0, 1.0},
      [](double t) { return 2.0 + (1.0 - t) * std::sin(std::log(1.0 - t)); },
      [](double t) {
        double u = std::log(1.0 - t);
        return -std::sin(u) - std::cos(u);
      },
      [](double t) {
        double u = std::log(1.0 - t);
        return (std::cos(u) - std::sin(u)) / (1.0 - t);
      },
      "wobble");
  auto r6 = table1_classify(w6, End::upper, kPrm);
  ASSERT_TRUE(r6.classifiable);
  EXPECT_EQ(r6.verdict, Table1Verdict::no_information);
}

TEST(Table1, InfiniteEndRows) {
  // cosh at b = inf: lim f = inf, integral of 1/f converges -> No**
  auto ch = WarpFunction::hyperbolic_cosine();
  auto r1 = table1_classify(ch, End::upper, kPrm);
  EXPECT_EQ(r1.verdict, Table1Verdict::no_star_star);

  // (1+tau^2)^{1/4}: lim f = inf, integral diverges -> Yes
  auto pq = WarpFunction::power_quadratic(0.25);
  auto r2 = table1_classify(pq, End::upper, kPrm);
  EXPECT_EQ(r2.verdict, Table1Verdict::yes);

  // constant: lim f nonzero finite -> Yes
  auto c = WarpFunction::constant(1.0);
  auto r3 = table1_classify(c, End::upper, kPrm);
  EXPECT_EQ(r3.verdict, Table1Verdict::yes);

  // decaying to zero: (1+tau^2)^{-1/2} -> Yes
  auto dec = WarpFunction::power_quadratic(-0.5);
  auto r4 = table1_classify(dec, End::upper, kPrm);
  EXPECT_EQ(r4.verdict, Table1Verdict::yes);
}

TEST(Curvature, ParabolaAndCosh) {
  auto par = WarpFunction::polynomial({1.0, 0.0, -0.5}, Interval{-1.0, 1.0});
  auto rep = curvature_check(par, kPrm);
  EXPECT_TRUE(rep.fpp_nonpositive);
  EXPECT_FALSE(rep.inextendible);  // f extends continuously to 1/2 > 0
  auto ch = WarpFunction::hyperbolic_cosine();
  EXPECT_FALSE(curvature_check(ch, kPrm).fpp_nonpositive);
  EXPECT_TRUE(curvature_check(ch, kPrm).inextendible);  // no finite ends
}

TEST(Curvature, StripCriterion) {
  auto par = WarpFunction::polynomial({1.0, 0.0, -0.5}, Interval{-1.0, 1.0});
  EXPECT_FALSE(strip_connected(par, 0.2, 0.8, kPrm));   // f'(0.2) = -0.2 < 0
  EXPECT_TRUE(strip_connected(par, -0.5, 0.5, kPrm));   // f'(-0.5) >= 0 >= f'(0.5)
  auto ch = WarpFunction::hyperbolic_cosine();
  EXPECT_THROW(strip_connected(ch, -1.0, 1.0, kPrm), std::domain_error);
}

TEST(Witness, MonotoneStripNotConnected) {
  // f = 1 - tau^2/2 restricted to (0.2, 0.8): 1/f^2 strictly increasing, the
  // lower end fails (C), Theorem 2(ii) gives a witness pair
  auto strip = WarpFunction::polynomial({1.0, 0.0, -0.5}, Interval{0.2, 0.8});
  auto rep = classify_all(strip, FiberGeometry::line(), kPrm);
  EXPECT_TRUE(rep.at_b.condition_C);   // A holds at b (not a relative min)
  EXPECT_FALSE(rep.at_a.condition_C);
  EXPECT_FALSE(rep.R_applicable);
  EXPECT_EQ(rep.verdict, ConnectedVerdict::no);
  ASSERT_TRUE(rep.witness.has_value());
  EXPECT_GT(rep.witness->L, 0.0);
  EXPECT_LT(rep.witness->tau1, rep.witness->tau0);  // target lies toward a
}

TEST(Witness, RGapCoshWithLineFiber) {
  // cosh with a line fiber: (C) fails, (R) applicable but fails; the bounce
  // sums cluster at multiples of pi (offset pi/2 at the symmetric tau0), so
  // the uncovered gaps sit between such clusters and carry a witness length
  auto ch = WarpFunction::hyperbolic_cosine();
  auto rep = classify_all(ch, FiberGeometry::line(), kPrm);
  EXPECT_TRUE(rep.R_applicable);
  EXPECT_FALSE(rep.R_holds);
  EXPECT_EQ(rep.verdict, ConnectedVerdict::no);
  ASSERT_TRUE(rep.witness.has_value());
  ASSERT_TRUE(rep.r_gap.has_value());
  EXPECT_GT(rep.r_gap->hi - rep.r_gap->lo, 0.5 * M_PI);
  // gap edges sit on the half-pi lattice of the bounce sums
  double lo_lattice = rep.r_gap->lo / M_PI_2;
  double hi_lattice = rep.r_gap->hi / M_PI_2;
  EXPECT_NEAR(lo_lattice, std::round(lo_lattice), 1e-4);
  EXPECT_NEAR(hi_lattice, std::round(hi_lattice), 1e-4);
  EXPECT_GT(rep.witness->L, rep.r_gap->lo);
  EXPECT_LT(rep.witness->L, rep.r_gap->hi);
}
