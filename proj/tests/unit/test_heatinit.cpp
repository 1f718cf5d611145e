#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shelab/errors.hpp"
#include "shelab/heatinit.hpp"

using namespace shelab;

TEST(HeatInit, HeatKernelFactorizationIdentity) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> time(0.01, 10.0), pos(-3.0, 3.0);
  std::uniform_int_distribution<int> dim(1, 3);
  for (int i = 0; i < 1000; ++i) {
    const int d = dim(rng);
    const double t = time(rng), s = time(rng);
    std::vector<double> x(d), y(d), mid(d), diff(d);
    for (int a = 0; a < d; ++a) {
      x[a] = pos(rng);
      y[a] = pos(rng);
      mid[a] = (s * x[a] + t * y[a]) / (t + s);
      diff[a] = x[a] - y[a];
    }
    const double lhs = heat_kernel(t, x) * heat_kernel(s, y);
    const double rhs = heat_kernel(t * s / (t + s), mid) * heat_kernel(t + s, diff);
    ASSERT_NEAR(lhs / rhs, 1.0, 1e-12) << "sample " << i;
  }
}

TEST(HeatInit, HeatKernelRejectsNonPositiveTime) {
  const std::vector<double> x{0.0};
  EXPECT_THROW(heat_kernel(0.0, x), std::domain_error);
  EXPECT_THROW(heat_kernel_r2(-1.0, 0.0, 2), std::domain_error);
}

TEST(HeatInit, DiracGRhoClosedFormOneDimension) {
  const Weight w{WeightKind::exp_decay, 1.0, 1};
  for (double t : {0.01, 0.1, 1.0, 10.0}) {
    const double closed = std::exp(t / 4) * oracle::erfc(std::sqrt(t) / 2) / std::sqrt(4 * M_PI * t);
    const double quad = 2 * oracle::integrate_to_inf(
                                [&](double x) {
                                  const double g = std::exp(-x * x / (2 * t)) / std::sqrt(2 * M_PI * t);
                                  return g * g * std::exp(-x);
                                },
                                0.0, 1e-12);
    EXPECT_NEAR(closed / quad, 1.0, 1e-9) << t;
    EXPECT_NEAR(g_rho(t, InitialDatum::dirac_delta(), w).value / closed, 1.0, 1e-10) << t;
  }
}

TEST(HeatInit, DiracGRhoFrozenValue) {
  EXPECT_NEAR(g_rho(1.0, InitialDatum::dirac_delta(), {WeightKind::exp_decay, 1.0, 1}).value, 0.1736830394, 1e-9);
}

TEST(HeatInit, ConstantDatumGRhoIsConstant) {
  const Weight w{WeightKind::exp_decay, 1.0, 3};
  const double expected = 4.0 * weight_l1(w);
  for (double t : {0.1, 10.0, 1000.0}) EXPECT_NEAR(g_rho(t, InitialDatum::constant_density(2.0), w).value, expected, 1e-8 * expected);
}

TEST(HeatInit, RieszJ0AtOrigin) {
  const InitialDatum mu = InitialDatum::riesz_singular(1.0);
  const std::vector<double> zero{0.0, 0.0, 0.0};
  for (double t : {0.5, 2.0}) {
    EXPECT_NEAR(j0_eval(t, zero, mu).value, riesz_constant(1.0, 3) * std::pow(t, -0.5), 1e-12);
  }
  // C_* = E |Z|^{-alpha} for a standard Gaussian Z in R^3 with alpha = 1: sqrt(2/pi)
  EXPECT_NEAR(riesz_constant(1.0, 3), std::sqrt(2 / M_PI), 1e-13);
}

TEST(HeatInit, ClosedFormsAgreeWithQuadrature) {
  for (const InitialDatum& mu : {InitialDatum::riesz_singular(1.3), InitialDatum::poly_growth_density(1.0),
                                 InitialDatum::poly_growth_density(2.5)}) {
    for (double t : {0.3, 4.0}) {
      for (double r : {0.0, 0.8, 5.0}) {
        const std::vector<double> x{r, 0.0, 0.0};
        const J0Value a = j0_eval(t, x, mu), b = j0_quadrature(t, x, mu);
        EXPECT_TRUE(a.closed_form);
        EXPECT_NEAR(a.value / b.value, 1.0, 1e-9) << datum_name(mu.kind) << " t=" << t << " r=" << r;
      }
    }
  }
}

TEST(HeatInit, PolyGrowthSquaredMomentExact) {
  // |x|^2 data: J0 = |x|^2 + d t exactly
  const InitialDatum mu = InitialDatum::poly_growth_density(2.0);
  const std::vector<double> x{1.0, 2.0};
  EXPECT_NEAR(j0_eval(0.7, x, mu).value, 5.0 + 2 * 0.7, 1e-12);
}

TEST(HeatInit, ProfileClassification) {
  const Weight w{WeightKind::exp_decay, 1.0, 1};
  const auto grid = geometric_grid(1e-2, 1e3, 41);
  const GRhoProfile poly = g_rho_profile(InitialDatum::poly_growth_density(1.0), w, grid);
  EXPECT_EQ(poly.classification, ProfileClass::grows_like_power);
  EXPECT_FALSE(poly.init_gate_ok);
  EXPECT_NEAR(loglog_slope(poly.t, poly.value, 10, 1e3), 1.0, 0.1);

  const GRhoProfile cst = g_rho_profile(InitialDatum::constant_density(1.0), w, grid);
  EXPECT_EQ(cst.classification, ProfileClass::bounded_at_infinity);
  EXPECT_TRUE(cst.init_gate_ok);

  const GRhoProfile dirac = g_rho_profile(InitialDatum::dirac_delta(), w, grid);
  EXPECT_EQ(dirac.classification, ProfileClass::vanishes);
  EXPECT_TRUE(dirac.init_gate_ok);
}

TEST(HeatInit, RieszProfileDecaysLikeInverseTime) {
  const GRhoProfile p = g_rho_profile(InitialDatum::riesz_singular(1.0), {WeightKind::exp_decay, 1.0, 3},
                                      geometric_grid(1e-2, 1e3, 31));
  EXPECT_TRUE(p.init_gate_ok);
  EXPECT_EQ(p.classification, ProfileClass::vanishes);
  EXPECT_NEAR(p.fitted_slope, -1.0, 0.05);
}

TEST(HeatInit, ProfileNeedsFourDecades) {
  EXPECT_THROW(g_rho_profile(InitialDatum::dirac_delta(), {WeightKind::exp_decay, 1.0, 1}, geometric_grid(1, 100, 10)),
               ParameterError);
}

TEST(HeatInit, SignedComboAbsoluteValueAndMuStar) {
  const InitialDatum combo =
      InitialDatum::signed_combo({{2.0, InitialDatum::dirac_delta()}, {-1.0, InitialDatum::constant_density(1.0)}});
  validate(combo, 1);
  const InitialDatum a = abs_datum(combo);
  ASSERT_EQ(a.kind, DatumKind::combo);
  for (const auto& term : a.terms) EXPECT_GT(term.coefficient, 0.0);
  const std::vector<double> x{0.5};
  const double star = j0_eval(1.0, x, mu_star(combo)).value;
  EXPECT_NEAR(star, 1.0 + 2.0 * heat_kernel(1.0, x) + 1.0, 1e-12);
}

TEST(HeatInit, OffCenterDiracInOneDimension) {
  const Weight w{WeightKind::exp_decay, 1.0, 1};
  const double x0 = 1.5, t = 0.8;
  const double ref = oracle::integrate(
      [&](double x) {
        const double g = std::exp(-(x - x0) * (x - x0) / (2 * t)) / std::sqrt(2 * M_PI * t);
        return g * g * std::exp(-std::abs(x));
      },
      -40, 40, 1e-12);
  EXPECT_NEAR(g_rho(t, InitialDatum::dirac_delta(1.0, {x0}), w).value / ref, 1.0, 1e-8);
}

TEST(HeatInit, ValidationNamesFields) {
  try {
    validate(InitialDatum::riesz_singular(3.5), 3);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_EQ(e.field(), "init.alpha");
  }
}
