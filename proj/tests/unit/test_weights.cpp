#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shelab/errors.hpp"
#include "shelab/weights.hpp"

using namespace shelab;

TEST(Weights, AnalyticAdmissibilityTable) {
  for (int d : {1, 2, 3}) {
    for (double a : {0.1, 1.0, 5.0}) EXPECT_EQ(classify_admissible({WeightKind::exp_decay, a, d}), Admissibility::admissible);
    EXPECT_EQ(classify_admissible({WeightKind::poly_decay, d + 0.5, d}), Admissibility::admissible);
    EXPECT_EQ(classify_admissible({WeightKind::poly_decay, static_cast<double>(d), d}), Admissibility::not_admissible);
    EXPECT_EQ(classify_admissible({WeightKind::poly_decay, d - 0.5, d}), Admissibility::not_admissible);
    for (double b : {0.3, 1.0}) EXPECT_EQ(classify_admissible({WeightKind::stretched_exp, b, d}), Admissibility::admissible);
    for (double b : {1.01, 2.0}) EXPECT_EQ(classify_admissible({WeightKind::stretched_exp, b, d}), Admissibility::not_admissible);
  }
}

TEST(Weights, L1MatchesQuadrature) {
  for (int d : {1, 2, 3}) {
    for (const Weight w : {Weight{WeightKind::exp_decay, 1.5, d}, Weight{WeightKind::poly_decay, d + 1.5, d},
                           Weight{WeightKind::stretched_exp, 0.7, d}}) {
      const double ref = oracle::sphere_area(d) *
                         oracle::integrate_to_inf([&](double r) { return weight_value(w, r) * std::pow(r, d - 1); }, 0.0);
      EXPECT_NEAR(weight_l1(w) / ref, 1.0, 1e-9) << weight_name(w.kind) << " d=" << d;
    }
  }
  EXPECT_TRUE(std::isinf(weight_l1({WeightKind::poly_decay, 1.0, 1})));
}

TEST(Weights, HeatSmoothedRatioMatchesQuadratureInOneDimension) {
  for (const Weight w : {Weight{WeightKind::exp_decay, 1.0, 1}, Weight{WeightKind::poly_decay, 2.0, 1},
                         Weight{WeightKind::stretched_exp, 2.0, 1}}) {
    for (double t : {0.1, 0.5}) {
      for (double x : {0.0, 1.5, 4.0}) {
        const auto f = [&](double y) {
          return std::exp(-y * y / (2 * t)) / std::sqrt(2 * M_PI * t) * weight_value(w, std::abs(x - y));
        };
        const double conv = oracle::integrate(f, x - 60.0, x + 60.0, 1e-12, 0.0);
        EXPECT_NEAR(std::exp(log_heat_smoothed_ratio(w, t, x)), conv / weight_value(w, x),
                    1e-8 * conv / weight_value(w, x))
            << weight_name(w.kind) << " t=" << t << " x=" << x;
        EXPECT_NEAR(heat_smoothed_weight(w, t, x), conv, 1e-8 * conv);
      }
    }
  }
}

TEST(Weights, GaussianWeightRatioIsExact) {
  // for rho = exp(-|x|^2) the heat-smoothed ratio has a closed form in every dimension
  const double t = 0.5;
  for (int d : {1, 3}) {
    const Weight w{WeightKind::stretched_exp, 2.0, d};
    for (double r : {0.0, 2.0, 8.0}) {
      const double exact = -0.5 * d * std::log(1 + 2 * t) + r * r * 2 * t / (1 + 2 * t);
      EXPECT_NEAR(log_heat_smoothed_ratio(w, t, r), exact, 1e-9 * std::max(1.0, exact));
    }
  }
}

TEST(Weights, ScanSeparatesAdmissibleFromNot) {
  const AdmissibilityCertificate good = admissibility_scan({WeightKind::exp_decay, 1.0, 3}, 0.5, 8.0, 64);
  EXPECT_EQ(good.scan_verdict, Admissibility::admissible);
  EXPECT_TRUE(std::isfinite(good.numeric_sup_ratio));
  const AdmissibilityCertificate bad = admissibility_scan({WeightKind::stretched_exp, 2.0, 3}, 0.5, 8.0, 64);
  EXPECT_EQ(bad.scan_verdict, Admissibility::not_admissible);
  ASSERT_EQ(bad.log_sup_by_radius.size(), 3u);
  EXPECT_GT(bad.log_sup_by_radius[2] - bad.log_sup_by_radius[0], std::log(2.0));
}

TEST(Weights, RatioIntegrability) {
  EXPECT_EQ(ratio_integrable({WeightKind::exp_decay, 2.0, 3}, {WeightKind::exp_decay, 1.0, 3}), PairIntegrability::integrable);
  EXPECT_EQ(ratio_integrable({WeightKind::exp_decay, 1.0, 3}, {WeightKind::exp_decay, 1.0, 3}),
            PairIntegrability::not_integrable);
  EXPECT_EQ(ratio_integrable({WeightKind::poly_decay, 5.0, 1}, {WeightKind::poly_decay, 2.0, 1}),
            PairIntegrability::integrable);
  EXPECT_EQ(ratio_integrable({WeightKind::poly_decay, 5.0, 1}, {WeightKind::exp_decay, 1.0, 1}),
            PairIntegrability::not_integrable);
  EXPECT_EQ(ratio_integrable({WeightKind::exp_decay, 1.0, 1}, {WeightKind::exp_decay, 1.0, 2}),
            PairIntegrability::unsupported);
}

TEST(Weights, WeightedNormOfConstantField) {
  const LatticeGrid g{1, 512, 64.0};
  FieldState f{g, std::vector<double>(g.size(), 2.0), 0.0, {}};
  const WeightedNorm n = weighted_norm(f, {WeightKind::exp_decay, 1.0, 1});
  // lattice sum 4 h sum_k e^{-|k| h} = 4 h coth(h/2), which tends to 4 * int e^{-|x|} dx = 8
  const double h = g.h();
  EXPECT_NEAR(n.value, 4.0 * h / std::tanh(h / 2), 1e-10);
  EXPECT_NEAR(n.value, 8.0, 0.02);
  EXPECT_FALSE(n.truncation_warning);
  const WeightedNorm heavy = weighted_norm(f, {WeightKind::poly_decay, 1.2, 1});
  EXPECT_TRUE(heavy.truncation_warning);
}

TEST(Weights, ValidationNamesFields) {
  try {
    validate(Weight{WeightKind::exp_decay, -1.0, 2});
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_EQ(e.field(), "weight.param");
  }
}
