#include <cmath>

#include <gtest/gtest.h>

#include "shelab/conditions.hpp"

using namespace shelab;

namespace {
const SpectralModel kBC23{BesselCorrelation{2.0}, 3, 1.0};
}

TEST(Conditions, BoundedRegimeReport) {
  const ConditionReport r = check_conditions(kBC23, {0.1, 0.0});
  EXPECT_TRUE(r.dalang_ok);
  EXPECT_TRUE(r.dalang00_ok);
  EXPECT_NEAR(r.upsilon0, 1 / (4 * M_PI), 1e-10);
  EXPECT_TRUE(r.lip_ok);
  EXPECT_NEAR(r.interval_lo, 128 * 0.01 / (4 * M_PI), 1e-10);
  EXPECT_NEAR(r.alpha_max, 0.25, 1e-12);
  ASSERT_TRUE(r.choice.has_value());
  EXPECT_GT(r.choice->alpha, 64 * 0.01 / (4 * M_PI));
  EXPECT_LT(r.choice->alpha, 0.25);
  EXPECT_GT(1 / r.choice->q, 64 * 0.01 / (4 * M_PI));
  EXPECT_LT(1 / r.choice->q, r.choice->alpha);
  EXPECT_TRUE(r.hua_evaluated);
  EXPECT_TRUE(r.hua_ok);
  EXPECT_TRUE(r.statement_window_ok);
}

TEST(Conditions, FrozenAlphaQChoice) {
  const AlphaQResult c = select_alpha_q(kBC23, {0.1, 0.0});
  ASSERT_TRUE(c.choice);
  EXPECT_NEAR(c.choice->alpha, 0.15046479089470327, 1e-12);
  EXPECT_NEAR(c.choice->q, 11.423455705690873, 1e-9);
}

TEST(Conditions, ZeroLipschitzGivesQTwoOverAlpha) {
  const AlphaQResult c = select_alpha_q(kBC23, {0.0, 1.0});
  ASSERT_TRUE(c.choice);
  EXPECT_NEAR(c.choice->q, 2 / c.choice->alpha, 1e-12);
}

TEST(Conditions, MaxLipschitz) {
  const LipschitzBound b = max_lipschitz(kBC23);
  EXPECT_TRUE(b.upsilon0_finite);
  EXPECT_NEAR(b.value, std::sqrt(M_PI / 32), 1e-10);
  const LipschitzBound t = max_lipschitz({Triangle1D{}, 1, 1.0});
  EXPECT_FALSE(t.upsilon0_finite);
  EXPECT_EQ(t.value, 0.0);
}

TEST(Conditions, StrongNoiseFailsTheGate) {
  const ConditionReport r = check_conditions(kBC23, {1.0, 0.0}, false);
  EXPECT_FALSE(r.lip_ok);
  EXPECT_FALSE(r.choice.has_value());
  EXPECT_FALSE(r.binding_constraint.empty());
  EXPECT_FALSE(r.hua_evaluated);
}

TEST(Conditions, LowDimensionHasInfiniteUpsilonZero) {
  const ConditionReport r = check_conditions({BesselCorrelation{2.0}, 2, 1.0}, {0.1, 0.0}, false);
  EXPECT_TRUE(r.dalang_ok);
  EXPECT_FALSE(r.dalang00_ok);
  EXPECT_TRUE(std::isinf(r.upsilon0));
  EXPECT_FALSE(r.lip_ok);
}

TEST(Conditions, HuaPinnedLimit) {
  const HuaReport h = hua_check({BesselCorrelation{4.0}, 3, 1.0}, 0.25, {1e-2, 1e-1, 1, 10, 100, 1000});
  EXPECT_TRUE(h.ok) << h.worst;
  EXPECT_NEAR(h.limit, 2 * std::pow(M_PI, 1.5), 1e-8);
  EXPECT_NEAR(h.rows.back().h_alpha / h.limit, 1.0, 0.02);
  for (const auto& row : h.rows) {
    EXPECT_TRUE(row.part1_ok);
    EXPECT_LE(row.lhs, row.rhs * (1 + 1e-6));
  }
}

TEST(Conditions, HuaRowsIncreaseTowardTheLimit) {
  const HuaReport h = hua_check(kBC23, 0.1, {1e-2, 1, 100});
  for (std::size_t i = 1; i < h.rows.size(); ++i) EXPECT_GT(h.rows[i].h_alpha, h.rows[i - 1].h_alpha);
}
