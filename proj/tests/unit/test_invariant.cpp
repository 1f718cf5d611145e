#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "shelab/invariant.hpp"

using namespace shelab;

namespace {

// Per-site independent Ornstein-Uhlenbeck lattice field dX = -X dt + sqrt(2) dB, exact
// transition. Stationary law per site is N(0, 1), so n ||X||^2 is chi-square with n dof.
OccupationSeries ou_series(int replicas, int steps, double dt, int sites, unsigned seed, bool stationary_start) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const double a = std::exp(-dt), s = std::sqrt(1 - a * a);
  OccupationSeries out(replicas);
  for (int r = 0; r < replicas; ++r) {
    std::vector<double> x(sites, stationary_start ? 0.0 : 4.0);
    if (stationary_start) for (auto& v : x) v = z(rng);
    for (int k = 1; k <= steps; ++k) {
      double n2 = 0;
      for (auto& v : x) {
        v = a * v + s * z(rng);
        n2 += v * v;
      }
      out[r].push_back({k * dt, std::sqrt(n2 / sites), {x[0]}});
    }
  }
  return out;
}

double chi2_cdf_norm(double norm, int sites) {
  // P(||X|| <= norm) with sites * ||X||^2 ~ chi-square(sites); Wilson-Hilferty is enough here
  const double k = sites, x = sites * norm * norm;
  const double zz = (std::cbrt(x / k) - (1 - 2 / (9 * k))) / std::sqrt(2 / (9 * k));
  return 0.5 * std::erfc(-zz / std::sqrt(2.0));
}

} // namespace

TEST(Invariant, OrnsteinUhlenbeckControlRecoversStationaryLaw) {
  const int sites = 16;
  const OccupationSeries s = ou_series(100, 400, 0.25, sites, 17, false);
  const KBAverage kb = kb_average(s, 5.0, 95.0);
  ASSERT_GE(kb.samples.size(), 10000u);
  std::vector<double> norms;
  for (const auto& o : kb.samples) norms.push_back(o.norm_rho);
  std::sort(norms.begin(), norms.end());
  double ks = 0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const double F = chi2_cdf_norm(norms[i], sites);
    ks = std::max({ks, std::abs(F - static_cast<double>(i) / norms.size()), std::abs(F - (i + 1.0) / norms.size())});
  }
  EXPECT_LT(ks, 0.05);
}

TEST(Invariant, IidSamplesSitAtTheNoiseFloor) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  double total = 0, floor = 0;
  const int trials = 200;
  for (int k = 0; k < trials; ++k) {
    std::vector<double> a(400), b(800);
    for (auto& v : a) v = z(rng);
    for (auto& v : b) v = z(rng);
    total += ks_distance(a, b);
    floor = ks_noise_floor(a.size(), b.size());
  }
  EXPECT_NEAR(total / trials, floor, 0.1 * floor);
}

TEST(Invariant, KsDistanceBasics) {
  EXPECT_DOUBLE_EQ(ks_distance({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(ks_distance({1, 2}, {3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(ks_distance({1, 2, 3, 4}, {3, 4}), 0.5);
}

TEST(Invariant, StationaryInputSettlesBelowTheFloor) {
  const OccupationSeries stat = ou_series(50, 320, 0.25, 8, 3, true);
  std::vector<KBAverage> kb;
  for (double T : {10.0, 20.0, 40.0}) kb.push_back(kb_average(stat, 1.0, T));
  const KBConvergenceReport rep = kb_convergence(kb);
  for (const auto& c : rep.coords) EXPECT_TRUE(c.final_below) << c.name;
}

TEST(Invariant, KbAverageValidation) {
  const OccupationSeries s = ou_series(2, 40, 0.25, 4, 1, true);
  EXPECT_ANY_THROW(kb_average(s, 0.0, 5.0));
  EXPECT_ANY_THROW(kb_average(s, 1.0, 20.0));  // window not covered
  OccupationSeries uneven = s;
  uneven[0][3].t += 0.1;
  uneven[1][3].t += 0.1;
  EXPECT_ANY_THROW(kb_average(uneven, 1.0, 5.0));
  const KBAverage kb = kb_average(s, 1.0, 5.0);
  EXPECT_EQ(kb.samples.size(), static_cast<std::size_t>(kb.replicas * kb.times));
}

TEST(Invariant, KbAverageIgnoresReplicaOrderAndTimeOrder) {
  const OccupationSeries s = ou_series(6, 60, 0.25, 4, 9, true);
  OccupationSeries relabeled(s.rbegin(), s.rend());
  auto norms = [](const KBAverage& k) {
    std::vector<double> v;
    for (const auto& o : k.samples) v.push_back(o.norm_rho);
    std::sort(v.begin(), v.end());
    return v;
  };
  EXPECT_EQ(norms(kb_average(s, 2.0, 10.0)), norms(kb_average(relabeled, 2.0, 10.0)));
}

TEST(Invariant, ProjectionFamilyIsOrthonormal) {
  const LatticeGrid g{2, 32, 16.0};
  const ProjectionFamily f(g, {WeightKind::exp_decay, 1.0, 2}, 8);
  ASSERT_EQ(f.size(), 8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) EXPECT_NEAR(f.inner(f.basis[i], f.basis[j]), i == j ? 1.0 : 0.0, 1e-10);
  }
  FieldState s{g, f.basis[3], 1.0, {}};
  const OccupationSample o = f.observe(s);
  EXPECT_NEAR(o.norm_rho, 1.0, 1e-12);
  EXPECT_NEAR(o.projections[3], 1.0, 1e-12);
  EXPECT_NEAR(o.projections[0], 0.0, 1e-10);
}

TEST(Invariant, TightnessQuantilesDeterministicCase) {
  OccupationSeries det(1);
  for (int k = 1; k <= 10; ++k) det[0].push_back({static_cast<double>(k), 1.0 / k, {}});
  const TightnessTable t = tightness_quantiles(det, 2.0, {0.05});
  ASSERT_EQ(t.rows.size(), 9u);
  for (const auto& row : t.rows) EXPECT_DOUBLE_EQ(row.value, 1.0 / row.t);
  EXPECT_DOUBLE_EQ(t.envelope[0], 0.5);
  EXPECT_ANY_THROW(tightness_quantiles(det, 1.0, {1.5}));
}

TEST(Invariant, QuantileTypeSeven) {
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({5, 1, 3}, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5}, 0.9), 4.6);
}
