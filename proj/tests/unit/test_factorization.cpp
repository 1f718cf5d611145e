#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "shelab/factorization.hpp"

using namespace shelab;

namespace {
NoiseRecord record(double dt, double t_end, std::uint64_t seed) {
  const LatticeGrid g{1, 128, 16.0};
  SolverConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.keep_noise = true;
  c.store_snapshots = false;
  const Trajectory tr = evolve(init_state(InitialDatum::constant_density(1.0), g), c, build_sampler({Triangle1D{}, 1, 1.0}, g, seed),
                               DiffusionCoefficient::make_linear(1.0));
  return *tr.noise;
}
} // namespace

TEST(Factorization, ImpulseCoefficientTendsToOne) {
  const double alpha = 0.25, dt = 1e-3;
  // a forcing far in the past of the observation time carries weight close to 1
  EXPECT_NEAR(impulse_coefficient(alpha, dt, 1000, 0, SingularRule::product), 1.0, 1e-3);
  EXPECT_NEAR(impulse_coefficient(alpha, dt, 1000, 989, SingularRule::product), 1.0, 0.01);
  const double c1 = impulse_coefficient(alpha, dt, 1000, 998, SingularRule::product);
  EXPECT_GT(std::abs(c1 - 1.0), std::abs(impulse_coefficient(alpha, dt, 1000, 900, SingularRule::product) - 1.0));
}

TEST(Factorization, ZeroAlphaYIsTheStochasticConvolution) {
  const NoiseRecord rec = record(1e-2, 0.5, 3);
  const YSeries y = compute_Y(rec, 0.0);
  const std::vector<double> direct = direct_convolution(rec, 0.5);
  EXPECT_LT(relative_l2(y.field(y.steps()), direct), 1e-12);
}

TEST(Factorization, ReconstructionMatchesDirectConvolution) {
  const NoiseRecord rec = record(1e-3, 0.5, 4);
  const YSeries y = compute_Y(rec, 0.25);
  const double err = relative_l2(factorization_reconstruct(y, 0.5), direct_convolution(rec, 0.5));
  EXPECT_LT(err, 0.05);
  const YSeries mid = compute_Y(rec, 0.25, SingularRule::endpoint_midpoint);
  EXPECT_GT(relative_l2(factorization_reconstruct(mid, 0.5), direct_convolution(rec, 0.5)), err);
}

TEST(Factorization, ErrorShrinksWithDt) {
  auto err = [](double dt) {
    const NoiseRecord rec = record(dt, 0.5, 6);
    return relative_l2(factorization_reconstruct(compute_Y(rec, 0.25), 0.5), direct_convolution(rec, 0.5));
  };
  EXPECT_LT(err(5e-4), err(2e-3));
}

TEST(Factorization, RejectsBadAlpha) {
  const NoiseRecord rec = record(1e-2, 0.1, 1);
  EXPECT_ANY_THROW(compute_Y(rec, 0.5));
  EXPECT_ANY_THROW(factorization_reconstruct(compute_Y(rec, 0.0), 0.1));
}

TEST(Factorization, RelativeL2) {
  EXPECT_DOUBLE_EQ(relative_l2({1, 1}, {1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(relative_l2({2, 0}, {1, 0}), 1.0);
}
