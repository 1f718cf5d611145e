#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "shelab/errors.hpp"
#include "shelab/noise.hpp"
#include "shelab/philox.hpp"

using namespace shelab;

TEST(Philox, KnownAnswerVectors) {
  // Random123 kat_vectors, philox4x32_10
  const PhiloxCounter zero = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(zero, (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  const PhiloxCounter ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(ones, (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  const PhiloxCounter pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(pi, (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, GaussianMoments) {
  const PhiloxKey key = philox_key(99);
  double s = 0, s2 = 0, s4 = 0;
  const int n = 200000;
  for (int i = 0; i < n / 2; ++i) {
    const auto z = philox_normal_pair({static_cast<std::uint32_t>(i), 0, 0, 0}, key);
    for (double v : z) {
      s += v;
      s2 += v * v;
      s4 += v * v * v * v;
    }
  }
  EXPECT_NEAR(s / n, 0.0, 5 * std::sqrt(1.0 / n));
  EXPECT_NEAR(s2 / n, 1.0, 5 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 5 * std::sqrt(96.0 / n));
}

TEST(Noise, IncrementsAreDeterministicPerCounter) {
  const SpectralModel m{BesselCorrelation{2.0}, 2, 1.0};
  const LatticeGrid g{2, 16, 8.0};
  const NoiseSampler s = build_sampler(m, g, 7);
  std::vector<double> a, b, c;
  std::vector<cplx> scratch;
  sample_increment(s, 0.01, 3, 11, a, scratch);
  sample_increment(s, 0.01, 3, 11, b, scratch);
  sample_increment(s, 0.01, 3, 12, c, scratch);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  std::vector<double> other;
  sample_increment(build_sampler(m, g, 8), 0.01, 3, 11, other, scratch);
  EXPECT_NE(a, other);
  std::vector<double> rep;
  sample_increment(s, 0.01, 4, 11, rep, scratch);
  EXPECT_NE(a, rep);
}

TEST(Noise, StreamMatchesDirectCounters) {
  const SpectralModel m{Triangle1D{}, 1, 1.0};
  const LatticeGrid g{1, 64, 16.0};
  const NoiseSampler s = build_sampler(m, g, 1);
  NoiseStream stream(s, 2, 5);
  std::vector<double> x, y;
  std::vector<cplx> scratch;
  stream.next(0.1, x);
  sample_increment(s, 0.1, 2, 5, y, scratch);
  EXPECT_EQ(x, y);
  EXPECT_EQ(stream.position(), 6u);
}

TEST(Noise, VarianceScalesWithDt) {
  const SpectralModel m{Triangle1D{}, 1, 1.0};
  const LatticeGrid g{1, 256, 16.0};
  const NoiseSampler s = build_sampler(m, g, 3);
  std::vector<double> x;
  std::vector<cplx> scratch;
  double v1 = 0, v2 = 0;
  for (int k = 0; k < 400; ++k) {
    sample_increment(s, 1.0, 0, k, x, scratch);
    for (double u : x) v1 += u * u;
    sample_increment(s, 0.25, 1, k, x, scratch);
    for (double u : x) v2 += u * u;
  }
  EXPECT_NEAR(v2 / v1, 0.25, 0.02);
  EXPECT_NEAR(v1 / (400.0 * 256), 0.5, 0.02);
}

TEST(Noise, SpectralCoefficientsAreHermitian) {
  const SpectralModel m{BesselCorrelation{3.0}, 2, 1.0};
  const LatticeGrid g{2, 8, 4.0};
  const NoiseSampler s = build_sampler(m, g, 5);
  std::vector<cplx> a;
  sample_increment_spectral(s, 1.0, 0, 0, a);
  // k_last = 0 plane: A(-k0, 0) = conj A(k0, 0)
  for (int k0 = 1; k0 < g.n; ++k0) {
    const cplx p = a[s.plan->half_flatten({k0, 0, 0})], q = a[s.plan->half_flatten({(g.n - k0) % g.n, 0, 0})];
    EXPECT_NEAR(std::abs(p - std::conj(q)), 0.0, 1e-15);
  }
  EXPECT_EQ(a[0].imag(), 0.0);
}

TEST(Noise, CovarianceOfBesselNoise) {
  // lag-0 variance equals f(0) up to lattice truncation; lag one cell matches f(h)
  const SpectralModel m{BesselCorrelation{4.0}, 1, 1.0};
  const LatticeGrid g{1, 128, 32.0};
  const NoiseSampler s = build_sampler(m, g, 11);
  std::vector<std::vector<double>> fields(2000);
  std::vector<cplx> scratch;
  for (std::size_t k = 0; k < fields.size(); ++k) sample_increment(s, 1.0, 0, k, fields[k], scratch);
  const auto est = empirical_covariance(g, fields, {{0, 0, 0}, {4, 0, 0}});
  for (const auto& e : est) {
    const double expected = correlation_radial(m, e.lag[0] * g.h());
    EXPECT_NEAR(e.estimate, expected, 4 * e.standard_error + 1e-3) << e.lag[0];
  }
}

TEST(Noise, InfiniteSpectralDensityIsRejected) {
  const SpectralModel m{RieszType{1.0, 1.0}, 2, 1.0};
  try {
    build_sampler(m, {2, 16, 8.0}, 1);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_EQ(e.field(), "model");
    EXPECT_NE(std::string(e.what()).find("mode"), std::string::npos);
  }
}

TEST(Noise, CovarianceNeedsEnoughFields) {
  const LatticeGrid g{1, 16, 4.0};
  std::vector<std::vector<double>> fields(10, std::vector<double>(16, 0.0));
  EXPECT_ANY_THROW(empirical_covariance(g, fields, {{0, 0, 0}}));
}
