#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shelab/errors.hpp"
#include "shelab/kernels.hpp"

using namespace shelab;

namespace {
SpectralModel bessel_corr(double s, int d) { return {BesselCorrelation{s}, d, 1.0}; }
SpectralModel bessel_spec(double s, int d) { return {BesselSpectral{s}, d, 1.0}; }
} // namespace

TEST(Kernels, PinnedUpsilonZero) {
  EXPECT_NEAR(upsilon(bessel_corr(2, 3), 0, 0), 1.0 / (4 * M_PI), 1e-10);
  EXPECT_NEAR(upsilon(bessel_corr(3, 3), 0, 0), 1.0 / (2 * M_PI * M_PI), 1e-10);
  EXPECT_NEAR(upsilon_closed_form(bessel_corr(2, 3), 0), 1.0 / (4 * M_PI), 1e-14);
}

TEST(Kernels, BesselSpectralCorrectedClosedForm) {
  // 1 / (8 pi^3) at d = s = 3; see the decisions ledger for the derivation
  EXPECT_NEAR(upsilon_closed_form(bessel_spec(3, 3), 0), 1.0 / (8 * std::pow(M_PI, 3)), 1e-14);
  EXPECT_NEAR(upsilon(bessel_spec(3, 3), 0, 0), 0.0040314418, 1e-9);
}

TEST(Kernels, RieszTypeCorrectedValue) {
  const SpectralModel m{RieszType{2, 2}, 3, 1.0};
  const double expected = std::sqrt(2.0) / (4 * M_PI) + 1.0 / (8 * std::pow(M_PI, 2.5));
  EXPECT_NEAR(upsilon_closed_form(m, 0.25), expected, 1e-12);
  EXPECT_NEAR(upsilon_closed_form(m, 0.25), 0.119685, 5e-7);
  EXPECT_NEAR(upsilon(m, 0.25, 0) / expected, 1.0, 1e-8);
}

TEST(Kernels, UpsilonQuadratureMatchesGslOracle) {
  struct Case { double s; int d; double alpha, beta; };
  for (const Case c : {Case{2, 3, 0.0, 1.0}, Case{2.5, 3, 0.3, 0.5}, Case{1.2, 2, 0.4, 0.0}, Case{3, 1, 0.6, 0.0},
                       Case{5, 3, 0.1, 2.0}}) {
    const double ref = oracle::upsilon_radial([s = c.s](double r) { return std::pow(1 + r * r, -s / 2); }, c.d,
                                              c.alpha, c.beta);
    EXPECT_NEAR(upsilon(bessel_corr(c.s, c.d), c.alpha, c.beta) / ref, 1.0, 1e-8) << c.s << " " << c.d;
  }
}

TEST(Kernels, BesselSpectralUpsilonMatchesSubordinationOracle) {
  const double s = 3.5, alpha = 0.2;
  const int d = 3;
  const double ref = oracle::upsilon_radial([&](double r) { return oracle::bessel_potential(s, d, r); }, d, alpha, 0.5);
  EXPECT_NEAR(upsilon(bessel_spec(s, d), alpha, 0.5) / ref, 1.0, 1e-7);
}

TEST(Kernels, BesselPotentialMatchesSubordinationOracle) {
  for (double s : {1.0, 2.0, 3.5, 6.0}) {
    for (int d : {1, 2, 3}) {
      for (double r : {0.05, 0.7, 2.0, 9.0}) {
        const double ref = oracle::bessel_potential(s, d, r);
        EXPECT_NEAR(bessel_potential(s, d, r) / ref, 1.0, 1e-9) << s << " " << d << " " << r;
      }
    }
  }
}

TEST(Kernels, DivergenceIsDetected) {
  EXPECT_TRUE(std::isinf(upsilon({Triangle1D{}, 1, 1.0}, 0, 0)));
  EXPECT_FALSE(upsilon_finite(bessel_corr(2, 2), 0, 0));
  EXPECT_TRUE(upsilon_finite(bessel_corr(2, 2), 0, 1));
  // Dalang fails: int (1+|xi|^2)^{-s/2} / (1+|xi|^2) diverges when s <= d - 2
  EXPECT_FALSE(upsilon_finite(bessel_corr(0.5, 3), 0, 1));
}

TEST(Kernels, AlphaWindowForBesselCorrelation) {
  const AlphaWindow w = upsilon_alpha_window(bessel_corr(2, 3));
  EXPECT_NEAR(w.lo, 0.0, 1e-15);
  EXPECT_NEAR(w.hi, 0.5, 1e-15);
}

TEST(Kernels, ClosedFormDomainViolationNamesInequality) {
  try {
    upsilon_closed_form(bessel_corr(0.5, 3), 0.0);
    FAIL() << "expected DomainViolation";
  } catch (const DomainViolation& e) {
    EXPECT_EQ(e.inequality(), "s > d - 2(1-alpha)");
  }
  EXPECT_THROW(upsilon_closed_form({Triangle1D{}, 1, 1.0}, 0.0), ParameterError);
}

TEST(Kernels, ValidationNamesFields) {
  try {
    validate(bessel_corr(-1, 3));
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_EQ(e.field(), "model.s");
  }
  try {
    validate({Triangle1D{}, 2, 1.0});
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_EQ(e.field(), "model.d");
  }
}

TEST(Kernels, OneDimensionalPresets) {
  const SpectralModel tri{Triangle1D{}, 1, 1.0}, sinc{SincSquared1D{}, 1, 1.0};
  EXPECT_NEAR(correlation_radial(tri, 0.0), 0.5, 1e-15);
  EXPECT_NEAR(correlation_radial(tri, 1.0), 0.25, 1e-15);
  EXPECT_EQ(correlation_radial(tri, 3.0), 0.0);
  EXPECT_NEAR(spectral_density_radial(tri, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(spectral_density_radial(sinc, 0.0), 0.5, 1e-15);
  for (double xi : {2.0, 2.5, 10.0}) EXPECT_EQ(spectral_density_radial(sinc, xi), 0.0);
}

TEST(Kernels, CorrelationIsInverseTransformOfSpectralDensity) {
  // 1-d check: f(x) = (1/pi) int_0^inf f-hat(xi) cos(x xi) dxi
  const SpectralModel m = bessel_corr(3.0, 1);
  for (double x : {0.3, 1.0, 2.5}) {
    const double ref = oracle::fourier_cos([](double xi) { return std::pow(1 + xi * xi, -1.5); }, x) / M_PI;
    EXPECT_NEAR(correlation_radial(m, x), ref, 1e-9) << x;
  }
}

TEST(Kernels, MaternMatchesBesselCorrelationShape) {
  // phi |x|^nu K_nu(|x|) with nu = (s-d)/2 is proportional to the Bessel potential f_s
  const SpectralModel mat{Matern{1.0, 1.0, 0.5}, 3, 1.0};
  const double c = correlation_radial(mat, 1.0) / bessel_potential(4.0, 3, 1.0);
  for (double r : {0.2, 2.0, 5.0}) EXPECT_NEAR(correlation_radial(mat, r) / bessel_potential(4.0, 3, r), c, 1e-10 * c);
}

TEST(Kernels, HAlphaMatchesGslOracle) {
  const double ref =
      oracle::h_alpha_radial([](double r) { return std::pow(1 + r * r, -2.0); }, 3, 0.25, 0.5);
  EXPECT_NEAR(h_alpha(bessel_corr(4, 3), 0.25, 0.5) / ref, 1.0, 1e-7);
}

TEST(Kernels, HAlphaAsymptoticCoefficients) {
  const HAlphaAsymptotic c = h_alpha_asymptotic(bessel_corr(4, 3), 0.25);
  EXPECT_EQ(c.regime, 'c');
  ASSERT_EQ(c.terms.size(), 1u);
  EXPECT_NEAR(c.terms[0].coefficient, 2 * M_PI * M_PI, 1e-12);
  const HAlphaAsymptotic e = h_alpha_asymptotic(bessel_corr(6, 3), 0.25);
  EXPECT_EQ(e.regime, 'e');
  EXPECT_NEAR(e.terms[0].coefficient, M_PI * M_PI / 2, 1e-12);
  const HAlphaAsymptotic sp = h_alpha_asymptotic(bessel_spec(3, 3), 0.25);
  EXPECT_NEAR(sp.terms[0].coefficient, 2.0, 1e-15);
}

TEST(Kernels, HAlphaDivergesForLargeAlpha) {
  // alpha >= 1/2 - (d-s)/4 makes the r -> 0 end non-integrable
  EXPECT_TRUE(std::isinf(h_alpha(bessel_corr(2.0, 3), 0.3, 1.0)));
  EXPECT_TRUE(std::isfinite(h_alpha(bessel_corr(2.0, 3), 0.2, 1.0)));
}

TEST(Kernels, SqrtTriangleInverseTransform) {
  for (double x : {0.1, 1.0, 3.7, 8.0}) {
    const double ref = oracle::integrate_smooth([&](double xi) { return std::sqrt((2 - xi) / 4) * std::cos(x * xi); },
                                                0.0, 2.0, 1e-13, 1e-15) /
                       M_PI;
    EXPECT_NEAR(inv_ft_sqrt_triangle(x), ref, 1e-11) << x;
  }
}

TEST(Kernels, AmplitudeScalesLinearly) {
  SpectralModel m = bessel_corr(2, 3);
  const double u1 = upsilon(m, 0.1, 0.0);
  m.amplitude = 3.0;
  EXPECT_NEAR(upsilon(m, 0.1, 0.0), 3 * u1, 1e-12 * u1);
}
