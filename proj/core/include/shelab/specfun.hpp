//! \file specfun.hpp
//! Special functions used by the kernel closed forms and asymptotics.
#pragma once

#include <utility>

namespace shelab {

//! Value plus a conservative absolute error bound.
struct SpecFunResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  //! False when an iterative or quadrature evaluation did not reach tolerance.
  bool converged = true;
};

enum class GammaKind { gamma, log_gamma, digamma };

//! Euler-Mascheroni constant.
inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

//! Gamma, log-gamma or digamma on x > 0.
//! Throws std::domain_error for x <= 0 and std::overflow_error for gamma at x > 170.
SpecFunResult gamma_family(double x, GammaKind which);

//! Convenience wrappers returning the bare value.
double gamma_fn(double x);
double log_gamma_fn(double x);
double digamma_fn(double x);

//! Fresnel integrals S(z) = int_0^z sin(pi t^2/2) dt and C(z) = int_0^z cos(pi t^2/2) dt.
struct FresnelPair {
  double S = 0.0;
  double C = 0.0;
};
FresnelPair fresnel(double z);

//! Tricomi confluent hypergeometric function U(a, b, x) for a > 0, x > 0 and real b.
//! Evaluated from its Laplace-integral representation. Non-convergence is reported
//! through SpecFunResult::converged with the partial value kept.
SpecFunResult kummer_u(double a, double b, double x);

//! Modified Bessel function of the second kind K_nu(x) for nu >= 0, x > 0.
//! Throws std::overflow_error when the value is not representable.
SpecFunResult bessel_k(double nu, double x);

//! Complementary error function for any finite x.
SpecFunResult erfc_fn(double x);

} // namespace shelab
