// Independent reference values built on GSL. Nothing here calls into shelab, so a test
// comparing the two compares different code paths.
#pragma once

#include <functional>

namespace oracle {

using Fn = std::function<double(double)>;

// Adaptive quadrature wrappers (QAGS on [a, b], QAGIU on [a, inf), QAG for smooth oscillatory).
double integrate(const Fn& f, double a, double b, double rel = 1e-11, double abs = 0.0);
double integrate_to_inf(const Fn& f, double a, double rel = 1e-11, double abs = 0.0);
double integrate_smooth(const Fn& f, double a, double b, double rel = 1e-12, double abs = 0.0);

// int_0^inf f(x) cos(omega x) dx for a decaying f, by GSL's QAWF cycle extrapolation.
double fourier_cos(const Fn& f, double omega, double abs = 1e-13);

double gamma(double x);
double lgamma(double x);
double digamma(double x);
double bessel_k(double nu, double x);
double hyperg_u(double a, double b, double x);
double erfc(double x);

// Fresnel integrals by direct quadrature of sin / cos (pi t^2 / 2).
double fresnel_s(double z);
double fresnel_c(double z);

// Area of the unit sphere in R^d.
double sphere_area(int d);

// Bessel potential (Fourier transform (1+|xi|^2)^{-s/2}) from the heat-kernel subordination
// integral (1/Gamma(s/2)) int_0^inf e^{-u} (4 pi u)^{-d/2} e^{-r^2/4u} u^{s/2-1} du.
double bessel_potential(double s, int d, double r);

// Upsilon_alpha(beta) for a radial spectral density by radial quadrature.
double upsilon_radial(const Fn& spectral, int d, double alpha, double beta);

// H_alpha(t) = int_0^t r^{-2 alpha} int f-hat(xi) e^{-r |xi|^2} dxi dr for a radial density.
double h_alpha_radial(const Fn& spectral, int d, double alpha, double t);

} // namespace oracle
