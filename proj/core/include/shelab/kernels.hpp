//! \file kernels.hpp
//! Correlation/spectral kernel pairs and the spectral integrals built on them.
//!
//! Fourier convention: F phi(xi) = int e^{-i x.xi} phi(x) dx, with the (2 pi)^{-d}
//! factor on the inverse. Every spectral density below is stored in this convention,
//! so correlation(x) = (2 pi)^{-d} int spectral_density(xi) e^{i x.xi} dxi.
#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace shelab {

//! Spectral density (1+|xi|^2)^{-s/2}; correlation is the Bessel potential f_s.
struct BesselCorrelation {
  double s = 0.0;
};
//! Spectral density is the Bessel potential f_s; correlation (2 pi)^{-d}(1+|x|^2)^{-s/2}.
struct BesselSpectral {
  double s = 0.0;
};
//! Correlation phi (scale |x|)^nu K_nu(scale |x|).
struct Matern {
  double phi = 1.0;
  double scale = 1.0;
  double nu = 0.5;
};
//! Spectral density (1+|xi|^2)^{-s1/2} + f_{s2}(xi); singular at the origin in both spaces.
struct RieszType {
  double s1 = 0.0;
  double s2 = 0.0;
};
//! d = 1. Correlation max(2-|x|,0)/4, spectral density sin^2(xi)/xi^2.
struct Triangle1D {};
//! d = 1. Correlation sin^2(x)/(2 pi x^2), spectral density max(2-|xi|,0)/4.
struct SincSquared1D {};
//! Tensor product of SincSquared1D over d coordinates.
struct ProductTriangle {};

using KernelKind =
    std::variant<BesselCorrelation, BesselSpectral, Matern, RieszType, Triangle1D, SincSquared1D, ProductTriangle>;

struct SpectralModel {
  KernelKind kind;
  int d = 1;
  //! Positive multiplier applied to both f and f-hat.
  double amplitude = 1.0;
};

//! Stable identifiers used in configs and reports ("bessel-corr", "matern", ...).
std::string kind_name(const SpectralModel& m);

//! Throws ParameterError naming the offending field ("model.s", "model.d", ...).
void validate(const SpectralModel& m);

bool is_isotropic(const SpectralModel& m);

//! Power laws of f-hat in |xi|: f-hat ~ |xi|^origin near 0 and ~ |xi|^infinity at infinity
//! (-inf for faster decay). `origin_log` marks a logarithmic factor at the origin.
struct SpectralExponents {
  double origin = 0.0;
  double infinity = 0.0;
  bool origin_log = false;
};
SpectralExponents spectral_exponents(const SpectralModel& m);

//! Bessel potential f_s(r) in dimension d: the function whose Fourier transform is
//! (1+|xi|^2)^{-s/2}. Returns +inf at r = 0 when s <= d.
double bessel_potential(double s, int d, double r);

//! Spectral density at a frequency vector (size d). Returns +inf at a singular origin.
double spectral_density(const SpectralModel& m, std::span<const double> xi);
//! Spectral density at radius |xi| for isotropic models.
double spectral_density_radial(const SpectralModel& m, double radius);

//! Correlation function f(x). Returns +inf at a singular origin.
double correlation(const SpectralModel& m, std::span<const double> x);
double correlation_radial(const SpectralModel& m, double radius);

//! Symbolic finiteness of Upsilon_alpha(beta), decided from the exponents.
bool upsilon_finite(const SpectralModel& m, double alpha, double beta);

//! Open interval (lo, hi) of alpha in [0,1) for which Upsilon_alpha(0) is finite. Empty when lo >= hi.
struct AlphaWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_inclusive = false;
  bool empty() const { return !(hi > lo); }
};
AlphaWindow upsilon_alpha_window(const SpectralModel& m);

//! Upsilon_alpha(beta) = (2 pi)^{-d} int f-hat(xi) / (beta + |xi|^2)^{1-alpha} dxi.
//! Returns +inf when the integral diverges.
double upsilon(const SpectralModel& m, double alpha, double beta);

//! Exact value for BesselCorrelation, BesselSpectral and RieszType.
//! Throws DomainViolation naming the violated inequality, ParameterError for other kinds.
double upsilon_closed_form(const SpectralModel& m, double alpha);

//! Phi(r) = int f-hat(xi) e^{-r |xi|^2} dxi, the spatial integral inside H_alpha.
double heat_weighted_mass(const SpectralModel& m, double r);

//! H_alpha(t) = int_0^t r^{-2 alpha} Phi(r) dr. Returns +inf when divergent.
double h_alpha(const SpectralModel& m, double alpha, double t);

//! One term coefficient * t^exponent * log(1/t)^log_power of a small-t expansion.
struct AsymptoticTerm {
  double exponent = 0.0;
  double coefficient = 0.0;
  int log_power = 0;
};

struct HAlphaAsymptotic {
  //! 'a'..'e' for the BesselCorrelation regimes, 'S' for BesselSpectral.
  char regime = '?';
  std::vector<AsymptoticTerm> terms;
  double evaluate(double t) const;
  //! Only the dominant term (smallest exponent, highest log power).
  double leading(double t) const;
};

//! Small-t expansion of H_alpha for BesselCorrelation / BesselSpectral, alpha in (0, 1/2).
HAlphaAsymptotic h_alpha_asymptotic(const SpectralModel& m, double alpha);

//! Inverse Fourier transform of sqrt(f-hat) for f-hat(xi) = max(2-|xi|,0)/4 (d = 1).
double inv_ft_sqrt_triangle(double x);

//! Bundle of the analytic quantities reported by the kernel-report command.
struct KernelAnalysis {
  double upsilon_alpha_beta = 0.0;
  double upsilon0 = 0.0;
  double h_alpha_at_t = 0.0;
  HAlphaAsymptotic asymptotic;
  bool has_asymptotic = false;
  bool dalang_ok = false;     //!< Upsilon_0(1) finite
  bool upsilon0_finite = false;
  bool h_alpha_finite = false;
  double closed_form = 0.0;   //!< Upsilon_alpha(0) closed form when available, NaN otherwise
};
KernelAnalysis analyze(const SpectralModel& m, double alpha, double beta, double t);

} // namespace shelab
