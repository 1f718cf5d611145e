//! \file heatinit.hpp
//! Heat kernel, homogeneous solutions J0 for rough initial data, and the functional
//! G_rho(t; mu) = int J0(t,x;mu)^2 rho(x) dx.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "shelab/weights.hpp"

namespace shelab {

enum class DatumKind {
  dirac,         //!< mass * delta_{location}
  constant,      //!< c dx
  riesz,         //!< |x|^{-alpha} dx, alpha in (0, d)
  poly_growth,   //!< |x|^{alpha} dx, alpha > 0
  combo          //!< sum of coefficient * component
};

struct InitialDatum {
  DatumKind kind = DatumKind::constant;
  double mass = 1.0;              //!< dirac
  std::vector<double> location;   //!< dirac; empty means the origin
  double c = 1.0;                 //!< constant
  double alpha = 0.0;             //!< riesz, poly_growth
  struct Term;
  std::vector<Term> terms;        //!< combo

  static InitialDatum dirac_delta(double mass = 1.0, std::vector<double> location = {});
  static InitialDatum constant_density(double c);
  static InitialDatum riesz_singular(double alpha);
  static InitialDatum poly_growth_density(double alpha);
  static InitialDatum signed_combo(std::vector<Term> terms);
};

struct InitialDatum::Term {
  double coefficient = 1.0;
  InitialDatum datum;
};

std::string datum_name(DatumKind k);
//! Throws ParameterError("init.*") when the datum is invalid in dimension d.
void validate(const InitialDatum& mu, int d);
//! True when mu is rotation invariant about the origin.
bool is_centered(const InitialDatum& mu);
//! Total-variation surrogate: coefficients replaced by their absolute values and each
//! component by its own |.|. Equals |mu| when the components have disjoint supports.
InitialDatum abs_datum(const InitialDatum& mu);
//! mu* = 1 + |mu|.
InitialDatum mu_star(const InitialDatum& mu);

//! G(t, x) = (2 pi t)^{-d/2} exp(-|x|^2 / 2t). Throws std::domain_error for t <= 0.
double heat_kernel(double t, std::span<const double> x);
double heat_kernel_r2(double t, double r2, int d);

struct J0Value {
  double value = 0.0;
  bool closed_form = true;
  bool ok = true;
};
//! Solution of the homogeneous heat equation started from mu, at (t, x) with x of size d.
//! Riesz and polynomial-growth data use the Kummer-function closed forms.
J0Value j0_eval(double t, std::span<const double> x, const InitialDatum& mu);
//! Same by direct quadrature of the Gaussian expectation (reference path).
J0Value j0_quadrature(double t, std::span<const double> x, const InitialDatum& mu);
//! Radial convenience for centered data: x = (r, 0, ..., 0).
double j0_radial(double t, double r, const InitialDatum& mu, int d);

//! Constant in J0(t, 0) = C_* t^{-alpha/2} for |x|^{-alpha}.
double riesz_constant(double alpha, int d);

struct GRhoValue {
  double value = 0.0;
  bool ok = true;
  bool closed_form = false;
};
//! G_rho(t; mu). A single Dirac mass uses G_rho(t; delta_x0) = m^2 G(2t,0) (G(t/2,.)*rho)(x0).
GRhoValue g_rho(double t, const InitialDatum& mu, const Weight& w);

enum class ProfileClass { vanishes, bounded_at_infinity, grows_like_power, unknown };
std::string to_string(ProfileClass c);

struct GRhoProfile {
  std::vector<double> t;
  std::vector<double> value;
  double sup_estimate = 0.0;   //!< max sample, +inf when growing
  ProfileClass classification = ProfileClass::unknown;
  double fitted_slope = 0.0;   //!< log-log slope over the top decade
  double slope_stderr = 0.0;
  //! limsup_t G_rho(t; mu) < inf, read off the classification.
  bool init_gate_ok = false;
};

//! Samples g_rho on t_grid (at least four decades) and classifies the tail: slope < -0.1
//! vanishes, |slope| <= 0.1 bounded, slope > 0.1 grows like t^slope.
GRhoProfile g_rho_profile(const InitialDatum& mu, const Weight& w, const std::vector<double>& t_grid);
//! Log-log least-squares slope of (t, v) restricted to t in [t_lo, t_hi].
double loglog_slope(const std::vector<double>& t, const std::vector<double>& v, double t_lo, double t_hi,
                    double* stderr_out = nullptr);

//! Geometric grid of `count` points from a to b.
std::vector<double> geometric_grid(double a, double b, int count);

} // namespace shelab
