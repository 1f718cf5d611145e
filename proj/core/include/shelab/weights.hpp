//! \file weights.hpp
//! Weight functions rho for the state space L^2_rho, their admissibility and weighted norms.
#pragma once

#include <string>
#include <vector>

#include "shelab/lattice.hpp"

namespace shelab {

enum class WeightKind {
  exp_decay,     //!< exp(-a |x|)
  poly_decay,    //!< 1 / (1 + |x|^a)
  stretched_exp  //!< exp(-|x|^b)
};

struct Weight {
  WeightKind kind = WeightKind::exp_decay;
  double param = 1.0;  //!< a for exp_decay / poly_decay, b for stretched_exp
  int d = 1;
};

std::string weight_name(WeightKind k);
//! Throws ParameterError("weight.param" / "weight.d").
void validate(const Weight& w);

//! rho at radius |x| = r.
double weight_value(const Weight& w, double r);
double log_weight(const Weight& w, double r);
//! int rho dx; +inf when rho is not integrable.
double weight_l1(const Weight& w);
//! int_{|x| >= R} rho dx.
double weight_tail_mass(const Weight& w, double R);

//! rho sampled on every lattice point.
std::vector<double> weight_field(const LatticeGrid& g, const Weight& w);

struct WeightedNorm {
  double value = 0.0;             //!< sum u^2 rho h^d = ||u||^2_rho
  double truncation_error = 0.0;  //!< max boundary u^2 times the mass of rho outside the box
  bool truncation_warning = false; //!< truncation_error > 1% of value
};
//! Squared weighted norm of a lattice field by Riemann sum.
WeightedNorm weighted_norm(const FieldState& field, const Weight& w);
//! Same, with a precomputed weight_field (no truncation estimate).
double weighted_norm_sq(const std::vector<double>& u, const std::vector<double>& rho, double cell_volume);

enum class Admissibility { admissible, not_admissible, unknown };
std::string to_string(Admissibility a);

//! Analytic classification: exp_decay always, poly_decay iff a > d, stretched_exp iff b <= 1.
Admissibility classify_admissible(const Weight& w);

//! log of (G(t,.) * rho)(x) / rho(x) at |x| = r, by quadrature of the Gaussian expectation
//! E rho(x + sqrt(t) Z) / rho(x).
double log_heat_smoothed_ratio(const Weight& w, double t, double r);
//! (G(t,.) * rho)(x) at |x| = r.
double heat_smoothed_weight(const Weight& w, double t, double r);

struct AdmissibilityCertificate {
  Admissibility analytic_verdict = Admissibility::unknown;
  //! Scan evidence: admissible when the sup ratio is stable under radius doubling,
  //! not_admissible when it grows by more than 2x across two doublings, unknown otherwise.
  Admissibility scan_verdict = Admissibility::unknown;
  double numeric_sup_ratio = 0.0;       //!< sup ratio at the requested radius (may be +inf)
  std::vector<double> log_sup_by_radius; //!< log sup ratio at radius, 2 radius, 4 radius
  double refined_change = 0.0;          //!< relative change of the sup when resolution doubles
  double T = 0.0;
  double radius = 0.0;
  int resolution = 0;
  bool quadrature_ok = true;
};

//! Samples t in {T/10, 2T/10, ..., T} and |x| on `resolution` points in [0, radius]
//! (also at 2 and 4 times the radius) along a coordinate axis.
AdmissibilityCertificate admissibility_scan(const Weight& w, double T, double radius, int resolution);

enum class PairIntegrability { integrable, not_integrable, unsupported };
std::string to_string(PairIntegrability p);
//! Decides int rho / rho_tilde dx < inf from the decay rates.
PairIntegrability ratio_integrable(const Weight& rho, const Weight& rho_tilde);

} // namespace shelab
