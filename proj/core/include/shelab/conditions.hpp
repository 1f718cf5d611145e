//! \file conditions.hpp
//! Existence and moment-boundedness gates, and the (alpha, q) pair used for tightness.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shelab/kernels.hpp"

namespace shelab {

//! Lipschitz structure of the diffusion coefficient: |b(u)-b(v)| <= L_b |u-v|, |b(0)| <= L_0.
struct LipschitzSpec {
  double L_b = 0.0;
  double L_0 = 0.0;
  double varsigma_bar() const;
  double gamma_p(double p) const { return 32.0 * p * L_b * L_b; }
};

struct AlphaQChoice {
  double alpha = 0.0;
  double q = 0.0;
};

struct ConditionReport {
  bool dalang_ok = false;        //!< Upsilon_0(1) < inf
  double dalang_value = 0.0;     //!< Upsilon_0(1)
  double upsilon0 = 0.0;         //!< Upsilon(0), +inf when divergent
  bool dalang00_ok = false;      //!< Upsilon(0) < inf
  bool lip_ok = false;           //!< 128 L_b^2 Upsilon(0) < 1
  double interval_lo = 0.0;      //!< 128 L_b^2 Upsilon(0)
  double interval_hi = 1.0;
  double alpha_max = 0.0;        //!< sup{alpha < 1/2 : Upsilon_{2 alpha}(0) < inf}, 0 if none
  std::optional<AlphaQChoice> choice;
  std::string binding_constraint; //!< why `choice` is empty
  double upsilon_2alpha = 0.0;   //!< Upsilon_{2 alpha*}(0) when a choice exists
  bool hua_evaluated = false;
  bool hua_ok = false;
  //! Secondary check: some alpha in (128 Upsilon(0) L_b^2, 1) has Upsilon_alpha(0) < inf.
  bool statement_window_ok = false;
};

ConditionReport check_conditions(const SpectralModel& m, const LipschitzSpec& lip, bool run_hua = true);

struct LipschitzBound {
  double value = 0.0;          //!< (128 Upsilon(0))^{-1/2}, 0 when Upsilon(0) = inf
  bool upsilon0_finite = false;
};
LipschitzBound max_lipschitz(const SpectralModel& m);

//! sup{alpha < 1/2 : Upsilon_{2 alpha}(0) < inf}; 0 when the set is empty.
double alpha_max(const SpectralModel& m);

struct AlphaQResult {
  std::optional<AlphaQChoice> choice;
  std::string binding_constraint;
};
//! Midpoint alpha in (64 L_b^2 Upsilon(0), alpha_max) and q the geometric mean of
//! (1/alpha, 1/(64 L_b^2 Upsilon(0))). With L_b = 0 the upper end is infinite and q = 2/alpha.
AlphaQResult select_alpha_q(const SpectralModel& m, const LipschitzSpec& lip);
AlphaQResult select_alpha_q(double upsilon0, double alpha_max, const LipschitzSpec& lip);

struct HuaRow {
  double t = 0.0;
  double h_alpha = 0.0;
  double lhs = 0.0;         //!< (2 pi)^{-d} H_alpha(t)
  double rhs = 0.0;         //!< Gamma(1-2 alpha) Upsilon_{2 alpha}(0)
  double part3_rhs = 0.0;   //!< H/((2 pi)^d Gamma(1-2 alpha)) + Upsilon(0)/(Gamma(1-2 alpha) t^{2 alpha})
  bool part1_ok = false;
  bool part3_ok = false;
};

struct HuaReport {
  bool ok = false;
  double alpha = 0.0;
  double upsilon_2alpha = 0.0;
  double upsilon0 = 0.0;
  double limit = 0.0;       //!< (2 pi)^d Gamma(1-2 alpha) Upsilon_{2 alpha}(0), the t -> inf value of H
  std::vector<HuaRow> rows;
  std::string worst;        //!< description of the worst offender, empty when ok
};

//! Checks the H/Upsilon sandwich with 1e-6 relative slack on every t of the grid.
HuaReport hua_check(const SpectralModel& m, double alpha, const std::vector<double>& t_grid);

} // namespace shelab
