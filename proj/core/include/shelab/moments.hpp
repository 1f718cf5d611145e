//! \file moments.hpp
//! Monte Carlo second moments in L^2_rho and the time-boundedness diagnostic.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shelab/conditions.hpp"
#include "shelab/solver.hpp"
#include "shelab/weights.hpp"

namespace shelab {

enum class Verdict { bounded, growing, inconclusive };
std::string to_string(Verdict v);

struct GrowthFit {
  Verdict verdict = Verdict::inconclusive;
  double exp_rate = 0.0;        //!< r in log m = c + r t
  double exp_rate_sigma = 0.0;
  double power = 0.0;           //!< p in log m = c + p log t
  double power_sigma = 0.0;
  double window_lo = 0.0;       //!< fitted sub-window [window_lo, window_hi]
  double window_hi = 0.0;
  double growth_factor = 1.0;   //!< exp(r (window_hi - window_lo))
  double growth_factor_upper = 1.0; //!< same with r + 3 sigma_r
};

struct MomentReport {
  std::vector<double> times;
  std::vector<double> mean_norm2;   //!< E ||u(t)||^2_rho
  std::vector<double> stderr_norm2;
  std::vector<double> bound_ratio;  //!< mean_norm2 / G_rho(t; mu*)
  std::vector<double> running_max_ratio;
  //! Probe points: the origin and (L/4, 0, ..., 0).
  std::vector<std::vector<double>> probe_mean_sq;   //!< [probe][time]
  std::vector<std::vector<double>> probe_stderr_sq;
  std::vector<int> n_replicas;      //!< replicas contributing at each time
  int replicas_requested = 0;
  int replicas_blown_up = 0;
  bool partial = false;
  ConditionReport conditions;
  //! Running max of bound_ratio changes < 10% over the last half-window.
  bool ratio_stabilized = false;
  double ratio_change_last_half = 0.0;
};

//! Per-replica series of ||u(t)||^2_rho and probe squares at the recorded times.
struct ReplicaSeries {
  std::vector<double> norm2;
  std::vector<std::array<double, 2>> probe_sq;
  bool blew_up = false;
};

struct MomentRunOptions {
  unsigned threads = 0;
  //! Extra per-state hook (replica index, state), e.g. for occupation statistics.
  std::function<void(std::size_t, const FieldState&)> on_record;
};

//! Runs `replicas` trajectories (replica index r uses stream (seed, r)) and aggregates.
MomentReport estimate_moments(const SolverConfig& cfg, const SpectralModel& model, const LatticeGrid& grid,
                              const DiffusionCoefficient& b, const InitialDatum& mu, const Weight& w, int replicas,
                              std::uint64_t seed, const MomentRunOptions& opts = {});

//! Aggregation step, usable on externally produced series.
MomentReport aggregate_moments(const std::vector<double>& times, const std::vector<ReplicaSeries>& series,
                               const std::vector<double>& g_rho_star);

//! Weighted least squares of log E||u||^2 against t and against log t on the top half of the
//! time window. growing: a significant (3 sigma) positive exponential or power fit whose growth
//! across the half-window exceeds 1.5x. bounded: the 3-sigma upper exponential rate keeps the
//! growth below 1.5x. Otherwise inconclusive. Needs >= 8 times spanning one decade.
GrowthFit boundedness_diagnostic(const MomentReport& r);
GrowthFit boundedness_diagnostic(const std::vector<double>& t, const std::vector<double>& mean,
                                 const std::vector<double>& se);

} // namespace shelab
