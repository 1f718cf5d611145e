//! \file solver.hpp
//! Exponential-Euler pseudospectral integrator for the mild equation
//! u(t) = G(t) * u0 + int_0^t G(t-r) * (b(u(r)) W(dr)) on the periodic lattice.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shelab/heatinit.hpp"
#include "shelab/lattice.hpp"
#include "shelab/noise.hpp"

namespace shelab {

enum class DiffusionKind {
  linear,       //!< b(u) = lambda u
  affine,       //!< b(u) = lambda u + c
  bounded_sine  //!< b(u) = c sin(u)
};

struct DiffusionCoefficient {
  DiffusionKind kind = DiffusionKind::linear;
  double lambda = 0.0;
  double c = 0.0;

  double operator()(double u) const {
    switch (kind) {
      case DiffusionKind::linear: return lambda * u;
      case DiffusionKind::affine: return lambda * u + c;
      case DiffusionKind::bounded_sine: return c * std::sin(u);
    }
    return 0.0;
  }
  //! Lipschitz constant L_b.
  double lipschitz() const;
  //! |b(0)|, the L_0 bound.
  double at_zero() const;
  //! True for b identically zero.
  bool is_zero() const;
  static DiffusionCoefficient make_linear(double lambda) { return {DiffusionKind::linear, lambda, 0.0}; }
};

std::string diffusion_name(DiffusionKind k);

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  //! Absolute times; each is snapped to the nearest multiple of dt.
  std::vector<double> record_times;
  //! Zero the top third of the modes of b(u) dW before propagation.
  bool dealias = false;
  //! Keep a copy of every recorded state in the returned trajectory.
  bool store_snapshots = true;
  //! Retain the per-step forcing b(u_m) dW_m (spectral) for the factorization module.
  bool keep_noise = false;
};

//! Per-step forcing F_m = b(u_m) dW_m in Fourier space (unnormalized r2c), step m covering
//! [m dt, (m+1) dt) relative to `t0`.
struct NoiseRecord {
  LatticeGrid grid;
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<std::vector<cplx>> forcing;
};

struct Trajectory {
  std::vector<FieldState> snapshots;
  bool aborted = false;
  std::uint64_t abort_step = 0;
  std::string diagnostics;
  FieldState final_state;
  std::optional<NoiseRecord> noise;
};

//! Called on every recorded state (including t = state.time when requested).
using Observer = std::function<void(const FieldState&)>;

//! Lattice version of mu: densities sampled at lattice points; a Dirac mass m at x0 becomes
//! m / h^d at the nearest cell. A Riesz density uses the ball average at the origin cell.
//! Polynomial growth data are rejected.
FieldState init_state(const InitialDatum& mu, const LatticeGrid& grid, std::uint64_t seed = 0,
                      std::uint64_t replica = 0);

//! Integrates from state.time to cfg.t_end using noise counters state.lineage.next_step, ...
//! Step: u_hat <- exp(-|xi|^2 dt / 2) (u_hat + FFT[b(u) dW]), Ito left point.
Trajectory evolve(const FieldState& state, const SolverConfig& cfg, const NoiseSampler& sampler,
                  const DiffusionCoefficient& b, const Observer& observer = {});

//! Continuation from a state at t0 > 0 with the stream position `first_step` (defaults to
//! the state's lineage). Throws CounterReuse when first_step would replay consumed noise or
//! the sampler belongs to a different seed.
Trajectory restart(const FieldState& state, const SolverConfig& cfg, const NoiseSampler& sampler,
                   const DiffusionCoefficient& b, std::optional<std::uint64_t> first_step = std::nullopt,
                   const Observer& observer = {});

class CounterReuse : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

//! Step index of a time on the dt grid (nearest multiple).
std::int64_t snap_step(double t, double dt);

} // namespace shelab
