#include "shelab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "shelab/errors.hpp"

namespace shelab {

double DiffusionCoefficient::lipschitz() const {
  switch (kind) {
    case DiffusionKind::linear:
    case DiffusionKind::affine: return std::abs(lambda);
    case DiffusionKind::bounded_sine: return std::abs(c);
  }
  return 0.0;
}

double DiffusionCoefficient::at_zero() const { return kind == DiffusionKind::affine ? std::abs(c) : 0.0; }

bool DiffusionCoefficient::is_zero() const {
  switch (kind) {
    case DiffusionKind::linear: return lambda == 0.0;
    case DiffusionKind::affine: return lambda == 0.0 && c == 0.0;
    case DiffusionKind::bounded_sine: return c == 0.0;
  }
  return false;
}

std::string diffusion_name(DiffusionKind k) {
  switch (k) {
    case DiffusionKind::linear: return "linear";
    case DiffusionKind::affine: return "affine";
    case DiffusionKind::bounded_sine: return "bounded-sine";
  }
  return "?";
}

std::int64_t snap_step(double t, double dt) { return static_cast<std::int64_t>(std::llround(t / dt)); }

FieldState init_state(const InitialDatum& mu, const LatticeGrid& grid, std::uint64_t seed, std::uint64_t replica) {
  grid.validate();
  validate(mu, grid.d);
  FieldState st;
  st.grid = grid;
  st.values.assign(grid.size(), 0.0);
  st.lineage = {seed, replica, 0};
  const double h = grid.h();
  const double cell = grid.cell_volume();

  auto add = [&](auto&& self, const InitialDatum& m, double coef) -> void {
    switch (m.kind) {
      case DatumKind::dirac: {
        std::array<int, 3> j{0, 0, 0};
        for (int a = 0; a < grid.d; ++a) {
          const double x = m.location.empty() ? 0.0 : m.location[a];
          const long idx = std::lround(x / h) + grid.n / 2;
          j[a] = static_cast<int>(((idx % grid.n) + grid.n) % grid.n);
        }
        st.values[grid.flatten(j)] += coef * m.mass / cell;
        break;
      }
      case DatumKind::constant:
        for (auto& v : st.values) v += coef * m.c;
        break;
      case DatumKind::riesz: {
        // origin cell: average of |x|^{-alpha} over the ball of volume h^d
        const double vd = std::pow(M_PI, 0.5 * grid.d) / std::tgamma(0.5 * grid.d + 1.0);
        const double R = std::pow(cell / vd, 1.0 / grid.d);
        const double origin = grid.d / (grid.d - m.alpha) * std::pow(R, -m.alpha);
        for (std::size_t i = 0; i < st.values.size(); ++i) {
          const double r2 = grid.radius2(i);
          st.values[i] += coef * (r2 > 0.0 ? std::pow(r2, -0.5 * m.alpha) : origin);
        }
        break;
      }
      case DatumKind::poly_growth:
        throw ParameterError("init.kind", "poly-growth data are not integrable on the torus and cannot be simulated");
      case DatumKind::combo:
        for (const auto& t : m.terms) self(self, t.datum, coef * t.coefficient);
        break;
    }
  };
  add(add, mu, 1.0);
  return st;
}

namespace {

Trajectory run(const FieldState& state, const SolverConfig& cfg, const NoiseSampler& sampler,
               const DiffusionCoefficient& b, std::uint64_t first_step, const Observer& observer) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ParameterError("solver.dt", "must be finite and > 0");
  if (!(cfg.t_end >= state.time)) throw ParameterError("solver.t_end", "must not precede the state time");
  if (!(sampler.grid == state.grid)) throw ParameterError("grid", "sampler grid differs from the state grid");
  if (state.values.size() != state.grid.size()) throw ParameterError("state", "value count does not match grid");

  const LatticeGrid& g = state.grid;
  const double dt = cfg.dt;
  const std::int64_t s0 = snap_step(state.time, dt);
  const std::int64_t s1 = snap_step(cfg.t_end, dt);
  std::set<std::int64_t> rec;
  for (double t : cfg.record_times) {
    const std::int64_t k = snap_step(t, dt);
    if (k < s0 || k > s1) {
      std::ostringstream os;
      os << "record time " << t << " lies outside [" << state.time << ", " << cfg.t_end << "]";
      throw ParameterError("solver.record_times", os.str());
    }
    rec.insert(k);
  }

  const SpectralPlan& plan = *sampler.plan;
  const std::size_t N = plan.real_size();
  const std::size_t NC = plan.complex_size();
  std::vector<double> prop(NC);
  const double inv_n = 1.0 / static_cast<double>(N);
  for (std::size_t c = 0; c < NC; ++c) prop[c] = std::exp(-0.5 * plan.xi2()[c] * dt) * inv_n;

  std::vector<unsigned char> dealias_mask;
  if (cfg.dealias) {
    dealias_mask.assign(NC, 1);
    const int cut = g.n / 3;
    for (std::size_t c = 0; c < NC; ++c) {
      const auto k = plan.half_index(c);
      for (int a = 0; a < g.d; ++a) {
        const int kk = k[a] <= g.n / 2 ? k[a] : g.n - k[a];
        if (kk > cut) dealias_mask[c] = 0;
      }
    }
  }

  Trajectory traj;
  if (cfg.keep_noise) traj.noise = NoiseRecord{g, dt, s0 * dt, {}};

  FieldState cur = state;
  cur.lineage.next_step = first_step;
  auto emit = [&](std::int64_t step) {
    cur.time = step * dt;
    if (observer) observer(cur);
    if (cfg.store_snapshots) traj.snapshots.push_back(cur);
  };
  if (rec.count(s0)) emit(s0);

  std::vector<double> dW, work(N), prev;
  std::vector<cplx> uhat(NC), fhat, scratch;
  const bool noisy = !b.is_zero();

  for (std::int64_t step = s0; step < s1; ++step) {
    const std::uint64_t ctr = first_step + static_cast<std::uint64_t>(step - s0);
    if (noisy) {
      sample_increment(sampler, dt, cur.lineage.replica, ctr, dW, scratch);
      for (std::size_t i = 0; i < N; ++i) work[i] = b(cur.values[i]) * dW[i];
      if (cfg.dealias || cfg.keep_noise) {
        fhat.resize(NC);
        plan.forward(work.data(), fhat.data());
        if (cfg.dealias) {
          for (std::size_t c = 0; c < NC; ++c) {
            if (!dealias_mask[c]) fhat[c] = 0.0;
          }
        }
        if (cfg.keep_noise) traj.noise->forcing.push_back(fhat);
        plan.forward(cur.values.data(), uhat.data());
        for (std::size_t c = 0; c < NC; ++c) uhat[c] += fhat[c];
      } else {
        for (std::size_t i = 0; i < N; ++i) work[i] += cur.values[i];
        plan.forward(work.data(), uhat.data());
      }
    } else {
      if (cfg.keep_noise) traj.noise->forcing.emplace_back(NC, cplx(0.0, 0.0));
      plan.forward(cur.values.data(), uhat.data());
    }
    for (std::size_t c = 0; c < NC; ++c) uhat[c] *= prop[c];
    prev = cur.values;
    plan.inverse(uhat.data(), cur.values.data());
    cur.lineage.next_step = ctr + 1;

    if (!cur.all_finite()) {
      traj.aborted = true;
      traj.abort_step = static_cast<std::uint64_t>(step);
      std::ostringstream os;
      os << "non-finite field after step " << step << " (t = " << (step + 1) * dt << "); last finite state at t = "
         << step * dt;
      traj.diagnostics = os.str();
      cur.values = std::move(prev);
      cur.lineage.next_step = ctr;
      cur.time = step * dt;
      if (cfg.store_snapshots) traj.snapshots.push_back(cur);
      traj.final_state = cur;
      return traj;
    }
    if (rec.count(step + 1)) emit(step + 1);
  }
  cur.time = s1 * dt;
  traj.final_state = std::move(cur);
  return traj;
}

} // namespace

Trajectory evolve(const FieldState& state, const SolverConfig& cfg, const NoiseSampler& sampler,
                  const DiffusionCoefficient& b, const Observer& observer) {
  return run(state, cfg, sampler, b, state.lineage.next_step, observer);
}

Trajectory restart(const FieldState& state, const SolverConfig& cfg, const NoiseSampler& sampler,
                   const DiffusionCoefficient& b, std::optional<std::uint64_t> first_step, const Observer& observer) {
  if (!(state.time >= 0.0)) throw ParameterError("state.time", "must be >= 0");
  if (state.lineage.next_step > 0 && sampler.seed != state.lineage.seed) {
    throw CounterReuse("restart: sampler seed differs from the state's noise lineage");
  }
  const std::uint64_t start = first_step.value_or(state.lineage.next_step);
  if (start < state.lineage.next_step) {
    std::ostringstream os;
    os << "restart: step counter " << start << " overlaps noise already consumed up to "
       << state.lineage.next_step;
    throw CounterReuse(os.str());
  }
  return run(state, cfg, sampler, b, start, observer);
}

} // namespace shelab
