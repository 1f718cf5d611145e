#include "shelab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "shelab/errors.hpp"
#include "shelab/heatinit.hpp"
#include "shelab/parallel.hpp"

namespace shelab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::growing: return "growing";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LineFit {
  double slope = 0.0, sigma = 0.0;
};

// Weighted least squares y = c + s x with per-point sigma; the slope error is inflated by
// the reduced chi-square when the scatter exceeds the quoted errors.
LineFit wls(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sig) {
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sig[i] * sig[i]);
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sig[i] * sig[i]);
    sxx += w * (x[i] - mx) * (x[i] - mx);
    sxy += w * (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  double chi2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = (y[i] - my - f.slope * (x[i] - mx)) / sig[i];
    chi2 += e * e;
  }
  const double dof = static_cast<double>(x.size()) - 2.0;
  const double inflate = dof > 0 ? std::max(1.0, chi2 / dof) : 1.0;
  f.sigma = std::sqrt(inflate / sxx);
  return f;
}
} // namespace

GrowthFit boundedness_diagnostic(const std::vector<double>& t, const std::vector<double>& mean,
                                 const std::vector<double>& se) {
  if (t.size() != mean.size() || t.size() != se.size()) throw std::invalid_argument("boundedness_diagnostic: size mismatch");
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > 0.0 && mean[i] > 0.0 && std::isfinite(mean[i])) ok.push_back(i);
  }
  if (ok.size() < 8) throw std::invalid_argument("boundedness_diagnostic: need at least 8 usable time points");
  const double tmin = t[ok.front()], tmax = t[ok.back()];
  if (tmax < 10.0 * tmin * (1 - 1e-12)) throw std::invalid_argument("boundedness_diagnostic: times must span a decade");

  GrowthFit g;
  g.window_lo = 0.5 * (tmin + tmax);
  g.window_hi = tmax;
  std::vector<double> x, lx, y, s;
  for (std::size_t i : ok) {
    if (t[i] < g.window_lo) continue;
    x.push_back(t[i]);
    lx.push_back(std::log(t[i]));
    y.push_back(std::log(mean[i]));
    s.push_back(std::max(se[i] / mean[i], 1e-9));
  }
  if (x.size() < 3) throw std::invalid_argument("boundedness_diagnostic: fewer than 3 points in the top half-window");
  g.window_lo = x.front();

  const LineFit e = wls(x, y, s);
  const LineFit p = wls(lx, y, s);
  g.exp_rate = e.slope;
  g.exp_rate_sigma = e.sigma;
  g.power = p.slope;
  g.power_sigma = p.sigma;
  const double span = g.window_hi - g.window_lo;
  g.growth_factor = std::exp(e.slope * span);
  g.growth_factor_upper = std::exp((e.slope + 3.0 * e.sigma) * span);
  const double power_factor = std::pow(g.window_hi / g.window_lo, p.slope);

  const bool exp_growth = e.slope > 3.0 * e.sigma && g.growth_factor > 1.5;
  const bool pow_growth = p.slope > 3.0 * p.sigma && power_factor > 1.5;
  if (exp_growth || pow_growth) {
    g.verdict = Verdict::growing;
  } else if (g.growth_factor_upper <= 1.5) {
    g.verdict = Verdict::bounded;
  } else {
    g.verdict = Verdict::inconclusive;
  }
  return g;
}

GrowthFit boundedness_diagnostic(const MomentReport& r) {
  return boundedness_diagnostic(r.times, r.mean_norm2, r.stderr_norm2);
}

MomentReport aggregate_moments(const std::vector<double>& times, const std::vector<ReplicaSeries>& series,
                               const std::vector<double>& g_rho_star) {
  MomentReport rep;
  const std::size_t T = times.size();
  rep.times = times;
  rep.replicas_requested = static_cast<int>(series.size());
  rep.probe_mean_sq.assign(2, std::vector<double>(T, kNaN));
  rep.probe_stderr_sq.assign(2, std::vector<double>(T, kNaN));
  for (const auto& s : series) rep.replicas_blown_up += s.blew_up ? 1 : 0;
  rep.partial = rep.replicas_blown_up > 0;

  auto mean_se = [](const std::vector<double>& v, double& m, double& se) {
    const double n = static_cast<double>(v.size());
    m = kNaN;
    se = kNaN;
    if (v.empty()) return;
    double s = 0;
    for (double x : v) s += x;
    m = s / n;
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  };

  double running = 0.0;
  for (std::size_t k = 0; k < T; ++k) {
    std::vector<double> vals, p0, p1;
    for (const auto& s : series) {
      if (k < s.norm2.size() && std::isfinite(s.norm2[k])) {
        vals.push_back(s.norm2[k]);
        p0.push_back(s.probe_sq[k][0]);
        p1.push_back(s.probe_sq[k][1]);
      }
    }
    double m, se;
    mean_se(vals, m, se);
    rep.mean_norm2.push_back(m);
    rep.stderr_norm2.push_back(se);
    rep.n_replicas.push_back(static_cast<int>(vals.size()));
    mean_se(p0, rep.probe_mean_sq[0][k], rep.probe_stderr_sq[0][k]);
    mean_se(p1, rep.probe_mean_sq[1][k], rep.probe_stderr_sq[1][k]);
    const double g = k < g_rho_star.size() ? g_rho_star[k] : kNaN;
    const double ratio = (std::isfinite(g) && g > 0.0) ? m / g : kNaN;
    rep.bound_ratio.push_back(ratio);
    if (std::isfinite(ratio)) running = std::max(running, ratio);
    rep.running_max_ratio.push_back(running);
  }

  if (T >= 2) {
    const double mid = 0.5 * (times.front() + times.back());
    std::size_t k_mid = 0;
    while (k_mid + 1 < T && times[k_mid] < mid) ++k_mid;
    const double a = rep.running_max_ratio[k_mid], b = rep.running_max_ratio.back();
    if (a > 0.0) {
      rep.ratio_change_last_half = (b - a) / a;
      rep.ratio_stabilized = rep.ratio_change_last_half < 0.10;
    }
  }
  return rep;
}

MomentReport estimate_moments(const SolverConfig& cfg_in, const SpectralModel& model, const LatticeGrid& grid,
                              const DiffusionCoefficient& b, const InitialDatum& mu, const Weight& w, int replicas,
                              std::uint64_t seed, const MomentRunOptions& opts) {
  grid.validate();
  if (model.d != grid.d) throw ParameterError("model.d", "must equal grid.d");
  if (w.d != grid.d) throw ParameterError("weight.d", "must equal grid.d");
  if (replicas < 1) throw ParameterError("replicas", "must be >= 1");
  if (cfg_in.record_times.empty()) throw ParameterError("solver.record_times", "must not be empty");

  SolverConfig cfg = cfg_in;
  cfg.store_snapshots = false;
  cfg.keep_noise = false;
  std::set<std::int64_t> steps;
  for (double t : cfg.record_times) steps.insert(snap_step(t, cfg.dt));
  std::vector<double> times;
  for (auto s : steps) times.push_back(s * cfg.dt);
  const std::size_t T = times.size();

  const NoiseSampler sampler = build_sampler(model, grid, seed);
  const std::vector<double> rho = weight_field(grid, w);
  const double cell = grid.cell_volume();
  std::array<int, 3> jo{grid.n / 2, grid.n / 2, grid.n / 2};
  std::array<int, 3> jp = jo;
  jp[0] = grid.n / 2 + grid.n / 4;
  const std::size_t probe0 = grid.flatten(jo), probe1 = grid.flatten(jp);

  std::vector<ReplicaSeries> series(static_cast<std::size_t>(replicas));
  parallel_for(series.size(), opts.threads, [&](std::size_t r) {
    ReplicaSeries& rs = series[r];
    rs.norm2.assign(T, kNaN);
    rs.probe_sq.assign(T, {kNaN, kNaN});
    std::size_t k = 0;
    const FieldState s0 = init_state(mu, grid, seed, r);
    const Trajectory tr = evolve(s0, cfg, sampler, b, [&](const FieldState& st) {
      while (k < T && times[k] < st.time - 0.5 * cfg.dt) ++k;
      if (k >= T) return;
      rs.norm2[k] = weighted_norm_sq(st.values, rho, cell);
      rs.probe_sq[k] = {st.values[probe0] * st.values[probe0], st.values[probe1] * st.values[probe1]};
      if (opts.on_record) opts.on_record(r, st);
      ++k;
    });
    rs.blew_up = tr.aborted;
  });

  std::vector<double> gstar(T, kNaN);
  const InitialDatum star = mu_star(mu);
  for (std::size_t k = 0; k < T; ++k) {
    if (times[k] > 0.0) gstar[k] = g_rho(times[k], star, w).value;
  }

  MomentReport rep = aggregate_moments(times, series, gstar);
  rep.conditions = check_conditions(model, {b.lipschitz(), b.at_zero()}, false);
  return rep;
}

} // namespace shelab
