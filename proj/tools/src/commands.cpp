#include "shelab_cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>

#include "shelab/conditions.hpp"
#include "shelab/errors.hpp"
#include "shelab/factorization.hpp"
#include "shelab/invariant.hpp"
#include "shelab/moments.hpp"
#include "shelab/noise.hpp"

#ifndef SHELAB_VERSION
#define SHELAB_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace shelab::cli {

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

json json_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// ---------------------------------------------------------------------------------------
// Output directory

// The directory is created on the first write, so a rejected config leaves nothing behind.
OutputDir::OutputDir(fs::path root) : root_(fs::absolute(std::move(root)).lexically_normal()) {}

fs::path OutputDir::resolve(const std::string& name) {
  const fs::path rel(name);
  if (rel.empty() || rel.is_absolute()) throw std::logic_error("output name must be relative: " + name);
  for (const auto& part : rel) {
    if (part == "..") throw std::logic_error("output name escapes the output directory: " + name);
  }
  const fs::path full = root_ / rel;
  std::error_code ec;
  fs::create_directories(full.parent_path(), ec);
  if (ec) throw std::runtime_error("cannot create directory '" + full.parent_path().string() + "': " + ec.message());
  files_.push_back(rel.generic_string());
  return full;
}

void OutputDir::write_text(const std::string& name, const std::string& content) {
  const fs::path p = resolve(name);
  std::ofstream out(p, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("failed writing " + p.string());
}

void OutputDir::write_json(const std::string& name, const json& j) { write_text(name, j.dump(2) + "\n"); }

void OutputDir::write_field(const std::string& name, const FieldState& f) { shelab::write_field(resolve(name).string(), f); }

// ---------------------------------------------------------------------------------------
// Builders

namespace {

int int_in(const RunConfig& cfg, const std::string& key, long long lo, long long hi) {
  const long long v = cfg.integer(key);
  if (v < lo || v > hi) {
    throw ConfigError(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

} // namespace

SpectralModel model_from(const RunConfig& cfg) {
  SpectralModel m;
  m.d = int_in(cfg, "model.d", 1, 3);
  m.amplitude = cfg.num("model.amplitude");
  const std::string& k = cfg.str("model.kind");
  if (k == "bessel-corr") {
    m.kind = BesselCorrelation{cfg.num("model.s")};
  } else if (k == "bessel-spec") {
    m.kind = BesselSpectral{cfg.num("model.s")};
  } else if (k == "matern") {
    m.kind = Matern{cfg.num("model.phi"), cfg.num("model.scale"), cfg.num("model.nu")};
  } else if (k == "riesz-type") {
    m.kind = RieszType{cfg.num("model.s1"), cfg.num("model.s2")};
  } else if (k == "triangle-1d") {
    m.kind = Triangle1D{};
  } else if (k == "sinc2-1d") {
    m.kind = SincSquared1D{};
  } else if (k == "product-triangle") {
    m.kind = ProductTriangle{};
  } else {
    throw ConfigError("model.kind", "unknown kernel '" + k + "'");
  }
  try {
    validate(m);
  } catch (const ParameterError& e) {
    throw ConfigError(e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  return m;
}

Weight weight_from(const RunConfig& cfg, int d, const std::string& prefix) {
  Weight w;
  w.d = d;
  w.param = cfg.num(prefix + ".param");
  const std::string& k = cfg.str(prefix + ".kind");
  if (k == "exp-decay") {
    w.kind = WeightKind::exp_decay;
  } else if (k == "poly-decay") {
    w.kind = WeightKind::poly_decay;
  } else if (k == "stretched-exp") {
    w.kind = WeightKind::stretched_exp;
  } else {
    throw ConfigError(prefix + ".kind", "unknown weight '" + k + "'");
  }
  try {
    validate(w);
  } catch (const ParameterError& e) {
    throw ConfigError(prefix + ".param", std::string(e.what()).substr(e.field().size() + 2));
  }
  return w;
}

InitialDatum init_from(const RunConfig& cfg, int d) {
  const std::string& k = cfg.str("init.kind");
  InitialDatum mu;
  if (k == "dirac") {
    mu = InitialDatum::dirac_delta(cfg.num("init.mass"));
  } else if (k == "constant") {
    mu = InitialDatum::constant_density(cfg.num("init.c"));
  } else if (k == "riesz") {
    mu = InitialDatum::riesz_singular(cfg.num("init.alpha"));
  } else if (k == "poly-growth") {
    mu = InitialDatum::poly_growth_density(cfg.num("init.alpha"));
  } else {
    throw ConfigError("init.kind", "unknown initial datum '" + k + "'");
  }
  try {
    validate(mu, d);
  } catch (const ParameterError& e) {
    throw ConfigError(e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  return mu;
}

LatticeGrid grid_from(const RunConfig& cfg) {
  LatticeGrid g;
  g.d = int_in(cfg, "model.d", 1, 3);
  g.n = int_in(cfg, "grid.n", 2, 1 << 24);
  g.L = cfg.num("grid.L");
  try {
    g.validate();
  } catch (const ParameterError& e) {
    const std::string key = e.field() == "grid.d" ? "model.d" : e.field();
    throw ConfigError(key, std::string(e.what()).substr(e.field().size() + 2));
  }
  return g;
}

SolverConfig solver_from(const RunConfig& cfg) {
  SolverConfig s;
  s.dt = cfg.num("solver.dt");
  s.t_end = cfg.num("solver.t_end");
  s.dealias = cfg.flag("solver.dealias");
  if (!(s.dt > 0.0)) throw ConfigError("solver.dt", "must be > 0");
  if (!(s.t_end >= s.dt)) throw ConfigError("solver.t_end", "must be >= solver.dt");
  if (s.t_end / s.dt > 1e8) throw ConfigError("solver.t_end", "more than 1e8 steps");
  const double every = cfg.num("solver.record_every");
  if (!(every >= s.dt * (1 - 1e-9))) throw ConfigError("solver.record_every", "must be >= solver.dt");
  if (s.t_end / every > 1e6) throw ConfigError("solver.record_every", "more than 1e6 records");
  double start = cfg.num("solver.record_start");
  if (start < 0.0) throw ConfigError("solver.record_start", "must be >= 0");
  if (start == 0.0) start = every;
  if (start > s.t_end + 0.5 * s.dt) throw ConfigError("solver.record_start", "lies after solver.t_end");
  // Integer stepping on the dt grid keeps the spacing exactly uniform.
  const std::int64_t k0 = snap_step(start, s.dt), dk = std::max<std::int64_t>(1, snap_step(every, s.dt));
  const std::int64_t k1 = snap_step(s.t_end, s.dt);
  for (std::int64_t k = k0; k <= k1; k += dk) s.record_times.push_back(static_cast<double>(k) * s.dt);
  return s;
}

DiffusionCoefficient diffusion_from(const RunConfig& cfg, const SpectralModel& m) {
  DiffusionCoefficient b;
  const std::string& k = cfg.str("diffusion.kind");
  if (k == "linear") {
    b.kind = DiffusionKind::linear;
  } else if (k == "affine") {
    b.kind = DiffusionKind::affine;
  } else if (k == "bounded-sine") {
    b.kind = DiffusionKind::bounded_sine;
  } else {
    throw ConfigError("diffusion.kind", "unknown diffusion '" + k + "'");
  }
  b.lambda = cfg.num("diffusion.lambda");
  b.c = cfg.num("diffusion.c");
  const double factor = cfg.num("diffusion.lambda_factor");
  if (factor < 0.0) throw ConfigError("diffusion.lambda_factor", "must be >= 0");
  if (factor > 0.0) {
    if (b.kind == DiffusionKind::bounded_sine) {
      throw ConfigError("diffusion.lambda_factor", "not meaningful for bounded-sine (use diffusion.c)");
    }
    const LipschitzBound lb = max_lipschitz(m);
    if (!lb.upsilon0_finite) {
      throw ConfigError("diffusion.lambda_factor", "max_lipschitz is 0 for this model (Upsilon(0) = inf)");
    }
    b.lambda = factor * lb.value;
  }
  return b;
}

// ---------------------------------------------------------------------------------------
// Commands

namespace {

struct Context {
  const RunConfig& cfg;
  OutputDir& out;
  std::ostream& log;
  json& manifest;
  void warn(const std::string& w) {
    manifest["warnings"].push_back(w);
    log << "warning: " << w << "\n";
  }
};

json conditions_json(const ConditionReport& r) {
  json j;
  j["dalang_ok"] = r.dalang_ok;
  j["dalang_value"] = json_number(r.dalang_value);
  j["upsilon0"] = json_number(r.upsilon0);
  j["dalang00_ok"] = r.dalang00_ok;
  j["lip_ok"] = r.lip_ok;
  j["interval_lo"] = json_number(r.interval_lo);
  j["interval_hi"] = json_number(r.interval_hi);
  j["alpha_max"] = json_number(r.alpha_max);
  j["alpha"] = r.choice ? json_number(r.choice->alpha) : json(nullptr);
  j["q"] = r.choice ? json_number(r.choice->q) : json(nullptr);
  j["binding_constraint"] = r.binding_constraint;
  j["upsilon_2alpha"] = r.choice ? json_number(r.upsilon_2alpha) : json(nullptr);
  j["hua_evaluated"] = r.hua_evaluated;
  j["hua_ok"] = r.hua_ok;
  j["statement_window_ok"] = r.statement_window_ok;
  return j;
}

void gate_warnings(Context& ctx, const ConditionReport& r, const DiffusionCoefficient& b) {
  if (!r.dalang_ok) ctx.warn("Dalang's condition fails for this model; the lattice run has no continuum limit");
  if (!r.lip_ok) {
    std::ostringstream os;
    os << "moment-boundedness gate fails: 128 L_b^2 Upsilon(0) = " << r.interval_lo
       << " is not < 1 (L_b = " << b.lipschitz() << "); the run proceeds";
    ctx.warn(os.str());
  }
}

void cmd_kernel_report(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const SpectralModel m = model_from(cfg);
  const double alpha = cfg.num("alpha"), beta = cfg.num("beta"), t = cfg.num("t");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha", "must lie in [0, 1)");
  if (!(beta >= 0.0)) throw ConfigError("beta", "must be >= 0");
  if (!(t > 0.0)) throw ConfigError("t", "must be > 0");
  const KernelAnalysis a = analyze(m, alpha, beta, t);
  const AlphaWindow win = upsilon_alpha_window(m);

  json j;
  j["kind"] = kind_name(m);
  j["d"] = m.d;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["t"] = t;
  j["upsilon_alpha_beta"] = json_number(a.upsilon_alpha_beta);
  j["upsilon0"] = json_number(a.upsilon0);
  j["upsilon0_finite"] = a.upsilon0_finite;
  j["dalang_ok"] = a.dalang_ok;
  j["closed_form"] = json_number(a.closed_form);
  j["h_alpha_at_t"] = json_number(a.h_alpha_at_t);
  j["h_alpha_finite"] = a.h_alpha_finite;
  j["alpha_window_lo"] = win.lo;
  j["alpha_window_hi"] = win.hi;
  j["has_asymptotic"] = a.has_asymptotic;
  if (a.has_asymptotic) j["asymptotic_regime"] = std::string(1, a.asymptotic.regime);
  ctx.out.write_json("kernel_report.json", j);

  if (a.has_asymptotic) {
    std::ostringstream terms;
    terms << "exponent,coefficient,log_power\n";
    for (const auto& term : a.asymptotic.terms) {
      terms << csv_number(term.exponent) << "," << csv_number(term.coefficient) << "," << term.log_power << "\n";
    }
    ctx.out.write_text("asymptotic_terms.csv", terms.str());
  }
  if (alpha > 0.0 && alpha < 0.5 && a.h_alpha_finite) {
    std::ostringstream tab;
    tab << "t,h_alpha,asymptotic,ratio\n";
    for (int k = 0; k <= 6; ++k) {
      const double tk = std::pow(10.0, -k);
      const double h = h_alpha(m, alpha, tk);
      const double as = a.has_asymptotic ? a.asymptotic.evaluate(tk) : std::numeric_limits<double>::quiet_NaN();
      tab << csv_number(tk) << "," << csv_number(h) << "," << csv_number(as) << "," << csv_number(h / as) << "\n";
    }
    ctx.out.write_text("h_alpha.csv", tab.str());
  }
  ctx.log << kind_name(m) << " d=" << m.d << ": Upsilon(0) = " << a.upsilon0 << ", Upsilon_" << alpha << "(" << beta
          << ") = " << a.upsilon_alpha_beta << "\n";
}

void cmd_conditions(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const SpectralModel m = model_from(cfg);
  const LipschitzSpec lip{cfg.num("lip.Lb"), cfg.num("lip.L0")};
  if (!(lip.L_b >= 0.0)) throw ConfigError("lip.Lb", "must be >= 0");
  if (!(lip.L_0 >= 0.0)) throw ConfigError("lip.L0", "must be >= 0");
  const ConditionReport r = check_conditions(m, lip, cfg.flag("conditions.hua"));
  json j = conditions_json(r);
  j["max_lipschitz"] = json_number(max_lipschitz(m).value);
  ctx.out.write_json("conditions.json", j);
  if (!r.lip_ok) ctx.warn("128 L_b^2 Upsilon(0) < 1 fails");
  ctx.log << "Upsilon(0) = " << r.upsilon0 << ", lip_ok = " << (r.lip_ok ? "true" : "false") << "\n";
}

void cmd_weights(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const int d = int_in(cfg, "d", 1, 3);
  const Weight w = weight_from(cfg, d);
  const double T = cfg.num("scan.T"), radius = cfg.num("scan.radius");
  const int res = int_in(cfg, "scan.resolution", 4, 1 << 16);
  if (!(T > 0.0)) throw ConfigError("scan.T", "must be > 0");
  if (!(radius > 0.0)) throw ConfigError("scan.radius", "must be > 0");
  const AdmissibilityCertificate c = admissibility_scan(w, T, radius, res);
  json j;
  j["kind"] = weight_name(w.kind);
  j["param"] = w.param;
  j["d"] = d;
  j["l1"] = json_number(weight_l1(w));
  j["analytic_verdict"] = to_string(c.analytic_verdict);
  j["scan_verdict"] = to_string(c.scan_verdict);
  j["numeric_sup_ratio"] = json_number(c.numeric_sup_ratio);
  json logs = json::array();
  for (double v : c.log_sup_by_radius) logs.push_back(json_number(v));
  j["log_sup_by_radius"] = logs;
  j["refined_change"] = json_number(c.refined_change);
  j["T"] = T;
  j["radius"] = radius;
  j["resolution"] = res;
  j["quadrature_ok"] = c.quadrature_ok;
  if (cfg.str("weight_tilde.kind") != "none") {
    const Weight wt = weight_from(cfg, d, "weight_tilde");
    j["ratio_integrable"] = to_string(ratio_integrable(w, wt));
  }
  ctx.out.write_json("weights.json", j);
  ctx.log << weight_name(w.kind) << "(" << w.param << "): analytic " << to_string(c.analytic_verdict) << ", scan "
          << to_string(c.scan_verdict) << "\n";
}

void cmd_gr_profile(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const int d = int_in(cfg, "d", 1, 3);
  const Weight w = weight_from(cfg, d);
  const InitialDatum mu = init_from(cfg, d);
  const double a = cfg.num("profile.t_min"), b = cfg.num("profile.t_max");
  const int pts = int_in(cfg, "profile.points", 8, 100000);
  if (!(a > 0.0)) throw ConfigError("profile.t_min", "must be > 0");
  if (!(b >= 1e4 * a * (1 - 1e-9))) throw ConfigError("profile.t_max", "must be at least 1e4 * profile.t_min");
  const GRhoProfile p = g_rho_profile(mu, w, geometric_grid(a, b, pts));
  std::ostringstream csv;
  csv << "t,g_rho\n";
  for (std::size_t i = 0; i < p.t.size(); ++i) csv << csv_number(p.t[i]) << "," << csv_number(p.value[i]) << "\n";
  ctx.out.write_text("gr_profile.csv", csv.str());
  json j;
  j["classification"] = to_string(p.classification);
  j["fitted_slope"] = json_number(p.fitted_slope);
  j["slope_stderr"] = json_number(p.slope_stderr);
  j["sup_estimate"] = json_number(p.sup_estimate);
  j["init_gate_ok"] = p.init_gate_ok;
  ctx.out.write_json("gr_profile.json", j);
  if (!p.init_gate_ok) ctx.warn("limsup G_rho(t; mu) appears infinite; the initial-data gate fails");
  ctx.log << "G_rho profile: " << to_string(p.classification) << ", slope " << p.fitted_slope << "\n";
}

struct EnsembleSetup {
  SpectralModel model;
  LatticeGrid grid;
  SolverConfig solver;
  DiffusionCoefficient b;
  InitialDatum mu;
  Weight w;
};

EnsembleSetup ensemble_setup(Context& ctx) {
  const auto& cfg = ctx.cfg;
  EnsembleSetup e{model_from(cfg), grid_from(cfg), solver_from(cfg), {}, {}, {}};
  e.b = diffusion_from(cfg, e.model);
  e.mu = init_from(cfg, e.model.d);
  e.w = cfg.values.contains("weight.kind") ? weight_from(cfg, e.model.d) : Weight{WeightKind::exp_decay, 1.0, e.model.d};
  if (e.mu.kind == DatumKind::poly_growth) {
    throw ConfigError("init.kind", "poly-growth data are unbounded on the torus and cannot be simulated");
  }
  const ConditionReport r = check_conditions(e.model, {e.b.lipschitz(), e.b.at_zero()}, false);
  ctx.manifest["conditions"] = conditions_json(r);
  ctx.manifest["lambda"] = e.b.lambda;
  gate_warnings(ctx, r, e.b);
  return e;
}

NoiseSampler sampler_or_config_error(const EnsembleSetup& e, std::uint64_t seed) {
  try {
    return build_sampler(e.model, e.grid, seed);
  } catch (const ParameterError& err) {
    throw ConfigError(err.field(), std::string(err.what()).substr(err.field().size() + 2));
  }
}

void cmd_simulate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const EnsembleSetup e = ensemble_setup(ctx);
  const long long replica = cfg.integer("replica");
  if (replica < 0) throw ConfigError("replica", "must be >= 0");
  const NoiseSampler sampler = sampler_or_config_error(e, cfg.seed());
  const std::vector<double> rho = weight_field(e.grid, e.w);
  const bool dump = cfg.flag("simulate.write_fields");

  SolverConfig sc = e.solver;
  sc.store_snapshots = false;
  std::ostringstream csv;
  csv << "t,mass,norm2_rho,max_abs\n";
  int k = 0;
  auto observer = [&](const FieldState& s) {
    double mx = 0.0;
    for (double v : s.values) mx = std::max(mx, std::abs(v));
    csv << csv_number(s.time) << "," << csv_number(s.mass()) << ","
        << csv_number(weighted_norm_sq(s.values, rho, e.grid.cell_volume())) << "," << csv_number(mx) << "\n";
    if (dump) {
      std::ostringstream name;
      name << "fields/field_" << std::setw(5) << std::setfill('0') << k << ".bin";
      ctx.out.write_field(name.str(), s);
    }
    ++k;
  };
  const FieldState s0 = init_state(e.mu, e.grid, cfg.seed(), static_cast<std::uint64_t>(replica));
  const Trajectory tr = evolve(s0, sc, sampler, e.b, observer);
  ctx.out.write_text("trajectory.csv", csv.str());
  json j;
  j["aborted"] = tr.aborted;
  j["diagnostics"] = tr.diagnostics;
  j["final_time"] = tr.final_state.time;
  j["next_step"] = tr.final_state.lineage.next_step;
  j["records"] = k;
  j["nyquist_ratio"] = sampler.nyquist_ratio;
  ctx.out.write_json("simulate.json", j);
  ctx.out.write_field("final_state.bin", tr.final_state);
  if (tr.aborted) ctx.warn(tr.diagnostics);
  ctx.log << "simulated to t = " << tr.final_state.time << (tr.aborted ? " (aborted)" : "") << "\n";
}

json verdict_json(const MomentReport& rep) {
  json j;
  try {
    const GrowthFit g = boundedness_diagnostic(rep);
    j["verdict"] = to_string(g.verdict);
    j["exp_rate"] = json_number(g.exp_rate);
    j["exp_rate_sigma"] = json_number(g.exp_rate_sigma);
    j["power"] = json_number(g.power);
    j["power_sigma"] = json_number(g.power_sigma);
    j["window_lo"] = g.window_lo;
    j["window_hi"] = g.window_hi;
    j["growth_factor"] = json_number(g.growth_factor);
    j["growth_factor_upper"] = json_number(g.growth_factor_upper);
  } catch (const std::invalid_argument& err) {
    j["verdict"] = "insufficient-data";
    j["reason"] = err.what();
  }
  return j;
}

void write_moments(Context& ctx, const MomentReport& rep) {
  std::ostringstream csv;
  csv << "t,mean_norm2,stderr,bound_ratio,n_replicas\n";
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    csv << csv_number(rep.times[k]) << "," << csv_number(rep.mean_norm2[k]) << "," << csv_number(rep.stderr_norm2[k])
        << "," << csv_number(rep.bound_ratio[k]) << "," << rep.n_replicas[k] << "\n";
  }
  ctx.out.write_text("moments.csv", csv.str());
  std::ostringstream probes;
  probes << "t,origin_mean_sq,origin_stderr,quarter_mean_sq,quarter_stderr\n";
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    probes << csv_number(rep.times[k]) << "," << csv_number(rep.probe_mean_sq[0][k]) << ","
           << csv_number(rep.probe_stderr_sq[0][k]) << "," << csv_number(rep.probe_mean_sq[1][k]) << ","
           << csv_number(rep.probe_stderr_sq[1][k]) << "\n";
  }
  ctx.out.write_text("probes.csv", probes.str());
  json j = verdict_json(rep);
  j["replicas_requested"] = rep.replicas_requested;
  j["replicas_blown_up"] = rep.replicas_blown_up;
  j["partial"] = rep.partial;
  j["ratio_stabilized"] = rep.ratio_stabilized;
  j["ratio_change_last_half"] = json_number(rep.ratio_change_last_half);
  j["running_max_ratio"] = rep.running_max_ratio.empty() ? json(nullptr) : json_number(rep.running_max_ratio.back());
  ctx.out.write_json("moments.json", j);
  if (rep.partial) ctx.warn(std::to_string(rep.replicas_blown_up) + " replicas blew up; statistics are partial");
  ctx.log << "moment verdict: " << j["verdict"].get<std::string>() << "\n";
}

void cmd_moments(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const EnsembleSetup e = ensemble_setup(ctx);
  const int replicas = int_in(cfg, "replicas", 1, 1000000);
  sampler_or_config_error(e, cfg.seed());
  MomentRunOptions opts;
  opts.threads = cfg.threads;
  const MomentReport rep = estimate_moments(e.solver, e.model, e.grid, e.b, e.mu, e.w, replicas, cfg.seed(), opts);
  write_moments(ctx, rep);
}

void cmd_invariant(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const EnsembleSetup e = ensemble_setup(ctx);
  const int replicas = int_in(cfg, "replicas", 1, 1000000);
  const int m = int_in(cfg, "invariant.m", 1, 64);
  const double tau = cfg.num("invariant.tau");
  if (!(tau > 0.0)) throw ConfigError("invariant.tau", "must be > 0");
  const std::vector<double> windows = parse_list("invariant.windows", cfg.str("invariant.windows"));
  const std::vector<double> levels = parse_list("invariant.levels", cfg.str("invariant.levels"));
  if (windows.size() < 3) throw ConfigError("invariant.windows", "needs at least three window lengths");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!(windows[i] > 0.0) || (i > 0 && !(windows[i] > windows[i - 1]))) {
      throw ConfigError("invariant.windows", "must be positive and strictly increasing");
    }
  }
  for (double l : levels) {
    if (!(l > 0.0 && l < 1.0)) throw ConfigError("invariant.levels", "each level must lie in (0, 1)");
  }
  if (e.solver.t_end < tau + windows.back() - 1e-9) {
    throw ConfigError("solver.t_end", "must be >= invariant.tau + the largest window");
  }
  sampler_or_config_error(e, cfg.seed());

  const ProjectionFamily fam(e.grid, e.w, m);
  OccupationSeries series(static_cast<std::size_t>(replicas));
  MomentRunOptions opts;
  opts.threads = cfg.threads;
  opts.on_record = [&](std::size_t r, const FieldState& s) { series[r].push_back(fam.observe(s)); };
  const MomentReport rep = estimate_moments(e.solver, e.model, e.grid, e.b, e.mu, e.w, replicas, cfg.seed(), opts);
  write_moments(ctx, rep);

  // Replicas that blew up carry short series; the KB averages use complete ones only.
  OccupationSeries complete;
  std::size_t longest = 0;
  for (const auto& s : series) longest = std::max(longest, s.size());
  for (auto& s : series) {
    if (s.size() == longest) complete.push_back(std::move(s));
  }
  std::vector<KBAverage> kb;
  for (double T : windows) kb.push_back(kb_average(complete, tau, T));
  const KBConvergenceReport conv = kb_convergence(kb);
  std::ostringstream kcsv;
  kcsv << "coordinate,T_from,T_to,ks_distance,noise_floor\n";
  for (const auto& c : conv.coords) {
    for (std::size_t i = 0; i < c.distances.size(); ++i) {
      kcsv << c.name << "," << csv_number(windows[i]) << "," << csv_number(windows[i + 1]) << ","
           << csv_number(c.distances[i]) << "," << csv_number(c.noise_floors[i]) << "\n";
    }
  }
  ctx.out.write_text("kb_distances.csv", kcsv.str());

  const TightnessTable tt = tightness_quantiles(complete, tau, levels);
  std::ostringstream tcsv;
  tcsv << "t,level,quantile\n";
  for (const auto& row : tt.rows) tcsv << csv_number(row.t) << "," << csv_number(row.level) << "," << csv_number(row.value) << "\n";
  ctx.out.write_text("tightness.csv", tcsv.str());

  json j;
  j["converged"] = conv.converged;
  j["norm_converged"] = conv.norm_converged;
  j["replicas_used"] = complete.size();
  j["windows"] = windows;
  json coords = json::array();
  for (const auto& c : conv.coords) coords.push_back({{"name", c.name}, {"decreasing", c.decreasing}, {"final_below", c.final_below}});
  j["coordinates"] = coords;
  json env = json::array();
  for (std::size_t l = 0; l < levels.size(); ++l) {
    env.push_back({{"level", levels[l]}, {"envelope", json_number(tt.envelope[l])},
                   {"envelope_first_half", json_number(tt.envelope_first_half[l])}});
  }
  j["tightness"] = env;
  ctx.out.write_json("invariant.json", j);
  ctx.log << "KB averages " << (conv.converged ? "stabilized" : "did not stabilize") << "\n";
}

void cmd_factorization(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const EnsembleSetup e = ensemble_setup(ctx);
  const double alpha = cfg.num("factorization.alpha");
  if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("factorization.alpha", "must lie in (0, 1/2)");
  const std::string& rs = cfg.str("factorization.rule");
  SingularRule rule;
  if (rs == "product") {
    rule = SingularRule::product;
  } else if (rs == "endpoint-midpoint") {
    rule = SingularRule::endpoint_midpoint;
  } else {
    throw ConfigError("factorization.rule", "unknown rule '" + rs + "'");
  }
  const double bytes = static_cast<double>(e.grid.size()) * 8.0 * (e.solver.t_end / e.solver.dt) * 2.0 * 3.0;
  if (bytes > 8e9) throw ConfigError("solver.t_end", "the noise record at dt/2 would exceed 8 GB");

  std::ostringstream csv;
  csv << "dt,rel_l2_error\n";
  json rows = json::array();
  for (double dt : {e.solver.dt, 0.5 * e.solver.dt}) {
    SolverConfig sc;
    sc.dt = dt;
    sc.t_end = e.solver.t_end;
    sc.store_snapshots = false;
    sc.keep_noise = true;
    const NoiseSampler sampler = sampler_or_config_error(e, ctx.cfg.seed());
    const FieldState s0 = init_state(e.mu, e.grid, ctx.cfg.seed(), 0);
    const Trajectory tr = evolve(s0, sc, sampler, e.b);
    if (tr.aborted) throw std::runtime_error("factorization-check: " + tr.diagnostics);
    const NoiseRecord& rec = *tr.noise;
    const double t = static_cast<double>(rec.forcing.size()) * dt;
    const YSeries y = compute_Y(rec, alpha, rule);
    const double err = relative_l2(factorization_reconstruct(y, t), direct_convolution(rec, t));
    csv << csv_number(dt) << "," << csv_number(err) << "\n";
    rows.push_back({{"dt", dt}, {"rel_l2_error", json_number(err)}});
    ctx.log << "dt = " << dt << ": relative L2 error " << err << "\n";
  }
  ctx.out.write_text("factorization.csv", csv.str());
  json j;
  j["alpha"] = alpha;
  j["rule"] = rs;
  j["rows"] = rows;
  j["error_decreases"] = rows[1]["rel_l2_error"].is_number() && rows[0]["rel_l2_error"].is_number() &&
                         rows[1]["rel_l2_error"].get<double>() < rows[0]["rel_l2_error"].get<double>();
  ctx.out.write_json("factorization.json", j);
}

} // namespace

json run_command(const RunConfig& cfg, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  OutputDir out(cfg.output);
  json manifest;
  manifest["command"] = cfg.command;
  manifest["config"] = json::parse(cfg.canonical());
  manifest["config"].erase("command");
  manifest["config_hash"] = cfg.hash();
  manifest["seed"] = cfg.values.contains("seed") ? json(cfg.seed()) : json(nullptr);
  manifest["versions"] = {{"shelab", SHELAB_VERSION}, {"compiler", __VERSION__}, {"cplusplus", __cplusplus}};
  manifest["runtime"] = {{"output", out.root().string()}, {"threads", cfg.threads}};
  manifest["warnings"] = json::array();
  Context ctx{cfg, out, log, manifest};

  // Library parameter errors are config errors from the user's point of view.
  try {
    const std::string& c = cfg.command;
    if (c == "kernel-report") cmd_kernel_report(ctx);
    else if (c == "conditions") cmd_conditions(ctx);
    else if (c == "weights") cmd_weights(ctx);
    else if (c == "gr-profile") cmd_gr_profile(ctx);
    else if (c == "simulate") cmd_simulate(ctx);
    else if (c == "moments") cmd_moments(ctx);
    else if (c == "invariant") cmd_invariant(ctx);
    else if (c == "factorization-check") cmd_factorization(ctx);
    else throw ConfigError("command", "unknown command '" + c + "'");
  } catch (const ParameterError& e) {
    std::string key = e.field();
    if (!cfg.values.contains(key)) {
      if (key == "alpha" && cfg.values.contains("factorization.alpha")) key = "factorization.alpha";
      else if (key == "t_grid") key = "profile.t_min";
      else if ((key == "grid.d" || key == "weight.d") && cfg.values.contains("model.d")) key = "model.d";
      else if (key == "weight.d" && cfg.values.contains("d")) key = "d";
    }
    throw ConfigError(key, std::string(e.what()).substr(e.field().size() + 2));
  }

  manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest["outputs"] = out.files();
  out.write_json("manifest.json", manifest);
  return manifest;
}

} // namespace shelab::cli
