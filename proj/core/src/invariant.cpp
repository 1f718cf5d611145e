#include "shelab/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "shelab/errors.hpp"

namespace shelab {

ProjectionFamily::ProjectionFamily(const LatticeGrid& g, const Weight& w, int m, double width)
    : grid(g), weight(w), rho(weight_field(g, w)) {
  g.validate();
  if (m < 1) throw ParameterError("invariant.m", "must be >= 1");
  if (w.d != g.d) throw ParameterError("weight.d", "must equal grid.d");
  const double span = 0.5 * g.L;
  const double spacing = m > 1 ? span / (m - 1) : span;
  if (width <= 0.0) width = std::max(g.h(), 0.875 * spacing);
  for (int j = 0; j < m; ++j) {
    const double c = m > 1 ? -0.25 * g.L + j * spacing : 0.0;
    std::vector<double> e(g.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      const auto idx = g.unflatten(i);
      double r2 = 0.0;
      for (int a = 0; a < g.d; ++a) {
        const double x = g.coord(idx[a]) - (a == 0 ? c : 0.0);
        r2 += x * x;
      }
      e[i] = std::exp(-r2 / (2.0 * width * width));
    }
    // modified Gram-Schmidt, two passes
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double p = inner(e, q);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] -= p * q[i];
      }
    }
    const double nrm = std::sqrt(inner(e, e));
    if (!(nrm > 1e-10)) throw std::runtime_error("ProjectionFamily: bumps are linearly dependent on this lattice");
    for (auto& v : e) v /= nrm;
    basis.push_back(std::move(e));
  }
}

double ProjectionFamily::inner(const std::vector<double>& a, const std::vector<double>& b) const {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * rho[i];
  return s * grid.cell_volume();
}

OccupationSample ProjectionFamily::observe(const FieldState& s) const {
  if (!(s.grid == grid)) throw std::invalid_argument("ProjectionFamily::observe: grid mismatch");
  OccupationSample o;
  o.t = s.time;
  o.norm_rho = std::sqrt(inner(s.values, s.values));
  for (const auto& e : basis) o.projections.push_back(inner(s.values, e));
  return o;
}

KBAverage kb_average(const OccupationSeries& series, double tau, double T) {
  if (!(tau > 0.0)) throw ParameterError("invariant.tau", "must be > 0");
  if (!(T > 0.0)) throw ParameterError("invariant.T", "must be > 0");
  if (series.empty() || series.front().size() < 2) throw std::invalid_argument("kb_average: need records");
  const auto& first = series.front();
  const double spacing = first[1].t - first[0].t;
  for (std::size_t k = 1; k < first.size(); ++k) {
    if (std::abs((first[k].t - first[k - 1].t) - spacing) > 1e-6 * std::max(1.0, spacing)) {
      throw std::invalid_argument("kb_average: record times are not uniformly spaced");
    }
  }
  const double tol = 0.5 * spacing + 1e-9;
  if (first.front().t > tau + tol || first.back().t < tau + T - tol) {
    throw std::out_of_range("kb_average: records do not cover the window [tau, tau + T]");
  }
  KBAverage kb;
  kb.T = T;
  kb.tau = tau;
  kb.replicas = static_cast<int>(series.size());
  for (const auto& rep : series) {
    if (rep.size() != first.size()) throw std::invalid_argument("kb_average: replicas have different record counts");
    int count = 0;
    for (const auto& s : rep) {
      if (s.t >= tau - 1e-9 && s.t <= tau + T + 1e-9 && std::isfinite(s.norm_rho)) {
        kb.samples.push_back(s);
        ++count;
      }
    }
    kb.times = std::max(kb.times, count);
  }
  return kb;
}

KBAverage kb_average(const std::vector<std::vector<FieldState>>& trajectories, const ProjectionFamily& fam,
                     double tau, double T) {
  OccupationSeries series;
  for (const auto& tr : trajectories) {
    std::vector<OccupationSample> v;
    for (const auto& s : tr) v.push_back(fam.observe(s));
    series.push_back(std::move(v));
  }
  return kb_average(series, tau, T);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_noise_floor(std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return std::sqrt(M_PI / 2.0) * std::log(2.0) * std::sqrt((nn + mm) / (nn * mm));
}

KBConvergenceReport kb_convergence(const std::vector<KBAverage>& kb) {
  if (kb.size() < 3) throw std::invalid_argument("kb_convergence: need at least three windows");
  KBConvergenceReport rep;
  for (const auto& k : kb) rep.windows.push_back(k.T);
  const std::size_t m = kb.front().samples.empty() ? 0 : kb.front().samples.front().projections.size();

  auto column = [](const KBAverage& k, int coord) {
    std::vector<double> v;
    v.reserve(k.samples.size());
    for (const auto& s : k.samples) v.push_back(coord < 0 ? s.norm_rho : s.projections[static_cast<std::size_t>(coord)]);
    return v;
  };
  rep.converged = true;
  for (int coord = -1; coord < static_cast<int>(m); ++coord) {
    KBCoordinate c;
    c.name = coord < 0 ? "norm" : "proj" + std::to_string(coord);
    for (std::size_t i = 0; i + 1 < kb.size(); ++i) {
      c.distances.push_back(ks_distance(column(kb[i], coord), column(kb[i + 1], coord)));
      c.noise_floors.push_back(ks_noise_floor(kb[i].samples.size(), kb[i + 1].samples.size()));
    }
    c.decreasing = true;
    for (std::size_t i = 1; i < c.distances.size(); ++i) c.decreasing = c.decreasing && c.distances[i] < c.distances[i - 1];
    c.final_below = c.distances.back() < 2.0 * c.noise_floors.back();
    rep.converged = rep.converged && c.decreasing && c.final_below;
    if (coord < 0) rep.norm_converged = c.decreasing && c.final_below;
    rep.coords.push_back(std::move(c));
  }
  return rep;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

TightnessTable tightness_quantiles(const OccupationSeries& series, double tau, const std::vector<double>& levels) {
  if (series.empty()) throw std::invalid_argument("tightness_quantiles: no replicas");
  for (double e : levels) {
    if (!(e > 0.0 && e < 1.0)) throw ParameterError("levels", "each level must lie in (0, 1)");
  }
  std::map<double, std::vector<double>> by_time;
  for (const auto& rep : series) {
    for (const auto& s : rep) {
      if (s.t >= tau - 1e-9 && std::isfinite(s.norm_rho)) by_time[s.t].push_back(s.norm_rho);
    }
  }
  TightnessTable tab;
  tab.levels = levels;
  tab.envelope.assign(levels.size(), 0.0);
  tab.envelope_first_half.assign(levels.size(), 0.0);
  if (by_time.empty()) return tab;
  const double mid = 0.5 * (by_time.begin()->first + by_time.rbegin()->first);
  for (const auto& [t, vals] : by_time) {
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const double q = quantile(vals, 1.0 - levels[l]);
      tab.rows.push_back({t, levels[l], q});
      tab.envelope[l] = std::max(tab.envelope[l], q);
      if (t <= mid) tab.envelope_first_half[l] = std::max(tab.envelope_first_half[l], q);
    }
  }
  return tab;
}

} // namespace shelab
