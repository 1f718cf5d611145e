#include "shelab_cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace shelab::cli {

const std::vector<std::string> kCommands = {"kernel-report", "conditions", "weights",   "gr-profile",
                                            "simulate",      "moments",    "invariant", "factorization-check"};

namespace {

using V = ValueType;

std::vector<KeySpec> model_keys() {
  return {
      {"model.kind", V::string, "bessel-corr", "model",
       "bessel-corr | bessel-spec | matern | riesz-type | triangle-1d | sinc2-1d | product-triangle"},
      {"model.d", V::integer, 3, "d", "spatial dimension"},
      {"model.s", V::number, 2.0, "s", "Bessel order s"},
      {"model.s1", V::number, 2.0, "s1", "riesz-type order s1"},
      {"model.s2", V::number, 2.0, "s2", "riesz-type order s2"},
      {"model.phi", V::number, 1.0, "phi", "matern amplitude"},
      {"model.scale", V::number, 1.0, "scale", "matern inverse length"},
      {"model.nu", V::number, 0.5, "nu", "matern smoothness"},
      {"model.amplitude", V::number, 1.0, "amplitude", "multiplier on f and f-hat"},
  };
}

std::vector<KeySpec> weight_keys() {
  return {
      {"weight.kind", V::string, "exp-decay", "weight", "exp-decay | poly-decay | stretched-exp"},
      {"weight.param", V::number, 1.0, "weight-param", "decay parameter a (or b for stretched-exp)"},
  };
}

std::vector<KeySpec> init_keys() {
  return {
      {"init.kind", V::string, "dirac", "init", "dirac | constant | riesz | poly-growth"},
      {"init.mass", V::number, 1.0, "init-mass", "Dirac mass"},
      {"init.c", V::number, 1.0, "init-c", "constant density"},
      {"init.alpha", V::number, 1.0, "init-alpha", "exponent of riesz / poly-growth data"},
  };
}

std::vector<KeySpec> lattice_keys() {
  return {
      {"grid.n", V::integer, 32, "n", "points per axis"},
      {"grid.L", V::number, 16.0, "L", "box side"},
      {"solver.dt", V::number, 5e-3, "dt", "time step"},
      {"solver.t_end", V::number, 1.0, "t-end", "final time"},
      {"solver.record_every", V::number, 0.1, "record-every", "spacing of recorded times"},
      {"solver.record_start", V::number, 0.0, "record-start", "first recorded time (0 means record_every)"},
      {"solver.dealias", V::boolean, false, "dealias", "remove the top third of modes of b(u) dW"},
      {"diffusion.kind", V::string, "linear", "diffusion", "linear | affine | bounded-sine"},
      {"diffusion.lambda", V::number, 0.1, "lambda", "slope of b"},
      {"diffusion.lambda_factor", V::number, 0.0, "lambda-factor",
       "when > 0, lambda = lambda_factor * max_lipschitz(model)"},
      {"diffusion.c", V::number, 0.0, "c", "offset (affine) or amplitude (bounded-sine)"},
      {"seed", V::integer, 1, "seed", "64-bit master seed"},
  };
}

template <class... Groups>
std::vector<KeySpec> concat(Groups... gs) {
  std::vector<KeySpec> out;
  (out.insert(out.end(), gs.begin(), gs.end()), ...);
  return out;
}

std::map<std::string, std::vector<KeySpec>> build_schemas() {
  std::map<std::string, std::vector<KeySpec>> s;
  s["kernel-report"] = concat(model_keys(), std::vector<KeySpec>{
                                                {"alpha", V::number, 0.25, "alpha", "exponent in Upsilon_alpha and H_alpha"},
                                                {"beta", V::number, 0.0, "beta", "shift in Upsilon_alpha(beta)"},
                                                {"t", V::number, 1.0, "t", "time for H_alpha(t)"},
                                            });
  s["conditions"] = concat(model_keys(), std::vector<KeySpec>{
                                             {"lip.Lb", V::number, 0.0, "Lb", "Lipschitz constant of b"},
                                             {"lip.L0", V::number, 0.0, "L0", "bound on |b(0)|"},
                                             {"conditions.hua", V::boolean, true, "hua", "evaluate the H/Upsilon sandwich"},
                                         });
  s["weights"] = concat(std::vector<KeySpec>{{"d", V::integer, 3, "d", "spatial dimension"}}, weight_keys(),
                        std::vector<KeySpec>{
                            {"scan.T", V::number, 0.5, "T", "time horizon of the scan"},
                            {"scan.radius", V::number, 8.0, "radius", "scan radius"},
                            {"scan.resolution", V::integer, 64, "resolution", "radial points"},
                            {"weight_tilde.kind", V::string, "none", "weight-tilde", "second weight for int rho/rho_tilde"},
                            {"weight_tilde.param", V::number, 1.0, "weight-tilde-param", "its parameter"},
                        });
  s["gr-profile"] = concat(std::vector<KeySpec>{{"d", V::integer, 3, "d", "spatial dimension"}}, init_keys(),
                           weight_keys(),
                           std::vector<KeySpec>{
                               {"profile.t_min", V::number, 1e-2, "t-min", "first time"},
                               {"profile.t_max", V::number, 1e3, "t-max", "last time"},
                               {"profile.points", V::integer, 51, "points", "geometric grid size"},
                           });
  s["simulate"] = concat(model_keys(), init_keys(), weight_keys(), lattice_keys(),
                         std::vector<KeySpec>{
                             {"replica", V::integer, 0, "replica", "stream index within the seed"},
                             {"simulate.write_fields", V::boolean, true, "write-fields", "dump recorded fields"},
                         });
  s["moments"] = concat(model_keys(), init_keys(), weight_keys(), lattice_keys(),
                        std::vector<KeySpec>{{"replicas", V::integer, 16, "replicas", "number of replicas"}});
  s["invariant"] = concat(model_keys(), init_keys(), weight_keys(), lattice_keys(),
                          std::vector<KeySpec>{
                              {"replicas", V::integer, 16, "replicas", "number of replicas"},
                              {"invariant.m", V::integer, 8, "m", "number of projection coordinates"},
                              {"invariant.tau", V::number, 1.0, "tau", "burn-in before the averaging windows"},
                              {"invariant.windows", V::string, "10,20,40", "windows", "KB window lengths T"},
                              {"invariant.levels", V::string, "0.1,0.05,0.01", "levels", "tightness levels eps"},
                          });
  s["factorization-check"] = concat(model_keys(), init_keys(), lattice_keys(),
                                    std::vector<KeySpec>{
                                        {"factorization.alpha", V::number, 0.25, "alpha", "factorization exponent"},
                                        {"factorization.rule", V::string, "product", "rule", "product | endpoint-midpoint"},
                                    });
  return s;
}

const std::map<std::string, std::vector<KeySpec>>& schemas() {
  static const auto s = build_schemas();
  return s;
}

const KeySpec* find_key(const std::vector<KeySpec>& sch, const std::string& key) {
  for (const auto& k : sch) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

json coerce(const KeySpec& spec, const json& v) {
  const std::string& key = spec.key;
  if (v.is_string() && spec.type != V::string) {
    const std::string& s = v.get_ref<const std::string&>();
    switch (spec.type) {
      case V::boolean:
        if (s == "true" || s == "1" || s == "on") return true;
        if (s == "false" || s == "0" || s == "off") return false;
        throw ConfigError(key, "expected a boolean, got '" + s + "'");
      case V::integer: {
        long long x = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError(key, "expected an integer, got '" + s + "'");
        return x;
      }
      default: {
        std::size_t pos = 0;
        double x = 0.0;
        try {
          x = std::stod(s, &pos);
        } catch (const std::exception&) {
          pos = 0;
        }
        if (pos == 0 || pos != s.size()) throw ConfigError(key, "expected a number, got '" + s + "'");
        return x;
      }
    }
  }
  switch (spec.type) {
    case V::string:
      if (!v.is_string()) throw ConfigError(key, "expected a string");
      return v;
    case V::boolean:
      if (!v.is_boolean()) throw ConfigError(key, "expected a boolean");
      return v;
    case V::integer:
      if (v.is_number_integer()) return v.get<long long>();
      if (v.is_number_float()) {
        const double x = v.get<double>();
        if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) return static_cast<long long>(x);
      }
      throw ConfigError(key, "expected an integer");
    case V::number:
      if (!v.is_number()) throw ConfigError(key, "expected a number");
      if (!std::isfinite(v.get<double>())) throw ConfigError(key, "must be finite");
      return v.get<double>();
  }
  return v;
}

} // namespace

const std::vector<KeySpec>& schema(const std::string& command) {
  const auto& s = schemas();
  auto it = s.find(command);
  if (it == s.end()) throw ConfigError("command", "unknown command '" + command + "'");
  return it->second;
}

bool is_runtime_key(const std::string& key) { return key == "output" || key == "threads"; }

std::string RunConfig::canonical() const {
  json j = values;
  j["command"] = command;
  return j.dump();
}

std::string RunConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t RunConfig::seed() const {
  return values.contains("seed") ? static_cast<std::uint64_t>(values.at("seed").get<long long>()) : 0;
}

double RunConfig::num(const std::string& key) const {
  if (!values.contains(key)) throw ConfigError(key, "not part of the '" + command + "' schema");
  return values.at(key).get<double>();
}
long long RunConfig::integer(const std::string& key) const {
  if (!values.contains(key)) throw ConfigError(key, "not part of the '" + command + "' schema");
  return values.at(key).get<long long>();
}
const std::string& RunConfig::str(const std::string& key) const {
  if (!values.contains(key)) throw ConfigError(key, "not part of the '" + command + "' schema");
  return values.at(key).get_ref<const std::string&>();
}
bool RunConfig::flag(const std::string& key) const {
  if (!values.contains(key)) throw ConfigError(key, "not part of the '" + command + "' schema");
  return values.at(key).get<bool>();
}

RunConfig make_config(const std::string& command, const json& file_values,
                      const std::map<std::string, std::string>& overrides) {
  const auto& sch = schema(command);
  RunConfig cfg;
  cfg.command = command;
  for (const auto& k : sch) cfg.values[k.key] = k.fallback;

  json flat = file_values;
  // Manifests carry the flat config under "config"; their runtime block is not reused.
  if (flat.is_object() && flat.contains("config") && flat["config"].is_object()) flat = json(flat["config"]);
  if (!flat.is_null() && !flat.is_object()) throw ConfigError("config", "top level must be a JSON object");

  auto apply = [&](const std::string& key, const json& v) {
    if (key == "command") {
      if (!v.is_string() || v.get<std::string>() != command) {
        throw ConfigError("command", "config file is for '" + (v.is_string() ? v.get<std::string>() : std::string("?")) +
                                         "', not '" + command + "'");
      }
      return;
    }
    if (key == "output") {
      if (!v.is_string() || v.get<std::string>().empty()) throw ConfigError("output", "expected a non-empty path");
      cfg.output = v.get<std::string>();
      return;
    }
    if (key == "threads") {
      KeySpec t{"threads", V::integer, 0, "threads", ""};
      const long long n = coerce(t, v).get<long long>();
      if (n < 0 || n > 4096) throw ConfigError("threads", "must lie in [0, 4096]");
      cfg.threads = static_cast<unsigned>(n);
      return;
    }
    const KeySpec* spec = find_key(sch, key);
    if (!spec) throw ConfigError(key, "unknown key for command '" + command + "'");
    cfg.values[key] = coerce(*spec, v);
  };

  if (flat.is_object()) {
    for (auto it = flat.begin(); it != flat.end(); ++it) apply(it.key(), it.value());
  }
  for (const auto& [k, v] : overrides) apply(k, json(v));

  if (cfg.values.contains("seed") && cfg.values["seed"].get<long long>() < 0) {
    throw ConfigError("seed", "must be >= 0");
  }
  return cfg;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    while (pos < item.size() && item[pos] == ' ') ++pos;
    if (pos == 0 || pos != item.size()) throw ConfigError(key, "bad list entry '" + item + "'");
    out.push_back(x);
  }
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

} // namespace shelab::cli
