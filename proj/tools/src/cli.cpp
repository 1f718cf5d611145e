#include <map>
#include <memory>
#include <ostream>

#include <CLI11.hpp>

#include "shelab_cli/commands.hpp"

namespace shelab::cli {

namespace {

struct SubcommandArgs {
  std::string config_path;
  std::string output;
  long long threads = -1;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;  // schema key -> raw text
};

void add_common(CLI::App* sub, SubcommandArgs& a) {
  sub->add_option("--config", a.config_path, "flat-key JSON config (or a manifest.json to rerun)");
  sub->add_option("-o,--output", a.output, "output directory");
  sub->add_option("--threads", a.threads, "worker threads (0 = all cores)");
  sub->add_option("--set", a.sets, "override any key: --set model.s=2.5")->take_all();
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"shelab: stochastic heat equation laboratory"};
  app.require_subcommand(1);
  std::map<std::string, std::unique_ptr<SubcommandArgs>> args;
  std::map<std::string, CLI::App*> subs;

  const std::map<std::string, std::string> about = {
      {"kernel-report", "Upsilon, H_alpha and its small-t expansion for one kernel"},
      {"conditions", "existence and moment-boundedness gates, (alpha, q) choice"},
      {"weights", "analytic and scanned admissibility of a weight"},
      {"gr-profile", "G_rho(t; mu) on a geometric time grid and its tail class"},
      {"simulate", "one trajectory of the lattice equation"},
      {"moments", "Monte Carlo E||u(t)||^2_rho and the boundedness verdict"},
      {"invariant", "time-averaged occupation statistics and tightness quantiles"},
      {"factorization-check", "factorized vs direct stochastic convolution on one noise path"},
  };
  for (const auto& cmd : kCommands) {
    auto& a = args[cmd] = std::make_unique<SubcommandArgs>();
    CLI::App* sub = app.add_subcommand(cmd, about.at(cmd));
    add_common(sub, *a);
    for (const auto& k : schema(cmd)) {
      auto* opt = sub->add_option_function<std::string>(
          "--" + k.flag, [&a, key = k.key](const std::string& v) { a->flags[key] = v; }, k.help + " [" + k.key + "]");
      opt->type_name(k.type == ValueType::string ? "TEXT" : k.type == ValueType::boolean ? "BOOL" : "NUM");
    }
    subs[cmd] = sub;
  }
  auto& run_args = args["run"] = std::make_unique<SubcommandArgs>();
  CLI::App* run = app.add_subcommand("run", "run the command named in a config file or manifest");
  add_common(run, *run_args);
  run->get_option("--config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }
  SubcommandArgs& a = command.empty() ? *run_args : *args[command];

  try {
    json file = json::object();
    if (!a.config_path.empty()) file = load_json_file(a.config_path);
    if (command.empty()) {
      if (!file.contains("command") || !file["command"].is_string()) {
        throw ConfigError("command", "the config file does not name a command");
      }
      command = file["command"].get<std::string>();
      schema(command);
    }
    if (file.contains("config") && file.contains("command")) {
      // A manifest: its top-level command sits outside the flat config.
      json flat = file["config"];
      flat["command"] = file["command"];
      file = flat;
    }
    std::map<std::string, std::string> overrides = a.flags;
    for (const auto& s : a.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("set", "expected key=value, got '" + s + "'");
      overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (!a.output.empty()) overrides["output"] = a.output;
    if (a.threads >= 0) overrides["threads"] = std::to_string(a.threads);
    const RunConfig cfg = make_config(command, file, overrides);
    const json manifest = run_command(cfg, out);
    out << "wrote " << manifest["outputs"].size() + 1 << " files to " << manifest["runtime"]["output"].get<std::string>()
        << " (config " << manifest["config_hash"].get<std::string>() << ")\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

} // namespace shelab::cli
