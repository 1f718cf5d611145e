//! \file commands.hpp
//! Command dispatch and artifact writing for the shelab tool.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "shelab_cli/config.hpp"
#include "shelab/heatinit.hpp"
#include "shelab/kernels.hpp"
#include "shelab/lattice.hpp"
#include "shelab/solver.hpp"
#include "shelab/weights.hpp"

namespace shelab::cli {

//! Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

//! Every file goes through this writer, which refuses paths escaping the output directory.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);
  const std::filesystem::path& root() const { return root_; }
  void write_text(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const json& j);
  void write_field(const std::string& name, const FieldState& f);
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path resolve(const std::string& name);
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

//! Builders from a RunConfig. They raise ConfigError naming the flat key.
SpectralModel model_from(const RunConfig& cfg);
Weight weight_from(const RunConfig& cfg, int d, const std::string& prefix = "weight");
InitialDatum init_from(const RunConfig& cfg, int d);
LatticeGrid grid_from(const RunConfig& cfg);
SolverConfig solver_from(const RunConfig& cfg);
DiffusionCoefficient diffusion_from(const RunConfig& cfg, const SpectralModel& m);

//! Runs one command, writes its artifacts and manifest.json, and returns the manifest.
json run_command(const RunConfig& cfg, std::ostream& log);

//! Full command-line entry point. Returns the exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

//! Writes x with 17 significant digits, or "nan" / "inf" / "-inf".
std::string csv_number(double x);
//! JSON value for a double; non-finite values become null.
json json_number(double x);

} // namespace shelab::cli
