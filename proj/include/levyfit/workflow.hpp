#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levyfit/config.hpp"
#include "levyfit/sim.hpp"

namespace levyfit {

/// Command-line values that take precedence over the config file.
struct RunOverrides {
  std::optional<std::string> data, out, mode, coef, residuals;
  std::optional<bool> aggregation;
  std::optional<std::vector<std::string>> families;
  std::optional<double> horizon;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> component;
};

struct CommandResult {
  std::string summary;             // human-readable, printed by the CLI
  std::vector<std::string> files;  // written paths
};

/// Writes path.csv and noise.csv.
CommandResult cmd_simulate(const RunConfig& cfg, const RunOverrides& ov = {});
/// Writes report.txt, coefficients.csv and (incr/incrpar) residual CSVs.
CommandResult cmd_fit(const RunConfig& cfg, const RunOverrides& ov = {});
/// Writes selection.csv and kde.csv from unit residuals.
CommandResult cmd_select(const RunConfig& cfg, const RunOverrides& ov = {});
/// Writes forecast_paths.csv and forecast_quantiles.csv.
CommandResult cmd_forecast(const RunConfig& cfg, const RunOverrides& ov = {});

/// Parameter values declared in the model block (gamma, alpha, eta).
TrueParams declared_values(const ModelConfig& cfg, const SdeModel& model);

/// Noise box: declared eta boxes, else the default box of each family.
std::pair<Vector, Vector> noise_box(const SdeModel& model, const LawConfig& law);

/// Reads `name,estimate,...` coefficient CSV into a name -> value list.
std::vector<std::pair<std::string, double>> load_coefficients(const std::string& path);

/// Type-7 sample quantile.
double sample_quantile(std::vector<double> values, double q);

}  // namespace levyfit
