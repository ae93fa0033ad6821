// levyfit command-line entry point; talks to the library only through the C API.
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "levyfit/levyfit.h"

namespace {

int report_failure(lf_status st) {
  std::fprintf(stderr, "error[%s]: %s\n", lf_status_name(st), lf_last_error());
  return static_cast<int>(st);
}

struct Flags {
  std::string config;
  std::optional<std::string> data, out, mode, families, coef, residuals;
  std::optional<std::string> aggregation;
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  std::optional<std::size_t> reps, component;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levyfit: simulate and estimate Levy-driven SDEs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lf_version()));
  Flags f;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", f.config, "JSON run configuration");
    if (config_required) c->required();
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "master seed");
  };
  CLI::App* sim = app.add_subcommand("simulate", "Euler-simulate a path and its noise increments");
  add_common(sim, true);

  CLI::App* fit = app.add_subcommand("fit", "stepwise quasi-likelihood fit, residuals and noise fit");
  add_common(fit, true);
  fit->add_option("--data", f.data, "observations CSV");
  fit->add_option("--mode", f.mode, "noincr|incr|incrpar")->check(CLI::IsMember({"noincr", "incr", "incrpar"}));
  fit->add_option("--aggregation", f.aggregation, "true|false")->check(CLI::IsMember({"true", "false"}));

  CLI::App* sel = app.add_subcommand("select", "AIC selection of the noise family on unit residuals");
  add_common(sel, false);
  sel->add_option("--residuals,--data", f.residuals, "unit residual CSV");
  sel->add_option("--families", f.families, "comma-separated family list");
  sel->add_option("--component", f.component, "residual column (1-based)");

  CLI::App* fc = app.add_subcommand("forecast", "resample small-time residuals forward from the last state");
  add_common(fc, true);
  fc->add_option("--data", f.data, "observations CSV");
  fc->add_option("--coef", f.coef, "coefficients.csv from fit")->required();
  fc->add_option("--residuals", f.residuals, "small-time residual CSV")->required();
  fc->add_option("--horizon", f.horizon, "forecast horizon in time units");
  fc->add_option("--reps", f.reps, "number of forward paths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    if (rc == 0) return 0;
    std::fprintf(stderr, "error[%s]: command line\n", lf_status_name(LF_ERR_INVALID_ARGUMENT));
    return static_cast<int>(LF_ERR_INVALID_ARGUMENT);
  }

  lf_config* cfg = nullptr;
  lf_status st = f.config.empty() ? lf_config_parse("{}", &cfg) : lf_config_load(f.config.c_str(), &cfg);
  if (st != LF_OK) return report_failure(st);

  lf_run_options opts;
  lf_run_options_init(&opts);
  if (f.data) opts.data = f.data->c_str();
  if (f.out) opts.out = f.out->c_str();
  if (f.mode) opts.mode = f.mode->c_str();
  if (f.families) opts.families = f.families->c_str();
  if (f.coef) opts.coef = f.coef->c_str();
  if (f.residuals) opts.residuals = f.residuals->c_str();
  if (f.aggregation) {
    opts.has_aggregation = 1;
    opts.aggregation = *f.aggregation == "true";
  }
  if (f.seed) {
    opts.has_seed = 1;
    opts.seed = *f.seed;
  }
  if (f.horizon) {
    opts.has_horizon = 1;
    opts.horizon = *f.horizon;
  }
  if (f.reps) {
    opts.has_reps = 1;
    opts.reps = *f.reps;
  }
  if (f.component) {
    opts.has_component = 1;
    opts.component = *f.component;
  }

  char* summary = nullptr;
  if (sim->parsed())
    st = lf_cmd_simulate(cfg, &opts, &summary);
  else if (fit->parsed())
    st = lf_cmd_fit(cfg, &opts, &summary);
  else if (sel->parsed())
    st = lf_cmd_select(cfg, &opts, &summary);
  else
    st = lf_cmd_forecast(cfg, &opts, &summary);
  lf_config_free(cfg);
  if (st != LF_OK) return report_failure(st);
  std::fputs(summary, stdout);
  lf_string_free(summary);
  return 0;
}
