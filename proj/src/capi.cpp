#include "levyfit/levyfit.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "levyfit/config.hpp"
#include "levyfit/csv.hpp"
#include "levyfit/error.hpp"
#include "levyfit/gqmle.hpp"
#include "levyfit/residuals.hpp"
#include "levyfit/sim.hpp"
#include "levyfit/workflow.hpp"

struct lf_config {
  levyfit::RunConfig cfg;
};
struct lf_model {
  levyfit::SdeModel model;
};
struct lf_dataset {
  levyfit::Dataset data;
};

namespace {

thread_local std::string g_last_error;

lf_status to_status(levyfit::ErrorCategory c) {
  return static_cast<lf_status>(static_cast<int>(c) + 1);
}

template <class F>
lf_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return LF_OK;
  } catch (const levyfit::Error& e) {
    g_last_error = e.what();
    return to_status(e.category());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return LF_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) levyfit::fail(levyfit::ErrorCategory::InvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

levyfit::Vector vec(const double* p, std::size_t n) {
  levyfit::Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = p[i];
  return v;
}

levyfit::RunOverrides overrides(const lf_run_options* o) {
  levyfit::RunOverrides ov;
  if (!o) return ov;
  if (o->data) ov.data = o->data;
  if (o->out) ov.out = o->out;
  if (o->mode) ov.mode = o->mode;
  if (o->coef) ov.coef = o->coef;
  if (o->residuals) ov.residuals = o->residuals;
  if (o->families) {
    std::vector<std::string> fams;
    std::stringstream ss(o->families);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) fams.push_back(item);
    ov.families = fams;
  }
  if (o->has_aggregation) ov.aggregation = o->aggregation != 0;
  if (o->has_seed) ov.seed = o->seed;
  if (o->has_horizon) ov.horizon = o->horizon;
  if (o->has_reps) ov.reps = o->reps;
  if (o->has_component) ov.component = o->component;
  return ov;
}

using Command = levyfit::CommandResult (*)(const levyfit::RunConfig&, const levyfit::RunOverrides&);

lf_status run_command(Command cmd, const lf_config* cfg, const lf_run_options* opts, char** summary) {
  return guard([&] {
    need(cfg, "config");
    if (summary) *summary = nullptr;
    levyfit::CommandResult r = cmd(cfg->cfg, overrides(opts));
    if (summary) *summary = dup_string(r.summary);
  });
}

}  // namespace

extern "C" {

const char* lf_last_error(void) { return g_last_error.c_str(); }

const char* lf_status_name(lf_status status) {
  if (status == LF_OK) return "ok";
  if (status < LF_ERR_INVALID_ARGUMENT || status > LF_ERR_INTERNAL) return "unknown";
  return levyfit::category_name(static_cast<levyfit::ErrorCategory>(static_cast<int>(status) - 1));
}

const char* lf_version(void) { return "0.1.0"; }

void lf_string_free(char* s) { std::free(s); }

lf_status lf_config_load(const char* path, lf_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new lf_config{levyfit::load_config(path)};
  });
}

lf_status lf_config_parse(const char* json_text, lf_config** out) {
  return guard([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = nullptr;
    *out = new lf_config{levyfit::parse_config(json_text)};
  });
}

void lf_config_free(lf_config* cfg) { delete cfg; }

void lf_run_options_init(lf_run_options* opts) {
  if (opts) *opts = lf_run_options{};
}

lf_status lf_cmd_simulate(const lf_config* cfg, const lf_run_options* opts, char** summary) {
  return run_command(&levyfit::cmd_simulate, cfg, opts, summary);
}
lf_status lf_cmd_fit(const lf_config* cfg, const lf_run_options* opts, char** summary) {
  return run_command(&levyfit::cmd_fit, cfg, opts, summary);
}
lf_status lf_cmd_select(const lf_config* cfg, const lf_run_options* opts, char** summary) {
  return run_command(&levyfit::cmd_select, cfg, opts, summary);
}
lf_status lf_cmd_forecast(const lf_config* cfg, const lf_run_options* opts, char** summary) {
  return run_command(&levyfit::cmd_forecast, cfg, opts, summary);
}

lf_status lf_model_from_config(const lf_config* cfg, lf_model** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "out");
    *out = nullptr;
    if (!cfg->cfg.model) levyfit::fail(levyfit::ErrorCategory::Schema, "/model: missing");
    *out = new lf_model{levyfit::build_model(*cfg->cfg.model)};
  });
}

void lf_model_free(lf_model* model) { delete model; }

lf_status lf_model_sizes(const lf_model* model, size_t* dim, size_t* p_gamma, size_t* p_alpha, size_t* p_eta) {
  return guard([&] {
    need(model, "model");
    if (dim) *dim = model->model.dim();
    if (p_gamma) *p_gamma = model->model.p_gamma();
    if (p_alpha) *p_alpha = model->model.p_alpha();
    if (p_eta) *p_eta = model->model.p_eta();
  });
}

lf_status lf_model_param_name(const lf_model* model, size_t index, char** name) {
  return guard([&] {
    need(model, "model");
    need(name, "name");
    auto names = model->model.all_names();
    if (index >= names.size())
      levyfit::fail(levyfit::ErrorCategory::InvalidArgument, "parameter index " + std::to_string(index) + " out of range");
    *name = dup_string(names[index]);
  });
}

lf_status lf_dataset_load(const char* path, double delta, lf_dataset** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    std::optional<double> d;
    if (delta > 0.0) d = delta;
    *out = new lf_dataset{levyfit::load_csv(path, d)};
  });
}

lf_status lf_dataset_from_array(const double* values, size_t rows, size_t dim, double delta, double t0,
                                lf_dataset** out) {
  return guard([&] {
    need(values, "values");
    need(out, "out");
    *out = nullptr;
    levyfit::RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
    std::copy(values, values + rows * dim, m.data());
    *out = new lf_dataset{levyfit::make_dataset(std::move(m), delta, t0)};
  });
}

void lf_dataset_free(lf_dataset* ds) { delete ds; }

lf_status lf_dataset_shape(const lf_dataset* ds, size_t* rows, size_t* dim, double* delta) {
  return guard([&] {
    need(ds, "dataset");
    if (rows) *rows = static_cast<size_t>(ds->data.values.rows());
    if (dim) *dim = ds->data.dim();
    if (delta) *delta = ds->data.delta;
  });
}

lf_status lf_dataset_values(const lf_dataset* ds, double* out) {
  return guard([&] {
    need(ds, "dataset");
    need(out, "out");
    std::copy(ds->data.values.data(), ds->data.values.data() + ds->data.values.size(), out);
  });
}

lf_status lf_simulate(const lf_model* model, const double* gamma, const double* alpha, const double* eta, double t0,
                      double terminal, size_t n, const double* x0, uint64_t seed, lf_dataset** path, double* noise) {
  return guard([&] {
    need(model, "model");
    need(path, "path");
    *path = nullptr;
    const auto& m = model->model;
    if (m.p_gamma()) need(gamma, "gamma");
    if (m.p_alpha()) need(alpha, "alpha");
    if (m.p_eta()) need(eta, "eta");
    need(x0, "x0");
    levyfit::TrueParams tp{vec(gamma, m.p_gamma()), vec(alpha, m.p_alpha()), vec(eta, m.p_eta())};
    levyfit::SamplingScheme scheme{t0, terminal, n};
    scheme.validate();
    levyfit::SimOutput sim = levyfit::euler_simulate(m, tp, scheme, vec(x0, m.dim()), seed);
    if (noise) std::copy(sim.noise_increments.data(), sim.noise_increments.data() + sim.noise_increments.size(), noise);
    *path = new lf_dataset{std::move(sim.dataset)};
  });
}

lf_status lf_h1(const lf_dataset* ds, const lf_model* model, const double* gamma, double* value, double* grad) {
  return guard([&] {
    need(ds, "dataset");
    need(model, "model");
    need(value, "value");
    const auto& m = model->model;
    if (m.p_gamma()) need(gamma, "gamma");
    levyfit::Vector g;
    *value = levyfit::h1(ds->data, m, vec(gamma, m.p_gamma()), grad ? &g : nullptr);
    if (grad) std::copy(g.data(), g.data() + g.size(), grad);
  });
}

lf_status lf_h2(const lf_dataset* ds, const lf_model* model, const double* gamma_hat, const double* alpha,
                double* value, double* grad) {
  return guard([&] {
    need(ds, "dataset");
    need(model, "model");
    need(value, "value");
    const auto& m = model->model;
    if (m.p_gamma()) need(gamma_hat, "gamma_hat");
    if (m.p_alpha()) need(alpha, "alpha");
    levyfit::Vector g;
    *value = levyfit::h2(ds->data, m, vec(gamma_hat, m.p_gamma()), vec(alpha, m.p_alpha()), grad ? &g : nullptr);
    if (grad) std::copy(g.data(), g.data() + g.size(), grad);
  });
}

lf_status lf_fit_gqmle(const lf_dataset* ds, const lf_model* model, int multistart, uint64_t seed, double* gamma_hat,
                       double* alpha_hat) {
  return guard([&] {
    need(ds, "dataset");
    need(model, "model");
    need(gamma_hat, "gamma_hat");
    need(alpha_hat, "alpha_hat");
    levyfit::FitConfig fc;
    fc.multistart_count = multistart;
    fc.seed = seed;
    levyfit::GqmleFit fit = levyfit::fit_gqmle(ds->data, model->model, fc);
    std::copy(fit.gamma_hat.data(), fit.gamma_hat.data() + fit.gamma_hat.size(), gamma_hat);
    std::copy(fit.alpha_hat.data(), fit.alpha_hat.data() + fit.alpha_hat.size(), alpha_hat);
  });
}

lf_status lf_residuals(const lf_dataset* ds, const lf_model* model, const double* gamma, const double* alpha,
                       double* small, double* unit, size_t* unit_rows) {
  return guard([&] {
    need(ds, "dataset");
    need(model, "model");
    const auto& m = model->model;
    if (m.p_gamma()) need(gamma, "gamma");
    if (m.p_alpha()) need(alpha, "alpha");
    levyfit::ResidualSeries rs =
        levyfit::compute_residuals(ds->data, m, vec(gamma, m.p_gamma()), vec(alpha, m.p_alpha()));
    if (small) std::copy(rs.small.data(), rs.small.data() + rs.small.size(), small);
    if (unit) std::copy(rs.unit.data(), rs.unit.data() + rs.unit.size(), unit);
    if (unit_rows) *unit_rows = static_cast<size_t>(rs.unit.rows());
  });
}

}  // extern "C"
