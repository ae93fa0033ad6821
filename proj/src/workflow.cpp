#include "levyfit/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "levyfit/asymptotics.hpp"
#include "levyfit/csv.hpp"
#include "levyfit/error.hpp"
#include "levyfit/gqmle.hpp"
#include "levyfit/noise.hpp"
#include "levyfit/residuals.hpp"

namespace levyfit {

namespace {

std::string g7(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

std::string out_path(const RunConfig& cfg, const RunOverrides& ov, const std::string& file) {
  std::string dir = ov.out ? *ov.out : (cfg.io.out ? *cfg.io.out : std::string("."));
  return (std::filesystem::path(dir) / file).string();
}

const ModelConfig& need_model(const RunConfig& cfg) {
  if (!cfg.model) fail(ErrorCategory::Schema, "/model: this command needs a model block");
  return *cfg.model;
}

std::optional<double> param_value(const ModelConfig& cfg, const std::string& name) {
  for (const auto& p : cfg.params)
    if (p.name == name) return p.value;
  return std::nullopt;
}

Vector values_for(const ModelConfig& cfg, const std::vector<std::string>& names, const char* what) {
  Vector v(static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto val = param_value(cfg, names[i]);
    if (!val) fail(ErrorCategory::Schema, "/model/params/" + names[i] + "/value: " + what + " value required");
    v[static_cast<Eigen::Index>(i)] = *val;
  }
  return v;
}

Dataset load_data(const RunConfig& cfg, const RunOverrides& ov) {
  std::optional<std::string> path = ov.data ? ov.data : cfg.io.data;
  if (!path) fail(ErrorCategory::InvalidArgument, "no data file given (--data or io.data)");
  return load_csv(*path, cfg.io.delta, cfg.io.time_column);
}

// start/box vector for one parameter group with optional per-name overrides
struct GroupBox {
  Vector lower, upper;
  std::optional<Vector> start;
};

GroupBox group_box(const std::vector<ParamSpec>& box, const FitSettings& fs) {
  GroupBox g;
  const auto p = static_cast<Eigen::Index>(box.size());
  g.lower.resize(p);
  g.upper.resize(p);
  bool any_start = false;
  Vector start(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const auto& spec = box[static_cast<std::size_t>(i)];
    g.lower[i] = fs.lower.count(spec.name) ? fs.lower.at(spec.name) : spec.lower;
    g.upper[i] = fs.upper.count(spec.name) ? fs.upper.at(spec.name) : spec.upper;
    if (fs.start.count(spec.name)) {
      any_start = true;
      start[i] = fs.start.at(spec.name);
    } else {
      start[i] = 0.5 * (g.lower[i] + g.upper[i]);
    }
  }
  if (any_start) g.start = start;
  return g;
}

void check_names(const std::map<std::string, double>& m, const std::vector<std::string>& known, const char* where) {
  for (const auto& [k, v] : m)
    if (std::find(known.begin(), known.end(), k) == known.end())
      fail(ErrorCategory::Schema, std::string(where) + "/" + k + ": not a model parameter");
}

std::string coefficient_table(const std::vector<std::string>& names, const Vector& est, const Vector* se) {
  std::size_t w = 4;
  for (const auto& n : names) w = std::max(w, n.size());
  std::string out = pad("", w + 2) + pad("Estimate", 16) + (se ? "Std. Error" : "") + "\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += pad(names[i], w + 2) + pad(g7(est[static_cast<Eigen::Index>(i)]), 16);
    if (se) out += g7((*se)[static_cast<Eigen::Index>(i)]);
    out += "\n";
  }
  return out;
}

std::string matrix_text(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += "  ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out += pad(g7(m(i, j)), 16);
    out += "\n";
  }
  return out;
}

}  // namespace

double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) fail(ErrorCategory::InvalidArgument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

TrueParams declared_values(const ModelConfig& cfg, const SdeModel& model) {
  TrueParams tp;
  tp.gamma = values_for(cfg, model.gamma_names(), "simulation");
  tp.alpha = values_for(cfg, model.alpha_names(), "simulation");
  tp.eta = values_for(cfg, model.eta_names(), "noise");
  return tp;
}

std::pair<Vector, Vector> noise_box(const SdeModel& model, const LawConfig& law) {
  const auto& eb = model.eta_box();
  if (!eb.empty()) {
    Vector lo(static_cast<Eigen::Index>(eb.size())), hi(static_cast<Eigen::Index>(eb.size()));
    for (std::size_t i = 0; i < eb.size(); ++i) {
      lo[static_cast<Eigen::Index>(i)] = eb[i].lower;
      hi[static_cast<Eigen::Index>(i)] = eb[i].upper;
    }
    return {lo, hi};
  }
  std::vector<const LawConfig*> parts;
  if (law.family == "product")
    for (const auto& c : law.components) parts.push_back(&c);
  else
    parts.push_back(&law);
  std::vector<double> lo, hi;
  for (const LawConfig* c : parts) {
    if (!c->standardized && (c->family == "bgamma" || c->family == "nts"))
      fail(ErrorCategory::Schema, "/model/params: non-standardized " + c->family + " needs explicit noise boxes");
    auto [l, h] = default_family_box(c->family);
    lo.insert(lo.end(), l.data(), l.data() + l.size());
    hi.insert(hi.end(), h.data(), h.data() + h.size());
  }
  return {Eigen::Map<Vector>(lo.data(), static_cast<Eigen::Index>(lo.size())),
          Eigen::Map<Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()))};
}

std::vector<std::pair<std::string, double>> load_coefficients(const std::string& path) {
  CsvTable t = read_csv(path);
  if (t.header.size() < 2 || t.header[0] != "name" || t.header[1] != "estimate")
    fail(ErrorCategory::Schema, path + ": expected header name,estimate,...");
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) out.emplace_back(t.rows[r][0], parse_cell(t, r, 1));
  return out;
}

// ---------- simulate ----------

CommandResult cmd_simulate(const RunConfig& cfg, const RunOverrides& ov) {
  const ModelConfig& mc = need_model(cfg);
  SdeModel model = build_model(mc);
  TrueParams tp = declared_values(mc, model);
  if (!cfg.sampling.terminal || !cfg.sampling.n)
    fail(ErrorCategory::Schema, "/sampling: terminal and n are required for simulate");
  SamplingScheme scheme{cfg.sampling.t0, *cfg.sampling.terminal, *cfg.sampling.n};
  scheme.validate();
  Vector x0 = Vector::Zero(static_cast<Eigen::Index>(model.dim()));
  if (!cfg.sampling.x0.empty()) {
    if (cfg.sampling.x0.size() != model.dim()) fail(ErrorCategory::Schema, "/sampling/x0: needs one value per state");
    for (std::size_t k = 0; k < model.dim(); ++k) x0[static_cast<Eigen::Index>(k)] = cfg.sampling.x0[k];
  }
  const std::uint64_t seed = ov.seed ? *ov.seed : cfg.sampling.seed;
  SimOutput sim = euler_simulate(model, tp, scheme, x0, seed);
  sim.dataset.names = mc.state_vars;

  CommandResult res;
  OutputStage stage;
  const std::string path = out_path(cfg, ov, "path.csv");
  const std::string noise = out_path(cfg, ov, "noise.csv");
  stage.add(path, dataset_to_csv(sim.dataset));
  stage.add(noise, noise_to_csv(sim));
  stage.commit();
  res.files = {path, noise};
  res.summary = "simulated T = " + g7(scheme.terminal - scheme.t0) + ", n = " + std::to_string(scheme.n) +
                ", h = " + g7(scheme.step()) + ", seed = " + std::to_string(seed) + "\n";
  return res;
}

// ---------- fit ----------

CommandResult cmd_fit(const RunConfig& cfg, const RunOverrides& ov) {
  const ModelConfig& mc = need_model(cfg);
  SdeModel model = build_model(mc);
  Dataset data = load_data(cfg, ov);
  if (data.dim() != model.dim())
    fail(ErrorCategory::Data, "data has " + std::to_string(data.dim()) + " state columns, model has " +
                                  std::to_string(model.dim()));
  FitSettings fs = cfg.fit;
  if (ov.mode) {
    fs.mode = *ov.mode;
    if (fs.mode != "noincr" && fs.mode != "incr" && fs.mode != "incrpar")
      fail(ErrorCategory::InvalidArgument, "--mode must be noincr, incr or incrpar");
  }
  if (ov.aggregation) fs.aggregation = *ov.aggregation;
  if (ov.seed) fs.seed = *ov.seed;
  const std::vector<std::string> all = model.all_names();
  check_names(fs.start, all, "/fit/start");
  check_names(fs.lower, all, "/fit/lower");
  check_names(fs.upper, all, "/fit/upper");
  check_names(fs.null_values, all, "/fit/null");

  GroupBox gb = group_box(model.gamma_box(), fs);
  GroupBox ab = group_box(model.alpha_box(), fs);
  FitConfig fc;
  fc.gamma_lower = gb.lower;
  fc.gamma_upper = gb.upper;
  fc.gamma_start = gb.start;
  fc.alpha_lower = ab.lower;
  fc.alpha_upper = ab.upper;
  fc.alpha_start = ab.start;
  fc.multistart_count = fs.multistart;
  fc.gradient_tol = fs.gradient_tol;
  fc.max_iters = fs.max_iters;
  fc.seed = fs.seed;
  GqmleFit fit = fit_gqmle(data, model, fc);

  std::vector<std::string> names = model.gamma_names();
  names.insert(names.end(), model.alpha_names().begin(), model.alpha_names().end());
  Vector est = fit.theta();
  std::optional<Vector> se;
  std::vector<double> neg2{fit.neg2_h1, fit.neg2_h2};
  std::string extra;
  OutputStage stage;
  CommandResult res;

  if (fs.mode != "noincr") {
    ResidualSeries rs = compute_residuals(data, model, fit.gamma_hat, fit.alpha_hat);
    if (fs.aggregation) {
      const std::string p = out_path(cfg, ov, "residuals_unit.csv");
      stage.add(p, unit_residuals_csv(rs.unit));
      res.files.push_back(p);
    } else {
      const std::string p = out_path(cfg, ov, "residuals_small.csv");
      stage.add(p, small_residuals_csv(rs.small, rs.small_times));
      res.files.push_back(p);
    }
    extra += "unit increments: " + std::to_string(rs.unit.rows()) + "\n";

    if (fs.mode == "incrpar") {
      MObjectivePtr obj = make_objective(model.law());
      auto [lo, hi] = noise_box(model, mc.law);
      NoiseFitConfig nc;
      bool any_start = false;
      Vector start = 0.5 * (lo + hi);
      for (std::size_t i = 0; i < model.eta_names().size(); ++i) {
        const std::string& nm = model.eta_names()[i];
        const auto ii = static_cast<Eigen::Index>(i);
        if (fs.lower.count(nm)) lo[ii] = fs.lower.at(nm);
        if (fs.upper.count(nm)) hi[ii] = fs.upper.at(nm);
        if (fs.start.count(nm)) {
          start[ii] = fs.start.at(nm);
          any_start = true;
        }
      }
      nc.lower = lo;
      nc.upper = hi;
      if (any_start) nc.start = start;
      nc.multistart_count = fs.multistart;
      nc.gradient_tol = fs.gradient_tol;
      nc.max_iters = fs.max_iters;
      nc.seed = RngStream(fs.seed).split(3).key();
      NoiseFit nf = fit_noise(rs.unit, *obj, rs.horizon, nc);
      neg2.push_back(nf.neg2_m_sum);
      names.insert(names.end(), model.eta_names().begin(), model.eta_names().end());
      Vector full(est.size() + nf.eta_hat.size());
      full << est, nf.eta_hat;
      est = full;

      NoiseInputs ni{obj.get(), nf.eta_hat};
      AsymptoticsReport rep = asymptotics(data, model, fit.gamma_hat, fit.alpha_hat, rs, ni);
      se = rep.std_errors;
      extra += "noise fit: H3 = " + g7(nf.h3_value) + ", converged = " + (nf.diagnostics.converged ? "yes" : "no") + "\n";
      extra += "residual moments (1/T sum dJ^3, 1/T sum dJ^4):";
      for (Eigen::Index a = 0; a < rep.moment4.size(); ++a) extra += " " + g7(rep.moment3[a]) + " " + g7(rep.moment4[a]);
      extra += "\n";
      extra += "Sigma_hat smallest eigenvalue: " + g7(rep.sigma_min_eigenvalue) + "\n";
      extra += "I_hat condition number: " + g7(rep.i_condition) + "\n";
      extra += "Gamma_hat:\n" + matrix_text(rep.gamma_hat);
      extra += "Sigma_hat:\n" + matrix_text(rep.sigma_hat);
      extra += "I_hat:\n" + matrix_text(rep.i_hat);
      if (!fs.null_values.empty()) {
        bool theta_ok = true, all_ok = true;
        Vector null(est.size());
        for (std::size_t i = 0; i < names.size(); ++i) {
          auto it = fs.null_values.find(names[i]);
          const bool have = it != fs.null_values.end();
          if (!have) {
            all_ok = false;
            if (i < static_cast<std::size_t>(fit.theta().size())) theta_ok = false;
          }
          null[static_cast<Eigen::Index>(i)] = have ? it->second : 0.0;
        }
        if (all_ok) {
          WaldResult w = wald(est, null, rep.i_hat, rep.sigma_hat, rep.horizon);
          extra += "Wald (joint): statistic = " + g7(w.statistic) + ", dof = " + std::to_string(w.dof) +
                   ", p-value = " + g7(w.p_value) + "\n";
        }
        if (theta_ok) {
          const auto p = fit.theta().size();
          WaldResult w = wald_theta(fit.theta(), null.head(p), rep.gamma_hat, rep.sigma_hat.topLeftCorner(p, p), rep.horizon);
          extra += "Wald (theta): statistic = " + g7(w.statistic) + ", dof = " + std::to_string(w.dof) +
                   ", p-value = " + g7(w.p_value) + "\n";
        }
      }
    }
  }

  std::string report;
  report += "n = " + std::to_string(data.steps()) + ", h = " + g7(data.delta) + ", T = " + g7(data.horizon()) + "\n";
  report += "mode: " + fs.mode + "\n\nCoefficients:\n";
  report += coefficient_table(names, est, se ? &*se : nullptr);
  report += "\n-2 log L:";
  for (double v : neg2) report += " " + g7(v);
  report += "\n";
  report += "scale stage: converged = " + std::string(fit.stage1.converged ? "yes" : "no") +
            ", projected gradient = " + g7(fit.stage1.projected_gradient) + "\n";
  report += "drift stage: converged = " + std::string(fit.stage2.converged ? "yes" : "no") +
            ", projected gradient = " + g7(fit.stage2.projected_gradient) + "\n";
  report += extra;

  std::string coef = "name,estimate,std_error\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    coef += names[i] + "," + format_double(est[static_cast<Eigen::Index>(i)]) + ",";
    if (se) coef += format_double((*se)[static_cast<Eigen::Index>(i)]);
    coef += "\n";
  }
  const std::string rp = out_path(cfg, ov, "report.txt");
  const std::string cp = out_path(cfg, ov, "coefficients.csv");
  stage.add(rp, report);
  stage.add(cp, coef);
  stage.commit();
  res.files.insert(res.files.begin(), {rp, cp});
  res.summary = report;
  return res;
}

// ---------- select ----------

CommandResult cmd_select(const RunConfig& cfg, const RunOverrides& ov) {
  std::optional<std::string> path = ov.residuals ? ov.residuals : (ov.data ? ov.data : cfg.io.data);
  if (!path) fail(ErrorCategory::InvalidArgument, "no residual file given (--residuals)");
  CsvTable head = read_csv(*path);
  if (head.header.empty() || head.header[0] != "i")
    fail(ErrorCategory::Schema, *path + ": expected unit residuals with header i,eps_1,...");
  RowMatrix all = load_residuals_csv(*path);
  const std::size_t comp = ov.component ? *ov.component : cfg.select.component;
  if (comp < 1 || comp > static_cast<std::size_t>(all.cols()))
    fail(ErrorCategory::InvalidArgument, "component " + std::to_string(comp) + " is out of range");
  RowMatrix unit = all.col(static_cast<Eigen::Index>(comp - 1));
  std::vector<std::string> fams = ov.families ? *ov.families : cfg.select.families;
  if (fams.empty()) fail(ErrorCategory::InvalidArgument, "no candidate families");
  std::vector<FamilyCandidate> cands;
  for (const auto& f : fams) cands.push_back(make_candidate(f));
  NoiseFitConfig base;
  base.multistart_count = cfg.fit.multistart;
  base.gradient_tol = cfg.fit.gradient_tol;
  base.max_iters = cfg.fit.max_iters;
  base.seed = ov.seed ? *ov.seed : cfg.fit.seed;
  // unit residuals: one row per unit of time
  const double horizon = static_cast<double>(unit.rows());
  auto rows = aic_select(unit, cands, horizon, base);
  std::vector<double> x(unit.data(), unit.data() + unit.rows());
  KernelDensity kde = kernel_density(x, cfg.select.bandwidth);

  OutputStage stage;
  const std::string sp = out_path(cfg, ov, "selection.csv");
  const std::string kp = out_path(cfg, ov, "kde.csv");
  stage.add(sp, selection_csv(rows));
  stage.add(kp, kernel_density_csv(kde));
  stage.commit();
  CommandResult res;
  res.files = {sp, kp};
  res.summary = pad("family", 10) + pad("k", 4) + pad("logL", 16) + pad("AIC", 16) + "rank\n";
  for (const auto& r : rows) {
    if (r.status == "ok")
      res.summary += pad(r.family, 10) + pad(std::to_string(r.k), 4) + pad(g7(r.log_lik), 16) + pad(g7(r.aic), 16) +
                     std::to_string(r.rank) + "\n";
    else
      res.summary += pad(r.family, 10) + pad(std::to_string(r.k), 4) + r.status + "\n";
  }
  res.summary += "kernel density bandwidth: " + g7(kde.bandwidth) + "\n";
  return res;
}

// ---------- forecast ----------

CommandResult cmd_forecast(const RunConfig& cfg, const RunOverrides& ov) {
  const ModelConfig& mc = need_model(cfg);
  SdeModel model = build_model(mc);
  Dataset data = load_data(cfg, ov);
  if (data.dim() != model.dim()) fail(ErrorCategory::Data, "data dimension does not match the model");
  if (!ov.coef) fail(ErrorCategory::InvalidArgument, "forecast needs --coef (coefficients.csv from fit)");
  if (!ov.residuals) fail(ErrorCategory::InvalidArgument, "forecast needs --residuals (small-time residual CSV)");
  auto coefs = load_coefficients(*ov.coef);
  auto lookup = [&](const std::string& name) {
    for (const auto& [n, v] : coefs)
      if (n == name) return v;
    fail(ErrorCategory::Schema, *ov.coef + ": missing coefficient '" + name + "'");
  };
  TrueParams tp;
  tp.gamma.resize(static_cast<Eigen::Index>(model.p_gamma()));
  tp.alpha.resize(static_cast<Eigen::Index>(model.p_alpha()));
  for (std::size_t i = 0; i < model.p_gamma(); ++i) tp.gamma[static_cast<Eigen::Index>(i)] = lookup(model.gamma_names()[i]);
  for (std::size_t i = 0; i < model.p_alpha(); ++i) tp.alpha[static_cast<Eigen::Index>(i)] = lookup(model.alpha_names()[i]);

  CsvTable rt = read_csv(*ov.residuals);
  if (rt.header.size() < 3 || rt.header[0] != "j" || rt.header[1] != "t_j")
    fail(ErrorCategory::Schema, *ov.residuals + ": expected small-time residuals with header j,t_j,dJ_1,...");
  if (rt.rows.size() < 2) fail(ErrorCategory::Data, *ov.residuals + ": need at least 2 residuals");
  RowMatrix small = load_residuals_csv(*ov.residuals);
  if (static_cast<std::size_t>(small.cols()) != model.dim())
    fail(ErrorCategory::Data, "residual columns do not match the model dimension");
  const double dt = parse_cell(rt, 1, 1) - parse_cell(rt, 0, 1);
  if (!(dt > 0.0) || std::abs(dt - data.delta) > 1e-9 * data.delta)
    fail(ErrorCategory::InvalidArgument, "horizon/grid mismatch: residual spacing " + g7(dt) +
                                             " differs from the data spacing " + g7(data.delta));
  const double horizon = ov.horizon ? *ov.horizon : (cfg.forecast.horizon ? *cfg.forecast.horizon : 0.0);
  if (!(horizon > 0.0)) fail(ErrorCategory::InvalidArgument, "forecast needs a positive --horizon");
  const double steps_real = horizon / data.delta;
  const double steps_round = std::nearbyint(steps_real);
  if (steps_round < 1.0 || std::abs(steps_real - steps_round) > 1e-9 * std::max(1.0, steps_real))
    fail(ErrorCategory::InvalidArgument, "horizon/grid mismatch: horizon " + g7(horizon) +
                                             " is not a whole number of steps of " + g7(data.delta));
  const auto nsteps = static_cast<std::size_t>(steps_round);
  const std::size_t reps = ov.reps ? *ov.reps : cfg.forecast.reps;
  if (reps < 1) fail(ErrorCategory::InvalidArgument, "reps must be at least 1");
  const std::uint64_t seed = ov.seed ? *ov.seed : cfg.forecast.seed;

  const std::size_t d = model.dim();
  LawPtr emp;
  if (d == 1) {
    emp = std::make_shared<EmpiricalLaw>(std::vector<double>(small.data(), small.data() + small.rows()), data.delta);
  } else {
    std::vector<LawPtr> comps;
    for (std::size_t k = 0; k < d; ++k) {
      std::vector<double> col(static_cast<std::size_t>(small.rows()));
      for (Eigen::Index j = 0; j < small.rows(); ++j) col[static_cast<std::size_t>(j)] = small(j, static_cast<Eigen::Index>(k));
      comps.push_back(std::make_shared<EmpiricalLaw>(std::move(col), data.delta));
    }
    emp = std::make_shared<ProductLaw>(std::move(comps));
  }
  tp.eta = Vector(0);
  const double t_last = data.times.back();
  SamplingScheme scheme{t_last, t_last + static_cast<double>(nsteps) * data.delta, nsteps};
  Vector x0 = data.values.row(data.values.rows() - 1).transpose();
  std::vector<RowMatrix> paths;
  paths.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    SimOutput s = euler_simulate(model, tp, scheme, x0, replicate_seed(seed, r), emp);
    paths.push_back(std::move(s.dataset.values));
  }
  const std::vector<std::string>& sv = mc.state_vars;
  std::string fan = "t";
  for (std::size_t r = 0; r < reps; ++r)
    for (std::size_t k = 0; k < d; ++k) fan += ",path_" + std::to_string(r + 1) + (d > 1 ? "_" + sv[k] : "");
  fan += "\n";
  std::string qs = "t";
  for (std::size_t k = 0; k < d; ++k) {
    const std::string suf = d > 1 ? "_" + sv[k] : "";
    qs += ",q05" + suf + ",q50" + suf + ",q95" + suf;
  }
  qs += "\n";
  std::vector<double> col(reps);
  std::vector<double> final_median(d);
  for (std::size_t j = 0; j <= nsteps; ++j) {
    const std::string t = format_double(t_last + static_cast<double>(j) * data.delta);
    fan += t;
    qs += t;
    for (std::size_t r = 0; r < reps; ++r)
      for (std::size_t k = 0; k < d; ++k) fan += "," + format_double(paths[r](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)));
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t r = 0; r < reps; ++r) col[r] = paths[r](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      const double med = sample_quantile(col, 0.5);
      qs += "," + format_double(sample_quantile(col, 0.05)) + "," + format_double(med) + "," +
            format_double(sample_quantile(col, 0.95));
      if (j == nsteps) final_median[k] = med;
    }
    fan += "\n";
    qs += "\n";
  }
  OutputStage stage;
  const std::string fp = out_path(cfg, ov, "forecast_paths.csv");
  const std::string qp = out_path(cfg, ov, "forecast_quantiles.csv");
  stage.add(fp, fan);
  stage.add(qp, qs);
  stage.commit();
  CommandResult res;
  res.files = {fp, qp};
  res.summary = "forecast horizon = " + g7(horizon) + " (" + std::to_string(nsteps) + " steps), reps = " +
                std::to_string(reps) + ", seed = " + std::to_string(seed) + "\nfinal median:";
  for (double m : final_median) res.summary += " " + g7(m);
  res.summary += "\n";
  return res;
}

}  // namespace levyfit
