#include "levyfit/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "levyfit/error.hpp"

namespace levyfit {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void schema(const std::string& ptr, const std::string& msg) {
  fail(ErrorCategory::Schema, (ptr.empty() ? std::string("/") : ptr) + ": " + msg);
}

std::string escape_key(const std::string& k) {
  std::string out;
  for (char c : k) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// Object view that rejects keys outside the allowed set.
class Obj {
 public:
  Obj(const json& j, std::string ptr, std::set<std::string> allowed) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) schema(ptr_, "expected an object");
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!allowed.count(it.key())) schema(child(it.key()), "unknown key");
  }
  bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }
  const json& at(const std::string& k) const { return j_.at(k); }
  std::string child(const std::string& k) const { return ptr_ + "/" + escape_key(k); }
  const std::string& ptr() const { return ptr_; }

  double num(const std::string& k) const {
    const json& v = at(k);
    if (!v.is_number()) schema(child(k), "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) schema(child(k), "expected a finite number");
    return d;
  }
  std::optional<double> opt_num(const std::string& k) const { return has(k) ? std::optional<double>(num(k)) : std::nullopt; }
  std::string str(const std::string& k) const {
    if (!at(k).is_string()) schema(child(k), "expected a string");
    return at(k).get<std::string>();
  }
  bool boolean(const std::string& k) const {
    if (!at(k).is_boolean()) schema(child(k), "expected true or false");
    return at(k).get<bool>();
  }
  std::uint64_t u64(const std::string& k) const {
    const json& v = at(k);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      schema(child(k), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  int positive_int(const std::string& k) const {
    std::uint64_t v = u64(k);
    if (v < 1 || v > 100000000) schema(child(k), "expected a positive integer");
    return static_cast<int>(v);
  }

 private:
  const json& j_;
  std::string ptr_;
};

std::vector<std::string> string_list(const json& v, const std::string& ptr) {
  std::vector<std::string> out;
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) schema(ptr, "expected a string or an array of strings");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) schema(ptr + "/" + std::to_string(i), "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

std::map<std::string, double> number_map(const json& v, const std::string& ptr) {
  if (!v.is_object()) schema(ptr, "expected an object of numbers");
  std::map<std::string, double> out;
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (!it.value().is_number()) schema(ptr + "/" + escape_key(it.key()), "expected a number");
    out[it.key()] = it.value().get<double>();
  }
  return out;
}

LawConfig parse_law(const json& j, const std::string& ptr) {
  Obj o(j, ptr, {"family", "standardized", "labels", "components"});
  LawConfig law;
  if (!o.has("family")) schema(ptr, "missing key 'family'");
  law.family = o.str("family");
  static const std::set<std::string> fams{"gaussian", "vg", "bgamma", "nts", "product"};
  if (!fams.count(law.family)) schema(o.child("family"), "unknown law family '" + law.family + "'");
  if (o.has("standardized")) law.standardized = o.boolean("standardized");
  if (o.has("labels")) law.labels = string_list(o.at("labels"), o.child("labels"));
  if (law.family == "product") {
    if (!o.has("components") || !o.at("components").is_array() || o.at("components").empty())
      schema(o.child("components"), "product law needs a nonempty array of components");
    if (!law.labels.empty()) schema(o.child("labels"), "product labels come from the components");
    const json& comps = o.at("components");
    for (std::size_t i = 0; i < comps.size(); ++i) {
      LawConfig c = parse_law(comps[i], o.child("components") + "/" + std::to_string(i));
      if (c.family == "product") schema(o.child("components") + "/" + std::to_string(i), "nested products are not supported");
      law.components.push_back(std::move(c));
    }
  } else if (o.has("components")) {
    schema(o.child("components"), "only product laws take components");
  }
  return law;
}

ModelConfig parse_model(const json& j, const std::string& ptr) {
  Obj o(j, ptr, {"state_vars", "drift", "scale", "law", "params", "state_box"});
  ModelConfig m;
  for (const char* k : {"state_vars", "drift", "scale", "law"})
    if (!o.has(k)) schema(ptr, std::string("missing key '") + k + "'");
  m.state_vars = string_list(o.at("state_vars"), o.child("state_vars"));
  m.drift = string_list(o.at("drift"), o.child("drift"));
  const json& sc = o.at("scale");
  const std::string sp = o.child("scale");
  if (sc.is_string()) {
    m.scale = {{sc.get<std::string>()}};
  } else if (sc.is_array() && !sc.empty() && sc[0].is_array()) {
    for (std::size_t r = 0; r < sc.size(); ++r) {
      if (!sc[r].is_array()) schema(sp + "/" + std::to_string(r), "expected an array of strings");
      m.scale.push_back(string_list(sc[r], sp + "/" + std::to_string(r)));
    }
  } else if (sc.is_array()) {
    // diagonal entries
    auto diag = string_list(sc, sp);
    for (std::size_t r = 0; r < diag.size(); ++r) {
      std::vector<std::string> row(diag.size(), "0");
      row[r] = diag[r];
      m.scale.push_back(row);
    }
  } else {
    schema(sp, "expected a string, an array (diagonal) or an array of rows");
  }
  m.law = parse_law(o.at("law"), o.child("law"));
  if (o.has("params")) {
    const json& ps = o.at("params");
    if (!ps.is_object()) schema(o.child("params"), "expected an object keyed by parameter name");
    for (auto it = ps.begin(); it != ps.end(); ++it) {
      Obj p(it.value(), o.child("params") + "/" + escape_key(it.key()), {"lower", "upper", "value"});
      ParamConfig pc;
      pc.name = it.key();
      pc.lower = p.opt_num("lower");
      pc.upper = p.opt_num("upper");
      pc.value = p.opt_num("value");
      m.params.push_back(pc);
    }
  }
  if (o.has("state_box")) {
    const json& sb = o.at("state_box");
    const std::string bp = o.child("state_box");
    if (!sb.is_array()) schema(bp, "expected an array of [lower, upper] pairs");
    for (std::size_t i = 0; i < sb.size(); ++i) {
      const json& e = sb[i];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        schema(bp + "/" + std::to_string(i), "expected [lower, upper]");
      m.state_box.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

LawPtr build_law(const LawConfig& cfg) {
  if (cfg.family == "product") {
    std::vector<LawPtr> comps;
    for (const auto& c : cfg.components) comps.push_back(build_law(c));
    return std::make_shared<ProductLaw>(std::move(comps));
  }
  return make_law(cfg.family, cfg.standardized, cfg.labels);
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    auto pos = msg.find("]: ");
    if (pos != std::string::npos) msg = msg.substr(pos + 3);
    fail(ErrorCategory::Parse, source + ": " + line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + msg);
  }
  RunConfig cfg;
  try {
    Obj o(root, "", {"model", "sampling", "fit", "io", "select", "forecast"});
    if (o.has("model")) cfg.model = parse_model(o.at("model"), "/model");
    if (o.has("sampling")) {
      Obj s(o.at("sampling"), "/sampling", {"t0", "terminal", "n", "x0", "seed"});
      if (s.has("t0")) cfg.sampling.t0 = s.num("t0");
      cfg.sampling.terminal = s.opt_num("terminal");
      if (s.has("n")) cfg.sampling.n = s.u64("n");
      if (s.has("x0")) {
        const json& x = s.at("x0");
        if (x.is_number()) {
          cfg.sampling.x0 = {x.get<double>()};
        } else if (x.is_array()) {
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (!x[i].is_number()) schema("/sampling/x0/" + std::to_string(i), "expected a number");
            cfg.sampling.x0.push_back(x[i].get<double>());
          }
        } else {
          schema("/sampling/x0", "expected a number or an array of numbers");
        }
      }
      if (s.has("seed")) cfg.sampling.seed = s.u64("seed");
    }
    if (o.has("fit")) {
      Obj f(o.at("fit"), "/fit",
            {"start", "lower", "upper", "null", "multistart", "gradient_tol", "max_iters", "seed", "mode", "aggregation"});
      if (f.has("start")) cfg.fit.start = number_map(f.at("start"), "/fit/start");
      if (f.has("lower")) cfg.fit.lower = number_map(f.at("lower"), "/fit/lower");
      if (f.has("upper")) cfg.fit.upper = number_map(f.at("upper"), "/fit/upper");
      if (f.has("null")) cfg.fit.null_values = number_map(f.at("null"), "/fit/null");
      if (f.has("multistart")) {
        std::uint64_t v = f.u64("multistart");
        if (v > 10000) schema("/fit/multistart", "too many starts");
        cfg.fit.multistart = static_cast<int>(v);
      }
      if (f.has("gradient_tol")) {
        cfg.fit.gradient_tol = f.num("gradient_tol");
        if (!(cfg.fit.gradient_tol > 0.0)) schema("/fit/gradient_tol", "expected a positive number");
      }
      if (f.has("max_iters")) cfg.fit.max_iters = f.positive_int("max_iters");
      if (f.has("seed")) cfg.fit.seed = f.u64("seed");
      if (f.has("mode")) {
        cfg.fit.mode = f.str("mode");
        if (cfg.fit.mode != "noincr" && cfg.fit.mode != "incr" && cfg.fit.mode != "incrpar")
          schema("/fit/mode", "expected noincr, incr or incrpar");
      }
      if (f.has("aggregation")) cfg.fit.aggregation = f.boolean("aggregation");
    }
    if (o.has("io")) {
      Obj io(o.at("io"), "/io", {"data", "delta", "time_column", "out"});
      if (io.has("data")) cfg.io.data = io.str("data");
      if (io.has("delta")) {
        cfg.io.delta = io.num("delta");
        if (!(*cfg.io.delta > 0.0)) schema("/io/delta", "expected a positive number");
      }
      if (io.has("time_column")) cfg.io.time_column = io.boolean("time_column");
      if (io.has("out")) cfg.io.out = io.str("out");
    }
    if (o.has("select")) {
      Obj s(o.at("select"), "/select", {"families", "component", "bandwidth"});
      if (s.has("families")) cfg.select.families = string_list(s.at("families"), "/select/families");
      if (s.has("component")) cfg.select.component = static_cast<std::size_t>(s.positive_int("component"));
      if (s.has("bandwidth")) cfg.select.bandwidth = s.num("bandwidth");
    }
    if (o.has("forecast")) {
      Obj fc(o.at("forecast"), "/forecast", {"horizon", "reps", "seed"});
      cfg.forecast.horizon = fc.opt_num("horizon");
      if (fc.has("reps")) cfg.forecast.reps = static_cast<std::size_t>(fc.positive_int("reps"));
      if (fc.has("seed")) cfg.forecast.seed = fc.u64("seed");
    }
  } catch (const json::exception& e) {
    fail(ErrorCategory::Schema, source + ": " + e.what());
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::Schema) fail(ErrorCategory::Schema, source + ": " + e.what());
    throw;
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::Io, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

SdeModel build_model(const ModelConfig& cfg) {
  SdeModel::Spec spec;
  spec.state_vars = cfg.state_vars;
  spec.drift = cfg.drift;
  spec.scale = cfg.scale;
  spec.law = build_law(cfg.law);
  spec.state_box = cfg.state_box;
  for (const auto& p : cfg.params) {
    if (!p.lower || !p.upper) {
      if (p.lower || p.upper)
        fail(ErrorCategory::Schema, "/model/params/" + escape_key(p.name) + ": give both lower and upper");
      continue;  // value-only entry (e.g. a noise parameter used for simulation)
    }
    spec.params.push_back({p.name, *p.lower, *p.upper});
  }
  return SdeModel::build(spec);
}

}  // namespace levyfit
