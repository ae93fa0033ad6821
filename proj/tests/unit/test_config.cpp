#include <string>

#include "doctest.h"
#include "levyfit/config.hpp"
#include "levyfit/error.hpp"

using namespace levyfit;

namespace {

std::string src(const std::string& rel) { return std::string(LEVYFIT_SOURCE_DIR) + "/" + rel; }

Error error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error raised");
  return Error(ErrorCategory::Internal, "");
}

const char* kMinimal = R"json({
  "model": {
    "state_vars": ["X"],
    "drift": "alpha*(1-X)",
    "scale": "gamma",
    "law": {"family": "vg"},
    "params": {"alpha": {"lower": 0.1, "upper": 2}, "gamma": {"lower": 0.1, "upper": 2}}
  }
})json";

}  // namespace

TEST_CASE("shipped configs parse and build") {
  for (const char* f : {"configs/ou_vg.json", "configs/logprice.json", "configs/bivariate_vg.json"}) {
    INFO(f);
    RunConfig cfg = load_config(src(f));
    REQUIRE(cfg.model);
    SdeModel m = build_model(*cfg.model);
    CHECK(m.dim() == cfg.model->state_vars.size());
  }
  RunConfig ou = load_config(src("configs/ou_vg.json"));
  CHECK(ou.sampling.terminal == 1000.0);
  CHECK(*ou.sampling.n == 50000);
  CHECK(ou.fit.mode == "incrpar");
  CHECK(ou.fit.multistart == 3);
  CHECK(ou.fit.null_values.at("eta") == 1.0);
  CHECK(ou.model->params.front().name == "alpha1");

  RunConfig bi = load_config(src("configs/bivariate_vg.json"));
  SdeModel bm = build_model(*bi.model);
  CHECK(bm.diagonal_scale());
  CHECK(bm.eta_names() == std::vector<std::string>{"eta1", "eta2"});
  CHECK(bi.sampling.x0.size() == 2);
}

TEST_CASE("defaults") {
  RunConfig cfg = parse_config("{}");
  CHECK(!cfg.model);
  CHECK(cfg.fit.mode == "noincr");
  CHECK(cfg.fit.aggregation);
  CHECK(cfg.fit.multistart == 5);
  CHECK(cfg.fit.gradient_tol == 1e-8);
  CHECK(cfg.fit.max_iters == 2000);
  CHECK(cfg.select.families == std::vector<std::string>{"gaussian", "vg"});
  CHECK(cfg.forecast.reps == 100);
}

TEST_CASE("unknown keys are schema errors with their pointer") {
  Error e = error_of(R"json({"fit": {"mode": "incr", "agregation": true}})json");
  CHECK(e.category() == ErrorCategory::Schema);
  CHECK(std::string(e.what()).find("/fit/agregation") != std::string::npos);
  CHECK(std::string(e.what()).find("cfg.json") != std::string::npos);

  Error top = error_of(R"json({"modle": {}})json");
  CHECK(std::string(top.what()).find("/modle") != std::string::npos);

  std::string nested = kMinimal;
  nested.replace(nested.find("\"upper\": 2}, \"gamma\""), 11, "\"uper\": 2}");
  Error p = error_of(nested);
  CHECK(std::string(p.what()).find("/model/params/alpha/uper") != std::string::npos);
}

TEST_CASE("syntax errors carry line and column") {
  Error e = error_of("{\n  \"fit\": {\n    \"mode\": incr\n  }\n}");
  CHECK(e.category() == ErrorCategory::Parse);
  CHECK(std::string(e.what()).find("line 3") != std::string::npos);
}

TEST_CASE("type and value checks") {
  CHECK(error_of(R"json({"fit": {"multistart": -1}})json").category() == ErrorCategory::Schema);
  CHECK(error_of(R"json({"fit": {"mode": "joint"}})json").category() == ErrorCategory::Schema);
  CHECK(error_of(R"json({"fit": {"aggregation": "yes"}})json").category() == ErrorCategory::Schema);
  CHECK(error_of(R"json({"io": {"delta": 0}})json").category() == ErrorCategory::Schema);
  CHECK(error_of(R"json({"sampling": {"x0": "zero"}})json").category() == ErrorCategory::Schema);
  CHECK(error_of(R"json({"fit": {"start": {"alpha": "one"}}})json").category() == ErrorCategory::Schema);
  Error law = error_of(R"json({"model": {"state_vars": "X", "drift": "0", "scale": "1", "law": {"family": "cauchy"}}})json");
  CHECK(std::string(law.what()).find("/model/law/family") != std::string::npos);
  Error miss = error_of(R"json({"model": {"state_vars": "X", "drift": "0", "law": {"family": "vg"}}})json");
  CHECK(std::string(miss.what()).find("scale") != std::string::npos);
}

TEST_CASE("scale shorthand forms") {
  const char* diag = R"json({"model": {"state_vars": ["A", "B"], "drift": ["-a*A", "-b*B"], "scale": ["s1", "s2"],
    "law": {"family": "product", "components": [{"family": "vg", "labels": ["e1"]}, {"family": "vg", "labels": ["e2"]}]},
    "params": {"a": {"lower": 0.1, "upper": 1}, "b": {"lower": 0.1, "upper": 1},
               "s1": {"lower": 0.1, "upper": 1}, "s2": {"lower": 0.1, "upper": 1}}}})json";
  RunConfig cfg = parse_config(diag);
  CHECK(cfg.model->scale == std::vector<std::vector<std::string>>{{"s1", "0"}, {"0", "s2"}});
  SdeModel m = build_model(*cfg.model);
  CHECK(m.gamma_names() == std::vector<std::string>{"s1", "s2"});

  const char* full = R"json({"model": {"state_vars": ["A", "B"], "drift": ["-a*A", "-b*B"], "scale": [["s1", "0.1"], ["0", "s2"]],
    "law": {"family": "product", "components": [{"family": "vg"}, {"family": "gaussian"}]},
    "params": {"a": {"lower": 0.1, "upper": 1}, "b": {"lower": 0.1, "upper": 1},
               "s1": {"lower": 0.1, "upper": 1}, "s2": {"lower": 0.1, "upper": 1}}}})json";
  RunConfig f = parse_config(full);
  CHECK(!build_model(*f.model).diagonal_scale());
}

TEST_CASE("parameter boxes") {
  std::string half = kMinimal;
  half.replace(half.find("\"lower\": 0.1, \"upper\": 2}}"), 26, "\"lower\": 0.1}}");
  RunConfig cfg = parse_config(half);
  try {
    build_model(*cfg.model);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::Schema);
    CHECK(std::string(e.what()).find("/model/params/gamma") != std::string::npos);
  }
  RunConfig ok = parse_config(kMinimal);
  CHECK_NOTHROW(build_model(*ok.model));
}

TEST_CASE("missing file is an io error") {
  try {
    load_config("/nonexistent/config.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::Io);
  }
}
