#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "levyfit/model.hpp"

namespace levyfit {

struct LawConfig {
  std::string family;  // gaussian | vg | bgamma | nts | product
  bool standardized = true;
  std::vector<std::string> labels;
  std::vector<LawConfig> components;  // product only
};

LawPtr build_law(const LawConfig& cfg);

struct ParamConfig {
  std::string name;
  std::optional<double> lower, upper, value;
};

struct ModelConfig {
  std::vector<std::string> state_vars;
  std::vector<std::string> drift;
  std::vector<std::vector<std::string>> scale;
  LawConfig law;
  std::vector<ParamConfig> params;  // in file order
  std::vector<std::pair<double, double>> state_box;
};

struct SamplingConfig {
  double t0 = 0.0;
  std::optional<double> terminal;
  std::optional<std::size_t> n;
  std::vector<double> x0;
  std::uint64_t seed = 0;
};

struct FitSettings {
  std::map<std::string, double> start, lower, upper, null_values;
  int multistart = 5;
  double gradient_tol = 1e-8;
  int max_iters = 2000;
  std::uint64_t seed = 0;
  std::string mode = "noincr";  // noincr | incr | incrpar
  bool aggregation = true;
};

struct IoConfig {
  std::optional<std::string> data;
  std::optional<double> delta;
  std::optional<bool> time_column;
  std::optional<std::string> out;
};

struct SelectConfig {
  std::vector<std::string> families{"gaussian", "vg"};
  std::size_t component = 1;
  std::optional<double> bandwidth;
};

struct ForecastConfig {
  std::optional<double> horizon;
  std::size_t reps = 100;
  std::uint64_t seed = 0;
};

struct RunConfig {
  std::optional<ModelConfig> model;
  SamplingConfig sampling;
  FitSettings fit;
  IoConfig io;
  SelectConfig select;
  ForecastConfig forecast;
};

/// Parses the JSON config; unknown keys and type mismatches are Schema errors
/// naming the JSON pointer, syntax errors are Parse errors with line/column.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Builds and validates the model block.
SdeModel build_model(const ModelConfig& cfg);

}  // namespace levyfit
