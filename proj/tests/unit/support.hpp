// Shared model builders for the unit tests and the acceptance binary.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "levyfit/laws.hpp"
#include "levyfit/model.hpp"
#include "levyfit/sim.hpp"

namespace testsupport {

using namespace levyfit;

// OU with VG noise: dX = alpha1 (alpha2 - X) dt + gamma dJ
inline SdeModel ou_vg_model() {
  SdeModel::Spec s;
  s.state_vars = {"X"};
  s.drift = {"alpha1*(alpha2-X)"};
  s.scale = {{"gamma"}};
  s.law = make_law("vg", true, {"eta"});
  s.params = {{"alpha1", 0.01, 2.0}, {"alpha2", 0.01, 2.0}, {"gamma", 0.01, 2.0}, {"eta", 0.1, 5.0}};
  return SdeModel::build(s);
}

inline TrueParams ou_vg_truth(double eta = 1.0) {
  TrueParams p;
  p.gamma = Vector::Constant(1, 0.25);
  p.alpha = Vector(2);
  p.alpha << 0.4, 0.25;
  p.eta = Vector::Constant(1, eta);
  return p;
}

// two OU components with independent VG noise and diagonal scale
inline SdeModel bivariate_model() {
  SdeModel::Spec s;
  s.state_vars = {"X1", "X2"};
  s.drift = {"alpha11*(alpha12-X1-0.2*X2)", "alpha21*(alpha22-X2)"};
  s.scale = {{"gamma1", "0"}, {"0", "gamma2"}};
  s.law = std::make_shared<ProductLaw>(std::vector<LawPtr>{make_law("vg", true, {"eta1"}), make_law("vg", true, {"eta2"})});
  s.params = {{"alpha11", 0.01, 2.0}, {"alpha12", 0.01, 2.0}, {"alpha21", 0.01, 2.0}, {"alpha22", 0.01, 2.0},
              {"gamma1", 0.01, 2.0},  {"gamma2", 0.01, 2.0},  {"eta1", 0.5, 2.0},    {"eta2", 0.5, 2.0}};
  return SdeModel::build(s);
}

// parameter order follows the model's gamma/alpha name lists
inline TrueParams bivariate_truth() {
  TrueParams p;
  p.gamma = Vector(2);
  p.gamma << 0.2, 0.1;
  p.alpha = Vector(4);
  p.alpha << 0.4, 0.25, 0.3, 0.3;
  p.eta = Vector(2);
  p.eta << 1.0, 1.0;
  return p;
}

// mean-reverting level with power-law scale
inline SdeModel logprice_model() {
  SdeModel::Spec s;
  s.state_vars = {"X"};
  s.drift = {"alpha1+alpha2*X"};
  s.scale = {{"gamma1*X^gamma2"}};
  s.law = make_law("vg", true, {"eta"});
  s.params = {{"alpha1", -1.0, 1.0}, {"alpha2", -1.0, 1.0}, {"gamma1", 0.001, 1.0}, {"gamma2", 0.01, 2.0}};
  s.state_box = {{1.0, 10.0}};
  return SdeModel::build(s);
}

inline TrueParams logprice_truth() {
  TrueParams p;
  p.gamma = Vector(2);
  p.gamma << 0.0163, 0.694;
  p.alpha = Vector(2);
  p.alpha << 0.08, -0.01;
  p.eta = Vector::Constant(1, 1.0);
  return p;
}

// constant scale, no drift parameters
inline SdeModel constant_scale_model(const std::string& law = "vg") {
  SdeModel::Spec s;
  s.state_vars = {"X"};
  s.drift = {"0"};
  s.scale = {{"gamma"}};
  s.law = make_law(law, true);
  s.params = {{"gamma", 0.01, 5.0}};
  return SdeModel::build(s);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace testsupport
