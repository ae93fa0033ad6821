#include <cmath>

#include "doctest.h"
#include "levyfit/error.hpp"
#include "levyfit/sim.hpp"
#include "support.hpp"

using namespace levyfit;
using namespace testsupport;

TEST_CASE("zero scale reduces to deterministic Euler") {
  SdeModel::Spec s;
  s.state_vars = {"X"};
  s.drift = {"alpha1*(alpha2-X)"};
  s.scale = {{"gamma"}};
  s.law = make_law("vg", true);
  s.params = {{"alpha1", 0.01, 2.0}, {"alpha2", 0.01, 2.0}, {"gamma", 0.0, 1.0}};
  auto m = SdeModel::build(s);
  TrueParams p = ou_vg_truth();
  p.gamma[0] = 0.0;
  SamplingScheme sch{0.0, 1.0, 10};
  Vector x0 = Vector::Constant(1, 1.5);
  auto out = euler_simulate(m, p, sch, x0, 3);
  const double h = 0.1;
  CHECK(out.dataset.values(1, 0) == 1.5 + 0.4 * (0.25 - 1.5) * h);
  double x = 1.5;
  for (int j = 1; j <= 10; ++j) {
    x = x + 0.4 * (0.25 - x) * h;
    CHECK(out.dataset.values(j, 0) == x);
  }
}

TEST_CASE("zero drift and unit scale give the running sum of increments") {
  SdeModel::Spec s;
  s.state_vars = {"X"};
  s.drift = {"0"};
  s.scale = {{"1"}};
  s.law = make_law("vg", true);
  auto m = SdeModel::build(s);
  TrueParams p;
  p.gamma = Vector(0);
  p.alpha = Vector(0);
  p.eta = Vector::Constant(1, 1.0);
  auto out = euler_simulate(m, p, SamplingScheme{0.0, 5.0, 500}, Vector::Constant(1, 0.7), 9);
  double x = 0.7;
  CHECK(out.dataset.values(0, 0) == x);
  for (int j = 1; j <= 500; ++j) {
    x += out.noise_increments(j - 1, 0);
    CHECK(out.dataset.values(j, 0) == x);
  }
}

TEST_CASE("Euler recursion holds exactly for the bivariate model") {
  auto m = bivariate_model();
  auto p = bivariate_truth();
  auto out = euler_simulate(m, p, SamplingScheme{0.0, 10.0, 1000}, Vector::Zero(2), 4);
  const double h = 0.01;
  const auto& X = out.dataset.values;
  for (int j = 1; j <= 1000; ++j) {
    double x1 = X(j - 1, 0), x2 = X(j - 1, 1);
    double e1 = x1 + 0.4 * (0.25 - x1 - 0.2 * x2) * h + 0.2 * out.noise_increments(j - 1, 0);
    double e2 = x2 + 0.3 * (0.3 - x2) * h + 0.1 * out.noise_increments(j - 1, 1);
    CHECK(X(j, 0) == doctest::Approx(e1).epsilon(1e-15));
    CHECK(X(j, 1) == doctest::Approx(e2).epsilon(1e-15));
  }
  CHECK(out.dataset.times.back() == 10.0);
}

TEST_CASE("long-run mean of the OU path") {
  auto m = ou_vg_model();
  auto p = ou_vg_truth();
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto out = euler_simulate(m, p, SamplingScheme{0.0, 1000.0, 50000}, Vector::Zero(1), seed);
    double mean = out.dataset.values.col(0).mean();
    within += std::abs(mean - 0.25) < 0.05;
  }
  // stationary sd of the path mean is gamma / (alpha1 sqrt(T)) ~ 0.02
  CHECK(within >= 9);
}

TEST_CASE("batch seeding, determinism and thread invariance") {
  auto m = ou_vg_model();
  auto p = ou_vg_truth();
  SamplingScheme sch{0.0, 100.0, 5000};
  Vector x0 = Vector::Zero(1);
  auto one = simulate_batch(m, p, sch, x0, 77, 1);
  auto direct = euler_simulate(m, p, sch, x0, replicate_seed(77, 0));
  CHECK(one[0].dataset.values == direct.dataset.values);

  auto a = simulate_batch(m, p, sch, x0, 77, 8, 1);
  auto b = simulate_batch(m, p, sch, x0, 77, 8, 4);
  REQUIRE(a.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(a[i].dataset.values == b[i].dataset.values);
    CHECK(a[i].noise_increments == b[i].noise_increments);
  }
  CHECK(a[0].dataset.values != a[1].dataset.values);
}

TEST_CASE("hundred replicates stay finite") {
  auto m = ou_vg_model();
  auto reps = simulate_batch(m, ou_vg_truth(), SamplingScheme{0.0, 1000.0, 50000}, Vector::Zero(1), 5, 100);
  REQUIRE(reps.size() == 100);
  for (const auto& r : reps) CHECK(r.dataset.values.allFinite());
}

TEST_CASE("simulation input errors") {
  auto m = ou_vg_model();
  auto p = ou_vg_truth();
  p.alpha[0] = 5.0;  // outside the box
  CHECK_THROWS_AS(euler_simulate(m, p, SamplingScheme{0.0, 1.0, 10}, Vector::Zero(1), 1), Error);
  CHECK_THROWS_AS(euler_simulate(m, ou_vg_truth(), SamplingScheme{0.0, 1.0, 10}, Vector::Zero(2), 1), Error);
  CHECK_THROWS_AS(simulate_batch(m, ou_vg_truth(), SamplingScheme{0.0, 1.0, 10}, Vector::Zero(1), 1, 0), Error);
}

TEST_CASE("empirical law override resamples stored increments") {
  auto m = ou_vg_model();
  TrueParams p = ou_vg_truth();
  auto emp = std::make_shared<EmpiricalLaw>(std::vector<double>{0.05}, 0.1);
  p.eta = Vector(0);
  auto out = euler_simulate(m, p, SamplingScheme{0.0, 1.0, 10}, Vector::Zero(1), 1, emp);
  for (int j = 0; j < 10; ++j) CHECK(out.noise_increments(j, 0) == 0.05);
  CHECK_THROWS_AS(euler_simulate(m, p, SamplingScheme{0.0, 2.0, 10}, Vector::Zero(1), 1, emp), Error);
}

TEST_CASE("noise sidecar csv layout") {
  auto m = ou_vg_model();
  auto out = euler_simulate(m, ou_vg_truth(), SamplingScheme{0.0, 1.0, 4}, Vector::Zero(1), 1);
  std::string csv = noise_to_csv(out);
  CHECK(csv.rfind("j,t_j,dJ_1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
