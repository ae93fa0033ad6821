#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "levyfit/asymptotics.hpp"
#include "levyfit/error.hpp"
#include "levyfit/gqmle.hpp"
#include "levyfit/noise.hpp"
#include "levyfit/residuals.hpp"
#include "levyfit/rng.hpp"
#include "levyfit/sim.hpp"
#include "support.hpp"

using namespace levyfit;
using namespace testsupport;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// m(eps, eta) = -(eta - 1)^2, no dependence on eps
class EtaOnlyObjective final : public MObjective {
 public:
  EtaOnlyObjective() : MObjective({"eta"}) {}
  std::string family() const override { return "eta_only"; }
  std::size_t dim() const override { return 1; }
  void values(const RowMatrix& eps, const Vector& eta, double* out) const override {
    for (Eigen::Index i = 0; i < eps.rows(); ++i) out[i] = -(eta[0] - 1.0) * (eta[0] - 1.0);
  }
};

struct OuRun {
  GqmleFit fit;
  NoiseFit noise;
  AsymptoticsReport rep;
};

OuRun ou_run(std::uint64_t seed, double T, std::size_t n) {
  static VgObjective vg;
  auto m = ou_vg_model();
  auto sim = euler_simulate(m, ou_vg_truth(), SamplingScheme{0.0, T, n}, Vector::Zero(1), seed);
  FitConfig cfg;
  cfg.multistart_count = 1;
  cfg.seed = seed;
  OuRun r;
  r.fit = fit_gqmle(sim.dataset, m, cfg);
  auto res = compute_residuals(sim.dataset, m, r.fit.gamma_hat, r.fit.alpha_hat);
  NoiseFitConfig nc;
  nc.lower = vec({0.1});
  nc.upper = vec({5.0});
  nc.multistart_count = 1;
  nc.seed = seed;
  r.noise = fit_noise(res.unit, vg, res.horizon, nc);
  r.rep = asymptotics(sim.dataset, m, r.fit.gamma_hat, r.fit.alpha_hat, res, NoiseInputs{&vg, r.noise.eta_hat});
  return r;
}

const std::vector<OuRun>& ou_runs(double T) {
  static std::vector<OuRun> full, half;
  auto& v = T > 750 ? full : half;
  if (v.empty())
    for (std::uint64_t s = 500; s < 520; ++s) v.push_back(ou_run(s, T, static_cast<std::size_t>(50 * T)));
  return v;
}

Matrix fd_hessian(const std::function<double(const Vector&, Vector*)>& f, const Vector& x) {
  const auto p = x.size();
  Matrix H(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    double s = 1e-6 * std::max(1e-3, std::abs(x[i]));
    Vector xp = x, xm = x, gp(p), gm(p);
    xp[i] += s;
    xm[i] -= s;
    f(xp, &gp);
    f(xm, &gm);
    H.col(i) = (gp - gm) / (2 * s);
  }
  return H;
}

}  // namespace

TEST_CASE("floored inverse") {
  Matrix A(2, 2);
  A << 4.0, 1.0, 1.0, 3.0;
  Matrix inv = floored_inverse(A, "A");
  CHECK((A * inv - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  Matrix S(2, 2);
  S << 1.0, 1.0, 1.0, 1.0;
  try {
    floored_inverse(S, "S");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::Singular);
    CHECK(std::string(e.what()).find("smallest eigenvalue") != std::string::npos);
  }
}

TEST_CASE("constant scale: Gamma_hat equals 2 / gamma_hat^2 at the stationary point") {
  auto m = constant_scale_model();
  TrueParams p;
  p.gamma = vec({0.6});
  p.alpha = Vector(0);
  p.eta = vec({1.0});
  auto sim = euler_simulate(m, p, SamplingScheme{0.0, 200.0, 10000}, Vector::Zero(1), 3);
  const auto& X = sim.dataset.values;
  double ss = 0.0;
  for (Eigen::Index j = 1; j < X.rows(); ++j) ss += (X(j, 0) - X(j - 1, 0)) * (X(j, 0) - X(j - 1, 0));
  double g = std::sqrt(ss / sim.dataset.horizon());
  Matrix G = gamma_hat_matrix(sim.dataset, m, vec({g}), Vector(0));
  REQUIRE(G.rows() == 1);
  CHECK(std::abs(G(0, 0) - 2.0 / (g * g)) <= 1e-8 * 2.0 / (g * g));
}

TEST_CASE("Gamma_hat matches finite-difference hessians") {
  struct Case {
    SdeModel model;
    TrueParams p;
    Vector x0;
  };
  std::vector<Case> cases = {{ou_vg_model(), ou_vg_truth(), Vector::Zero(1)},
                             {bivariate_model(), bivariate_truth(), Vector::Zero(2)},
                             {logprice_model(), logprice_truth(), Vector::Constant(1, 3.0)}};
  for (auto& c : cases) {
    auto sim = euler_simulate(c.model, c.p, SamplingScheme{0.0, 100.0, 3000}, c.x0, 8);
    Matrix G = gamma_hat_matrix(sim.dataset, c.model, c.p.gamma, c.p.alpha);
    QuasiLikelihood q(sim.dataset, c.model);
    Matrix H1 = fd_hessian([&](const Vector& x, Vector* g) { return q.h1(x, g); }, c.p.gamma);
    q.fix_gamma(c.p.gamma);
    Matrix H2 = fd_hessian([&](const Vector& x, Vector* g) { return q.h2(x, g); }, c.p.alpha);
    const auto pg = c.p.gamma.size(), pa = c.p.alpha.size();
    for (Eigen::Index i = 0; i < pg; ++i)
      for (Eigen::Index j = 0; j < pg; ++j) CHECK(std::abs(G(i, j) + H1(i, j)) <= 1e-4 * std::max(1.0, std::abs(H1(i, j))));
    for (Eigen::Index i = 0; i < pa; ++i)
      for (Eigen::Index j = 0; j < pa; ++j)
        CHECK(std::abs(G(pg + i, pg + j) + H2(i, j)) <= 1e-4 * std::max(1.0, std::abs(H2(i, j))));
    CHECK(G.topRightCorner(pg, pa).isZero(0.0));
  }
}

TEST_CASE("b_hat on a three-block toy dataset") {
  auto m = ou_vg_model();
  RowMatrix v(10, 1);
  v << 0.1, 0.3, 0.2, 0.5, 0.45, 0.6, 0.3, 0.35, 0.4, 0.2;
  auto ds = make_dataset(v, 1.0 / 3.0);
  const double g = 0.3, a1 = 0.5, a2 = 0.2, h = 1.0 / 3.0;
  auto blocks = unit_blocks(9, 3.0);
  auto b = b_hat(ds, m, vec({g}), vec({a1, a2}), blocks);
  REQUIRE(b.size() == 3);
  for (int i = 0; i < 3; ++i) {
    double bg = 0.0, b1 = 0.0, b2 = 0.0;
    for (int j = 3 * i; j < 3 * i + 3; ++j) {
      double x = v(j, 0), r = v(j + 1, 0) - x - h * a1 * (a2 - x);
      bg += -r / (g * g);
      b1 += -h * (a2 - x) / g;
      b2 += -h * a1 / g;
    }
    CHECK(std::abs(b[i](0, 0) - bg) <= 1e-14 * std::max(1.0, std::abs(bg)));
    CHECK(std::abs(b[i](0, 1) - b1) <= 1e-14 * std::max(1.0, std::abs(b1)));
    CHECK(std::abs(b[i](0, 2) - b2) <= 1e-14 * std::max(1.0, std::abs(b2)));
  }
  // no drift parameters: dimension p_gamma only
  auto cs = constant_scale_model();
  auto bc = b_hat(ds, cs, vec({g}), Vector(0), blocks);
  CHECK(bc[0].cols() == 1);
}

TEST_CASE("Sigma_alpha for the OU model equals a direct loop; Sigma is symmetric") {
  auto m = ou_vg_model();
  auto sim = euler_simulate(m, ou_vg_truth(), SamplingScheme{0.0, 100.0, 5000}, Vector::Zero(1), 9);
  const auto& ds = sim.dataset;
  Vector g = vec({0.26}), a = vec({0.38, 0.27});
  auto res = compute_residuals(ds, m, g, a);
  VgObjective vg;
  Matrix S = sigma_hat(ds, m, g, a, res, NoiseInputs{&vg, vec({1.1})});
  REQUIRE(S.rows() == 4);
  double s11 = 0, s12 = 0, s22 = 0;
  const std::size_t n = ds.steps();
  for (std::size_t j = 0; j < n; ++j) {
    double x = ds.values(static_cast<Eigen::Index>(j), 0);
    double d1 = (a[1] - x) / g[0], d2 = a[0] / g[0];
    s11 += d1 * d1;
    s12 += d1 * d2;
    s22 += d2 * d2;
  }
  s11 /= n;
  s12 /= n;
  s22 /= n;
  CHECK(std::abs(S(1, 1) - s11) <= 1e-12 * s11);
  CHECK(std::abs(S(1, 2) - s12) <= 1e-12 * std::abs(s12));
  CHECK(std::abs(S(2, 2) - s22) <= 1e-12 * s22);
  CHECK((S - S.transpose()).cwiseAbs().maxCoeff() == 0.0);

  // Sigma_gamma: (1/T) sum z^4 / gamma^2 for constant scale
  double m4 = 0.0;
  for (Eigen::Index j = 0; j < res.small.rows(); ++j) m4 += std::pow(res.small(j, 0), 4);
  m4 /= ds.horizon();
  CHECK(S(0, 0) == doctest::Approx(m4 / (g[0] * g[0])).epsilon(1e-12));

  // Sigma_eta is a Gram matrix
  Matrix sc = vg.scores(res.unit, vec({1.1}));
  CHECK(S(3, 3) == doctest::Approx(sc.col(0).squaredNorm() / ds.horizon()).epsilon(1e-12));
  CHECK(S(3, 3) >= 0.0);
}

TEST_CASE("Sigma_eta stays positive semidefinite for product noise") {
  auto m = bivariate_model();
  auto sim = euler_simulate(m, bivariate_truth(), SamplingScheme{0.0, 100.0, 5000}, Vector::Zero(2), 10);
  auto p = bivariate_truth();
  auto res = compute_residuals(sim.dataset, m, p.gamma, p.alpha);
  auto obj = make_objective(m.law());
  Matrix S = sigma_hat(sim.dataset, m, p.gamma, p.alpha, res, NoiseInputs{obj.get(), p.eta});
  Matrix Se = S.bottomRightCorner(2, 2);
  Eigen::SelfAdjointEigenSolver<Matrix> es(Se);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12 * es.eigenvalues().maxCoeff());
  Matrix Sa = S.block(2, 2, 4, 4);
  Eigen::SelfAdjointEigenSolver<Matrix> ea(Sa);
  CHECK(ea.eigenvalues().minCoeff() >= -1e-12 * ea.eigenvalues().maxCoeff());
  CHECK((S - S.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("symmetric noise and constant coefficients: Sigma_gamma_alpha vanishes") {
  SdeModel::Spec s;
  s.state_vars = {"X"};
  s.drift = {"alpha"};
  s.scale = {{"gamma"}};
  s.law = make_law("vg", true);
  s.params = {{"alpha", -2.0, 2.0}, {"gamma", 0.01, 2.0}};
  auto m = SdeModel::build(s);
  TrueParams p;
  p.gamma = vec({0.25});
  p.alpha = vec({0.1});
  p.eta = vec({1.0});
  std::vector<double> cross;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto sim = euler_simulate(m, p, SamplingScheme{0.0, 1000.0, 50000}, Vector::Zero(1), seed);
    auto fit = fit_gqmle(sim.dataset, m);
    auto res = compute_residuals(sim.dataset, m, fit.gamma_hat, fit.alpha_hat);
    Matrix S = sigma_hat(sim.dataset, m, fit.gamma_hat, fit.alpha_hat, res, NoiseInputs{});
    cross.push_back(S(0, 1));
  }
  double mean = std::accumulate(cross.begin(), cross.end(), 0.0) / 20.0, var = 0.0;
  for (double c : cross) var += (c - mean) * (c - mean);
  double se = std::sqrt(var / 19.0 / 20.0);
  CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("I_hat structure") {
  auto m = ou_vg_model();
  auto sim = euler_simulate(m, ou_vg_truth(), SamplingScheme{0.0, 100.0, 5000}, Vector::Zero(1), 12);
  auto p = ou_vg_truth();
  auto res = compute_residuals(sim.dataset, m, p.gamma, p.alpha);
  Matrix G = gamma_hat_matrix(sim.dataset, m, p.gamma, p.alpha);
  auto b = b_hat(sim.dataset, m, p.gamma, p.alpha, res.blocks);

  EtaOnlyObjective eo;
  Matrix I0 = i_hat(G, b, res.unit, NoiseInputs{&eo, vec({1.3})}, res.horizon);
  CHECK(I0.bottomLeftCorner(1, 3).isZero(0.0));
  CHECK(I0.topRightCorner(3, 1).isZero(0.0));

  GaussianObjective gauss;
  NoiseFitConfig nc;
  nc.lower = vec({0.05});
  nc.upper = vec({20.0});
  auto nf = fit_noise(res.unit, gauss, res.horizon, nc);
  Matrix Ig = i_hat(G, b, res.unit, NoiseInputs{&gauss, nf.eta_hat}, res.horizon);
  CHECK(Ig(3, 3) > 0.0);

  // block inverse
  Matrix inv = i_hat_inverse(Ig, {1, 2, 1});
  CHECK((inv * Ig - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("Wald statistic basics") {
  Matrix I(2, 2), S(2, 2);
  I << 2.0, 0.0, 0.3, 1.5;
  S << 1.0, 0.2, 0.2, 0.8;
  auto w0 = wald(vec({0.4, 1.0}), vec({0.4, 1.0}), I, S, 100.0);
  CHECK(w0.statistic == 0.0);
  CHECK(w0.p_value == 1.0);
  CHECK(w0.dof == 2);

  RngStream r(3);
  for (int k = 0; k < 50; ++k) {
    Vector d(2);
    d << r.normal(), r.normal();
    auto w = wald(d, Vector::Zero(2), I, S, 10.0);
    CHECK(w.statistic >= 0.0);
    CHECK((w.p_value >= 0.0 && w.p_value <= 1.0));
    // independent evaluation
    Vector u = I * d;
    double stat = 10.0 * u.dot(S.inverse() * u);
    CHECK(w.statistic == doctest::Approx(stat).epsilon(1e-12));
    // chi2(2) survival is exp(-x/2)
    CHECK(w.p_value == doctest::Approx(std::exp(-stat / 2)).epsilon(1e-12));
    // permuting the parameters together leaves the statistic unchanged
    Eigen::PermutationMatrix<2> P;
    P.indices() << 1, 0;
    Matrix Ip = P * I * P.transpose(), Sp = P * S * P.transpose();
    Vector dp = P * d;
    CHECK(wald(dp, Vector::Zero(2), Ip, Sp, 10.0).statistic == doctest::Approx(w.statistic).epsilon(1e-12));
  }
  Matrix sing(2, 2);
  sing << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(wald(vec({1.0, 0.0}), Vector::Zero(2), I, sing, 1.0), Error);
  auto wt = wald_theta(vec({1.0}), vec({0.0}), Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 4.0), 3.0);
  CHECK(wt.statistic == doctest::Approx(3.0 * 2.0 * 2.0 / 4.0));
  CHECK(wt.dof == 1);
}

TEST_CASE("OU Monte Carlo: Gamma_gamma, conditioning and standard errors") {
  const auto& runs = ou_runs(1000.0);
  std::vector<double> gg;
  int well = 0;
  for (const auto& r : runs) {
    gg.push_back(r.rep.gamma_hat(0, 0));
    well += r.rep.i_condition < 1e8;
    for (Eigen::Index i = 0; i < r.rep.std_errors.size(); ++i) CHECK(r.rep.std_errors[i] > 0.0);
    REQUIRE(r.rep.names == std::vector<std::string>{"gamma", "alpha1", "alpha2", "eta"});
  }
  CHECK(std::abs(median(gg) - 32.0) < 0.2 * 32.0);
  CHECK(well >= 19);

  // order of magnitude of the drift standard error
  std::vector<double> se_a1;
  for (const auto& r : runs) se_a1.push_back(r.rep.std_errors[1]);
  CHECK(median(se_a1) > 1e-3);
  CHECK(median(se_a1) < 1e-1);

  // doubling T shrinks standard errors by 1/sqrt(2)
  const auto& half = ou_runs(500.0);
  for (Eigen::Index k = 0; k < 4; ++k) {
    std::vector<double> a, b;
    for (const auto& r : runs) a.push_back(r.rep.std_errors[k]);
    for (const auto& r : half) b.push_back(r.rep.std_errors[k]);
    double ratio = median(a) / median(b);
    INFO("parameter " << k << " ratio " << ratio);
    CHECK(std::abs(ratio - 1.0 / std::sqrt(2.0)) < 0.2 / std::sqrt(2.0));
  }
}

TEST_CASE("fourth residual moment per unit time matches the VG cumulant") {
  // unit-time VG with parameter eta has fourth cumulant 3/eta, so E (1/T) sum dJ^4 = 3/eta + 3h;
  // the per-path spread is sqrt(kappa8 / T) with kappa8 = 630/eta^3
  auto m = constant_scale_model();
  for (double eta : {2.0, 4.0}) {
    TrueParams p;
    p.gamma = vec({0.4});
    p.alpha = Vector(0);
    p.eta = vec({eta});
    const int reps = 20;
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= static_cast<std::uint64_t>(reps); ++seed) {
      auto sim = euler_simulate(m, p, SamplingScheme{0.0, 1000.0, 50000}, Vector::Zero(1), seed);
      auto res = compute_residuals(sim.dataset, m, p.gamma, p.alpha);
      auto rep = asymptotics(sim.dataset, m, p.gamma, p.alpha, res, NoiseInputs{});
      sum += rep.moment4[0];
    }
    const double mean = sum / reps;
    const double expect = 3.0 / eta + 3.0 * 0.02;
    const double se = std::sqrt(630.0 / (eta * eta * eta) / 1000.0 / reps);
    INFO("eta " << eta << " mean " << mean << " expect " << expect << " se " << se);
    CHECK(std::abs(mean - expect) < 4.0 * se);
  }
}
