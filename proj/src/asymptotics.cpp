#include "levyfit/asymptotics.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "levyfit/csv.hpp"
#include "levyfit/error.hpp"
#include "levyfit/gqmle.hpp"

namespace levyfit {

namespace {

using Idx = Eigen::Index;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-step plug-in quantities: z = c^{-1}(dX - h a), M_i = c^{-1} d_gamma_i c,
// S_i = (M_i + M_i')/2, v_k = c^{-1} d_alpha_k a.
struct StepTerms {
  std::size_t n = 0, d = 0, pg = 0, pa = 0;
  double h = 0.0;
  RowMatrix z;
  std::vector<double> M, S, v;
  const double* m_at(std::size_t j, std::size_t i) const { return &M[(j * pg + i) * d * d]; }
  const double* s_at(std::size_t j, std::size_t i) const { return &S[(j * pg + i) * d * d]; }
  const double* v_at(std::size_t j, std::size_t k) const { return &v[(j * pa + k) * d]; }
};

StepTerms step_terms(const Dataset& data, const SdeModel& model, const Vector& gamma, const Vector& alpha) {
  data.validate();
  StepTerms st;
  st.n = data.steps();
  st.d = model.dim();
  st.pg = model.p_gamma();
  st.pa = model.p_alpha();
  st.h = data.delta;
  if (data.dim() != st.d) fail(ErrorCategory::InvalidArgument, "dataset dimension does not match the model");
  if (static_cast<std::size_t>(gamma.size()) != st.pg || static_cast<std::size_t>(alpha.size()) != st.pa)
    fail(ErrorCategory::InvalidArgument, "parameter vector has the wrong length");
  const std::size_t d = st.d;
  const auto dd = static_cast<Idx>(d);
  st.z.resize(static_cast<Idx>(st.n), dd);
  st.M.assign(st.n * st.pg * d * d, 0.0);
  st.S.assign(st.n * st.pg * d * d, 0.0);
  st.v.assign(st.n * st.pa * d, 0.0);
  std::vector<double> slots = model.slots(gamma, alpha);
  std::vector<double> a(d);
  RowMat c(dd, dd), dc(dd, dd), ci(dd, dd);
  Vector r(dd), da(dd);
  for (std::size_t j = 0; j < st.n; ++j) {
    const auto jj = static_cast<Idx>(j);
    slots[0] = data.times[j];
    for (std::size_t k = 0; k < d; ++k) slots[model.table()->state_slot(k)] = data.values(jj, static_cast<Idx>(k));
    model.eval_drift(slots.data(), a.data());
    model.eval_scale(slots.data(), c.data());
    Eigen::PartialPivLU<Matrix> lu(c);
    const double det = lu.determinant();
    if (det == 0.0 || !std::isfinite(det))
      fail(ErrorCategory::Domain, "degenerate scale at observation index " + std::to_string(j));
    ci = lu.inverse();
    for (std::size_t k = 0; k < d; ++k) {
      const auto kk = static_cast<Idx>(k);
      r[kk] = data.values(jj + 1, kk) - data.values(jj, kk) - st.h * a[k];
    }
    st.z.row(jj) = (ci * r).transpose();
    for (std::size_t i = 0; i < st.pg; ++i) {
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l)
          dc(static_cast<Idx>(k), static_cast<Idx>(l)) = model.scale_d(k, l, i).evaluate_slots(slots.data());
      RowMat Mi = ci * dc;
      double* mo = &st.M[(j * st.pg + i) * d * d];
      double* so = &st.S[(j * st.pg + i) * d * d];
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l) {
          mo[k * d + l] = Mi(static_cast<Idx>(k), static_cast<Idx>(l));
          so[k * d + l] = 0.5 * (Mi(static_cast<Idx>(k), static_cast<Idx>(l)) + Mi(static_cast<Idx>(l), static_cast<Idx>(k)));
        }
    }
    for (std::size_t q = 0; q < st.pa; ++q) {
      for (std::size_t k = 0; k < d; ++k) da[static_cast<Idx>(k)] = model.drift_d(k, q).evaluate_slots(slots.data());
      Vector vq = ci * da;
      for (std::size_t k = 0; k < d; ++k) st.v[(j * st.pa + q) * d + k] = vq[static_cast<Idx>(k)];
    }
  }
  return st;
}

void check_finite(const Matrix& m, const std::string& block) {
  if (!m.allFinite()) fail(ErrorCategory::Numeric, "non-finite entry in " + block);
}

double chi2_upper(double x, std::size_t dof) {
  if (dof == 0) return 1.0;
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * x);
}

}  // namespace

Matrix floored_inverse(const Matrix& sym, const std::string& what) {
  if (sym.rows() != sym.cols()) fail(ErrorCategory::InvalidArgument, what + " is not square");
  if (sym.rows() == 0) return Matrix(0, 0);
  if (!sym.allFinite()) fail(ErrorCategory::Numeric, what + " has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.transpose()));
  if (es.info() != Eigen::Success) fail(ErrorCategory::Numeric, what + ": eigendecomposition failed");
  const Vector& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  const double floor = 1e-12 * top;
  if (!(top > 0.0) || ev.minCoeff() < floor) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s is singular: smallest eigenvalue %.7g, largest %.7g", what.c_str(), ev.minCoeff(), top);
    fail(ErrorCategory::Singular, buf);
  }
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

Matrix gamma_hat_matrix(const Dataset& data, const SdeModel& model, const Vector& gamma, const Vector& alpha) {
  QuasiLikelihood q(data, model);
  const auto pg = static_cast<Idx>(model.p_gamma());
  const auto pa = static_cast<Idx>(model.p_alpha());
  Matrix G = Matrix::Zero(pg + pa, pg + pa);
  Matrix H;
  if (pg > 0) {
    q.h1(gamma, nullptr, &H);
    G.topLeftCorner(pg, pg) = -H;
  }
  q.fix_gamma(gamma);
  if (pa > 0) {
    q.h2(alpha, nullptr, &H);
    G.bottomRightCorner(pa, pa) = -H;
  }
  check_finite(G, "Gamma_hat");
  return G;
}

std::vector<Matrix> b_hat(const Dataset& data, const SdeModel& model, const Vector& gamma, const Vector& alpha,
                          const std::vector<UnitBlock>& blocks) {
  StepTerms st = step_terms(data, model, gamma, alpha);
  const std::size_t d = st.d, pg = st.pg, pa = st.pa;
  std::vector<Matrix> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) {
    if (b.end > st.n || b.begin > b.end) fail(ErrorCategory::InvalidArgument, "block out of range");
    Matrix B = Matrix::Zero(static_cast<Idx>(d), static_cast<Idx>(pg + pa));
    for (std::size_t j = b.begin; j < b.end; ++j) {
      for (std::size_t i = 0; i < pg; ++i) {
        const double* M = st.m_at(j, i);
        for (std::size_t a = 0; a < d; ++a) {
          double s = 0.0;
          for (std::size_t c = 0; c < d; ++c) s += M[a * d + c] * st.z(static_cast<Idx>(j), static_cast<Idx>(c));
          B(static_cast<Idx>(a), static_cast<Idx>(i)) -= s;
        }
      }
      for (std::size_t k = 0; k < pa; ++k) {
        const double* v = st.v_at(j, k);
        for (std::size_t a = 0; a < d; ++a) B(static_cast<Idx>(a), static_cast<Idx>(pg + k)) -= st.h * v[a];
      }
    }
    out.push_back(std::move(B));
  }
  return out;
}

Matrix sigma_hat(const Dataset& data, const SdeModel& model, const Vector& gamma, const Vector& alpha,
                 const ResidualSeries& residuals, const NoiseInputs& noise) {
  StepTerms st = step_terms(data, model, gamma, alpha);
  const std::size_t d = st.d, pg = st.pg, pa = st.pa, n = st.n;
  const double T = data.horizon();
  const double nd = static_cast<double>(n);
  const std::size_t pe = noise.objective ? noise.objective->num_params() : 0;
  const auto P = static_cast<Idx>(pg + pa + pe);
  Matrix S = Matrix::Zero(P, P);

  // residual moment tensors (1/T) sum_j z^{(x)4} and z^{(x)3}
  const std::size_t d2 = d * d, d3 = d2 * d, d4 = d3 * d;
  std::vector<KahanSum> nu4(d4), nu3(d3);
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Idx>(j);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        for (std::size_t c = 0; c < d; ++c) {
          const double zabc = st.z(jj, static_cast<Idx>(a)) * st.z(jj, static_cast<Idx>(b)) * st.z(jj, static_cast<Idx>(c));
          nu3[(a * d + b) * d + c] += zabc;
          for (std::size_t e = 0; e < d; ++e) nu4[((a * d + b) * d + c) * d + e] += zabc * st.z(jj, static_cast<Idx>(e));
        }
  }
  std::vector<double> m4(d4), m3(d3);
  for (std::size_t t = 0; t < d4; ++t) m4[t] = nu4[t].value() / T;
  for (std::size_t t = 0; t < d3; ++t) m3[t] = nu3[t].value() / T;

  // Sigma_gamma, Sigma_alpha, Sigma_gamma_alpha
  Matrix Sg = Matrix::Zero(static_cast<Idx>(pg), static_cast<Idx>(pg));
  Matrix Sa = Matrix::Zero(static_cast<Idx>(pa), static_cast<Idx>(pa));
  Matrix Sga = Matrix::Zero(static_cast<Idx>(pg), static_cast<Idx>(pa));
  std::vector<double> W(pg * d2), U(pg * d);
  for (std::size_t j = 0; j < n; ++j) {
    // W_i[c,e] = sum_ab S_i[a,b] nu4[a,b,c,e];  U_i[c] = sum_ab S_i[a,b] nu3[a,b,c]
    for (std::size_t i = 0; i < pg; ++i) {
      const double* Si = st.s_at(j, i);
      for (std::size_t ce = 0; ce < d2; ++ce) {
        double s = 0.0;
        for (std::size_t ab = 0; ab < d2; ++ab) s += Si[ab] * m4[ab * d2 + ce];
        W[i * d2 + ce] = s;
      }
      for (std::size_t c = 0; c < d; ++c) {
        double s = 0.0;
        for (std::size_t ab = 0; ab < d2; ++ab) s += Si[ab] * m3[ab * d + c];
        U[i * d + c] = s;
      }
    }
    for (std::size_t i = 0; i < pg; ++i)
      for (std::size_t k = 0; k <= i; ++k) {
        const double* Sk = st.s_at(j, k);
        double s = 0.0;
        for (std::size_t ce = 0; ce < d2; ++ce) s += W[i * d2 + ce] * Sk[ce];
        Sg(static_cast<Idx>(i), static_cast<Idx>(k)) += s;
      }
    for (std::size_t q = 0; q < pa; ++q)
      for (std::size_t r = 0; r <= q; ++r) {
        const double* vq = st.v_at(j, q);
        const double* vr = st.v_at(j, r);
        double s = 0.0;
        for (std::size_t a = 0; a < d; ++a) s += vq[a] * vr[a];
        Sa(static_cast<Idx>(q), static_cast<Idx>(r)) += s;
      }
    for (std::size_t i = 0; i < pg; ++i)
      for (std::size_t q = 0; q < pa; ++q) {
        const double* vq = st.v_at(j, q);
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += U[i * d + c] * vq[c];
        Sga(static_cast<Idx>(i), static_cast<Idx>(q)) += s;
      }
  }
  Sg /= nd;
  Sa /= nd;
  Sga /= nd;
  for (Idx i = 0; i < Sg.rows(); ++i)
    for (Idx k = 0; k < i; ++k) Sg(k, i) = Sg(i, k);
  for (Idx i = 0; i < Sa.rows(); ++i)
    for (Idx k = 0; k < i; ++k) Sa(k, i) = Sa(i, k);
  check_finite(Sg, "Sigma_gamma");
  check_finite(Sa, "Sigma_alpha");
  check_finite(Sga, "Sigma_gamma_alpha");
  const auto ipg = static_cast<Idx>(pg), ipa = static_cast<Idx>(pa);
  S.block(0, 0, ipg, ipg) = Sg;
  S.block(ipg, ipg, ipa, ipa) = Sa;
  S.block(0, ipg, ipg, ipa) = Sga;
  S.block(ipg, 0, ipa, ipg) = Sga.transpose();

  if (pe > 0) {
    const RowMatrix& unit = residuals.unit;
    const auto& blocks = residuals.blocks;
    if (static_cast<std::size_t>(unit.rows()) != blocks.size())
      fail(ErrorCategory::InvalidArgument, "unit residuals do not match the blocks");
    if (static_cast<std::size_t>(residuals.small.rows()) != n)
      fail(ErrorCategory::InvalidArgument, "small residuals do not match the dataset");
    Matrix sc = noise.objective->scores(unit, noise.eta);  // N x pe
    Matrix Se = sc.transpose() * sc / T;
    Matrix Seg = Matrix::Zero(static_cast<Idx>(pe), ipg);
    Matrix Sea = Matrix::Zero(static_cast<Idx>(pe), ipa);
    std::vector<double> gsum(pg), asum(pa);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      std::fill(gsum.begin(), gsum.end(), 0.0);
      std::fill(asum.begin(), asum.end(), 0.0);
      for (std::size_t j = blocks[i].begin; j < blocks[i].end; ++j) {
        const auto jj = static_cast<Idx>(j);
        for (std::size_t k = 0; k < pg; ++k) {
          const double* Sk = st.s_at(j, k);
          double quad = 0.0, tr = 0.0;
          for (std::size_t a = 0; a < d; ++a) {
            tr += Sk[a * d + a];
            for (std::size_t b = 0; b < d; ++b) quad += st.z(jj, static_cast<Idx>(a)) * Sk[a * d + b] * st.z(jj, static_cast<Idx>(b));
          }
          gsum[k] += quad - st.h * tr;
        }
        for (std::size_t q = 0; q < pa; ++q) {
          const double* vq = st.v_at(j, q);
          double s = 0.0;
          for (std::size_t a = 0; a < d; ++a) s += vq[a] * st.z(jj, static_cast<Idx>(a));
          asum[q] += s;
        }
      }
      for (std::size_t l = 0; l < pe; ++l) {
        const double s = sc(static_cast<Idx>(i), static_cast<Idx>(l));
        for (std::size_t k = 0; k < pg; ++k) Seg(static_cast<Idx>(l), static_cast<Idx>(k)) += s * gsum[k];
        for (std::size_t q = 0; q < pa; ++q) Sea(static_cast<Idx>(l), static_cast<Idx>(q)) += s * asum[q];
      }
    }
    Seg /= T;
    Sea /= T;
    check_finite(Se, "Sigma_eta");
    check_finite(Seg, "Sigma_eta_gamma");
    check_finite(Sea, "Sigma_eta_alpha");
    const Idx o = ipg + ipa;
    const auto ipe = static_cast<Idx>(pe);
    S.block(o, o, ipe, ipe) = Se;
    S.block(o, 0, ipe, ipg) = Seg;
    S.block(0, o, ipg, ipe) = Seg.transpose();
    S.block(o, ipg, ipe, ipa) = Sea;
    S.block(ipg, o, ipa, ipe) = Sea.transpose();
  }
  return S;
}

Matrix i_hat(const Matrix& gamma_hat, const std::vector<Matrix>& b, const RowMatrix& unit, const NoiseInputs& noise,
             double horizon) {
  const Idx p = gamma_hat.rows();
  if (!noise.objective) return gamma_hat;
  const auto pe = static_cast<Idx>(noise.objective->num_params());
  const auto d = static_cast<Idx>(noise.objective->dim());
  if (static_cast<std::size_t>(unit.rows()) != b.size())
    fail(ErrorCategory::InvalidArgument, "unit residuals do not match b_hat");
  Matrix I = Matrix::Zero(p + pe, p + pe);
  I.topLeftCorner(p, p) = gamma_hat;
  Matrix cr = noise.objective->cross(unit, noise.eta);  // N x (pe*d)
  Matrix L = Matrix::Zero(pe, p);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i].rows() != d || b[i].cols() != p) fail(ErrorCategory::InvalidArgument, "b_hat has the wrong shape");
    Matrix C(pe, d);
    for (Idx l = 0; l < pe; ++l)
      for (Idx a = 0; a < d; ++a) C(l, a) = cr(static_cast<Idx>(i), l * d + a);
    L += C * b[i];
  }
  I.bottomLeftCorner(pe, p) = -L / horizon;
  I.bottomRightCorner(pe, pe) = -noise.objective->hessian_sum(unit, noise.eta) / horizon;
  check_finite(I, "I_hat");
  return I;
}

Matrix i_hat_inverse(const Matrix& I, const std::vector<std::size_t>& block_sizes) {
  // diagonal blocks are symmetric; below-diagonal part is dense, above is zero
  const Idx P = I.rows();
  Matrix inv = Matrix::Zero(P, P);
  std::vector<Idx> off;
  Idx o = 0;
  for (std::size_t s : block_sizes) {
    off.push_back(o);
    o += static_cast<Idx>(s);
  }
  if (o != P) fail(ErrorCategory::InvalidArgument, "block sizes do not match I_hat");
  static const char* names[] = {"Gamma_hat (gamma block)", "Gamma_hat (alpha block)", "-d2 H3"};
  // forward block substitution
  for (std::size_t r = 0; r < block_sizes.size(); ++r) {
    const Idx ro = off[r], rs = static_cast<Idx>(block_sizes[r]);
    if (rs == 0) continue;
    Matrix Dinv = floored_inverse(I.block(ro, ro, rs, rs), r < 3 ? names[r] : "I_hat block");
    inv.block(ro, ro, rs, rs) = Dinv;
    for (std::size_t c = 0; c < r; ++c) {
      const Idx co = off[c], cs = static_cast<Idx>(block_sizes[c]);
      Matrix acc = Matrix::Zero(rs, cs);
      for (std::size_t k = c; k < r; ++k) {
        const Idx ko = off[k], ks = static_cast<Idx>(block_sizes[k]);
        acc += I.block(ro, ko, rs, ks) * inv.block(ko, co, ks, cs);
      }
      inv.block(ro, co, rs, cs) = -Dinv * acc;
    }
  }
  return inv;
}

WaldResult wald(const Vector& estimate, const Vector& null_value, const Matrix& i_hat, const Matrix& sigma_hat,
                double horizon) {
  if (estimate.size() != null_value.size() || estimate.size() != i_hat.rows() || sigma_hat.rows() != i_hat.rows())
    fail(ErrorCategory::InvalidArgument, "Wald inputs have inconsistent sizes");
  Matrix Sinv = floored_inverse(sigma_hat, "Sigma_hat");
  Vector u = i_hat * (estimate - null_value);
  WaldResult w;
  w.statistic = std::max(0.0, horizon * u.dot(Sinv * u));
  w.dof = static_cast<std::size_t>(estimate.size());
  w.p_value = chi2_upper(w.statistic, w.dof);
  return w;
}

WaldResult wald_theta(const Vector& theta_hat, const Vector& theta_null, const Matrix& gamma_hat,
                      const Matrix& sigma_theta, double horizon) {
  return wald(theta_hat, theta_null, gamma_hat, sigma_theta, horizon);
}

Vector std_errors(const Matrix& i_hat, const Matrix& sigma_hat, double horizon,
                  const std::vector<std::size_t>& block_sizes) {
  Matrix inv = i_hat_inverse(i_hat, block_sizes);
  Matrix cov = inv * sigma_hat * inv.transpose() / horizon;
  Vector se(cov.rows());
  for (Idx i = 0; i < cov.rows(); ++i) {
    if (!(cov(i, i) >= 0.0)) fail(ErrorCategory::Numeric, "negative variance for parameter " + std::to_string(i + 1));
    se[i] = std::sqrt(cov(i, i));
  }
  return se;
}

AsymptoticsReport asymptotics(const Dataset& data, const SdeModel& model, const Vector& gamma, const Vector& alpha,
                              const ResidualSeries& residuals, const NoiseInputs& noise) {
  AsymptoticsReport rep;
  rep.horizon = data.horizon();
  rep.names = model.gamma_names();
  rep.names.insert(rep.names.end(), model.alpha_names().begin(), model.alpha_names().end());
  const std::size_t pe = noise.objective ? noise.objective->num_params() : 0;
  if (noise.objective) {
    if (static_cast<std::size_t>(noise.eta.size()) != pe) fail(ErrorCategory::InvalidArgument, "eta has the wrong length");
    rep.names.insert(rep.names.end(), noise.objective->param_labels().begin(), noise.objective->param_labels().end());
  }
  rep.estimate.resize(gamma.size() + alpha.size() + static_cast<Idx>(pe));
  if (pe > 0) rep.estimate << gamma, alpha, noise.eta;
  else rep.estimate << gamma, alpha;
  rep.gamma_hat = gamma_hat_matrix(data, model, gamma, alpha);
  rep.b_hat = b_hat(data, model, gamma, alpha, residuals.blocks);
  rep.sigma_hat = sigma_hat(data, model, gamma, alpha, residuals, noise);
  rep.i_hat = i_hat(rep.gamma_hat, rep.b_hat, residuals.unit, noise, rep.horizon);
  const Idx d = residuals.small.cols();
  rep.moment4 = Vector::Zero(d);
  rep.moment3 = Vector::Zero(d);
  for (Idx a = 0; a < d; ++a) {
    KahanSum s3, s4;
    for (Idx j = 0; j < residuals.small.rows(); ++j) {
      const double z = residuals.small(j, a);
      s3 += z * z * z;
      s4 += z * z * z * z;
    }
    rep.moment3[a] = s3.value() / rep.horizon;
    rep.moment4[a] = s4.value() / rep.horizon;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rep.sigma_hat);
  rep.sigma_min_eigenvalue = rep.sigma_hat.rows() ? es.eigenvalues().minCoeff() : 0.0;
  if (rep.i_hat.rows() > 0) {
    Eigen::JacobiSVD<Matrix> svd(rep.i_hat);
    const Vector& sv = svd.singularValues();
    rep.i_condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
  }
  std::vector<std::size_t> sizes{model.p_gamma(), model.p_alpha()};
  if (pe > 0) sizes.push_back(pe);
  rep.std_errors = std_errors(rep.i_hat, rep.sigma_hat, rep.horizon, sizes);
  return rep;
}

}  // namespace levyfit
