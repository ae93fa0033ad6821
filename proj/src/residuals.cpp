#include "levyfit/residuals.hpp"

#include <cmath>

#include "levyfit/csv.hpp"
#include "levyfit/error.hpp"

namespace levyfit {

namespace {

// floor(q), snapping to the nearest integer when q is within 1e-9 relative of it
std::size_t snapped_floor(double q) {
  const double r = std::nearbyint(q);
  if (std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::floor(q));
}

}  // namespace

std::vector<UnitBlock> unit_blocks(std::size_t n, double horizon) {
  if (n == 0) fail(ErrorCategory::InvalidArgument, "unit blocks need at least one increment");
  if (!std::isfinite(horizon) || !(horizon >= 1.0 - 1e-9))
    fail(ErrorCategory::Data, "observation horizon " + format_double(horizon) + " is shorter than one time unit");
  const std::size_t count = snapped_floor(horizon);
  const double nd = static_cast<double>(n);
  std::vector<UnitBlock> blocks;
  blocks.reserve(count);
  std::size_t prev = 0;
  for (std::size_t i = 1; i <= count; ++i) {
    std::size_t hi = std::min(n, snapped_floor(static_cast<double>(i) * nd / horizon));
    blocks.push_back({prev, hi});
    prev = hi;
  }
  return blocks;
}

RowMatrix small_increments(const Dataset& data, const SdeModel& model, const Vector& gamma, const Vector& alpha) {
  data.validate();
  const std::size_t d = model.dim();
  if (data.dim() != d) fail(ErrorCategory::InvalidArgument, "dataset dimension does not match the model");
  if (static_cast<std::size_t>(gamma.size()) != model.p_gamma() ||
      static_cast<std::size_t>(alpha.size()) != model.p_alpha())
    fail(ErrorCategory::InvalidArgument, "parameter vector has the wrong length");
  const std::size_t n = data.steps();
  const double h = data.delta;
  const auto dd = static_cast<Eigen::Index>(d);
  RowMatrix out(static_cast<Eigen::Index>(n), dd);
  std::vector<double> slots = model.slots(gamma, alpha);
  std::vector<double> a(d);
  RowMatrix c(dd, dd);
  Vector r(dd);
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    slots[0] = data.times[j];
    for (std::size_t k = 0; k < d; ++k) slots[model.table()->state_slot(k)] = data.values(jj, static_cast<Eigen::Index>(k));
    model.eval_drift(slots.data(), a.data());
    model.eval_scale(slots.data(), c.data());
    for (std::size_t k = 0; k < d; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      r[kk] = data.values(jj + 1, kk) - data.values(jj, kk) - h * a[k];
    }
    if (d == 1) {
      if (c(0, 0) == 0.0 || !std::isfinite(c(0, 0)))
        fail(ErrorCategory::Domain, "degenerate scale at observation index " + std::to_string(j));
      out(jj, 0) = r[0] / c(0, 0);
    } else {
      Eigen::PartialPivLU<Matrix> lu(c);
      const double det = lu.determinant();
      if (det == 0.0 || !std::isfinite(det))
        fail(ErrorCategory::Domain, "degenerate scale at observation index " + std::to_string(j));
      out.row(jj) = lu.solve(r).transpose();
    }
  }
  return out;
}

RowMatrix aggregate(const RowMatrix& small, const std::vector<UnitBlock>& blocks) {
  RowMatrix out = RowMatrix::Zero(static_cast<Eigen::Index>(blocks.size()), small.cols());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    if (b.begin > b.end || b.end > static_cast<std::size_t>(small.rows()))
      fail(ErrorCategory::InvalidArgument, "block " + std::to_string(i + 1) + " is out of range");
    for (Eigen::Index l = 0; l < small.cols(); ++l) {
      KahanSum s;
      for (std::size_t j = b.begin; j < b.end; ++j) s += small(static_cast<Eigen::Index>(j), l);
      out(static_cast<Eigen::Index>(i), l) = s.value();
    }
  }
  return out;
}

ResidualSeries compute_residuals(const Dataset& data, const SdeModel& model, const Vector& gamma,
                                 const Vector& alpha) {
  ResidualSeries rs;
  rs.small = small_increments(data, model, gamma, alpha);
  rs.horizon = data.horizon();
  rs.blocks = unit_blocks(data.steps(), rs.horizon);
  rs.unit = aggregate(rs.small, rs.blocks);
  rs.theta_used.resize(gamma.size() + alpha.size());
  rs.theta_used << gamma, alpha;
  rs.small_times.assign(data.times.begin() + 1, data.times.end());
  return rs;
}

std::string unit_residuals_csv(const RowMatrix& unit) {
  std::string out = "i";
  for (Eigen::Index l = 0; l < unit.cols(); ++l) out += ",eps_" + std::to_string(l + 1);
  out += '\n';
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    out += std::to_string(i + 1);
    for (Eigen::Index l = 0; l < unit.cols(); ++l) out += "," + format_double(unit(i, l));
    out += '\n';
  }
  return out;
}

std::string small_residuals_csv(const RowMatrix& small, const std::vector<double>& times) {
  if (times.size() != static_cast<std::size_t>(small.rows()))
    fail(ErrorCategory::InvalidArgument, "time vector does not match the residual rows");
  std::string out = "j,t_j";
  for (Eigen::Index l = 0; l < small.cols(); ++l) out += ",dJ_" + std::to_string(l + 1);
  out += '\n';
  for (Eigen::Index j = 0; j < small.rows(); ++j) {
    out += std::to_string(j + 1) + "," + format_double(times[static_cast<std::size_t>(j)]);
    for (Eigen::Index l = 0; l < small.cols(); ++l) out += "," + format_double(small(j, l));
    out += '\n';
  }
  return out;
}

RowMatrix load_residuals_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  const auto& hdr = t.header;
  std::size_t first = 0;
  if (!hdr.empty() && (hdr[0] == "i" || hdr[0] == "j")) first = 1;
  if (hdr.size() > first && hdr[first] == "t_j") ++first;
  if (hdr.size() <= first) fail(ErrorCategory::Schema, path + ": no residual columns in header");
  for (std::size_t c = first; c < hdr.size(); ++c)
    if (hdr[c].rfind("eps_", 0) != 0 && hdr[c].rfind("dJ_", 0) != 0)
      fail(ErrorCategory::Schema, path + ": unexpected column '" + hdr[c] + "'");
  if (t.rows.empty()) fail(ErrorCategory::Schema, path + ": no residual rows");
  RowMatrix out(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(hdr.size() - first));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = first; c < hdr.size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - first)) = parse_cell(t, r, c);
  return out;
}

}  // namespace levyfit
