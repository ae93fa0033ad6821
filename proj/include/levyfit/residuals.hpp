#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "levyfit/model.hpp"
#include "levyfit/numeric.hpp"

namespace levyfit {

/// Rows [begin, end) of the small-increment matrix (0-based; row j is the
/// increment ending at observation j+1).
struct UnitBlock {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
};

/// Blocks for i = 1..floor(T): increments j with i-1 < j h <= i, with
/// j in (floor((i-1) n / T), floor(i n / T)]. T is measured from t0.
std::vector<UnitBlock> unit_blocks(std::size_t n, double horizon);

/// Row j: c_j(gamma)^{-1} (dX_j - h a_j(alpha)).
RowMatrix small_increments(const Dataset& data, const SdeModel& model, const Vector& gamma, const Vector& alpha);

/// Row i: sum of the small rows in block i.
RowMatrix aggregate(const RowMatrix& small, const std::vector<UnitBlock>& blocks);

struct ResidualSeries {
  RowMatrix small;
  RowMatrix unit;
  std::vector<UnitBlock> blocks;
  Vector theta_used;
  std::vector<double> small_times;  // right end of each small increment
  double horizon = 0.0;
};

ResidualSeries compute_residuals(const Dataset& data, const SdeModel& model, const Vector& gamma, const Vector& alpha);

/// `i,eps_1..eps_r`
std::string unit_residuals_csv(const RowMatrix& unit);
/// `j,t_j,dJ_1..dJ_r`
std::string small_residuals_csv(const RowMatrix& small, const std::vector<double>& times);

/// Residual columns from either CSV layout (leading index column, optional t_j).
RowMatrix load_residuals_csv(const std::string& path);

}  // namespace levyfit
