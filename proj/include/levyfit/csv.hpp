#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "levyfit/model.hpp"

namespace levyfit {

/// %.17g formatting used for all CSV numbers.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // raw cells
};

/// Reads a comma-separated file with a header row; rejects ragged rows.
CsvTable read_csv(const std::string& path);
/// Parses a cell as a finite double; errors name the row and column (1-based, header is row 1).
double parse_cell(const CsvTable& table, std::size_t row, std::size_t col);

/// Loads an equispaced dataset. With delta given, times are t0 + j*delta
/// (t0 from the time column when present, else 0); without it a time column is required.
/// time_column: unset means auto-detect a leading "t" or "time" header.
Dataset load_csv(const std::string& path, std::optional<double> delta = std::nullopt,
                 std::optional<bool> time_column = std::nullopt);

std::string dataset_to_csv(const Dataset& ds);

/// Collects file contents and publishes them together by rename.
class OutputStage {
 public:
  OutputStage() = default;
  OutputStage(const OutputStage&) = delete;
  OutputStage& operator=(const OutputStage&) = delete;
  ~OutputStage();

  /// Writes content to a temporary sibling of path.
  void add(const std::string& path, const std::string& content);
  /// Renames every staged file into place.
  void commit();

 private:
  std::vector<std::pair<std::string, std::string>> staged_;  // (temp, final)
  bool committed_ = false;
};

void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace levyfit
