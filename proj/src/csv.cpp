#include "levyfit/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

#include "levyfit/error.hpp"

namespace levyfit {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::Io, "cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size())
      fail(ErrorCategory::Data, "'" + path + "' line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                                    " cells, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) fail(ErrorCategory::Data, "'" + path + "' has no header row");
  return t;
}

double parse_cell(const CsvTable& table, std::size_t row, std::size_t col) {
  const std::string& s = table.rows.at(row).at(col);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    fail(ErrorCategory::Data, "invalid numeric cell '" + s + "' at row " + std::to_string(row + 2) + ", column " +
                                  std::to_string(col + 1));
  return v;
}

Dataset load_csv(const std::string& path, std::optional<double> delta, std::optional<bool> time_column) {
  CsvTable t = read_csv(path);
  bool has_time = time_column.value_or(!t.header.empty() && (t.header[0] == "t" || t.header[0] == "time"));
  const std::size_t first = has_time ? 1 : 0;
  if (t.header.size() <= first) fail(ErrorCategory::Data, "'" + path + "' has no state columns");
  if (t.rows.size() < 3) fail(ErrorCategory::Data, "'" + path + "' needs at least 3 rows, found " + std::to_string(t.rows.size()));
  if (delta && !(*delta > 0.0 && std::isfinite(*delta))) fail(ErrorCategory::InvalidArgument, "delta must be positive");
  if (!delta && !has_time) fail(ErrorCategory::InvalidArgument, "'" + path + "' has no time column and no delta was given");

  const std::size_t rows = t.rows.size(), cols = t.header.size() - first;
  RowMatrix values(rows, cols);
  std::vector<double> times(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    if (has_time) times[i] = parse_cell(t, i, 0);
    for (std::size_t k = 0; k < cols; ++k) values(i, k) = parse_cell(t, i, first + k);
  }
  double step;
  double t0 = has_time ? times[0] : 0.0;
  if (delta) {
    step = *delta;
  } else {
    step = (times.back() - times.front()) / static_cast<double>(rows - 1);
    if (!(step > 0.0)) fail(ErrorCategory::Data, "'" + path + "' times are not increasing");
  }
  if (has_time) {
    const double eps = std::numeric_limits<double>::epsilon();
    // gaps are compared with the first one so the first irregular step is the one reported
    const double ref = delta ? step : times[1] - times[0];
    for (std::size_t j = 1; j < rows; ++j) {
      double gap = times[j] - times[j - 1];
      double tol = std::max(1e-9 * step, 4.0 * eps * std::max(std::abs(times[j]), std::abs(times[j - 1])));
      if (std::abs(gap - ref) > tol)
        fail(ErrorCategory::Data, "'" + path + "' is not equispaced at index " + std::to_string(j) + " (gap " +
                                      format_double(gap) + ", expected " + format_double(ref) + ")");
    }
  }
  std::vector<std::string> names(t.header.begin() + static_cast<std::ptrdiff_t>(first), t.header.end());
  return make_dataset(std::move(values), step, t0, std::move(names));
}

std::string dataset_to_csv(const Dataset& ds) {
  std::string out = "t";
  for (const auto& n : ds.names) out += "," + n;
  out += "\n";
  for (std::size_t j = 0; j < ds.times.size(); ++j) {
    out += format_double(ds.times[j]);
    for (Eigen::Index k = 0; k < ds.values.cols(); ++k) {
      out += ',';
      out += format_double(ds.values(static_cast<Eigen::Index>(j), k));
    }
    out += '\n';
  }
  return out;
}

OutputStage::~OutputStage() {
  if (committed_) return;
  std::error_code ec;
  for (const auto& [tmp, final_path] : staged_) fs::remove(tmp, ec);
}

void OutputStage::add(const std::string& path, const std::string& content) {
  fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) fail(ErrorCategory::Io, "cannot create directory '" + p.parent_path().string() + "': " + ec.message());
  }
  std::string tmp = path + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(staged_.size());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCategory::Io, "cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) fail(ErrorCategory::Io, "write failed for '" + tmp + "'");
  }
  staged_.emplace_back(tmp, path);
}

void OutputStage::commit() {
  for (const auto& [tmp, final_path] : staged_) {
    std::error_code ec;
    fs::rename(tmp, final_path, ec);
    if (ec) fail(ErrorCategory::Io, "cannot move '" + tmp + "' to '" + final_path + "': " + ec.message());
  }
  committed_ = true;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  OutputStage stage;
  stage.add(path, content);
  stage.commit();
}

}  // namespace levyfit
