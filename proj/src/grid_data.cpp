#include "mrfgof/grid_data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "mrfgof/errors.hpp"

namespace mrfgof {

GridData::GridData(SamplingWindow w, Eigen::VectorXd v) : window(std::move(w)), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != window.size()) {
    throw DataError("grid has " + std::to_string(values.size()) + " values for a window of " +
                    std::to_string(window.size()) + " cells");
  }
  for (std::size_t c = 0; c < window.size(); ++c) {
    if (window.observed(c) && !std::isfinite((*this)[c])) {
      throw DataError("non-finite value at observed site " + to_string(window.point_at(c)));
    }
  }
}

Eigen::VectorXd GridData::observed_values() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(window.n_observed()));
  Eigen::Index k = 0;
  for (std::size_t c = 0; c < window.size(); ++c) {
    if (window.observed(c)) out[k++] = (*this)[c];
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

}  // namespace

GridData read_grid_csv(std::istream& in, bool has_header) {
  std::vector<double> vals;
  std::vector<std::uint8_t> mask;
  std::size_t cols = 0;
  int rows = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (has_header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(ls, cell, ',')) {
      const std::string t = trim(cell);
      if (t == "NA" || t == "na" || t == "NaN" || t.empty()) {
        vals.push_back(std::numeric_limits<double>::quiet_NaN());
        mask.push_back(0);
      } else {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
          throw DataError("line " + std::to_string(line_no) + ": cannot parse cell '" + t + "'");
        }
        vals.push_back(v);
        mask.push_back(1);
      }
      ++n;
    }
    if (!line.empty() && line.back() == ',') {
      vals.push_back(std::numeric_limits<double>::quiet_NaN());
      mask.push_back(0);
      ++n;
    }
    if (rows == 0) cols = n;
    if (n != cols) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                      " cells, found " + std::to_string(n));
    }
    ++rows;
  }
  if (rows == 0 || cols == 0) throw DataError("grid file contains no data");
  SamplingWindow w(LatticePoint{0, 0}, LatticePoint{rows - 1, static_cast<int>(cols) - 1},
                   std::move(mask));
  return {std::move(w), Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()))};
}

GridData read_grid_csv_file(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return read_grid_csv(in, has_header);
}

void write_grid_csv(std::ostream& out, const GridData& grid) {
  if (grid.window.dim() != 2) throw DataError("CSV grids are two-dimensional");
  const int rows = grid.window.extent(0);
  const int cols = grid.window.extent(1);
  char buf[64];
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t cell = static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                               static_cast<std::size_t>(c);
      if (c) out << ',';
      if (!grid.window.observed(cell)) {
        out << "NA";
      } else {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), grid[cell]);
        out.write(buf, ptr - buf);
      }
    }
    out << '\n';
  }
}

void write_grid_csv_file(const std::string& path, const GridData& grid) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_grid_csv(out, grid);
}

}  // namespace mrfgof
