#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "mrfgof/lattice.hpp"

namespace mrfgof {

// Real values on a sampling window. values has one entry per window cell in
// row-major order; masked cells hold NaN.
struct GridData {
  SamplingWindow window;
  Eigen::VectorXd values;

  GridData(SamplingWindow w, Eigen::VectorXd v);

  double operator[](std::size_t cell) const { return values[static_cast<Eigen::Index>(cell)]; }
  // Observed values gathered in lexicographic site order.
  Eigen::VectorXd observed_values() const;
};

// Two-dimensional CSV grid: one line per lattice row, numeric cells or the
// token NA for masked cells. Throws DataError on ragged or malformed input.
GridData read_grid_csv(std::istream& in, bool has_header = false);
GridData read_grid_csv_file(const std::string& path, bool has_header = false);

// Writes with round-trip precision; masked cells are written as NA.
void write_grid_csv(std::ostream& out, const GridData& grid);
void write_grid_csv_file(const std::string& path, const GridData& grid);

}  // namespace mrfgof
