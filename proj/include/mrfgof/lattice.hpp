#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mrfgof {

// A site of Z^d in lattice units.
struct LatticePoint {
  std::vector<int> coords;

  LatticePoint() = default;
  explicit LatticePoint(std::vector<int> c) : coords(std::move(c)) {}
  LatticePoint(std::initializer_list<int> c) : coords(c) {}

  std::size_t dim() const { return coords.size(); }
  int operator[](std::size_t i) const { return coords[i]; }
  int& operator[](std::size_t i) { return coords[i]; }

  bool is_zero() const;
  int chebyshev_norm() const;

  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

LatticePoint operator+(const LatticePoint& a, const LatticePoint& b);
LatticePoint operator-(const LatticePoint& a, const LatticePoint& b);
LatticePoint operator-(const LatticePoint& a);
std::string to_string(const LatticePoint& p);

// The template M: neighbors of s are s + M.
class NeighborhoodTemplate {
 public:
  // Throws ConfigError on a zero offset, duplicate offsets or mixed dimensions.
  NeighborhoodTemplate(std::size_t dim, std::vector<LatticePoint> offsets);

  static NeighborhoodTemplate nearest(std::size_t dim = 2);    // 2d axis neighbors
  static NeighborhoodTemplate chebyshev(std::size_t dim = 2);  // 3^d - 1 neighbors
  static NeighborhoodTemplate unilateral();                    // {(0,-1), (-1,0)}

  // Accepts "four" / "4", "eight" / "8", "unilateral", or an explicit
  // offset list such as "0,1;0,-1;1,0;-1,0".
  static NeighborhoodTemplate parse(const std::string& text);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return offsets_.size(); }
  bool empty() const { return offsets_.empty(); }
  const std::vector<LatticePoint>& offsets() const { return offsets_; }

  // m_i = max |s_i| over s in M.
  const std::vector<int>& extents() const { return extents_; }
  // Diagonal of Delta, i.e. m_i + 1.
  std::vector<int> delta() const;

  bool contains(const LatticePoint& p) const;
  // Membership in M u (-M).
  bool contains_symmetric(const LatticePoint& p) const;
  bool is_symmetric() const;

  std::string describe() const;

  friend bool operator==(const NeighborhoodTemplate& a, const NeighborhoodTemplate& b);

 private:
  std::size_t dim_;
  std::vector<LatticePoint> offsets_;
  std::vector<int> extents_;
};

// Axis-aligned box [lower, upper] with an optional observation mask.
// Cells are indexed row-major (last coordinate fastest), which is also the
// lexicographic order used wherever a deterministic site order is needed.
class SamplingWindow {
 public:
  SamplingWindow(LatticePoint lower, LatticePoint upper);
  SamplingWindow(LatticePoint lower, LatticePoint upper, std::vector<std::uint8_t> mask);

  static SamplingWindow grid(int rows, int cols);

  std::size_t dim() const { return lower_.dim(); }
  const LatticePoint& lower() const { return lower_; }
  const LatticePoint& upper() const { return upper_; }
  int extent(std::size_t i) const { return upper_[i] - lower_[i] + 1; }

  // Number of cells in the box, observed or not.
  std::size_t size() const { return mask_.size(); }
  std::size_t n_observed() const { return n_observed_; }

  bool contains(const LatticePoint& p) const;
  std::optional<std::size_t> index_of(const LatticePoint& p) const;
  LatticePoint point_at(std::size_t index) const;

  bool observed(std::size_t index) const { return mask_[index] != 0; }
  bool observed(const LatticePoint& p) const;
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  // Observed cell indices in lexicographic order.
  std::vector<std::size_t> observed_indices() const;

 private:
  LatticePoint lower_, upper_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::size_t> strides_;
  std::size_t n_observed_ = 0;
};

// Throws ConfigError when dimensions differ.
std::vector<LatticePoint> neighbors(const LatticePoint& s, const NeighborhoodTemplate& m);

// Observed sites whose whole neighborhood is observed, lexicographic order.
std::vector<LatticePoint> interior_set(const SamplingWindow& window,
                                       const NeighborhoodTemplate& m);

// Per-cell observed-neighbor lists in compressed form. For every observed
// cell, neighbors(i) lists the observed cells among i + M (template order);
// interior(i) is true when all |M| of them are present. With periodic=true the
// box is treated as a torus.
class NeighborTable {
 public:
  NeighborTable(const SamplingWindow& window, const NeighborhoodTemplate& m,
                bool periodic = false);

  std::span<const std::size_t> neighbors(std::size_t cell) const {
    return {indices_.data() + starts_[cell], starts_[cell + 1] - starts_[cell]};
  }
  bool interior(std::size_t cell) const { return interior_[cell] != 0; }
  std::size_t size() const { return interior_.size(); }

 private:
  std::vector<std::size_t> starts_;
  std::vector<std::size_t> indices_;
  std::vector<std::uint8_t> interior_;
};

}  // namespace mrfgof
