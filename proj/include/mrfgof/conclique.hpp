#pragma once

#include <cstddef>
#include <vector>

#include "mrfgof/lattice.hpp"

namespace mrfgof {

// The q* = prod(m_i + 1) sublattices a_j + Delta Z^d. Offsets enumerate the
// box {0..m_1} x ... x {0..m_d} in lexicographic order.
struct BasicConcliqueFamily {
  NeighborhoodTemplate neighborhood;
  std::vector<int> delta;
  std::vector<LatticePoint> offsets;

  std::size_t size() const { return offsets.size(); }
  // Index of the sublattice containing s (componentwise nonnegative s mod Delta).
  std::size_t index_of(const LatticePoint& s) const;
};

// Partition of the basic family into q groups; each group's union of
// sublattices is a conclique.
struct ConcliqueCover {
  BasicConcliqueFamily family;
  std::vector<std::vector<std::size_t>> groups;  // indices into family.offsets

  std::size_t q() const { return groups.size(); }
  std::size_t q_star() const { return family.size(); }
  // Group index for each basic offset.
  std::vector<std::size_t> group_of_basic() const;
};

BasicConcliqueFamily basic_concliques(const NeighborhoodTemplate& m);

// Merge rule for sublattices: the union of current with candidate stays a
// conclique iff a_j - a_cand + Delta s is outside +-M for every a_j in
// current and every ||s||_inf <= 1.
bool can_merge(const std::vector<LatticePoint>& current, const LatticePoint& candidate,
               const NeighborhoodTemplate& m);

// Greedy merge in lexicographic offset order; each offset joins the first
// group it can merge with. The result is a valid cover, not necessarily minimal.
ConcliqueCover build_cover(const NeighborhoodTemplate& m);

// Brute force: no point of the set is a neighbor of another.
bool verify_conclique(const std::vector<LatticePoint>& points, const NeighborhoodTemplate& m);

enum class LabelScope { all_observed, interior_only };

// Conclique label per window cell, -1 for masked or excluded cells.
struct ConcliqueLabels {
  std::vector<int> label;
  std::size_t q = 0;

  std::vector<std::size_t> counts() const;
  std::vector<std::size_t> cells_of(std::size_t j) const;
};

ConcliqueLabels assign_labels(const SamplingWindow& window, const NeighborhoodTemplate& m,
                              const ConcliqueCover& cover,
                              LabelScope scope = LabelScope::interior_only);

}  // namespace mrfgof
