#include "mrfgof/conclique.hpp"

#include <algorithm>
#include <set>

#include "mrfgof/errors.hpp"

namespace mrfgof {

namespace {

// All s in Z^d with ||s||_inf <= 1.
std::vector<LatticePoint> unit_cube(std::size_t d) {
  std::vector<LatticePoint> out;
  std::vector<int> c(d, -1);
  while (true) {
    out.emplace_back(c);
    std::size_t i = d;
    while (i > 0 && c[i - 1] == 1) c[--i] = -1;
    if (i == 0) break;
    ++c[i - 1];
  }
  return out;
}

}  // namespace

std::size_t BasicConcliqueFamily::index_of(const LatticePoint& s) const {
  if (s.dim() != delta.size()) throw ConfigError("site dimension does not match conclique family");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const int r = ((s[i] % delta[i]) + delta[i]) % delta[i];
    idx = idx * static_cast<std::size_t>(delta[i]) + static_cast<std::size_t>(r);
  }
  return idx;
}

std::vector<std::size_t> ConcliqueCover::group_of_basic() const {
  std::vector<std::size_t> out(family.size(), 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t b : groups[g]) out[b] = g;
  }
  return out;
}

BasicConcliqueFamily basic_concliques(const NeighborhoodTemplate& m) {
  BasicConcliqueFamily fam{m, m.delta(), {}};
  const std::size_t d = m.dim();
  std::vector<int> c(d, 0);
  while (true) {
    fam.offsets.emplace_back(c);
    std::size_t i = d;
    while (i > 0 && c[i - 1] == m.extents()[i - 1]) c[--i] = 0;
    if (i == 0) break;
    ++c[i - 1];
  }
  return fam;
}

bool can_merge(const std::vector<LatticePoint>& current, const LatticePoint& candidate,
               const NeighborhoodTemplate& m) {
  const auto delta = m.delta();
  const auto cube = unit_cube(m.dim());
  for (const auto& a : current) {
    const LatticePoint diff = a - candidate;
    for (const auto& s : cube) {
      LatticePoint lag = diff;
      for (std::size_t i = 0; i < lag.dim(); ++i) lag[i] += delta[i] * s[i];
      if (m.contains_symmetric(lag)) return false;
    }
  }
  return true;
}

ConcliqueCover build_cover(const NeighborhoodTemplate& m) {
  ConcliqueCover cover{basic_concliques(m), {}};
  std::vector<std::vector<LatticePoint>> members;
  for (std::size_t b = 0; b < cover.family.size(); ++b) {
    const LatticePoint& a = cover.family.offsets[b];
    bool placed = false;
    for (std::size_t g = 0; g < members.size() && !placed; ++g) {
      if (can_merge(members[g], a, m)) {
        members[g].push_back(a);
        cover.groups[g].push_back(b);
        placed = true;
      }
    }
    if (!placed) {
      members.push_back({a});
      cover.groups.push_back({b});
    }
  }
  return cover;
}

bool verify_conclique(const std::vector<LatticePoint>& points, const NeighborhoodTemplate& m) {
  const std::set<LatticePoint> pts(points.begin(), points.end());
  for (const auto& p : pts) {
    for (const auto& nb : neighbors(p, m)) {
      if (nb != p && pts.contains(nb)) return false;
    }
  }
  return true;
}

std::vector<std::size_t> ConcliqueLabels::counts() const {
  std::vector<std::size_t> c(q, 0);
  for (int l : label) {
    if (l >= 0) ++c[static_cast<std::size_t>(l)];
  }
  return c;
}

std::vector<std::size_t> ConcliqueLabels::cells_of(std::size_t j) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < label.size(); ++c) {
    if (label[c] == static_cast<int>(j)) out.push_back(c);
  }
  return out;
}

ConcliqueLabels assign_labels(const SamplingWindow& window, const NeighborhoodTemplate& m,
                              const ConcliqueCover& cover, LabelScope scope) {
  if (!(cover.family.neighborhood == m)) {
    throw ConfigError("conclique cover was built from a different template");
  }
  const auto group = cover.group_of_basic();
  ConcliqueLabels out{std::vector<int>(window.size(), -1), cover.q()};
  std::vector<std::uint8_t> keep(window.size(), 0);
  if (scope == LabelScope::interior_only) {
    const NeighborTable table(window, m);
    for (std::size_t c = 0; c < window.size(); ++c) keep[c] = table.interior(c) ? 1 : 0;
  } else {
    keep = window.mask();
  }
  for (std::size_t c = 0; c < window.size(); ++c) {
    if (!keep[c]) continue;
    out.label[c] = static_cast<int>(group[cover.family.index_of(window.point_at(c))]);
  }
  return out;
}

}  // namespace mrfgof
