#include "mrfgof/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include "mrfgof/errors.hpp"

namespace mrfgof {

namespace {

void require_same_dim(const LatticePoint& a, const LatticePoint& b) {
  if (a.dim() != b.dim()) {
    throw ConfigError("lattice dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                      std::to_string(b.dim()));
  }
}

}  // namespace

bool LatticePoint::is_zero() const {
  return std::all_of(coords.begin(), coords.end(), [](int c) { return c == 0; });
}

int LatticePoint::chebyshev_norm() const {
  int n = 0;
  for (int c : coords) n = std::max(n, std::abs(c));
  return n;
}

LatticePoint operator+(const LatticePoint& a, const LatticePoint& b) {
  require_same_dim(a, b);
  LatticePoint r = a;
  for (std::size_t i = 0; i < r.dim(); ++i) r[i] += b[i];
  return r;
}

LatticePoint operator-(const LatticePoint& a, const LatticePoint& b) {
  require_same_dim(a, b);
  LatticePoint r = a;
  for (std::size_t i = 0; i < r.dim(); ++i) r[i] -= b[i];
  return r;
}

LatticePoint operator-(const LatticePoint& a) {
  LatticePoint r = a;
  for (auto& c : r.coords) c = -c;
  return r;
}

std::string to_string(const LatticePoint& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (i) s += ",";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

// --- NeighborhoodTemplate ----------------------------------------------------

NeighborhoodTemplate::NeighborhoodTemplate(std::size_t dim, std::vector<LatticePoint> offsets)
    : dim_(dim), offsets_(std::move(offsets)), extents_(dim, 0) {
  if (dim_ == 0) throw ConfigError("template dimension must be at least 1");
  std::set<LatticePoint> seen;
  for (const auto& o : offsets_) {
    if (o.dim() != dim_) {
      throw ConfigError("template offset " + to_string(o) + " has dimension " +
                        std::to_string(o.dim()) + ", expected " + std::to_string(dim_));
    }
    if (o.is_zero()) throw ConfigError("template may not contain the zero offset");
    if (!seen.insert(o).second) throw ConfigError("duplicate template offset " + to_string(o));
    for (std::size_t i = 0; i < dim_; ++i) extents_[i] = std::max(extents_[i], std::abs(o[i]));
  }
}

NeighborhoodTemplate NeighborhoodTemplate::nearest(std::size_t dim) {
  std::vector<LatticePoint> offs;
  for (std::size_t i = 0; i < dim; ++i) {
    for (int sign : {-1, 1}) {
      LatticePoint p(std::vector<int>(dim, 0));
      p[i] = sign;
      offs.push_back(p);
    }
  }
  return {dim, std::move(offs)};
}

NeighborhoodTemplate NeighborhoodTemplate::chebyshev(std::size_t dim) {
  std::vector<LatticePoint> offs;
  std::vector<int> c(dim, -1);
  while (true) {
    LatticePoint p(c);
    if (!p.is_zero()) offs.push_back(p);
    std::size_t i = dim;
    while (i > 0 && c[i - 1] == 1) c[--i] = -1;
    if (i == 0) break;
    ++c[i - 1];
  }
  return {dim, std::move(offs)};
}

NeighborhoodTemplate NeighborhoodTemplate::unilateral() {
  return {2, {LatticePoint{0, -1}, LatticePoint{-1, 0}}};
}

NeighborhoodTemplate NeighborhoodTemplate::parse(const std::string& text) {
  if (text == "four" || text == "4" || text == "four-nearest") return nearest(2);
  if (text == "eight" || text == "8" || text == "eight-nearest") return chebyshev(2);
  if (text == "unilateral") return unilateral();

  std::vector<LatticePoint> offs;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    if (group.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream cs(group);
    std::string tok;
    LatticePoint p;
    while (std::getline(cs, tok, ',')) {
      try {
        std::size_t used = 0;
        p.coords.push_back(std::stoi(tok, &used));
        if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError("cannot parse template offset '" + group + "'");
      }
    }
    offs.push_back(std::move(p));
  }
  if (offs.empty()) throw ConfigError("unknown or empty template '" + text + "'");
  return {offs.front().dim(), std::move(offs)};
}

std::vector<int> NeighborhoodTemplate::delta() const {
  std::vector<int> d(extents_);
  for (auto& v : d) ++v;
  return d;
}

bool NeighborhoodTemplate::contains(const LatticePoint& p) const {
  return std::find(offsets_.begin(), offsets_.end(), p) != offsets_.end();
}

bool NeighborhoodTemplate::contains_symmetric(const LatticePoint& p) const {
  return contains(p) || contains(-p);
}

bool NeighborhoodTemplate::is_symmetric() const {
  return std::all_of(offsets_.begin(), offsets_.end(),
                     [this](const LatticePoint& o) { return contains(-o); });
}

std::string NeighborhoodTemplate::describe() const {
  std::string s;
  for (std::size_t k = 0; k < offsets_.size(); ++k) {
    if (k) s += ";";
    for (std::size_t i = 0; i < dim_; ++i) {
      if (i) s += ",";
      s += std::to_string(offsets_[k][i]);
    }
  }
  return s;
}

bool operator==(const NeighborhoodTemplate& a, const NeighborhoodTemplate& b) {
  if (a.dim_ != b.dim_ || a.offsets_.size() != b.offsets_.size()) return false;
  std::set<LatticePoint> sa(a.offsets_.begin(), a.offsets_.end());
  std::set<LatticePoint> sb(b.offsets_.begin(), b.offsets_.end());
  return sa == sb;
}

// --- SamplingWindow ----------------------------------------------------------

SamplingWindow::SamplingWindow(LatticePoint lower, LatticePoint upper)
    : SamplingWindow(lower, upper, {}) {}

SamplingWindow::SamplingWindow(LatticePoint lower, LatticePoint upper,
                               std::vector<std::uint8_t> mask)
    : lower_(std::move(lower)), upper_(std::move(upper)), mask_(std::move(mask)) {
  if (lower_.dim() == 0) throw ConfigError("window dimension must be at least 1");
  require_same_dim(lower_, upper_);
  const std::size_t d = lower_.dim();
  strides_.assign(d, 1);
  std::size_t total = 1;
  for (std::size_t i = d; i-- > 0;) {
    if (upper_[i] < lower_[i]) throw ConfigError("window bounds must satisfy lower <= upper");
    strides_[i] = total;
    total *= static_cast<std::size_t>(upper_[i] - lower_[i] + 1);
  }
  if (mask_.empty()) mask_.assign(total, 1);
  if (mask_.size() != total) {
    throw ConfigError("window mask has " + std::to_string(mask_.size()) + " cells, expected " +
                      std::to_string(total));
  }
  n_observed_ = static_cast<std::size_t>(std::count_if(mask_.begin(), mask_.end(),
                                                       [](std::uint8_t m) { return m != 0; }));
  if (n_observed_ == 0) throw ConfigError("window has no observed sites");
}

SamplingWindow SamplingWindow::grid(int rows, int cols) {
  if (rows < 1 || cols < 1) throw ConfigError("grid dimensions must be positive");
  return {LatticePoint{0, 0}, LatticePoint{rows - 1, cols - 1}};
}

bool SamplingWindow::contains(const LatticePoint& p) const {
  if (p.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (p[i] < lower_[i] || p[i] > upper_[i]) return false;
  }
  return true;
}

std::optional<std::size_t> SamplingWindow::index_of(const LatticePoint& p) const {
  if (!contains(p)) return std::nullopt;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dim(); ++i) {
    idx += static_cast<std::size_t>(p[i] - lower_[i]) * strides_[i];
  }
  return idx;
}

LatticePoint SamplingWindow::point_at(std::size_t index) const {
  LatticePoint p(std::vector<int>(dim(), 0));
  for (std::size_t i = 0; i < dim(); ++i) {
    p[i] = lower_[i] + static_cast<int>(index / strides_[i]);
    index %= strides_[i];
  }
  return p;
}

bool SamplingWindow::observed(const LatticePoint& p) const {
  auto idx = index_of(p);
  return idx && observed(*idx);
}

std::vector<std::size_t> SamplingWindow::observed_indices() const {
  std::vector<std::size_t> out;
  out.reserve(n_observed_);
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (mask_[i]) out.push_back(i);
  }
  return out;
}

// --- free functions ----------------------------------------------------------

std::vector<LatticePoint> neighbors(const LatticePoint& s, const NeighborhoodTemplate& m) {
  if (s.dim() != m.dim()) {
    throw ConfigError("site dimension " + std::to_string(s.dim()) +
                      " does not match template dimension " + std::to_string(m.dim()));
  }
  std::vector<LatticePoint> out;
  out.reserve(m.size());
  for (const auto& o : m.offsets()) out.push_back(s + o);
  return out;
}

std::vector<LatticePoint> interior_set(const SamplingWindow& window,
                                       const NeighborhoodTemplate& m) {
  std::vector<LatticePoint> out;
  for (std::size_t idx : window.observed_indices()) {
    LatticePoint s = window.point_at(idx);
    const auto nb = neighbors(s, m);
    if (std::all_of(nb.begin(), nb.end(), [&](const LatticePoint& t) { return window.observed(t); })) {
      out.push_back(std::move(s));
    }
  }
  return out;
}

NeighborTable::NeighborTable(const SamplingWindow& window, const NeighborhoodTemplate& m,
                             bool periodic) {
  if (window.dim() != m.dim()) {
    throw ConfigError("window dimension does not match template dimension");
  }
  const std::size_t n = window.size();
  const std::size_t d = window.dim();
  starts_.reserve(n + 1);
  starts_.push_back(0);
  interior_.assign(n, 0);
  for (std::size_t cell = 0; cell < n; ++cell) {
    if (window.observed(cell)) {
      const LatticePoint s = window.point_at(cell);
      std::size_t found = 0;
      for (const auto& o : m.offsets()) {
        LatticePoint t = s + o;
        if (periodic) {
          for (std::size_t i = 0; i < d; ++i) {
            const int ext = window.extent(i);
            t[i] = window.lower()[i] + (((t[i] - window.lower()[i]) % ext) + ext) % ext;
          }
        }
        auto idx = window.index_of(t);
        if (idx && window.observed(*idx)) {
          indices_.push_back(*idx);
          ++found;
        }
      }
      interior_[cell] = found == m.size() ? 1 : 0;
    }
    starts_.push_back(indices_.size());
  }
}

}  // namespace mrfgof
