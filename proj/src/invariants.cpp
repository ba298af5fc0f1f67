#include "fiet/invariants.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fiet {

SafInvariant SafInvariant::zero(std::size_t dimension) {
  return SafInvariant{std::vector<std::vector<Rational>>(dimension, std::vector<Rational>(dimension))};
}

bool SafInvariant::is_zero() const {
  for (const auto& row : matrix)
    for (const auto& c : row)
      if (sgn(c) != 0) return false;
  return true;
}

SafInvariant& SafInvariant::operator+=(const SafInvariant& other) {
  if (matrix.size() != other.matrix.size()) throw BasisMismatch();
  for (std::size_t j = 0; j < matrix.size(); ++j)
    for (std::size_t k = 0; k < matrix.size(); ++k) matrix[j][k] += other.matrix[j][k];
  return *this;
}

SafInvariant saf(const Fiet& f) {
  if (!f.is_flip_free()) throw FlipPresent();
  const std::size_t dim = f.basis()->dimension();
  auto out = SafInvariant::zero(dim);
  for (const auto& p : f.pieces()) {
    ExactReal len = p.length();
    const auto& l = len.coords();
    const auto& d = p.offset.coords();
    for (std::size_t j = 0; j < dim; ++j) {
      if (sgn(l[j]) == 0) continue;
      for (std::size_t k = 0; k < dim; ++k) out.matrix[j][k] += l[j] * d[k];
    }
  }
  return out;
}

bool in_commutator_subgroup(const Fiet& f) { return saf(f).is_zero(); }

namespace {

// Germ at x from the right (side = +1) or from the left (side = -1).
struct Germ {
  ExactReal x;
  int side;
};

using GermKey = std::pair<std::vector<Rational>, int>;

GermKey key_of(const Germ& g) { return {g.x.coords(), g.side}; }

std::size_t piece_for(const Fiet& f, const Germ& g) {
  if (g.side > 0) return f.piece_index(g.x);
  const auto& ps = f.pieces();
  auto it = std::lower_bound(ps.begin(), ps.end(), g.x, [](const Piece& p, const ExactReal& v) { return p.left < v; });
  return static_cast<std::size_t>(it - ps.begin()) - 1;
}

Germ step(const Fiet& f, const Germ& g) {
  const Piece& p = f.pieces()[piece_for(f, g)];
  return {p.apply(g.x), g.side * p.sign};
}

std::optional<Integer> rational_grid(const Fiet& f) {
  Integer q = 1;
  auto absorb = [&q](const ExactReal& v) {
    if (!v.is_rational()) return false;
    mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), v.rational_part().get_den_mpz_t());
    return true;
  };
  for (const auto& p : f.pieces())
    if (!absorb(p.left) || !absorb(p.offset)) return std::nullopt;
  return q;
}

}  // namespace

std::optional<CellCycles> periodic_cells(const Fiet& f, std::size_t cap) {
  const BasisPtr& basis = f.basis();
  std::size_t effective_cap = std::max<std::size_t>(cap, 1);
  if (auto q = rational_grid(f)) {
    Integer grid_cap = 2 * *q + 2;
    if (grid_cap.fits_ulong_p()) effective_cap = std::max<std::size_t>(effective_cap, grid_cap.get_ui());
  }

  std::vector<Germ> seeds{{ExactReal(basis, 0), 1}, {ExactReal(basis, 1), -1}};
  for (const auto& b : f.breakpoints()) {
    seeds.push_back({b, 1});
    seeds.push_back({b, -1});
  }

  std::set<GermKey> seen;
  std::vector<ExactReal> points;
  std::set<std::vector<Rational>> point_keys;
  for (const auto& seed : seeds) {
    if (seen.count(key_of(seed))) continue;
    GermKey start = key_of(seed);
    Germ g = seed;
    std::size_t steps = 0;
    do {
      seen.insert(key_of(g));
      if (point_keys.insert(g.x.coords()).second) points.push_back(g.x);
      g = step(f, g);
      if (++steps > effective_cap) return std::nullopt;
    } while (key_of(g) != start);
  }

  std::sort(points.begin(), points.end(), [](const ExactReal& a, const ExactReal& b) { return a < b; });
  CellCycles out;
  std::map<std::vector<Rational>, std::size_t> cell_at;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    cell_at.emplace(points[i].coords(), out.cells.size());
    out.cells.push_back({points[i], points[i + 1]});
  }

  // Where each cell goes, and whether it is flipped on the way.
  const std::size_t n = out.cells.size();
  std::vector<std::size_t> next(n);
  std::vector<int> sign(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = out.cells[i];
    const Piece& p = f.pieces()[f.piece_index(c.lo)];
    Interval img = Piece{c.lo, c.hi, p.sign, p.offset}.image();
    next[i] = cell_at.at(img.lo.coords());
    sign[i] = p.sign;
  }

  std::vector<bool> done(n, false);
  out.order = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> cycle;
    int total = 1;
    for (std::size_t c = i; !done[c]; c = next[c]) {
      done[c] = true;
      cycle.push_back(c);
      total *= sign[c];
    }
    Integer len = static_cast<unsigned long>(cycle.size());
    if (total < 0) len *= 2;
    mpz_lcm(out.order.get_mpz_t(), out.order.get_mpz_t(), len.get_mpz_t());
    out.cycles.push_back(std::move(cycle));
    out.reversed.push_back(total < 0);
  }
  return out;
}

PeriodicityVerdict is_periodic(const Fiet& f, std::size_t cap) {
  PeriodicityVerdict v;
  v.cap = cap;
  if (auto cells = periodic_cells(f, cap)) {
    v.periodic = true;
    v.order = cells->order;
  }
  return v;
}

}  // namespace fiet
