#pragma once

// Shared helpers for the test binaries: seeded random maps and a pointwise
// evaluation oracle that never looks at the piece structure of a composite.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "fiet/fietcore.hpp"

namespace fiet::testing {

inline BasisPtr rational_basis() { return Basis::rational(); }
inline BasisPtr sqrt2_basis() {
  static BasisPtr b = Basis::sqrt({Rational(2)});
  return b;
}

inline ExactReal rat(const BasisPtr& b, long n, long d = 1) { return ExactReal(b, Rational(n, d)); }

// m random positive lengths summing to 1.  On a sqrt basis the lengths are
// a + c*sqrt2 with small c so they are irrational but stay positive.
inline std::vector<ExactReal> random_lengths(const BasisPtr& b, std::size_t m, std::mt19937_64& rng) {
  std::vector<ExactReal> out;
  const bool irrational = b->dimension() > 1;
  std::uniform_int_distribution<int> w(1, 9);
  std::vector<int> weights(m);
  for (auto& x : weights) x = w(rng);
  int total = std::accumulate(weights.begin(), weights.end(), 0);
  ExactReal sum(b, 0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    ExactReal len(b, Rational(weights[i], total));
    if (irrational) {
      std::uniform_int_distribution<int> c(-3, 3);
      std::vector<Rational> coords(b->dimension());
      coords[0] = Rational(weights[i], total);
      coords[1] = Rational(c(rng), 64 * total);
      len = ExactReal(b, coords);
    }
    out.push_back(len);
    sum += len;
  }
  out.push_back(ExactReal(b, 1) - sum);
  return out;
}

inline Fiet random_fiet(const BasisPtr& b, std::size_t m, std::mt19937_64& rng, bool flips) {
  CombinatorialDescription d;
  d.lengths = random_lengths(b, m, rng);
  d.permutation.resize(m);
  std::iota(d.permutation.begin(), d.permutation.end(), 0);
  std::shuffle(d.permutation.begin(), d.permutation.end(), rng);
  std::bernoulli_distribution coin(0.4);
  for (std::size_t i = 0; i < m; ++i) d.flips.push_back(flips && coin(rng) ? -1 : 1);
  return from_combinatorics(b, d);
}

// Midpoints of the common refinement of the pieces of g and g^-1(BP(f)):
// every refined piece is sampled once.  The refinement is computed from the
// point values alone.
inline std::vector<ExactReal> sample_points(const Fiet& f, const Fiet& g) {
  std::vector<ExactReal> cuts;
  const BasisPtr& b = f.basis();
  cuts.push_back(ExactReal(b, 0));
  cuts.push_back(ExactReal(b, 1));
  for (const auto& p : g.pieces()) cuts.push_back(p.left);
  for (const auto& y : f.breakpoints()) {
    // preimage of y under each piece of g whose image contains it
    for (const auto& p : g.pieces()) {
      auto img = p.image();
      if (img.lo < y && y < img.hi) cuts.push_back(p.sign > 0 ? y - p.offset : p.offset - y);
    }
  }
  std::sort(cuts.begin(), cuts.end(), [](const ExactReal& a, const ExactReal& c) { return a < c; });
  std::vector<ExactReal> mids;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] == cuts[i + 1]) continue;
    mids.push_back((cuts[i] + cuts[i + 1]) / Rational(2));
    // a second point inside the same cell pins down the isometry
    mids.push_back((cuts[i] * Rational(3) + cuts[i + 1]) / Rational(4));
  }
  return mids;
}

// Pointwise check that h = f o g on every cell of the refinement.
inline bool agrees_with_composition(const Fiet& h, const Fiet& f, const Fiet& g) {
  for (const auto& x : sample_points(f, g))
    if (!(h(x) == f(g(x)))) return false;
  return true;
}

}  // namespace fiet::testing
