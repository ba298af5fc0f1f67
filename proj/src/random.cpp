#include "fiet/random.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace fiet {

Fiet random_lattice_fiet(const BasisPtr& basis, std::size_t m, long grid, bool flips, std::uint64_t seed) {
  if (m == 0) throw DomainError("m must be positive");
  if (grid < long(m)) throw DomainError("grid must be at least m");
  std::mt19937_64 rng(seed);
  auto below = [&](std::uint64_t n) { return rng() % n; };

  std::vector<long> cuts(grid - 1);
  std::iota(cuts.begin(), cuts.end(), 1);
  for (std::size_t i = 0; i + 1 < m; ++i) std::swap(cuts[i], cuts[i + below(cuts.size() - i)]);
  cuts.resize(m - 1);
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), 0);
  cuts.push_back(grid);

  const std::size_t dim = basis->dimension();
  std::vector<Rational> scale(dim);
  for (std::size_t k = 1; k < dim; ++k) {
    auto e = basis->enclosure(k, 32);
    Integer bound = (abs(e.num) + e.width) / (Integer(1) << 32) + 1;
    scale[k] = Rational(1, 8 * Integer(m) * grid * bound * Integer(dim));
  }
  CombinatorialDescription d;
  ExactReal sum(basis, 0);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Rational> coords(dim);
    coords[0] = Rational(cuts[i + 1] - cuts[i], grid);
    coords[0].canonicalize();
    ExactReal len(basis, coords);
    if (i + 1 == m) {
      len = ExactReal(basis, 1) - sum;
    } else {
      for (std::size_t k = 1; k < dim; ++k) coords[k] = scale[k] * (long(below(3)) - 1);
      len = ExactReal(basis, coords);
    }
    sum += len;
    d.lengths.push_back(len);
  }
  d.permutation.resize(m);
  std::iota(d.permutation.begin(), d.permutation.end(), 0);
  for (std::size_t i = m; i > 1; --i) std::swap(d.permutation[i - 1], d.permutation[below(i)]);
  for (std::size_t i = 0; i < m; ++i) d.flips.push_back(flips && below(5) < 2 ? -1 : 1);
  return from_combinatorics(basis, d);
}

}  // namespace fiet
