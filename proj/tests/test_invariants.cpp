#include <map>

#include "doctest.h"
#include "fiet/invariants.hpp"
#include "test_support.hpp"

using namespace fiet;
using namespace fiet::testing;

namespace {

// Brute-force tensor expansion: sum over pieces of lambda_i (x) delta_i, with
// delta taken from the combinatorial formula rather than stored offsets, and
// terms collected in a sparse map keyed by generator pairs.
std::map<std::pair<std::size_t, std::size_t>, Rational> tensor_oracle(const Fiet& f) {
  auto d = combinatorics(f);
  auto delta = translations(d);
  std::map<std::pair<std::size_t, std::size_t>, Rational> terms;
  for (std::size_t i = 0; i < d.lengths.size(); ++i) {
    const auto& l = d.lengths[i].coords();
    const auto& t = delta[i].coords();
    for (std::size_t j = 0; j < l.size(); ++j)
      for (std::size_t k = 0; k < t.size(); ++k) {
        Rational term = l[j] * t[k];
        if (sgn(term) != 0) terms[{j, k}] += term;
      }
  }
  for (auto it = terms.begin(); it != terms.end();) it = sgn(it->second) == 0 ? terms.erase(it) : std::next(it);
  return terms;
}

bool matches_oracle(const SafInvariant& s, const std::map<std::pair<std::size_t, std::size_t>, Rational>& oracle) {
  for (std::size_t j = 0; j < s.matrix.size(); ++j)
    for (std::size_t k = 0; k < s.matrix.size(); ++k) {
      auto it = oracle.find({j, k});
      Rational expected = it == oracle.end() ? Rational(0) : it->second;
      if (s.matrix[j][k] != expected) return false;
    }
  return true;
}

// Smallest n <= limit with f^n = id, by plain repeated composition.
std::optional<long> order_by_iteration(const Fiet& f, long limit) {
  Fiet acc = f;
  for (long n = 1; n <= limit; ++n) {
    if (acc.is_identity()) return n;
    acc = compose(acc, f);
  }
  return std::nullopt;
}

// Random periodic map on the 1/q grid: a random product of cell swaps and
// cyclic shifts of equal-length grid blocks, conjugated by a random IET.
Fiet random_rational_periodic(std::size_t q, std::mt19937_64& rng, bool flips) {
  auto b = rational_basis();
  std::vector<std::size_t> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Piece> pieces;
  std::bernoulli_distribution coin(0.3);
  for (std::size_t i = 0; i < q; ++i) {
    ExactReal l(b, Rational(static_cast<long>(i), static_cast<long>(q)));
    ExactReal r(b, Rational(static_cast<long>(i + 1), static_cast<long>(q)));
    ExactReal target(b, Rational(static_cast<long>(perm[i]), static_cast<long>(q)));
    if (flips && coin(rng)) {
      pieces.push_back({l, r, -1, target + r});
    } else {
      pieces.push_back({l, r, 1, target - l});
    }
  }
  return Fiet::canonicalize(b, pieces);
}

}  // namespace

TEST_CASE("saf of rotations") {
  auto b = rational_basis();
  CHECK(saf(make_rotation(rat(b, 1, 2))).is_zero());
  for (long q = 2; q < 22; ++q) CHECK(saf(make_rotation(rat(b, 1, q))).is_zero());

  auto s = sqrt2_basis();
  auto alpha = ExactReal(s, {Rational(0), Rational(1, 2)});
  auto m = saf(make_rotation(alpha));
  // hand expansion: (1-a)(x)a + a(x)(a-1) = 1(x)a - a(x)1 with a = g1/2
  CHECK(m.matrix[0][0] == 0);
  CHECK(m.matrix[0][1] == Rational(1, 2));
  CHECK(m.matrix[1][0] == Rational(-1, 2));
  CHECK(m.matrix[1][1] == 0);
  CHECK(matches_oracle(m, tensor_oracle(make_rotation(alpha))));
  CHECK_FALSE(in_commutator_subgroup(make_rotation(alpha)));
  CHECK(in_commutator_subgroup(make_rotation(ExactReal(s, Rational(2, 7)))));
  CHECK_THROWS_AS(saf(make_symmetry(unit_interval(s))), FlipPresent);
}

TEST_CASE("saf agrees with the tensor expansion oracle") {
  std::mt19937_64 rng(21);
  for (auto b : {sqrt2_basis(), Basis::sqrt({Rational(2), Rational(3)})}) {
    for (int i = 0; i < 50; ++i) {
      CombinatorialDescription d;
      std::size_t m = 1 + rng() % 7;
      d.lengths = random_lengths(b, m, rng);
      d.permutation.resize(m);
      std::iota(d.permutation.begin(), d.permutation.end(), 0);
      std::shuffle(d.permutation.begin(), d.permutation.end(), rng);
      auto f = from_combinatorics(b, d);
      CHECK(matches_oracle(saf(f), tensor_oracle(f)));
    }
  }
}

TEST_CASE("saf is a homomorphism and a conjugation invariant") {
  std::mt19937_64 rng(22);
  auto b = sqrt2_basis();
  for (int i = 0; i < 60; ++i) {
    auto f = random_fiet(b, 1 + rng() % 6, rng, false);
    auto g = random_fiet(b, 1 + rng() % 6, rng, false);
    CHECK(saf(compose(f, g)) == saf(f) + saf(g));
    CHECK(saf(conjugate(g, f)) == saf(f));
    CHECK(saf(commutator(f, g)).is_zero());
  }
  CHECK(saf(Fiet::identity(b)).is_zero());
}

TEST_CASE("periodicity verdicts") {
  auto b = rational_basis();
  auto r = is_periodic(make_rotation(rat(b, 1, 3)), 10);
  CHECK(r.periodic);
  CHECK(r.order == 3);
  auto inv = is_periodic(make_symmetry(unit_interval(b)), 10);
  CHECK(inv.periodic);
  CHECK(inv.order == 2);
  CHECK(is_periodic(Fiet::identity(b), 1).order == 1);

  auto s = sqrt2_basis();
  auto irr = is_periodic(make_rotation(ExactReal(s, {Rational(0), Rational(1, 2)})), 100);
  CHECK_FALSE(irr.periodic);
  CHECK(irr.cap == 100);

  // periodic with irrational data: restricted rotation by |J|/3 on an irrational J
  Interval j{ExactReal(s, 0), ExactReal(s, {Rational(0), Rational(1, 2)})};
  auto rr = make_restricted_rotation(j.length() / Rational(3), j);
  auto v = is_periodic(rr, 20);
  CHECK(v.periodic);
  CHECK(v.order == 3);
}

TEST_CASE("periodic orders match brute-force iteration") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 60; ++i) {
    auto f = random_rational_periodic(2 + rng() % 11, rng, i % 2 == 1);
    auto v = is_periodic(f, 1);
    REQUIRE(v.periodic);
    auto expected = order_by_iteration(f, 100000);
    REQUIRE(expected.has_value());
    CHECK(v.order == *expected);
    CHECK(power(f, v.order).is_identity());
  }
}

TEST_CASE("cell cycles tile the interval") {
  std::mt19937_64 rng(24);
  auto f = random_rational_periodic(12, rng, false);
  auto cells = periodic_cells(f, 1);
  REQUIRE(cells.has_value());
  ExactReal total(f.basis(), 0);
  for (const auto& c : cells->cells) total += c.length();
  CHECK(total == ExactReal(f.basis(), 1));
  for (const auto& cyc : cells->cycles)
    for (std::size_t t = 0; t < cyc.size(); ++t) {
      const auto& from = cells->cells[cyc[t]];
      const auto& to = cells->cells[cyc[(t + 1) % cyc.size()]];
      CHECK(f(from.lo) == to.lo);
    }
}
