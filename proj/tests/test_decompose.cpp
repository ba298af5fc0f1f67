#include <doctest.h>

#include "fiet/decompose.hpp"
#include "fiet/verify.hpp"
#include "test_support.hpp"

using namespace fiet;
using namespace fiet::testing;

namespace {

Fiet product_of(const Certificate& c) {
  Fiet out = Fiet::identity(c.target.basis());
  for (const auto& f : c.factors) out = compose(out, f.value);
  return out;
}

Interval iv(const BasisPtr& b, long n1, long d1, long n2, long d2) { return {rat(b, n1, d1), rat(b, n2, d2)}; }

// c -> ceil(c/2) + 1 until the count stops dropping below 4
unsigned rounds_oracle(std::size_t c) {
  unsigned k = 0;
  for (; c >= 4; ++k) c = c - c / 2 + 1;
  return k;
}

}  // namespace

TEST_CASE("flip factorization") {
  std::mt19937_64 rng(11);
  for (const auto& b : {rational_basis(), sqrt2_basis()}) {
    for (int trial = 0; trial < 40; ++trial) {
      Fiet f = random_fiet(b, 2 + trial % 7, rng, true);
      auto ff = factor_flips(f);
      CHECK(ff.g.is_flip_free());
      CHECK(is_involution(ff.iota));
      CHECK(compose(ff.g, ff.iota) == f);
    }
  }
}

TEST_CASE("symmetries and rotations as single commutators") {
  auto b = sqrt2_basis();
  std::vector<Interval> js{iv(b, 0, 1, 1, 5), iv(b, 1, 3, 1, 2), iv(b, 3, 4, 1, 1)};
  auto w = symmetries_as_commutator(b, js);
  Fiet expected = compose(make_symmetry(js[0]), compose(make_symmetry(js[1]), make_symmetry(js[2])));
  CHECK(commutator(w.a, w.b) == expected);
  CHECK(commutator(symmetry_as_commutator(js[1]).a, symmetry_as_commutator(js[1]).b) == make_symmetry(js[1]));

  ExactReal irr(b, {Rational(0), Rational(1, 16)});  // sqrt2/16
  std::vector<RestrictedRotationWitness> rs{{irr, js[0]}, {rat(b, 1, 7), js[1]}, {rat(b, 1, 8), js[2]}};
  Fiet rot = compose(make_restricted_rotation(rs[0].alpha, rs[0].j),
                     compose(make_restricted_rotation(rs[1].alpha, rs[1].j), make_restricted_rotation(rs[2].alpha, rs[2].j)));
  auto cw = rotations_as_commutator(b, rs);
  CHECK(commutator(cw.a, cw.b) == rot);
  auto sw = rotations_as_strong_reversal(b, rs);
  CHECK(is_involution(sw.i1));
  CHECK(is_involution(sw.i2));
  CHECK(compose(sw.i1, sw.i2) == rot);
  auto single = restricted_rotation_as_commutator(irr, js[0]);
  CHECK(commutator(single.a, single.b) == make_restricted_rotation(irr, js[0]));
}

TEST_CASE("restricted rotation factorization") {
  std::mt19937_64 rng(12);
  for (const auto& b : {rational_basis(), sqrt2_basis()}) {
    for (int trial = 0; trial < 60; ++trial) {
      Fiet f = random_fiet(b, 2 + trial % 9, rng, false);
      auto cert = to_restricted_rotations(f);
      CHECK(cert.factors.size() + 1 <= std::max<std::size_t>(f.piece_count(), 1));
      CHECK(product_of(cert) == f);
      CHECK(verify(cert).ok());
    }
  }
  CHECK(to_restricted_rotations(Fiet::identity(rational_basis())).factors.empty());
}

TEST_CASE("periodic constructions") {
  std::mt19937_64 rng(13);
  auto b = rational_basis();
  for (int trial = 0; trial < 40; ++trial) {
    Fiet p = random_fiet(b, 2 + trial % 6, rng, false);
    Fiet q = sqrt_of_periodic(p);
    CHECK(compose(q, q) == p);
    Fiet h = reverse_periodic(p);
    CHECK(is_involution(h));
    CHECK(conjugate(h, p) == inverse(p));
    auto cw = periodic_as_commutator(p);
    CHECK(commutator(cw.a, cw.b) == p);
    auto sw = periodic_as_strong_reversal(p);
    CHECK(is_involution(sw.i1));
    CHECK(is_involution(sw.i2));
    CHECK(compose(sw.i1, sw.i2) == p);

    auto nf = periodic_normal_form(p);
    Fiet blocks = Fiet::identity(b);
    for (const auto& c : nf.components) blocks = compose(blocks, make_restricted_rotation(c.alpha, c.j));
    CHECK(conjugate(nf.h, p) == blocks);
  }
  CHECK_THROWS_AS(sqrt_of_periodic(make_rotation(ExactReal(sqrt2_basis(), {Rational(0), Rational(1, 2)}))),
                  NotPeriodic);
}

TEST_CASE("normalize fixed set") {
  auto b = rational_basis();
  Fiet g = make_restricted_rotation(rat(b, 1, 8), iv(b, 1, 4, 1, 2));
  auto nf = normalize_fixed_set(g);
  auto fixed = fixed_set(nf.conjugated);
  REQUIRE(fixed.size() == 1);
  CHECK(fixed[0] == iv(b, 0, 1, 3, 4));

  Fiet prefix = make_restricted_rotation(rat(b, 1, 8), iv(b, 1, 2, 1, 1));
  CHECK(normalize_fixed_set(prefix).h.is_identity());

  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 60; ++trial) {
    auto base = trial % 2 ? sqrt2_basis() : rational_basis();
    Fiet f = random_fiet(base, 2 + trial % 6, rng, false);
    // add fixed pieces by squeezing f into a random subinterval
    Fiet squeezed = transport(f, unit_interval(base), iv(base, 1, 5, 3, 5));
    Fiet mixed = compose(squeezed, make_restricted_rotation(rat(base, 1, 10), iv(base, 1, 2, 9, 10)));
    auto n = normalize_fixed_set(mixed);
    ExactReal l = fixed_measure(mixed);
    CHECK(n.fixed_length == l);
    CHECK(conjugate(n.h, mixed) == n.conjugated);
    auto fix = fixed_set(n.conjugated);
    if (l.is_zero()) {
      CHECK(fix.empty());
    } else {
      REQUIRE(fix.size() == 1);
      CHECK(fix[0].lo.is_zero());
      CHECK(fix[0].hi == l);
    }
    CHECK(n.conjugated.piece_count() <= 3 * mixed.piece_count());
  }
}

TEST_CASE("support shrinking") {
  std::mt19937_64 rng(15);
  for (long n : {2L, 8L, 32L}) {
    for (int trial = 0; trial < 12; ++trial) {
      auto b = trial % 2 ? sqrt2_basis() : rational_basis();
      Fiet f = random_fiet(b, 2 + trial % 5, rng, false);
      auto sh = shrink_support(f, n);
      CHECK(compose(sh.p, compose(f, sh.p_prime)) == sh.g);
      CHECK(support_measure(sh.g) <= rat(b, 1, n));
      CHECK(sh.g.piece_count() <= 5 * f.piece_count());
      CHECK(power(sh.p, sh.p_order).is_identity());
      CHECK(power(sh.p_prime, sh.p_prime_order).is_identity());
    }
  }
}

TEST_CASE("compression arithmetic") {
  for (std::size_t c = 0; c < 200; ++c) CHECK(compression_rounds(c) == rounds_oracle(c));
  CHECK(compression_rounds(14) == 4);  // 14 8 5 4 3
}

TEST_CASE("vaserstein step") {
  auto b = sqrt2_basis();
  std::mt19937_64 rng(16);
  Interval j = unit_interval(b);
  auto random_factors = [&](std::size_t c, PairingKind kind) {
    std::vector<Factor> out;
    std::uniform_int_distribution<int> pick(0, 15);
    for (std::size_t i = 0; i < c; ++i) {
      int lo = pick(rng), hi = pick(rng);
      if (lo == hi) hi = lo + 1;
      if (lo > hi) std::swap(lo, hi);
      Interval sub{rat(b, 1, 2) + rat(b, lo, 32), rat(b, 1, 2) + rat(b, hi, 32)};
      ExactReal alpha = sub.length() * Rational(1, 3) + ExactReal(b, {Rational(0), Rational(1, 1024)});
      RestrictedRotationWitness w{alpha, sub};
      Fiet v = make_restricted_rotation(alpha, sub);
      if (kind == PairingKind::Commutators)
        out.push_back({v, rotations_as_commutator(b, {w})});
      else
        out.push_back({v, rotations_as_strong_reversal(b, {w})});
    }
    return out;
  };
  for (auto kind : {PairingKind::Commutators, PairingKind::StronglyReversible}) {
    CHECK(vaserstein_step(kind, random_factors(4, kind), j).size() == 3);
    CHECK(vaserstein_step(kind, random_factors(2, kind), j).size() == 2);
    for (std::size_t c = 4; c <= 16; c += 3) {
      auto in = random_factors(c, kind);
      auto out = vaserstein_step(kind, in, j);
      CHECK(out.size() == (c + 1) / 2 + 1);
      Fiet before = Fiet::identity(b), after = Fiet::identity(b);
      for (const auto& f : in) before = compose(before, f.value);
      for (const auto& f : out) after = compose(after, f.value);
      CHECK(before == after);
      Certificate cert{kind == PairingKind::Commutators ? CertificateKind::Commutators
                                                        : CertificateKind::StronglyReversible,
                       before, out, std::nullopt, {}};
      auto verdict = verify(cert);
      for (const auto& fl : verdict.failures)
        if (fl.reason != FailureReason::CountExceeded) FAIL_CHECK(to_string(fl.reason), " ", fl.detail);
    }
  }
  std::vector<Factor> outside{{make_restricted_rotation(rat(b, 1, 8), iv(b, 0, 1, 1, 2)),
                               restricted_rotation_as_commutator(rat(b, 1, 8), iv(b, 0, 1, 1, 2))}};
  CHECK_THROWS_AS(vaserstein_step(PairingKind::Commutators, outside, j), SupportNotInRightHalf);
}

TEST_CASE("headline decompositions on small corpora") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 16; ++trial) {
    auto b = trial % 2 ? sqrt2_basis() : rational_basis();
    bool flips = trial % 4 < 2;
    Fiet f = random_fiet(b, 2 + trial % 7, rng, flips);
    DecompositionOptions opts;
    opts.force_full_pipeline = trial % 3 == 0;
    auto c = commutator_decomposition(f, opts);
    CHECK(c.factors.size() <= (f.is_flip_free() ? 5u : 6u));
    CHECK(product_of(c) == f);
    CHECK(verify(c).ok());
    auto s = strongly_reversible_decomposition(f, opts);
    CHECK(s.factors.size() <= 6);
    CHECK(verify(s).ok());
    auto i = involution_decomposition(f, opts);
    CHECK(i.factors.size() <= 12);
    CHECK(product_of(i) == f);
    for (const auto& fac : i.factors) CHECK(compose(fac.value, fac.value).is_identity());
  }
  auto id = Fiet::identity(rational_basis());
  CHECK(commutator_decomposition(id).factors.empty());
  auto rr = make_restricted_rotation(rat(rational_basis(), 1, 5), iv(rational_basis(), 1, 4, 3, 4));
  auto s = strongly_reversible_decomposition(rr);
  REQUIRE(s.factors.size() == 1);
  auto periodic = make_rotation(rat(rational_basis(), 2, 7));
  CHECK(commutator_decomposition(periodic).factors.size() == 1);
}

TEST_CASE("fix increasing involution") {
  auto b = rational_basis();
  Fiet half = make_rotation(rat(b, 1, 2));
  Fiet i = fix_increasing_involution(half, Rational(1, 10));
  CHECK(is_involution(i));
  CHECK(fixed_measure(compose(i, half)) >= rat(b, 1, 5) * Rational(9, 10));
  CHECK(fix_increasing_involution(Fiet::identity(b), Rational(1, 2)).is_identity());
  CHECK_THROWS_AS(fix_increasing_involution(half, Rational(1)), EpsilonOutOfRange);
  CHECK_THROWS_AS(fix_increasing_involution(half, Rational(0)), EpsilonOutOfRange);

  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 30; ++trial) {
    auto base = trial % 2 ? sqrt2_basis() : rational_basis();
    Fiet f = random_fiet(base, 2 + trial % 6, rng, false);
    Fiet inv = fix_increasing_involution(f, Rational(1, 10));
    CHECK(is_involution(inv));
    ExactReal before = fixed_measure(f);
    ExactReal want = before + (ExactReal(base, 1) - before) * Rational(9, 50);
    CHECK(fixed_measure(compose(inv, f)) >= want);
  }
}

TEST_CASE("corner support form") {
  CHECK(corner_count(1) == 1);
  CHECK(corner_count(2) == 4);
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 6; ++trial) {
    auto b = trial % 2 ? sqrt2_basis() : rational_basis();
    Fiet f = random_fiet(b, 2 + trial, rng, false);
    auto c = corner_support_decomposition(f, 2);
    CHECK(c.factors.size() == 5);
    CHECK(product_of(c) == f);
    CHECK(verify(c).ok());
  }
}
