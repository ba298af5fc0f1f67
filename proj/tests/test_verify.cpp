#include <doctest.h>

#include "fiet/decompose.hpp"
#include "fiet/verify.hpp"
#include "test_support.hpp"

using namespace fiet;
using namespace fiet::testing;

namespace {

bool has(const Verdict& v, FailureReason r) {
  for (const auto& f : v.failures)
    if (f.reason == r) return true;
  return false;
}

}  // namespace

TEST_CASE("valid certificates pass") {
  std::mt19937_64 rng(21);
  Fiet f = random_fiet(sqrt2_basis(), 6, rng, true);
  CHECK(verify(commutator_decomposition(f)).ok());
  CHECK(verify(involution_decomposition(f)).ok());
}

TEST_CASE("replacing a factor by a rotation breaks the product") {
  std::mt19937_64 rng(22);
  auto b = rational_basis();
  Fiet f = random_fiet(b, 5, rng, true);
  auto cert = commutator_decomposition(f);
  REQUIRE(!cert.factors.empty());
  cert.factors[0].value = make_rotation(rat(b, 1, 7));
  auto v = verify(cert);
  CHECK(has(v, FailureReason::ProductMismatch));
  CHECK(has(v, FailureReason::WitnessMismatch));
}

TEST_CASE("non-involution in an involution certificate") {
  auto b = rational_basis();
  Fiet r = make_rotation(rat(b, 1, 3));
  Certificate cert{CertificateKind::Involutions, r, {{r, InvolutionWitness{}}}, std::nullopt, {}};
  CHECK(has(verify(cert), FailureReason::NotInvolution));
}

TEST_CASE("count bounds and corner support") {
  auto b = rational_basis();
  Fiet r = make_restricted_rotation(rat(b, 1, 8), {rat(b, 0), rat(b, 1, 2)});
  std::vector<Factor> many;
  for (int i = 0; i < 7; ++i) many.push_back({r, restricted_rotation_as_commutator(rat(b, 1, 8), {rat(b, 0), rat(b, 1, 2)})});
  Certificate cert{CertificateKind::Commutators, power(r, 7), many, std::nullopt, {}};
  auto v = verify(cert);
  CHECK(has(v, FailureReason::CountExceeded));
  CHECK(!has(v, FailureReason::ProductMismatch));

  auto corner = corner_support_decomposition(r, 2);
  REQUIRE(verify(corner).ok());
  auto& w = std::get<ConjugateWitness>(corner.factors.back().witness);
  // move g out of the corner while keeping the product consistent
  Fiet k = make_restricted_rotation(rat(b, 1, 2), unit_interval(b));
  w.g = conjugate(k, w.g);
  w.h = compose(w.h, k);
  CHECK(has(verify(corner), FailureReason::SupportViolation));
}

TEST_CASE("saf check on flip-free commutator certificates") {
  auto b = sqrt2_basis();
  Fiet rot = make_rotation(ExactReal(b, {Rational(0), Rational(1, 2)}));
  // a bogus witness whose commutator is claimed to be an irrational rotation
  Certificate cert{CertificateKind::Commutators, rot, {{rot, CommutatorWitness{rot, Fiet::identity(b)}}}, std::nullopt, {}};
  auto v = verify(cert);
  CHECK(has(v, FailureReason::SafNonzero));
  CHECK(has(v, FailureReason::WitnessMismatch));
}

TEST_CASE("mutation testing rejects every single-factor perturbation") {
  std::mt19937_64 rng(23);
  std::size_t mutants = 0, rejected = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto b = trial % 2 ? sqrt2_basis() : rational_basis();
    Fiet f = random_fiet(b, 3 + trial % 5, rng, trial % 3 != 0);
    for (auto cert : {commutator_decomposition(f), strongly_reversible_decomposition(f), involution_decomposition(f),
                      to_restricted_rotations(factor_flips(f).g)}) {
      REQUIRE(verify(cert).ok());
      for (std::size_t i = 0; i < cert.factors.size(); ++i) {
        for (int kind = 0; kind < 2; ++kind) {
          Certificate m = cert;
          Fiet bump = kind == 0 ? make_rotation(rat(b, 1, 7)) : make_symmetry({rat(b, 1, 3), rat(b, 2, 3)});
          m.factors[i].value = compose(m.factors[i].value, bump);
          ++mutants;
          if (!verify(m).ok()) ++rejected;
        }
      }
    }
  }
  CHECK(mutants > 0);
  CHECK(rejected == mutants);
}
