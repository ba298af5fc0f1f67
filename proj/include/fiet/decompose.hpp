#pragma once

#include <cstddef>
#include <vector>

#include "fiet/certificate.hpp"
#include "fiet/fietcore.hpp"
#include "fiet/invariants.hpp"

namespace fiet {

class NotPeriodic : public Error {
 public:
  NotPeriodic() : Error("map is not periodic within the orbit cap") {}
};

class SupportNotInRightHalf : public Error {
 public:
  using Error::Error;
};

class EpsilonOutOfRange : public Error {
 public:
  EpsilonOutOfRange() : Error("epsilon must lie in (0, 1)") {}
};

// Orbit cap used when a construction needs the cell structure of a map that
// is expected to be periodic.
inline constexpr std::size_t kPeriodicCap = std::size_t{1} << 16;

// ---- flips and restricted rotations

struct FlipFactorization {
  Fiet g;                        // flip-free
  Fiet iota;                     // product of the symmetries of the flipped pieces
  std::vector<Interval> flipped;  // those pieces
};

// F = g o iota
FlipFactorization factor_flips(const Fiet& f);

CommutatorWitness restricted_rotation_as_commutator(const ExactReal& alpha, const Interval& j);
CommutatorWitness symmetry_as_commutator(const Interval& j);
// Disjoint intervals: the product of their symmetries as one commutator.
CommutatorWitness symmetries_as_commutator(const BasisPtr& basis, const std::vector<Interval>& js);
// Disjoint restricted rotations: their product as one commutator.
CommutatorWitness rotations_as_commutator(const BasisPtr& basis, const std::vector<RestrictedRotationWitness>& rs);
// Their product as a product of two involutions.
StrongReversalWitness rotations_as_strong_reversal(const BasisPtr& basis,
                                                   const std::vector<RestrictedRotationWitness>& rs);

// g = product of the returned rotations, at most (#pieces - 1) of them.
Certificate to_restricted_rotations(const Fiet& g);

// ---- periodic maps

struct PeriodicNormalForm {
  Fiet h;
  std::vector<RestrictedRotationWitness> components;  // disjoint, finite order
};

// h p h^-1 = product of the components.
PeriodicNormalForm periodic_normal_form(const Fiet& p, std::size_t cap = kPeriodicCap);
// q with q o q = p
Fiet sqrt_of_periodic(const Fiet& p, std::size_t cap = kPeriodicCap);
// involution h with h q h^-1 = q^-1
Fiet reverse_periodic(const Fiet& q, std::size_t cap = kPeriodicCap);
CommutatorWitness periodic_as_commutator(const Fiet& p, std::size_t cap = kPeriodicCap);
StrongReversalWitness periodic_as_strong_reversal(const Fiet& p, std::size_t cap = kPeriodicCap);

// ---- support shrinking and normalization

struct ShrinkResult {
  Fiet p;        // rational, periodic
  Fiet p_prime;  // inverse of a product of disjoint finite-order rotations
  Fiet g;        // p o f o p_prime
  Integer p_order;
  Integer p_prime_order;
  std::vector<RestrictedRotationWitness> rotations;  // p_prime^-1 = product of these
  Integer grid;        // denominator of the breakpoints of p
  ExactReal epsilon;   // 2m d(f^-1, p)
};

// |supp g| <= 1/n and #pieces(g) <= 5 #pieces(f), both checked exactly.
ShrinkResult shrink_support(const Fiet& f, const Integer& n);

struct NormalizedFix {
  Fiet h;
  Fiet conjugated;  // h g h^-1, fixed set [0, l)
  ExactReal fixed_length;
};

NormalizedFix normalize_fixed_set(const Fiet& g);

// ---- compression

enum class PairingKind { Commutators, StronglyReversible };

// Factors supported in the right half of J become ceil(c/2) + 1 factors
// supported in J (unchanged when c < 4).
std::vector<Factor> vaserstein_step(PairingKind kind, const std::vector<Factor>& factors, const Interval& j);

// Number of steps c -> ceil(c/2) + 1 needed to reach at most 3.
unsigned compression_rounds(std::size_t c);

// ---- headline decompositions

struct DecompositionOptions {
  // Skip the shortcuts for maps with few rotations or finite order.
  bool force_full_pipeline = false;
  std::size_t periodic_cap = 256;
};

Certificate commutator_decomposition(const Fiet& f, const DecompositionOptions& options = {});
Certificate strongly_reversible_decomposition(const Fiet& f, const DecompositionOptions& options = {});
Certificate involution_decomposition(const Fiet& f, const DecompositionOptions& options = {});

// ---- involutions and the corner-support form

// Involution i with |Fix(i o f)| >= |Fix f| + (1 - |Fix f|)(1 - eps)/5.
Fiet fix_increasing_involution(const Fiet& f, const Rational& eps);

Certificate corner_support_decomposition(const Fiet& f, unsigned long n);

}  // namespace fiet
