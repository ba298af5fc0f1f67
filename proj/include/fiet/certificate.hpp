#pragma once

// Certificates: a target map, an ordered list of factors whose product is the
// target, and for each factor a witness that can be replayed independently.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fiet/fietcore.hpp"

namespace fiet {

enum class CertificateKind { Rotations, Commutators, Involutions, StronglyReversible, CornerSupport };

const char* to_string(CertificateKind kind);
std::optional<CertificateKind> parse_kind(std::string_view name);

// value = a b a^-1 b^-1
struct CommutatorWitness {
  Fiet a;
  Fiet b;
};

// value o value = id
struct InvolutionWitness {};

// value = i1 o i2 with i1, i2 involutions
struct StrongReversalWitness {
  Fiet i1;
  Fiet i2;
};

// value = R_{alpha,J}
struct RestrictedRotationWitness {
  ExactReal alpha;
  Interval j;
};

// value^order = id
struct PeriodicWitness {
  Integer order;
};

// value = h g h^-1
struct ConjugateWitness {
  Fiet h;
  Fiet g;
};

using Witness = std::variant<CommutatorWitness, InvolutionWitness, StrongReversalWitness, RestrictedRotationWitness,
                             PeriodicWitness, ConjugateWitness>;

struct Factor {
  Fiet value;
  Witness witness;
};

struct Certificate {
  CertificateKind kind;
  Fiet target;
  std::vector<Factor> factors;
  std::optional<unsigned long> n;  // corner-support parameter
  std::map<std::string, std::string> meta;
};

// Number of involutions in the corner-support form for parameter n: one more
// than the largest k with 5^k <= n 4^k.
unsigned long corner_count(unsigned long n);

}  // namespace fiet
