#pragma once

// Interval exchange transformations with flips, modulo finite sets.
//
// A Fiet is stored in canonical form: a sorted list of pieces partitioning
// (0,1) up to finitely many points, each piece an isometry x -> sign*x + offset,
// with no two adjacent pieces carrying the same isometry.  Point values at
// breakpoints are not stored, so two maps that differ on a finite set have the
// same canonical form and compare equal.

#include <cstddef>
#include <vector>

#include "fiet/exactnum.hpp"

namespace fiet {

// Half-open interval [lo, hi).
struct Interval {
  ExactReal lo;
  ExactReal hi;

  ExactReal length() const { return hi - lo; }
  friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }
};

struct Piece {
  ExactReal left;
  ExactReal right;
  int sign;  // +1 translation, -1 flip
  ExactReal offset;

  // x -> x + offset (sign +1) or x -> offset - x (sign -1).
  ExactReal apply(const ExactReal& x) const { return sign > 0 ? x + offset : offset - x; }
  ExactReal length() const { return right - left; }
  // Image interval (as a set, endpoints sorted).
  Interval image() const;
  bool is_identity() const { return sign > 0 && offset.is_zero(); }
};

class InvalidFiet : public Error {
 public:
  enum class Reason { OverlappingPieces, CoverageGap, ImagesNotTiling, BadSign };
  InvalidFiet(Reason reason, const std::string& what) : Error(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

class PieceCapExceeded : public Error {
 public:
  using Error::Error;
};

// Hard cap on the number of pieces of any constructed map.
std::size_t piece_cap();
void set_piece_cap(std::size_t cap);

class Fiet {
 public:
  static Fiet identity(BasisPtr basis);

  // Validates coverage, bijectivity and signs; sorts and merges.
  static Fiet canonicalize(BasisPtr basis, std::vector<Piece> pieces);

  const BasisPtr& basis() const { return basis_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::size_t piece_count() const { return pieces_.size(); }

  bool is_identity() const;
  bool is_flip_free() const;

  // Interior breakpoints, sorted.
  std::vector<ExactReal> breakpoints() const;

  // Index of the piece whose interval contains x (x in [0,1)); x on a
  // breakpoint selects the piece to its right.
  std::size_t piece_index(const ExactReal& x) const;

  // Value at a point; at breakpoints this uses the piece to the right.
  ExactReal operator()(const ExactReal& x) const;

  friend bool operator==(const Fiet& a, const Fiet& b);
  friend bool operator!=(const Fiet& a, const Fiet& b) { return !(a == b); }

  // Sorted, contiguous pieces that are already known to form a bijection.
  // Adjacent equal isometries are merged.  Used by the operations below.
  static Fiet from_trusted(BasisPtr basis, std::vector<Piece> pieces);

 private:
  Fiet(BasisPtr basis, std::vector<Piece> pieces) : basis_(std::move(basis)), pieces_(std::move(pieces)) {}

  BasisPtr basis_;
  std::vector<Piece> pieces_;
};

// f o g
Fiet compose(const Fiet& f, const Fiet& g);
// Left-to-right product f1 o f2 o ... ; identity for an empty list.
Fiet compose_all(const BasisPtr& basis, const std::vector<Fiet>& maps);
Fiet inverse(const Fiet& f);
bool equals(const Fiet& f, const Fiet& g);
// f^n for any integer n, by repeated squaring.
Fiet power(const Fiet& f, const Integer& n);
// h o f o h^-1
Fiet conjugate(const Fiet& h, const Fiet& f);
// a b a^-1 b^-1
Fiet commutator(const Fiet& a, const Fiet& b);
bool is_involution(const Fiet& f);

// Maximal intervals on which f is the identity, sorted.
std::vector<Interval> fixed_set(const Fiet& f);
ExactReal fixed_measure(const Fiet& f);
ExactReal support_measure(const Fiet& f);
// Maximal intervals on which f is not the identity, sorted.
std::vector<Interval> support_components(const Fiet& f);
// supp(f) contained in J (up to finite sets).
bool supported_in(const Fiet& f, const Interval& j);

struct CombinatorialDescription {
  std::vector<ExactReal> lengths;     // lambda_i
  std::vector<std::size_t> permutation;  // pi(i): rank of the image of piece i, 0-based
  std::vector<int> flips;             // u_i
};

CombinatorialDescription combinatorics(const Fiet& f);
// a_i: left endpoints, prefix sums of the lengths.
std::vector<ExactReal> left_endpoints(const CombinatorialDescription& d);
// delta_i = -sum_{k<i} lambda_k + sum_{k<pi(i)} lambda_{pi^-1(k)}.
std::vector<ExactReal> translations(const CombinatorialDescription& d);
// The IET (or FIET) with the given description.
Fiet from_combinatorics(const BasisPtr& basis, const CombinatorialDescription& d);

class DomainMismatch : public Error {
 public:
  using Error::Error;
};

// Sum of |lambda_i(f) - lambda_i(g)| on G_{m,pi}.
ExactReal metric_d(const Fiet& f, const Fiet& g);

// R_a, x -> x + a mod 1, for 0 <= a < 1.
Fiet make_rotation(const ExactReal& a);
// R_{alpha,J}: x -> x + alpha mod |J| on J, identity elsewhere; 0 <= alpha < |J|.
Fiet make_restricted_rotation(const ExactReal& alpha, const Interval& j);
// Same, with alpha reduced modulo |J| first (any real alpha).
Fiet make_restricted_rotation_mod(const ExactReal& alpha, const Interval& j);
// I_J: the orientation-reversing isometry of J, identity elsewhere.
Fiet make_symmetry(const Interval& j);
// S_{theta,J} = I_[a,theta] o I_(theta,b), theta in [a,b).
Fiet make_S(const ExactReal& theta, const Interval& j);

class IrrationalScale : public Error {
 public:
  using Error::Error;
};

// Conjugate of f (supported in J) by the direct affine map J -> K.
Fiet transport(const Fiet& f, const Interval& j, const Interval& k);

Interval unit_interval(const BasisPtr& basis);

}  // namespace fiet
