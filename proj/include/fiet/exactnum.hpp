#pragma once

// Exact arithmetic on the Q-span of a declared basis (1, g1, ..., gp).
//
// Every value is stored as a coordinate vector of reduced rationals.  The
// generators are declared Q-linearly independent together with 1, so a value
// is zero exactly when all of its coordinates are zero.  Ordering of two
// distinct values is decided by refining rational enclosures of the
// generators until the enclosure of the difference excludes zero.

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fiet {

using Rational = mpq_class;
using Integer = mpz_class;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BasisMismatch : public Error {
 public:
  BasisMismatch() : Error("operands live on different bases") {}
};

class PrecisionExhausted : public Error {
 public:
  using Error::Error;
};

// A precondition on an argument was violated (out-of-range parameter,
// non-positive divisor, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& q);

// Closed rational enclosure [lo, hi].
struct Bounds {
  Rational lo;
  Rational hi;
};

struct SqrtGenerator {
  Rational radicand;
};

// A real constant known only through nested rational enclosures.  `refine`
// must return enclosures that are nested and whose width shrinks as `bits`
// grows; it may stop improving (finite oracle), in which case comparisons
// eventually report PrecisionExhausted.
struct OracleGenerator {
  std::string label;
  Bounds initial;
  std::string digits;  // decimal expansion, set when declared from JSON
  std::function<Bounds(unsigned bits)> refine;
};

using Generator = std::variant<SqrtGenerator, OracleGenerator>;

OracleGenerator decimal_oracle(Bounds initial, std::string digits);

struct PrecisionPolicy {
  unsigned initial_bits = 256;
  unsigned max_bits = 4096;
};

class Basis {
 public:
  explicit Basis(std::vector<Generator> generators, PrecisionPolicy policy = {});

  static std::shared_ptr<const Basis> rational();
  static std::shared_ptr<const Basis> sqrt(const std::vector<Rational>& radicands,
                                           PrecisionPolicy policy = {});

  // Number of coordinates, the implicit constant 1 included.
  std::size_t dimension() const { return generators_.size() + 1; }
  const std::vector<Generator>& generators() const { return generators_; }
  const PrecisionPolicy& policy() const { return policy_; }
  bool sqrt_only() const { return sqrt_only_; }

  // Structural equality of the declarations.
  bool same_as(const Basis& other) const;

  // Enclosure of generator `coord` (1-based, coordinate 0 is the constant 1)
  // scaled to a common dyadic denominator: the generator lies in
  // [num / 2^bits, (num + width) / 2^bits].
  struct DyadicEnclosure {
    Integer num;
    Integer width;
  };
  DyadicEnclosure enclosure(std::size_t coord, unsigned bits) const;

  // Double-precision midpoint and radius for each coordinate (1 first); a
  // radius of infinity disables the floating-point prefilter in compare().
  struct Approximation {
    double mid;
    double rad;
  };
  const std::vector<Approximation>& approximations() const { return approx_; }

 private:
  std::vector<Generator> generators_;
  PrecisionPolicy policy_;
  bool sqrt_only_ = true;
  std::vector<Approximation> approx_;

  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<std::size_t, unsigned>, DyadicEnclosure> cache_;
};

using BasisPtr = std::shared_ptr<const Basis>;

void require_same_basis(const BasisPtr& a, const BasisPtr& b);

class ExactReal {
 public:
  explicit ExactReal(BasisPtr basis, const Rational& constant = 0);
  ExactReal(BasisPtr basis, std::vector<Rational> coords);

  static ExactReal generator(BasisPtr basis, std::size_t coord);

  const BasisPtr& basis() const { return basis_; }
  const std::vector<Rational>& coords() const { return coords_; }

  bool is_zero() const;
  bool is_rational() const;
  const Rational& rational_part() const { return coords_[0]; }

  // -1, 0 or +1.
  int sign() const;

  ExactReal operator-() const;
  ExactReal& operator+=(const ExactReal& other);
  ExactReal& operator-=(const ExactReal& other);
  ExactReal& operator*=(const Rational& factor);
  ExactReal& operator/=(const Rational& divisor);

  friend ExactReal operator+(ExactReal a, const ExactReal& b) { return a += b; }
  friend ExactReal operator-(ExactReal a, const ExactReal& b) { return a -= b; }
  friend ExactReal operator*(ExactReal a, const Rational& q) { return a *= q; }
  friend ExactReal operator*(const Rational& q, ExactReal a) { return a *= q; }
  friend ExactReal operator/(ExactReal a, const Rational& q) { return a /= q; }

  // Syntactic (coordinate) equality; sound because of declared independence.
  friend bool operator==(const ExactReal& a, const ExactReal& b);

  // "c0 + c1*g1 + ..." with zero terms omitted.
  std::string to_string() const;
  // Floating approximation for display and diagnostics only.
  double approx() const;

 private:
  BasisPtr basis_;
  std::vector<Rational> coords_;
};

ExactReal parse_exact(const BasisPtr& basis, std::string_view text);

enum class Ordering { Less, Equal, Greater };

Ordering compare(const ExactReal& a, const ExactReal& b);

inline bool operator<(const ExactReal& a, const ExactReal& b) { return compare(a, b) == Ordering::Less; }
inline bool operator>(const ExactReal& a, const ExactReal& b) { return compare(a, b) == Ordering::Greater; }
inline bool operator<=(const ExactReal& a, const ExactReal& b) { return compare(a, b) != Ordering::Greater; }
inline bool operator>=(const ExactReal& a, const ExactReal& b) { return compare(a, b) != Ordering::Less; }

const ExactReal& min(const ExactReal& a, const ExactReal& b);
const ExactReal& max(const ExactReal& a, const ExactReal& b);
ExactReal abs(const ExactReal& a);

// Greatest integer k with k * den <= num.  Requires den > 0.
Integer floor_ratio(const ExactReal& num, const ExactReal& den);

// num / den when that quotient is rational, nullopt otherwise.
std::optional<Rational> rational_ratio(const ExactReal& num, const ExactReal& den);

// A rational enclosure of x at the requested precision.
Bounds enclose(const ExactReal& x, unsigned bits);

}  // namespace fiet
