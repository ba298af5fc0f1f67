#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fiet/fietcore.hpp"

namespace fiet {

class FlipPresent : public Error {
 public:
  FlipPresent() : Error("map has flipped pieces") {}
};

// Coordinates of sum_i lambda_i (x) delta_i in R (x)_Q R relative to the
// basis: matrix[j][k] is the coefficient of g_j (x) g_k, with g_0 = 1.
struct SafInvariant {
  std::vector<std::vector<Rational>> matrix;

  static SafInvariant zero(std::size_t dimension);
  bool is_zero() const;
  SafInvariant& operator+=(const SafInvariant& other);
  friend SafInvariant operator+(SafInvariant a, const SafInvariant& b) { return a += b; }
  friend bool operator==(const SafInvariant& a, const SafInvariant& b) { return a.matrix == b.matrix; }
};

SafInvariant saf(const Fiet& f);
bool in_commutator_subgroup(const Fiet& f);

struct PeriodicityVerdict {
  bool periodic = false;
  Integer order = 0;     // set when periodic
  std::size_t cap = 0;   // orbit-length cap that was in force
};

// The orbit structure of a periodic map: the cells between consecutive points
// of the closure of the breakpoint orbits are permuted isometrically.
struct CellCycles {
  std::vector<Interval> cells;                   // sorted, tiling [0,1)
  std::vector<std::vector<std::size_t>> cycles;  // c, f(c), f^2(c), ... as cell indices
  std::vector<bool> reversed;                    // cycle returns to itself flipped
  Integer order;
};

// Follows the orbit of every one-sided germ at a breakpoint.  If all of them
// close up within `cap` steps the map is periodic and the exact order is
// returned; otherwise nothing is returned.  When every breakpoint and offset
// is rational with common denominator q, orbits live on the 1/q grid and the
// cap is raised to 2q + 2 so the answer is always decided.
std::optional<CellCycles> periodic_cells(const Fiet& f, std::size_t cap);

PeriodicityVerdict is_periodic(const Fiet& f, std::size_t cap);

}  // namespace fiet
