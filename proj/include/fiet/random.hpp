#pragma once

#include <cstdint>

#include "fiet/fietcore.hpp"

namespace fiet {

// Seeded random map with m pieces.  Breakpoints sit on the 1/grid lattice;
// when the basis has generators each length is nudged by small multiples of
// them (at most 1/(8 m grid) in absolute value), so irrational data stays in
// the same combinatorial class as the lattice map.  Deterministic for a given
// seed on a given platform.
Fiet random_lattice_fiet(const BasisPtr& basis, std::size_t m, long grid, bool flips, std::uint64_t seed);

}  // namespace fiet
