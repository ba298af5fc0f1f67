#include "fiet/decompose.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace fiet {

namespace {

ExactReal zero_of(const BasisPtr& b) { return ExactReal(b, 0); }
ExactReal one_of(const BasisPtr& b) { return ExactReal(b, 1); }

// Non-identity pieces with disjoint domains, in any order; the gaps become
// identity.
Fiet assemble(const BasisPtr& basis, std::vector<Piece> pieces) {
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.left < b.left; });
  std::vector<Piece> out;
  ExactReal cursor = zero_of(basis);
  for (auto& p : pieces) {
    if (!(cursor == p.left)) out.push_back({cursor, p.left, 1, zero_of(basis)});
    cursor = p.right;
    out.push_back(std::move(p));
  }
  if (!(cursor == one_of(basis))) out.push_back({cursor, one_of(basis), 1, zero_of(basis)});
  return Fiet::from_trusted(basis, std::move(out));
}

void append_symmetry(std::vector<Piece>& out, const Interval& j) { out.push_back({j.lo, j.hi, -1, j.lo + j.hi}); }

void append_rotation(std::vector<Piece>& out, const ExactReal& alpha, const Interval& j) {
  if (alpha.is_zero()) return;
  ExactReal cut = j.hi - alpha;
  out.push_back({j.lo, cut, 1, alpha});
  out.push_back({cut, j.hi, 1, alpha - j.length()});
}

Fiet rotation_product(const BasisPtr& basis, const std::vector<RestrictedRotationWitness>& rs) {
  std::vector<Piece> pieces;
  for (const auto& r : rs) append_rotation(pieces, r.alpha, r.j);
  return assemble(basis, std::move(pieces));
}

Fiet symmetry_product(const BasisPtr& basis, const std::vector<Interval>& js) {
  std::vector<Piece> pieces;
  for (const auto& j : js) append_symmetry(pieces, j);
  return assemble(basis, std::move(pieces));
}

CellCycles cells_or_throw(const Fiet& p, std::size_t cap) {
  if (!p.is_flip_free()) throw FlipPresent();
  auto cells = periodic_cells(p, cap);
  if (!cells) throw NotPeriodic();
  return std::move(*cells);
}

Fiet conj(const Fiet& k, const Fiet& x, const Fiet& k_inv) { return compose(k, compose(x, k_inv)); }

// k w k^-1 applied to every map inside a witness.
Witness conjugate_witness(const Witness& w, const Fiet& k, const Fiet& k_inv) {
  if (auto c = std::get_if<CommutatorWitness>(&w)) return CommutatorWitness{conj(k, c->a, k_inv), conj(k, c->b, k_inv)};
  if (auto s = std::get_if<StrongReversalWitness>(&w))
    return StrongReversalWitness{conj(k, s->i1, k_inv), conj(k, s->i2, k_inv)};
  if (auto g = std::get_if<ConjugateWitness>(&w)) return ConjugateWitness{compose(k, g->h), g->g};
  return w;
}

}  // namespace

// ---------------------------------------------------------------------------
// flips and restricted rotations

FlipFactorization factor_flips(const Fiet& f) {
  std::vector<Interval> flipped;
  for (const auto& p : f.pieces())
    if (p.sign < 0) flipped.push_back({p.left, p.right});
  Fiet iota = symmetry_product(f.basis(), flipped);
  return {compose(f, iota), iota, flipped};
}

CommutatorWitness symmetries_as_commutator(const BasisPtr& basis, const std::vector<Interval>& js) {
  // I_J = f1 o (R f1 R^-1) with f1 the symmetry of the middle half of J and
  // R the rotation of J by half its length.
  std::vector<Piece> middles, halves;
  for (const auto& j : js) {
    ExactReal quarter = j.length() / Rational(4);
    append_symmetry(middles, {j.lo + quarter, j.hi - quarter});
    append_rotation(halves, j.length() / Rational(2), j);
  }
  return {assemble(basis, std::move(middles)), assemble(basis, std::move(halves))};
}

CommutatorWitness symmetry_as_commutator(const Interval& j) { return symmetries_as_commutator(j.lo.basis(), {j}); }

CommutatorWitness rotations_as_commutator(const BasisPtr& basis, const std::vector<RestrictedRotationWitness>& rs) {
  // [I_J, R_{-alpha/2,J}] = R_{alpha/2,J}^2
  std::vector<Interval> js;
  std::vector<RestrictedRotationWitness> halves;
  for (const auto& r : rs) {
    if (r.alpha.is_zero()) continue;
    js.push_back(r.j);
    halves.push_back({r.j.length() - r.alpha / Rational(2), r.j});
  }
  return {symmetry_product(basis, js), rotation_product(basis, halves)};
}

CommutatorWitness restricted_rotation_as_commutator(const ExactReal& alpha, const Interval& j) {
  return rotations_as_commutator(alpha.basis(), {{alpha, j}});
}

StrongReversalWitness rotations_as_strong_reversal(const BasisPtr& basis,
                                                   const std::vector<RestrictedRotationWitness>& rs) {
  std::vector<Interval> js;
  for (const auto& r : rs)
    if (!r.alpha.is_zero()) js.push_back(r.j);
  Fiet i1 = symmetry_product(basis, js);
  return {i1, compose(i1, rotation_product(basis, rs))};
}

Certificate to_restricted_rotations(const Fiet& g) {
  if (!g.is_flip_free()) throw FlipPresent();
  const BasisPtr& basis = g.basis();
  Certificate cert{CertificateKind::Rotations, g, {}, std::nullopt, {}};
  Fiet cur = g;
  ExactReal c = zero_of(basis);
  const ExactReal one = one_of(basis);
  // cur is the identity on [0, c).  The piece at c is sent to [c + d, r + d);
  // rotating [c, r + d) by r - c brings it home without touching [0, c).
  while (c < one) {
    const Piece& p = cur.pieces()[cur.piece_index(c)];
    ExactReal r = p.right;
    if (!p.offset.is_zero()) {
      Interval j{c, r + p.offset};
      ExactReal len = r - c;
      cur = compose(make_restricted_rotation(len, j), cur);
      ExactReal back = j.length() - len;
      cert.factors.push_back({make_restricted_rotation(back, j), RestrictedRotationWitness{back, j}});
    }
    c = r;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// periodic maps

PeriodicNormalForm periodic_normal_form(const Fiet& p, std::size_t cap) {
  auto cells = cells_or_throw(p, cap);
  const BasisPtr& basis = p.basis();
  std::vector<Piece> h_pieces;
  PeriodicNormalForm out{Fiet::identity(basis), {}};
  ExactReal pos = zero_of(basis);
  for (const auto& cycle : cells.cycles) {
    ExactReal block_start = pos;
    ExactReal len = cells.cells[cycle.front()].length();
    for (auto idx : cycle) {
      const auto& cell = cells.cells[idx];
      h_pieces.push_back({cell.lo, cell.hi, 1, pos - cell.lo});
      pos += len;
    }
    if (cycle.size() > 1) out.components.push_back({len, {block_start, pos}});
  }
  out.h = assemble(basis, std::move(h_pieces));
  return out;
}

Fiet sqrt_of_periodic(const Fiet& p, std::size_t cap) {
  auto cells = cells_or_throw(p, cap);
  const BasisPtr& basis = p.basis();
  std::vector<Piece> pieces;
  // On a cycle of cells c_0 -> c_1 -> ... the halves are visited in the order
  // A_0, B_0, A_1, B_1, ...; one step along that order squares to p.
  for (const auto& cycle : cells.cycles) {
    if (cycle.size() == 1) continue;
    for (std::size_t t = 0; t < cycle.size(); ++t) {
      const auto& cell = cells.cells[cycle[t]];
      const auto& next = cells.cells[cycle[(t + 1) % cycle.size()]];
      ExactReal half = cell.length() / Rational(2);
      ExactReal mid = cell.lo + half;
      pieces.push_back({cell.lo, mid, 1, half});
      pieces.push_back({mid, cell.hi, 1, next.lo - mid});
    }
  }
  return assemble(basis, std::move(pieces));
}

Fiet reverse_periodic(const Fiet& q, std::size_t cap) {
  auto cells = cells_or_throw(q, cap);
  std::vector<Piece> pieces;
  for (const auto& cycle : cells.cycles) {
    const std::size_t len = cycle.size();
    for (std::size_t t = 1; t < len; ++t) {
      const auto& from = cells.cells[cycle[t]];
      const auto& to = cells.cells[cycle[len - t]];
      pieces.push_back({from.lo, from.hi, 1, to.lo - from.lo});
    }
  }
  return assemble(q.basis(), std::move(pieces));
}

CommutatorWitness periodic_as_commutator(const Fiet& p, std::size_t cap) {
  if (p.is_identity()) return {p, p};
  Fiet q = sqrt_of_periodic(p, cap);
  return {q, reverse_periodic(q, cap)};
}

StrongReversalWitness periodic_as_strong_reversal(const Fiet& p, std::size_t cap) {
  Fiet h = reverse_periodic(p, cap);
  return {h, compose(h, p)};
}

// ---------------------------------------------------------------------------
// support shrinking

namespace {

struct ShrinkAttempt {
  Fiet p;
  Fiet fe;
  std::vector<RestrictedRotationWitness> rotations;
  Integer order;
};

// Rotations R_i on the pieces of f that agree with p o f on most of each piece.
ShrinkAttempt shrink_with_grid(const Fiet& f, const CombinatorialDescription& dinv, const std::vector<ExactReal>& b,
                               const Integer& grid, bool& ok) {
  const BasisPtr& basis = f.basis();
  const std::size_t m = b.size();
  const Rational step(1, grid);
  ExactReal unit(basis, step);
  std::vector<ExactReal> rounded;
  for (const auto& x : b) rounded.push_back(ExactReal(basis, Rational(floor_ratio(x, unit)) * step));
  ok = true;
  for (std::size_t i = 0; i + 1 < m; ++i)
    if (!(rounded[i] < rounded[i + 1])) ok = false;
  if (!(rounded.back() < one_of(basis))) ok = false;
  if (!ok) return {Fiet::identity(basis), Fiet::identity(basis), {}, 1};

  CombinatorialDescription dp;
  for (std::size_t i = 0; i < m; ++i) dp.lengths.push_back((i + 1 < m ? rounded[i + 1] : one_of(basis)) - rounded[i]);
  dp.permutation = dinv.permutation;
  dp.flips.assign(m, 1);
  Fiet p = from_combinatorics(basis, dp);
  Fiet fe = compose(p, f);

  std::vector<RestrictedRotationWitness> rotations;
  Integer order = 1;
  for (const auto& piece : f.pieces()) {
    const ExactReal& a = piece.left;
    const Piece& q = fe.pieces()[fe.piece_index(a)];
    const ExactReal e = min(q.right, piece.right);
    const ExactReal& d = q.offset;
    const int s = d.sign();
    if (s == 0) continue;
    Integer r;
    ExactReal step_len = abs(d);
    if (s > 0) {
      Integer by_continuity = floor_ratio(e - a, step_len) + 1;
      Integer by_piece = floor_ratio(piece.length(), step_len);
      r = by_continuity < by_piece ? by_continuity : by_piece;
    } else {
      r = floor_ratio(e - a, step_len);
    }
    if (r < 2) continue;
    Interval j{a, a + step_len * Rational(r)};
    // angle d modulo |J|
    ExactReal alpha = s > 0 ? step_len : step_len * Rational(r - 1);
    rotations.push_back({alpha, j});
    mpz_lcm(order.get_mpz_t(), order.get_mpz_t(), r.get_mpz_t());
  }
  return {p, fe, rotations, order};
}

}  // namespace

ShrinkResult shrink_support(const Fiet& f, const Integer& n) {
  if (!f.is_flip_free()) throw FlipPresent();
  if (n < 1) throw DomainError("n must be positive");
  const BasisPtr& basis = f.basis();
  if (f.is_identity()) {
    Fiet id = Fiet::identity(basis);
    return {id, id, id, 1, 1, {}, 1, zero_of(basis)};
  }
  const std::size_t m = f.piece_count();
  Fiet finv = inverse(f);
  auto dinv = combinatorics(finv);
  auto b = left_endpoints(dinv);
  const ExactReal bound(basis, Rational(1) / Rational(n));

  for (Integer grid = 2; grid.get_str(2).size() <= 48; grid *= 2) {
    bool ok = false;
    auto attempt = shrink_with_grid(f, dinv, b, grid, ok);
    if (!ok) continue;
    Fiet product = rotation_product(basis, attempt.rotations);
    Fiet p_prime = inverse(product);
    Fiet g = compose(attempt.fe, p_prime);
    if (support_measure(g) <= bound && g.piece_count() <= 5 * m) {
      auto cells = periodic_cells(attempt.p, 1);
      if (!cells) throw Error("rational approximant failed to be periodic");
      ShrinkResult out{attempt.p, p_prime, g, cells->order, attempt.order, attempt.rotations, grid,
                       metric_d(finv, attempt.p) * Rational(2 * m)};
      return out;
    }
  }
  throw Error("support shrinking did not reach the requested bound");
}

NormalizedFix normalize_fixed_set(const Fiet& g) {
  const BasisPtr& basis = g.basis();
  ExactReal l = fixed_measure(g);
  // Fixed components go to [0, l) in order, moving components to [l, 1).
  std::vector<Piece> pieces;
  ExactReal fixed_pos = zero_of(basis), moving_pos = l;
  ExactReal cursor = zero_of(basis);
  for (const auto& comp : support_components(g)) {
    if (cursor < comp.lo) {
      pieces.push_back({cursor, comp.lo, 1, fixed_pos - cursor});
      fixed_pos += comp.lo - cursor;
    }
    pieces.push_back({comp.lo, comp.hi, 1, moving_pos - comp.lo});
    moving_pos += comp.length();
    cursor = comp.hi;
  }
  if (cursor < one_of(basis)) pieces.push_back({cursor, one_of(basis), 1, fixed_pos - cursor});
  Fiet h = Fiet::from_trusted(basis, std::move(pieces));
  return {h, conjugate(h, g), l};
}

// ---------------------------------------------------------------------------
// compression

unsigned compression_rounds(std::size_t c) {
  unsigned rounds = 0;
  while (c > 3) {
    c = (c + 1) / 2 + 1;
    ++rounds;
  }
  return rounds;
}

namespace {

bool witness_supported_in(const Witness& w, const Interval& k) {
  if (auto c = std::get_if<CommutatorWitness>(&w)) return supported_in(c->a, k) && supported_in(c->b, k);
  if (auto s = std::get_if<StrongReversalWitness>(&w)) return supported_in(s->i1, k) && supported_in(s->i2, k);
  return true;
}

}  // namespace

std::vector<Factor> vaserstein_step(PairingKind kind, const std::vector<Factor>& factors, const Interval& j) {
  const BasisPtr& basis = j.lo.basis();
  ExactReal half = j.length() / Rational(2);
  Interval right{j.lo + half, j.hi};
  for (const auto& f : factors) {
    if (!supported_in(f.value, right) || !witness_supported_in(f.witness, right))
      throw SupportNotInRightHalf("factor not supported in [" + right.lo.to_string() + ", " + right.hi.to_string() + ")");
    bool matches = kind == PairingKind::Commutators ? std::holds_alternative<CommutatorWitness>(f.witness)
                                                    : std::holds_alternative<StrongReversalWitness>(f.witness);
    if (!matches) throw DomainError("factor witness does not match the pairing kind");
  }
  const std::size_t c = factors.size();
  if (c < 4) return factors;

  // R is an involution moving the right half of J onto the left half, so
  // x' = R x R^-1 commutes with everything supported in the right half.
  Fiet r = make_restricted_rotation(half, j);
  auto moved = [&](const Fiet& x) { return conj(r, x, r); };
  const std::size_t p = (c + 1) / 2;
  const Fiet id = Fiet::identity(basis);

  std::vector<Factor> out;
  for (std::size_t i = 0; i < p; ++i) {
    const Factor& first = factors[i];
    if (p + i >= c) {
      out.push_back(first);
      continue;
    }
    const Factor& second = factors[p + i];
    Fiet value = compose(first.value, moved(second.value));
    if (kind == PairingKind::Commutators) {
      const auto& w1 = std::get<CommutatorWitness>(first.witness);
      const auto& w2 = std::get<CommutatorWitness>(second.witness);
      out.push_back({value, CommutatorWitness{compose(w1.a, moved(w2.a)), compose(w1.b, moved(w2.b))}});
    } else {
      const auto& w1 = std::get<StrongReversalWitness>(first.witness);
      const auto& w2 = std::get<StrongReversalWitness>(second.witness);
      out.push_back({value, StrongReversalWitness{compose(w1.i1, moved(w2.i1)), compose(w1.i2, moved(w2.i2))}});
    }
  }

  // Tail: X'^-1 X with X the product of the second half.
  std::vector<Fiet> tail_values;
  for (std::size_t i = p; i < c; ++i) tail_values.push_back(factors[i].value);
  Fiet x = compose_all(basis, tail_values);
  Fiet x_inv = inverse(x);
  Fiet tail = compose(moved(x_inv), x);
  if (kind == PairingKind::Commutators) {
    out.push_back({tail, CommutatorWitness{r, x_inv}});
  } else {
    out.push_back({tail, StrongReversalWitness{r, compose(x_inv, compose(r, x))}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// headline pipeline

namespace {

Factor rotation_factor(PairingKind kind, const Factor& rot) {
  const auto& w = std::get<RestrictedRotationWitness>(rot.witness);
  const BasisPtr& basis = rot.value.basis();
  if (kind == PairingKind::Commutators) return {rot.value, rotations_as_commutator(basis, {w})};
  return {rot.value, rotations_as_strong_reversal(basis, {w})};
}

Factor periodic_factor(PairingKind kind, const Fiet& p) {
  if (kind == PairingKind::Commutators) return {p, periodic_as_commutator(p)};
  return {p, periodic_as_strong_reversal(p)};
}

std::vector<Factor> full_pipeline(PairingKind kind, const Fiet& g, std::map<std::string, std::string>& meta) {
  const BasisPtr& basis = g.basis();
  unsigned t = 1;
  for (;;) {
    Integer n = Integer(1) << t;
    ShrinkResult sh = shrink_support(g, n);
    NormalizedFix nf = normalize_fixed_set(sh.g);
    Certificate rots = to_restricted_rotations(nf.conjugated);
    unsigned need = compression_rounds(rots.factors.size());
    if (need > t) {
      t = std::max(t + 1, need);
      if (t > 40) throw Error("compression depth did not stabilise");
      continue;
    }

    std::vector<Factor> factors;
    for (const auto& rot : rots.factors) factors.push_back(rotation_factor(kind, rot));
    for (unsigned k = t; k >= 1; --k) {
      // J_k = [1 - 2^-(k-1), 1)
      Interval j{one_of(basis) - ExactReal(basis, Rational(1) / Rational(Integer(1) << (k - 1))), one_of(basis)};
      factors = vaserstein_step(kind, factors, j);
    }
    Fiet h_inv = inverse(nf.h);
    for (auto& f : factors) {
      f.value = conj(h_inv, f.value, nf.h);
      f.witness = conjugate_witness(f.witness, h_inv, nf.h);
    }

    // g = p^-1 o s o p'^-1 with s the product of the compressed factors.
    std::vector<Factor> out;
    out.push_back(periodic_factor(kind, inverse(sh.p)));
    for (auto& f : factors) out.push_back(std::move(f));
    Fiet rot_product = inverse(sh.p_prime);
    if (kind == PairingKind::Commutators) {
      out.push_back({rot_product, rotations_as_commutator(basis, sh.rotations)});
    } else {
      out.push_back({rot_product, rotations_as_strong_reversal(basis, sh.rotations)});
    }

    meta["depth"] = std::to_string(t);
    meta["grid"] = sh.grid.get_str();
    meta["epsilon"] = sh.epsilon.to_string();
    meta["corner_rotations"] = std::to_string(rots.factors.size());
    return out;
  }
}

Certificate decompose_pairs(PairingKind kind, const Fiet& f, const DecompositionOptions& options) {
  const BasisPtr& basis = f.basis();
  Certificate cert{kind == PairingKind::Commutators ? CertificateKind::Commutators : CertificateKind::StronglyReversible,
                   f,
                   {},
                   std::nullopt,
                   {}};
  auto flips = factor_flips(f);
  const Fiet& g = flips.g;

  std::vector<Factor> core;
  if (!g.is_identity()) {
    Certificate rots = to_restricted_rotations(g);
    // five rotations, each one factor, already meet every bound
    const std::size_t direct_limit = 5;
    if (!options.force_full_pipeline && rots.factors.size() <= 1) {
      for (const auto& r : rots.factors) core.push_back(rotation_factor(kind, r));
      cert.meta["route"] = "rotation";
    } else if (!options.force_full_pipeline && is_periodic(g, options.periodic_cap).periodic) {
      core.push_back(periodic_factor(kind, g));
      cert.meta["route"] = "periodic";
    } else if (!options.force_full_pipeline && rots.factors.size() <= direct_limit) {
      for (const auto& r : rots.factors) core.push_back(rotation_factor(kind, r));
      cert.meta["route"] = "rotations";
    } else {
      core = full_pipeline(kind, g, cert.meta);
      cert.meta["route"] = "compression";
    }
  } else {
    cert.meta["route"] = "trivial";
  }

  for (auto& fac : core)
    if (!fac.value.is_identity()) cert.factors.push_back(std::move(fac));
  if (!flips.iota.is_identity()) {
    if (kind == PairingKind::Commutators) {
      cert.factors.push_back({flips.iota, symmetries_as_commutator(basis, flips.flipped)});
    } else {
      cert.factors.push_back({flips.iota, StrongReversalWitness{flips.iota, Fiet::identity(basis)}});
    }
  }
  return cert;
}

}  // namespace

Certificate commutator_decomposition(const Fiet& f, const DecompositionOptions& options) {
  return decompose_pairs(PairingKind::Commutators, f, options);
}

Certificate strongly_reversible_decomposition(const Fiet& f, const DecompositionOptions& options) {
  return decompose_pairs(PairingKind::StronglyReversible, f, options);
}

Certificate involution_decomposition(const Fiet& f, const DecompositionOptions& options) {
  Certificate sr = strongly_reversible_decomposition(f, options);
  Certificate cert{CertificateKind::Involutions, f, {}, std::nullopt, sr.meta};
  for (const auto& fac : sr.factors) {
    const auto& w = std::get<StrongReversalWitness>(fac.witness);
    for (const Fiet* i : {&w.i1, &w.i2})
      if (!i->is_identity()) cert.factors.push_back({*i, InvolutionWitness{}});
  }
  return cert;
}

// ---------------------------------------------------------------------------
// involutions that enlarge the fixed set

namespace {

struct RealLess {
  bool operator()(const ExactReal& a, const ExactReal& b) const { return a < b; }
};

// Blocked intervals, each of length at most `width`.
class IntervalSet {
 public:
  explicit IntervalSet(ExactReal width) : width_(std::move(width)) {}

  bool meets(const Interval& iv) const {
    for (auto it = starts_.upper_bound(iv.lo - width_); it != starts_.end() && it->first < iv.hi; ++it)
      if (iv.lo < it->second) return true;
    return false;
  }
  void insert(const Interval& iv) { starts_.emplace(iv.lo, iv.hi); }

 private:
  ExactReal width_;
  std::multimap<ExactReal, ExactReal, RealLess> starts_;
};

// f is the identity off J and has no fixed points in J.
Fiet fixed_point_free_case(const Fiet& f, const Interval& j, const Rational& eps) {
  const BasisPtr& basis = f.basis();
  std::vector<const Piece*> moving;
  ExactReal min_shift = j.length();
  for (const auto& p : f.pieces()) {
    if (p.is_identity()) continue;
    moving.push_back(&p);
    min_shift = min(min_shift, abs(p.offset));
  }
  if (moving.empty()) return Fiet::identity(basis);
  const Fiet finv = inverse(f);
  const ExactReal target = j.length() * ((1 - eps) / 5);
  ExactReal delta = min(j.length() * (eps / static_cast<long>(moving.size())), min_shift) * Rational(15, 16);

  for (int attempt = 0; attempt < 12; ++attempt, delta /= 2) {
    IntervalSet blocked(delta);
    std::vector<Piece> swaps;
    for (const Piece* p : moving) {
      Integer count = floor_ratio(p->length(), delta);
      for (Integer k = 0; k < count; ++k) {
        ExactReal lo = p->left + delta * Rational(k);
        Interval cell{lo, lo + delta};
        if (blocked.meets(cell)) continue;
        Interval image{cell.lo + p->offset, cell.hi + p->offset};
        blocked.insert(cell);
        blocked.insert(image);
        for (std::size_t q = finv.piece_index(cell.lo); q < finv.piece_count(); ++q) {
          const Piece& back = finv.pieces()[q];
          if (!(back.left < cell.hi)) break;
          Piece part{max(back.left, cell.lo), min(back.right, cell.hi), back.sign, back.offset};
          blocked.insert(part.image());
        }
        swaps.push_back({cell.lo, cell.hi, 1, p->offset});
        swaps.push_back({image.lo, image.hi, 1, -p->offset});
      }
    }
    Fiet i = assemble(basis, std::move(swaps));
    if (fixed_measure(compose(i, f)) >= fixed_measure(f) + target) return i;
  }
  throw Error("could not enlarge the fixed set");
}

}  // namespace

Fiet fix_increasing_involution(const Fiet& f, const Rational& eps) {
  if (sgn(eps) <= 0 || eps >= 1) throw EpsilonOutOfRange();
  if (!f.is_flip_free()) throw FlipPresent();
  const BasisPtr& basis = f.basis();
  if (f.is_identity()) return f;
  NormalizedFix nf = normalize_fixed_set(f);
  Interval j{nf.fixed_length, one_of(basis)};
  Fiet inner = fixed_point_free_case(nf.conjugated, j, eps);
  Fiet i = conj(inverse(nf.h), inner, nf.h);
  ExactReal fixed = fixed_measure(f);
  ExactReal wanted = fixed + (one_of(basis) - fixed) * ((1 - eps) / 5);
  if (fixed_measure(compose(i, f)) < wanted) throw Error("fixed set did not grow enough");
  return i;
}

Certificate corner_support_decomposition(const Fiet& f, unsigned long n) {
  if (!f.is_flip_free()) throw FlipPresent();
  const BasisPtr& basis = f.basis();
  const unsigned long s = corner_count(n);
  // Largest eps = 2^-k with ((4 + eps)/5)^s <= 1/n.
  Rational eps(1, 2);
  for (;;) {
    Rational ratio = (4 + eps) / 5, acc = 1;
    for (unsigned long k = 0; k < s; ++k) acc *= ratio;
    if (acc * n <= 1) break;
    eps /= 2;
  }
  Certificate cert{CertificateKind::CornerSupport, f, {}, n, {}};
  Fiet cur = f;
  for (unsigned long k = 0; k < s; ++k) {
    Fiet i = fix_increasing_involution(cur, eps);
    cur = compose(i, cur);
    cert.factors.push_back({i, InvolutionWitness{}});
  }
  // f = i_1 ... i_s o cur, and cur is conjugate into the corner.
  NormalizedFix nf = normalize_fixed_set(cur);
  Interval corner{one_of(basis) - ExactReal(basis, Rational(1, static_cast<long>(n))), one_of(basis)};
  if (!supported_in(nf.conjugated, corner)) throw Error("remaining map is not supported in the corner");
  cert.factors.push_back({cur, ConjugateWitness{inverse(nf.h), nf.conjugated}});
  std::ostringstream os;
  os << eps;
  cert.meta["epsilon"] = os.str();
  return cert;
}

}  // namespace fiet
