#include "fiet/fietcore.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <sstream>

namespace fiet {

namespace {

std::atomic<std::size_t> g_piece_cap{std::size_t{1} << 16};

bool same_isometry(const Piece& a, const Piece& b) { return a.sign == b.sign && a.offset == b.offset; }

void check_cap(std::size_t n) {
  if (n > g_piece_cap.load()) {
    std::ostringstream os;
    os << "piece count " << n << " exceeds cap " << g_piece_cap.load();
    throw PieceCapExceeded(os.str());
  }
}

void sort_by_left(std::vector<Piece>& pieces) {
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.left < b.left; });
}

void check_tiling(const BasisPtr& basis, std::vector<Interval> parts, InvalidFiet::Reason gap_reason,
                  InvalidFiet::Reason overlap_reason, const char* what) {
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  ExactReal cursor(basis, 0);
  for (const auto& part : parts) {
    auto c = compare(part.lo, cursor);
    if (c == Ordering::Greater) throw InvalidFiet(gap_reason, std::string(what) + ": gap before " + part.lo.to_string());
    if (c == Ordering::Less) throw InvalidFiet(overlap_reason, std::string(what) + ": overlap at " + part.lo.to_string());
    cursor = part.hi;
  }
  if (!(cursor == ExactReal(basis, 1))) {
    if (cursor < ExactReal(basis, 1)) throw InvalidFiet(gap_reason, std::string(what) + ": gap before 1");
    throw InvalidFiet(overlap_reason, std::string(what) + ": extends past 1");
  }
}

}  // namespace

std::size_t piece_cap() { return g_piece_cap.load(); }
void set_piece_cap(std::size_t cap) { g_piece_cap.store(cap == 0 ? 1 : cap); }

Interval Piece::image() const {
  if (sign > 0) return {left + offset, right + offset};
  return {offset - right, offset - left};
}

Interval unit_interval(const BasisPtr& basis) { return {ExactReal(basis, 0), ExactReal(basis, 1)}; }

Fiet Fiet::identity(BasisPtr basis) {
  Piece p{ExactReal(basis, 0), ExactReal(basis, 1), 1, ExactReal(basis, 0)};
  return Fiet(std::move(basis), {std::move(p)});
}

Fiet Fiet::from_trusted(BasisPtr basis, std::vector<Piece> pieces) {
  std::vector<Piece> merged;
  merged.reserve(pieces.size());
  for (auto& p : pieces) {
    if (p.left == p.right) continue;
    if (!merged.empty() && same_isometry(merged.back(), p)) {
      merged.back().right = std::move(p.right);
    } else {
      merged.push_back(std::move(p));
    }
  }
  check_cap(merged.size());
  return Fiet(std::move(basis), std::move(merged));
}

Fiet Fiet::canonicalize(BasisPtr basis, std::vector<Piece> pieces) {
  std::vector<Piece> kept;
  kept.reserve(pieces.size());
  for (auto& p : pieces) {
    require_same_basis(basis, p.left.basis());
    require_same_basis(basis, p.right.basis());
    require_same_basis(basis, p.offset.basis());
    if (p.sign != 1 && p.sign != -1) throw InvalidFiet(InvalidFiet::Reason::BadSign, "piece sign must be +1 or -1");
    auto c = compare(p.left, p.right);
    if (c == Ordering::Greater) throw InvalidFiet(InvalidFiet::Reason::OverlappingPieces, "piece with left > right");
    if (c == Ordering::Equal) continue;
    kept.push_back(std::move(p));
  }
  std::vector<Interval> domains, images;
  domains.reserve(kept.size());
  images.reserve(kept.size());
  for (const auto& p : kept) {
    domains.push_back({p.left, p.right});
    images.push_back(p.image());
  }
  check_tiling(basis, std::move(domains), InvalidFiet::Reason::CoverageGap, InvalidFiet::Reason::OverlappingPieces,
               "domain");
  check_tiling(basis, std::move(images), InvalidFiet::Reason::ImagesNotTiling, InvalidFiet::Reason::ImagesNotTiling,
               "images");
  sort_by_left(kept);
  return from_trusted(std::move(basis), std::move(kept));
}

bool Fiet::is_identity() const { return pieces_.size() == 1 && pieces_[0].is_identity(); }

bool Fiet::is_flip_free() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.sign > 0; });
}

std::vector<ExactReal> Fiet::breakpoints() const {
  std::vector<ExactReal> out;
  for (std::size_t i = 1; i < pieces_.size(); ++i) out.push_back(pieces_[i].left);
  return out;
}

std::size_t Fiet::piece_index(const ExactReal& x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](const ExactReal& v, const Piece& p) { return v < p.left; });
  if (it == pieces_.begin()) throw DomainError("point outside [0,1)");
  return static_cast<std::size_t>(it - pieces_.begin()) - 1;
}

ExactReal Fiet::operator()(const ExactReal& x) const { return pieces_[piece_index(x)].apply(x); }

bool operator==(const Fiet& a, const Fiet& b) {
  require_same_basis(a.basis_, b.basis_);
  if (a.pieces_.size() != b.pieces_.size()) return false;
  for (std::size_t i = 0; i < a.pieces_.size(); ++i) {
    const auto& p = a.pieces_[i];
    const auto& q = b.pieces_[i];
    if (p.sign != q.sign || !(p.left == q.left) || !(p.right == q.right) || !(p.offset == q.offset)) return false;
  }
  return true;
}

bool equals(const Fiet& f, const Fiet& g) { return f == g; }

Fiet compose(const Fiet& f, const Fiet& g) {
  require_same_basis(f.basis(), g.basis());
  const auto& fp = f.pieces();
  std::vector<Piece> out;
  out.reserve(fp.size() + g.piece_count());
  std::vector<Piece> chunk;
  for (const auto& p : g.pieces()) {
    Interval img = p.image();
    std::size_t k = f.piece_index(img.lo);
    chunk.clear();
    // Walk the pieces of f meeting the image of p, left to right in the image.
    for (; k < fp.size(); ++k) {
      const auto& q = fp[k];
      if (k > 0 && !(q.left < img.hi)) break;
      const ExactReal& u = (q.left < img.lo) ? img.lo : q.left;
      const ExactReal& v = (img.hi < q.right) ? img.hi : q.right;
      // Pull [u,v) back through p.
      ExactReal l = p.sign > 0 ? u - p.offset : p.offset - v;
      ExactReal r = p.sign > 0 ? v - p.offset : p.offset - u;
      ExactReal off = q.sign > 0 ? q.offset + p.offset : q.offset - p.offset;
      chunk.push_back({std::move(l), std::move(r), q.sign * p.sign, std::move(off)});
      if (!(q.right < img.hi)) break;
    }
    if (p.sign < 0) std::reverse(chunk.begin(), chunk.end());
    for (auto& c : chunk) out.push_back(std::move(c));
  }
  return Fiet::from_trusted(f.basis(), std::move(out));
}

Fiet compose_all(const BasisPtr& basis, const std::vector<Fiet>& maps) {
  if (maps.empty()) return Fiet::identity(basis);
  Fiet acc = maps.back();
  for (std::size_t i = maps.size() - 1; i-- > 0;) acc = compose(maps[i], acc);
  return acc;
}

Fiet inverse(const Fiet& f) {
  std::vector<Piece> out;
  out.reserve(f.piece_count());
  for (const auto& p : f.pieces()) {
    Interval img = p.image();
    ExactReal off = p.sign > 0 ? -p.offset : p.offset;
    out.push_back({std::move(img.lo), std::move(img.hi), p.sign, std::move(off)});
  }
  sort_by_left(out);
  return Fiet::from_trusted(f.basis(), std::move(out));
}

Fiet power(const Fiet& f, const Integer& n) {
  Fiet base = sgn(n) < 0 ? inverse(f) : f;
  Integer e = abs(n);
  Fiet acc = Fiet::identity(f.basis());
  while (sgn(e) > 0) {
    if (mpz_odd_p(e.get_mpz_t())) acc = compose(acc, base);
    e >>= 1;
    if (sgn(e) > 0) base = compose(base, base);
  }
  return acc;
}

Fiet conjugate(const Fiet& h, const Fiet& f) { return compose(h, compose(f, inverse(h))); }

Fiet commutator(const Fiet& a, const Fiet& b) {
  return compose(compose(a, b), compose(inverse(a), inverse(b)));
}

bool is_involution(const Fiet& f) { return compose(f, f).is_identity(); }

std::vector<Interval> fixed_set(const Fiet& f) {
  std::vector<Interval> out;
  for (const auto& p : f.pieces())
    if (p.is_identity()) out.push_back({p.left, p.right});
  return out;
}

ExactReal fixed_measure(const Fiet& f) {
  ExactReal total(f.basis(), 0);
  for (const auto& iv : fixed_set(f)) total += iv.length();
  return total;
}

ExactReal support_measure(const Fiet& f) { return ExactReal(f.basis(), 1) - fixed_measure(f); }

std::vector<Interval> support_components(const Fiet& f) {
  std::vector<Interval> out;
  bool open = false;
  for (const auto& p : f.pieces()) {
    if (p.is_identity()) {
      open = false;
      continue;
    }
    if (open) {
      out.back().hi = p.right;
    } else {
      out.push_back({p.left, p.right});
      open = true;
    }
  }
  return out;
}

bool supported_in(const Fiet& f, const Interval& j) {
  for (const auto& p : f.pieces()) {
    if (p.is_identity()) continue;
    if (p.left < j.lo || j.hi < p.right) return false;
  }
  return true;
}

CombinatorialDescription combinatorics(const Fiet& f) {
  const auto& ps = f.pieces();
  const std::size_t m = ps.size();
  CombinatorialDescription d;
  std::vector<Interval> images;
  for (const auto& p : ps) {
    d.lengths.push_back(p.length());
    d.flips.push_back(p.sign);
    images.push_back(p.image());
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return images[a].lo < images[b].lo; });
  d.permutation.assign(m, 0);
  for (std::size_t rank = 0; rank < m; ++rank) d.permutation[order[rank]] = rank;
  return d;
}

std::vector<ExactReal> left_endpoints(const CombinatorialDescription& d) {
  std::vector<ExactReal> a;
  if (d.lengths.empty()) return a;
  ExactReal acc(d.lengths.front().basis(), 0);
  for (const auto& l : d.lengths) {
    a.push_back(acc);
    acc += l;
  }
  return a;
}

std::vector<ExactReal> translations(const CombinatorialDescription& d) {
  const std::size_t m = d.lengths.size();
  std::vector<std::size_t> inv(m);
  for (std::size_t i = 0; i < m; ++i) inv[d.permutation[i]] = i;
  // image_left[r] = sum of lengths of the pieces whose images come before rank r.
  std::vector<ExactReal> image_left;
  if (m == 0) return {};
  ExactReal acc(d.lengths.front().basis(), 0);
  for (std::size_t r = 0; r < m; ++r) {
    image_left.push_back(acc);
    acc += d.lengths[inv[r]];
  }
  auto a = left_endpoints(d);
  std::vector<ExactReal> delta;
  for (std::size_t i = 0; i < m; ++i) delta.push_back(image_left[d.permutation[i]] - a[i]);
  return delta;
}

Fiet from_combinatorics(const BasisPtr& basis, const CombinatorialDescription& d) {
  const std::size_t m = d.lengths.size();
  if (d.permutation.size() != m) throw DomainError("permutation size differs from number of lengths");
  std::vector<bool> seen(m, false);
  for (auto r : d.permutation) {
    if (r >= m || seen[r]) throw DomainError("permutation is not a bijection");
    seen[r] = true;
  }
  auto a = left_endpoints(d);
  auto delta = translations(d);
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < m; ++i) {
    int s = d.flips.size() == m ? d.flips[i] : 1;
    ExactReal right = a[i] + d.lengths[i];
    if (s > 0) {
      pieces.push_back({a[i], right, 1, delta[i]});
    } else {
      // Image [a_i + delta_i, right + delta_i) traversed backwards.
      pieces.push_back({a[i], right, -1, a[i] + right + delta[i]});
    }
  }
  return Fiet::canonicalize(basis, std::move(pieces));
}

ExactReal metric_d(const Fiet& f, const Fiet& g) {
  require_same_basis(f.basis(), g.basis());
  auto cf = combinatorics(f);
  auto cg = combinatorics(g);
  if (cf.lengths.size() != cg.lengths.size()) throw DomainMismatch("maps have different numbers of pieces");
  if (cf.permutation != cg.permutation) throw DomainMismatch("maps have different permutations");
  if (cf.flips != cg.flips) throw DomainMismatch("maps have different flip vectors");
  ExactReal total(f.basis(), 0);
  for (std::size_t i = 0; i < cf.lengths.size(); ++i) total += abs(cf.lengths[i] - cg.lengths[i]);
  return total;
}

Fiet make_restricted_rotation(const ExactReal& alpha, const Interval& j) {
  const BasisPtr& basis = alpha.basis();
  ExactReal zero(basis, 0), one(basis, 1);
  ExactReal len = j.length();
  if (j.lo < zero || one < j.hi || !(j.lo < j.hi)) throw DomainError("interval must satisfy 0 <= a < b <= 1");
  if (alpha.sign() < 0 || !(alpha < len)) throw DomainError("rotation angle must lie in [0, |J|)");
  if (alpha.is_zero()) return Fiet::identity(basis);
  std::vector<Piece> pieces;
  pieces.push_back({zero, j.lo, 1, zero});
  ExactReal cut = j.hi - alpha;
  pieces.push_back({j.lo, cut, 1, alpha});
  pieces.push_back({cut, j.hi, 1, alpha - len});
  pieces.push_back({j.hi, one, 1, zero});
  return Fiet::from_trusted(basis, std::move(pieces));
}

Fiet make_restricted_rotation_mod(const ExactReal& alpha, const Interval& j) {
  ExactReal len = j.length();
  Integer k = floor_ratio(alpha, len);
  return make_restricted_rotation(alpha - len * Rational(k), j);
}

Fiet make_rotation(const ExactReal& a) { return make_restricted_rotation(a, unit_interval(a.basis())); }

Fiet make_symmetry(const Interval& j) {
  const BasisPtr& basis = j.lo.basis();
  ExactReal zero(basis, 0), one(basis, 1);
  if (j.lo < zero || one < j.hi || !(j.lo < j.hi)) throw DomainError("interval must satisfy 0 <= a < b <= 1");
  std::vector<Piece> pieces;
  pieces.push_back({zero, j.lo, 1, zero});
  pieces.push_back({j.lo, j.hi, -1, j.lo + j.hi});
  pieces.push_back({j.hi, one, 1, zero});
  return Fiet::from_trusted(basis, std::move(pieces));
}

Fiet make_S(const ExactReal& theta, const Interval& j) {
  const BasisPtr& basis = theta.basis();
  ExactReal zero(basis, 0), one(basis, 1);
  if (j.lo < zero || one < j.hi || !(j.lo < j.hi)) throw DomainError("interval must satisfy 0 <= a < b <= 1");
  if (theta < j.lo || !(theta < j.hi)) throw DomainError("theta must lie in [a, b)");
  std::vector<Piece> pieces;
  pieces.push_back({zero, j.lo, 1, zero});
  pieces.push_back({j.lo, theta, -1, j.lo + theta});
  pieces.push_back({theta, j.hi, -1, theta + j.hi});
  pieces.push_back({j.hi, one, 1, zero});
  return Fiet::from_trusted(basis, std::move(pieces));
}

Fiet transport(const Fiet& f, const Interval& j, const Interval& k) {
  const BasisPtr& basis = f.basis();
  if (!supported_in(f, j)) throw DomainError("map is not supported in the source interval");
  auto scale = rational_ratio(k.length(), j.length());
  if (!scale) throw IrrationalScale("interval length ratio is not rational");
  const Rational s = *scale;
  ExactReal zero(basis, 0), one(basis, 1);
  // phi(x) = k.lo + s (x - j.lo)
  auto phi = [&](const ExactReal& x) { return k.lo + (x - j.lo) * s; };
  std::vector<Piece> pieces;
  pieces.push_back({zero, k.lo, 1, zero});
  for (const auto& p : f.pieces()) {
    if (!(j.lo < p.right) || !(p.left < j.hi)) continue;
    const ExactReal& l = p.left < j.lo ? j.lo : p.left;
    const ExactReal& r = j.hi < p.right ? j.hi : p.right;
    ExactReal off = p.sign > 0 ? p.offset * s : k.lo + k.lo + (p.offset - j.lo - j.lo) * s;
    pieces.push_back({phi(l), phi(r), p.sign, std::move(off)});
  }
  pieces.push_back({k.hi, one, 1, zero});
  return Fiet::from_trusted(basis, std::move(pieces));
}

}  // namespace fiet
