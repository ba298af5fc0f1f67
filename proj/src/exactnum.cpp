#include "fiet/exactnum.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace fiet {

namespace {

// Hard ceiling for sqrt-only bases.  A nonzero combination of square roots
// separates from zero long before this; reaching it means the declared
// independence is false.
constexpr unsigned kSqrtCeilingBits = 1u << 16;

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_perfect_square(const Integer& n) {
  if (n < 0) return false;
  return mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

bool is_rational_square(const Rational& q) {
  return q >= 0 && is_perfect_square(q.get_num()) && is_perfect_square(q.get_den());
}

Integer pow2(unsigned bits) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, bits);
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw DomainError("empty rational literal");
  auto dot = s.find('.');
  if (dot != std::string::npos && s.find('/') == std::string::npos) {
    // decimal literal
    bool neg = false;
    std::string body = s;
    if (body[0] == '-' || body[0] == '+') {
      neg = body[0] == '-';
      body = body.substr(1);
    }
    dot = body.find('.');
    std::string ip = body.substr(0, dot);
    std::string fp = body.substr(dot + 1);
    if ((ip + fp).empty() ||
        !std::all_of(ip.begin(), ip.end(), ::isdigit) ||
        !std::all_of(fp.begin(), fp.end(), ::isdigit)) {
      throw DomainError("malformed decimal literal '" + s + "'");
    }
    Integer num(ip.empty() ? std::string("0") : ip);
    Integer scale = 1;
    for (char c : fp) {
      num = num * 10 + (c - '0');
      scale *= 10;
    }
    Rational q(num, scale);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  }
  Rational q;
  if (q.set_str(s, 10) != 0) throw DomainError("malformed rational literal '" + s + "'");
  if (q.get_den() == 0) throw DomainError("zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) {
  Rational r = q;
  r.canonicalize();
  return r.get_str();
}

OracleGenerator decimal_oracle(Bounds initial, std::string digits) {
  // digits like "0.7071067811865475244..." (optionally signed)
  std::size_t fraction_digits = 0;
  bool negative = false;
  {
    std::string s = trim(digits);
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
      negative = s[0] == '-';
      s = s.substr(1);
    }
    auto dot = s.find('.');
    std::string ip = dot == std::string::npos ? s : s.substr(0, dot);
    std::string fp = dot == std::string::npos ? std::string() : s.substr(dot + 1);
    if ((ip + fp).empty() || !std::all_of(ip.begin(), ip.end(), ::isdigit) ||
        !std::all_of(fp.begin(), fp.end(), ::isdigit)) {
      throw DomainError("malformed oracle digits");
    }
    fraction_digits = fp.size();
  }
  std::string digit_copy = digits;
  auto refine = [initial, digit_copy, fraction_digits, negative](unsigned bits) -> Bounds {
    // decimal digits needed so that 10^-k <= 2^-bits
    auto needed = static_cast<std::size_t>(std::ceil(bits * 0.30102999566398120)) + 1;
    std::size_t k = std::min(needed, fraction_digits);
    std::string s = trim(digit_copy);
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) s = s.substr(1);
    auto dot = s.find('.');
    std::string ip = dot == std::string::npos ? s : s.substr(0, dot);
    std::string fp = dot == std::string::npos ? std::string() : s.substr(dot + 1, k);
    Integer num(ip.empty() ? std::string("0") : ip);
    Integer scale = 1;
    for (char c : fp) {
      num = num * 10 + (c - '0');
      scale *= 10;
    }
    Rational lo(num, scale);
    lo.canonicalize();
    Rational hi = lo + Rational(1, scale);
    hi.canonicalize();
    if (negative) {
      Rational t = -hi;
      hi = -lo;
      lo = t;
    }
    Bounds b{std::max(lo, initial.lo), std::min(hi, initial.hi)};
    if (b.lo > b.hi) throw DomainError("oracle digits contradict declared interval");
    return b;
  };
  return OracleGenerator{"", std::move(initial), std::move(digits), std::move(refine)};
}

Basis::Basis(std::vector<Generator> generators, PrecisionPolicy policy)
    : generators_(std::move(generators)), policy_(policy) {
  if (policy_.initial_bits == 0 || policy_.max_bits < policy_.initial_bits) {
    throw DomainError("invalid precision policy");
  }
  std::vector<Rational> radicands;
  for (const auto& g : generators_) {
    if (const auto* s = std::get_if<SqrtGenerator>(&g)) {
      if (s->radicand <= 0) throw DomainError("square-root generator needs a positive radicand");
      if (is_rational_square(s->radicand)) {
        throw DomainError("sqrt(" + format_rational(s->radicand) +
                          ") is rational; generators must be independent of 1");
      }
      for (const auto& r : radicands) {
        if (is_rational_square(Rational(r * s->radicand))) {
          throw DomainError("square-root generators sqrt(" + format_rational(r) + ") and sqrt(" +
                            format_rational(s->radicand) + ") are rationally dependent");
        }
      }
      radicands.push_back(s->radicand);
    } else {
      const auto& o = std::get<OracleGenerator>(g);
      if (!o.refine) throw DomainError("oracle generator without refinement function");
      if (o.initial.lo > o.initial.hi) throw DomainError("oracle generator with empty interval");
      sqrt_only_ = false;
    }
  }
  approx_.push_back({1.0, 0.0});
  for (std::size_t i = 1; i <= generators_.size(); ++i) {
    try {
      auto e = enclosure(i, 64);
      Rational lo(e.num, pow2(64)), hi(Integer(e.num + e.width), pow2(64));
      lo.canonicalize();
      hi.canonicalize();
      double mid = Rational((lo + hi) / 2).get_d();
      double rad = Rational((hi - lo) / 2).get_d() + std::abs(mid) * 0x1p-50 + 0x1p-1000;
      approx_.push_back({mid, rad});
    } catch (const Error&) {
      approx_.push_back({0.0, std::numeric_limits<double>::infinity()});
    }
  }
}

std::shared_ptr<const Basis> Basis::rational() {
  static const auto instance = std::make_shared<const Basis>(std::vector<Generator>{});
  return instance;
}

std::shared_ptr<const Basis> Basis::sqrt(const std::vector<Rational>& radicands,
                                         PrecisionPolicy policy) {
  std::vector<Generator> gens;
  for (const auto& r : radicands) gens.emplace_back(SqrtGenerator{r});
  return std::make_shared<const Basis>(std::move(gens), policy);
}

bool Basis::same_as(const Basis& other) const {
  if (this == &other) return true;
  if (generators_.size() != other.generators_.size()) return false;
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    const auto& a = generators_[i];
    const auto& b = other.generators_[i];
    if (a.index() != b.index()) return false;
    if (const auto* sa = std::get_if<SqrtGenerator>(&a)) {
      if (sa->radicand != std::get<SqrtGenerator>(b).radicand) return false;
    } else {
      const auto& oa = std::get<OracleGenerator>(a);
      const auto& ob = std::get<OracleGenerator>(b);
      if (oa.label != ob.label || oa.digits != ob.digits || oa.initial.lo != ob.initial.lo ||
          oa.initial.hi != ob.initial.hi) {
        return false;
      }
      // Oracles declared only through a function are identified by object.
      if (oa.digits.empty() && &oa != &ob) return false;
    }
  }
  return true;
}

Basis::DyadicEnclosure Basis::enclosure(std::size_t coord, unsigned bits) const {
  if (coord == 0 || coord > generators_.size()) throw DomainError("generator index out of range");
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find({coord, bits});
    if (it != cache_.end()) return it->second;
  }
  const auto& g = generators_[coord - 1];
  DyadicEnclosure e;
  Integer scale = pow2(bits);
  if (const auto* s = std::get_if<SqrtGenerator>(&g)) {
    // sqrt(n/d) = sqrt(n d) / d;  floor(sqrt(n d 4^bits)) / (d 2^bits) <= sqrt(n/d)
    const Integer& n = s->radicand.get_num();
    const Integer& d = s->radicand.get_den();
    Integer radicand = n * d * scale * scale;
    Integer root;
    mpz_sqrt(root.get_mpz_t(), radicand.get_mpz_t());
    // root/d in units of 2^-bits: floor and ceil of root/d bracket the value.
    Integer lo;
    mpz_fdiv_q(lo.get_mpz_t(), root.get_mpz_t(), d.get_mpz_t());
    Integer hi_num = root + 1;
    Integer hi;
    mpz_cdiv_q(hi.get_mpz_t(), hi_num.get_mpz_t(), d.get_mpz_t());
    e.num = lo;
    e.width = hi - lo;
  } else {
    const auto& o = std::get<OracleGenerator>(g);
    Bounds b = o.refine(bits);
    b.lo = std::max(b.lo, o.initial.lo);
    b.hi = std::min(b.hi, o.initial.hi);
    Rational lo_scaled = b.lo * Rational(scale);
    Rational hi_scaled = b.hi * Rational(scale);
    Integer lo;
    Integer hi;
    mpz_fdiv_q(lo.get_mpz_t(), lo_scaled.get_num_mpz_t(), lo_scaled.get_den_mpz_t());
    mpz_cdiv_q(hi.get_mpz_t(), hi_scaled.get_num_mpz_t(), hi_scaled.get_den_mpz_t());
    e.num = lo;
    e.width = hi - lo;
  }
  std::lock_guard<std::mutex> lock(cache_mutex_);
  cache_.emplace(std::make_pair(coord, bits), e);
  return e;
}

void require_same_basis(const BasisPtr& a, const BasisPtr& b) {
  if (a == b) return;
  if (!a || !b || !a->same_as(*b)) throw BasisMismatch();
}

ExactReal::ExactReal(BasisPtr basis, const Rational& constant)
    : basis_(std::move(basis)), coords_(basis_ ? basis_->dimension() : 1) {
  if (!basis_) throw DomainError("ExactReal needs a basis");
  coords_[0] = constant;
  coords_[0].canonicalize();
}

ExactReal::ExactReal(BasisPtr basis, std::vector<Rational> coords)
    : basis_(std::move(basis)), coords_(std::move(coords)) {
  if (!basis_) throw DomainError("ExactReal needs a basis");
  if (coords_.size() != basis_->dimension()) throw DomainError("coordinate count does not match basis");
  for (auto& c : coords_) c.canonicalize();
}

ExactReal ExactReal::generator(BasisPtr basis, std::size_t coord) {
  if (!basis || coord >= basis->dimension()) throw DomainError("generator index out of range");
  ExactReal r(basis, 0);
  r.coords_[coord] = 1;
  return r;
}

bool ExactReal::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const Rational& c) { return sgn(c) == 0; });
}

bool ExactReal::is_rational() const {
  return std::all_of(coords_.begin() + 1, coords_.end(), [](const Rational& c) { return sgn(c) == 0; });
}

ExactReal ExactReal::operator-() const {
  ExactReal r = *this;
  for (auto& c : r.coords_) c = -c;
  return r;
}

ExactReal& ExactReal::operator+=(const ExactReal& other) {
  require_same_basis(basis_, other.basis_);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
  return *this;
}

ExactReal& ExactReal::operator-=(const ExactReal& other) {
  require_same_basis(basis_, other.basis_);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= other.coords_[i];
  return *this;
}

// Rationals built from (num, den) pairs are not reduced by GMP; reduce the
// operand so that coordinates stay canonical.
ExactReal& ExactReal::operator*=(const Rational& factor) {
  Rational f = factor;
  f.canonicalize();
  for (auto& c : coords_) c *= f;
  return *this;
}

ExactReal& ExactReal::operator/=(const Rational& divisor) {
  if (sgn(divisor) == 0) throw DomainError("division by zero");
  Rational d = divisor;
  d.canonicalize();
  for (auto& c : coords_) c /= d;
  return *this;
}

bool operator==(const ExactReal& a, const ExactReal& b) {
  require_same_basis(a.basis_, b.basis_);
  return a.coords_ == b.coords_;
}

std::string ExactReal::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    const Rational& c = coords_[i];
    if (sgn(c) == 0) continue;
    Rational mag = abs(c);
    if (first) {
      if (sgn(c) < 0) out << "-";
    } else {
      out << (sgn(c) < 0 ? " - " : " + ");
    }
    if (i == 0) {
      out << mag.get_str();
    } else if (mag == 1) {
      out << "g" << i;
    } else {
      out << mag.get_str() << "*g" << i;
    }
    first = false;
  }
  if (first) out << "0";
  return out.str();
}

double ExactReal::approx() const {
  double v = coords_[0].get_d();
  const auto& gens = basis_->generators();
  for (std::size_t i = 1; i < coords_.size(); ++i) {
    if (sgn(coords_[i]) == 0) continue;
    double g;
    if (const auto* s = std::get_if<SqrtGenerator>(&gens[i - 1])) {
      g = std::sqrt(s->radicand.get_d());
    } else {
      auto e = basis_->enclosure(i, 64);
      g = Rational(e.num, pow2(64)).get_d();
    }
    v += coords_[i].get_d() * g;
  }
  return v;
}

ExactReal parse_exact(const BasisPtr& basis, std::string_view text) {
  // Terms separated by + or -; each term is "q", "q*gK" or "gK".
  std::string s = trim(text);
  if (s.empty()) throw DomainError("empty real literal");
  std::vector<Rational> coords(basis->dimension());
  std::size_t pos = 0;
  bool first = true;
  while (pos < s.size()) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    int sign = 1;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (!first) {
      throw DomainError("malformed real literal '" + s + "'");
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    std::size_t end = pos;
    while (end < s.size() && s[end] != '+' && s[end] != '-') ++end;
    std::string term = trim(std::string_view(s).substr(pos, end - pos));
    if (term.empty()) throw DomainError("malformed real literal '" + s + "'");
    Rational coef = 1;
    std::size_t index = 0;
    auto star = term.find('*');
    std::string gen_part;
    if (star != std::string::npos) {
      coef = parse_rational(term.substr(0, star));
      gen_part = trim(term.substr(star + 1));
    } else if (term[0] == 'g') {
      gen_part = term;
    } else {
      coef = parse_rational(term);
    }
    if (!gen_part.empty()) {
      if (gen_part.size() < 2 || gen_part[0] != 'g' ||
          !std::all_of(gen_part.begin() + 1, gen_part.end(), ::isdigit)) {
        throw DomainError("unknown generator '" + gen_part + "'");
      }
      index = std::stoul(gen_part.substr(1));
      if (index == 0 || index >= basis->dimension()) {
        throw DomainError("generator '" + gen_part + "' not declared in basis");
      }
    }
    coords[index] += sign * coef;
    pos = end;
    first = false;
  }
  return ExactReal(basis, std::move(coords));
}

Bounds enclose(const ExactReal& x, unsigned bits) {
  const auto& c = x.coords();
  if (x.is_rational()) return {c[0], c[0]};
  // Common denominator for the coordinates, then integer interval arithmetic.
  Integer den = 1;
  for (const auto& q : c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
  Integer scale = pow2(bits);
  Integer lo = Integer(c[0] * Rational(den)) * scale;
  Integer hi = lo;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (sgn(c[i]) == 0) continue;
    Integer k = Integer(c[i] * Rational(den));
    auto e = x.basis()->enclosure(i, bits);
    Integer at_lo = k * e.num;
    Integer at_hi = k * (e.num + e.width);
    if (k > 0) {
      lo += at_lo;
      hi += at_hi;
    } else {
      lo += at_hi;
      hi += at_lo;
    }
  }
  Rational d = Rational(den) * Rational(scale);
  Rational rlo = Rational(lo) / d;
  Rational rhi = Rational(hi) / d;
  rlo.canonicalize();
  rhi.canonicalize();
  return {rlo, rhi};
}

namespace {

// Sign of x decided from dyadic enclosures of the generators at `bits`, in
// integer arithmetic; 0 when the enclosure straddles zero.
int sign_at(const ExactReal& x, unsigned bits) {
  const auto& c = x.coords();
  Integer den = 1;
  for (const auto& q : c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
  Integer k, lo;
  mpz_divexact(k.get_mpz_t(), den.get_mpz_t(), c[0].get_den_mpz_t());
  lo = k * c[0].get_num();
  mpz_mul_2exp(lo.get_mpz_t(), lo.get_mpz_t(), bits);
  Integer hi = lo;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (sgn(c[i]) == 0) continue;
    mpz_divexact(k.get_mpz_t(), den.get_mpz_t(), c[i].get_den_mpz_t());
    k *= c[i].get_num();
    auto e = x.basis()->enclosure(i, bits);
    Integer at_lo = k * e.num;
    Integer at_hi = at_lo + k * e.width;
    if (k > 0) {
      lo += at_lo;
      hi += at_hi;
    } else {
      lo += at_hi;
      hi += at_lo;
    }
  }
  if (sgn(lo) > 0) return 1;
  if (sgn(hi) < 0) return -1;
  return 0;
}

}  // namespace

int ExactReal::sign() const {
  if (is_rational()) return sgn(coords_[0]);
  if (is_zero()) return 0;
  const auto& policy = basis_->policy();
  bool uses_oracle = false;
  for (std::size_t i = 1; i < coords_.size(); ++i) {
    if (sgn(coords_[i]) != 0 && std::holds_alternative<OracleGenerator>(basis_->generators()[i - 1])) {
      uses_oracle = true;
    }
  }
  unsigned ceiling = uses_oracle ? policy.max_bits : std::max(policy.max_bits, kSqrtCeilingBits);
  // Most comparisons are settled far below the policy's starting precision,
  // so try a cheap 64-bit pass first.
  if (policy.initial_bits > 64) {
    if (int s = sign_at(*this, 64)) return s;
  }
  for (unsigned bits = policy.initial_bits; bits <= ceiling; bits *= 2) {
    if (int s = sign_at(*this, bits)) return s;
  }
  throw PrecisionExhausted("could not separate " + to_string() + " from zero within " +
                           std::to_string(ceiling) + " bits; is the basis really independent?");
}

namespace {

// Value of x in doubles together with a bound on the error.
struct Estimate {
  double value = 0;
  double error = 0;
  bool usable = true;
};

Estimate estimate(const ExactReal& x) {
  const auto& approx = x.basis()->approximations();
  const auto& c = x.coords();
  Estimate out;
  double magnitude = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (sgn(c[i]) == 0) continue;
    double q = c[i].get_d();
    // get_d truncates; tiny or huge coordinates lose the relative bound
    if (!(std::abs(q) > 1e-250 && std::abs(q) < 1e250) || !std::isfinite(approx[i].rad)) {
      out.usable = false;
      return out;
    }
    double term = q * approx[i].mid;
    out.value += term;
    magnitude += std::abs(term);
    out.error += std::abs(q) * (approx[i].rad + std::abs(approx[i].mid) * 0x1p-50);
  }
  out.error += magnitude * double(c.size() + 2) * 0x1p-50;
  return out;
}

// Sign of a - b when doubles settle it, 0 otherwise.
int approximate_sign(const ExactReal& a, const ExactReal& b) {
  Estimate ea = estimate(a), eb = estimate(b);
  if (!ea.usable || !eb.usable) return 0;
  double diff = ea.value - eb.value;
  double slack = (ea.error + eb.error) * 1.0625 + std::abs(diff) * 0x1p-50 + 0x1p-1000;
  if (diff > slack) return 1;
  if (diff < -slack) return -1;
  return 0;
}

}  // namespace

Ordering compare(const ExactReal& a, const ExactReal& b) {
  require_same_basis(a.basis(), b.basis());
  const auto& ca = a.coords();
  const auto& cb = b.coords();
  bool rational_diff = true;
  for (std::size_t i = 1; i < ca.size(); ++i) {
    if (ca[i] != cb[i]) {
      rational_diff = false;
      break;
    }
  }
  if (rational_diff) {
    int s = cmp(ca[0], cb[0]);
    return s < 0 ? Ordering::Less : (s > 0 ? Ordering::Greater : Ordering::Equal);
  }
  if (int s = approximate_sign(a, b)) return s < 0 ? Ordering::Less : Ordering::Greater;
  int s = (a - b).sign();
  return s < 0 ? Ordering::Less : (s > 0 ? Ordering::Greater : Ordering::Equal);
}

const ExactReal& min(const ExactReal& a, const ExactReal& b) { return b < a ? b : a; }
const ExactReal& max(const ExactReal& a, const ExactReal& b) { return a < b ? b : a; }
ExactReal abs(const ExactReal& a) { return a.sign() < 0 ? -a : a; }

Integer floor_ratio(const ExactReal& num, const ExactReal& den) {
  require_same_basis(num.basis(), den.basis());
  if (den.sign() <= 0) throw DomainError("floor_ratio needs a positive denominator");
  if (auto q = rational_ratio(num, den)) {
    Integer k;
    mpz_fdiv_q(k.get_mpz_t(), q->get_num_mpz_t(), q->get_den_mpz_t());
    return k;
  }
  // Initial guess from enclosures, then exact correction.
  Bounds bn = enclose(num, 64);
  Bounds bd = enclose(den, 64);
  Rational guess = (bn.lo + bn.hi) / (bd.lo + bd.hi);
  Integer k;
  mpz_fdiv_q(k.get_mpz_t(), guess.get_num_mpz_t(), guess.get_den_mpz_t());
  while (den * Rational(k) > num) --k;
  while (den * Rational(k + 1) <= num) ++k;
  return k;
}

std::optional<Rational> rational_ratio(const ExactReal& num, const ExactReal& den) {
  require_same_basis(num.basis(), den.basis());
  if (den.is_zero()) throw DomainError("ratio with zero denominator");
  const auto& cn = num.coords();
  const auto& cd = den.coords();
  std::optional<Rational> ratio;
  for (std::size_t i = 0; i < cd.size(); ++i) {
    if (sgn(cd[i]) == 0) {
      if (sgn(cn[i]) != 0) return std::nullopt;
      continue;
    }
    Rational r = cn[i] / cd[i];
    if (!ratio) {
      ratio = r;
    } else if (*ratio != r) {
      return std::nullopt;
    }
  }
  return ratio;
}

}  // namespace fiet
