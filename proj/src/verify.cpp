#include "fiet/verify.hpp"

#include "fiet/invariants.hpp"

namespace fiet {

const char* to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::ProductMismatch:
      return "ProductMismatch";
    case FailureReason::WitnessMismatch:
      return "WitnessMismatch";
    case FailureReason::NotInvolution:
      return "NotInvolution";
    case FailureReason::CountExceeded:
      return "CountExceeded";
    case FailureReason::SupportViolation:
      return "SupportViolation";
    case FailureReason::SafNonzero:
      return "SafNonzero";
  }
  return "unknown";
}

namespace {

struct Checker {
  const Certificate& cert;
  Verdict verdict;

  void fail(long index, FailureReason reason, std::string detail) {
    verdict.failures.push_back({index, reason, std::move(detail)});
  }

  bool same_basis(const Fiet& f) const {
    return f.basis() == cert.target.basis() || f.basis()->same_as(*cert.target.basis());
  }

  void check_witness(long index, const Factor& factor) {
    const Fiet& v = factor.value;
    if (auto w = std::get_if<CommutatorWitness>(&factor.witness)) {
      if (!same_basis(w->a) || !same_basis(w->b) || commutator(w->a, w->b) != v)
        fail(index, FailureReason::WitnessMismatch, "[a, b] differs from the factor");
    } else if (std::holds_alternative<InvolutionWitness>(factor.witness)) {
      if (!is_involution(v)) fail(index, FailureReason::NotInvolution, "factor does not square to the identity");
    } else if (auto w = std::get_if<StrongReversalWitness>(&factor.witness)) {
      if (!same_basis(w->i1) || !same_basis(w->i2)) {
        fail(index, FailureReason::WitnessMismatch, "witness on another basis");
        return;
      }
      if (!is_involution(w->i1)) fail(index, FailureReason::NotInvolution, "i1 is not an involution");
      if (!is_involution(w->i2)) fail(index, FailureReason::NotInvolution, "i2 is not an involution");
      if (compose(w->i1, w->i2) != v) fail(index, FailureReason::WitnessMismatch, "i1 o i2 differs from the factor");
    } else if (auto w = std::get_if<RestrictedRotationWitness>(&factor.witness)) {
      bool ok = false;
      try {
        ok = make_restricted_rotation_mod(w->alpha, w->j) == v;
      } catch (const Error&) {
      }
      if (!ok) fail(index, FailureReason::WitnessMismatch, "rotation parameters do not rebuild the factor");
    } else if (auto w = std::get_if<PeriodicWitness>(&factor.witness)) {
      if (w->order < 1 || !power(v, w->order).is_identity())
        fail(index, FailureReason::WitnessMismatch, "factor^order is not the identity");
    } else if (auto w = std::get_if<ConjugateWitness>(&factor.witness)) {
      if (!same_basis(w->h) || !same_basis(w->g) || conjugate(w->h, w->g) != v)
        fail(index, FailureReason::WitnessMismatch, "h g h^-1 differs from the factor");
    }
  }

  template <class W>
  bool witness_is(long index, const Factor& factor) {
    if (std::holds_alternative<W>(factor.witness)) return true;
    fail(index, FailureReason::WitnessMismatch, "witness type does not match the certificate kind");
    return false;
  }

  void check_kind() {
    const auto& fs = cert.factors;
    const std::size_t c = fs.size();
    auto bound = [&](std::size_t limit) {
      if (c > limit)
        fail(-1, FailureReason::CountExceeded, std::to_string(c) + " factors, limit " + std::to_string(limit));
    };
    switch (cert.kind) {
      case CertificateKind::Rotations:
        for (std::size_t i = 0; i < c; ++i) witness_is<RestrictedRotationWitness>(long(i), fs[i]);
        bound(cert.target.piece_count() - 1);
        break;
      case CertificateKind::Commutators: {
        for (std::size_t i = 0; i < c; ++i) witness_is<CommutatorWitness>(long(i), fs[i]);
        bound(cert.target.is_flip_free() ? 5 : 6);
        check_saf();
        break;
      }
      case CertificateKind::StronglyReversible:
        for (std::size_t i = 0; i < c; ++i) witness_is<StrongReversalWitness>(long(i), fs[i]);
        bound(6);
        break;
      case CertificateKind::Involutions:
        for (std::size_t i = 0; i < c; ++i) witness_is<InvolutionWitness>(long(i), fs[i]);
        bound(12);
        break;
      case CertificateKind::CornerSupport:
        check_corner();
        break;
    }
  }

  // A commutator of flip-free maps lies in the kernel of the SAF invariant,
  // and the invariant is additive over flip-free products.
  void check_saf() {
    bool all_flip_free = cert.target.is_flip_free();
    for (std::size_t i = 0; i < cert.factors.size(); ++i) {
      const Factor& f = cert.factors[i];
      const auto* w = std::get_if<CommutatorWitness>(&f.witness);
      if (!f.value.is_flip_free()) all_flip_free = false;
      if (w && w->a.is_flip_free() && w->b.is_flip_free() && f.value.is_flip_free() && !saf(f.value).is_zero())
        fail(long(i), FailureReason::SafNonzero, "commutator of flip-free maps with nonzero saf");
    }
    if (!all_flip_free) return;
    const std::size_t dim = cert.target.basis()->dimension();
    SafInvariant total = SafInvariant::zero(dim);
    for (const auto& f : cert.factors) total += saf(f.value);
    if (!(total == saf(cert.target))) fail(-1, FailureReason::SafNonzero, "saf of the target is not the sum over factors");
  }

  void check_corner() {
    const auto& fs = cert.factors;
    if (!cert.n || *cert.n == 0) {
      fail(-1, FailureReason::WitnessMismatch, "corner certificate without n");
      return;
    }
    const std::size_t s = corner_count(*cert.n);
    if (fs.size() != s + 1) {
      fail(-1, FailureReason::CountExceeded, "expected " + std::to_string(s) + " involutions and one conjugate");
      return;
    }
    for (std::size_t i = 0; i < s; ++i) witness_is<InvolutionWitness>(long(i), fs[i]);
    if (!witness_is<ConjugateWitness>(long(s), fs[s])) return;
    const auto& w = std::get<ConjugateWitness>(fs[s].witness);
    const BasisPtr& b = cert.target.basis();
    Interval corner{ExactReal(b, 1) - ExactReal(b, Rational(1, long(*cert.n))), ExactReal(b, 1)};
    if (!supported_in(w.g, corner)) fail(long(s), FailureReason::SupportViolation, "g is not supported in the corner");
  }

  void check_product() {
    const BasisPtr& b = cert.target.basis();
    Fiet product = Fiet::identity(b);
    for (const auto& f : cert.factors) {
      if (!same_basis(f.value)) {
        fail(-1, FailureReason::ProductMismatch, "factor on another basis");
        return;
      }
      product = compose(product, f.value);
    }
    if (product != cert.target) fail(-1, FailureReason::ProductMismatch, "product of the factors differs from the target");
  }
};

}  // namespace

Verdict verify(const Certificate& cert) {
  Checker checker{cert, {}};
  checker.check_product();
  for (std::size_t i = 0; i < cert.factors.size(); ++i) checker.check_witness(long(i), cert.factors[i]);
  checker.check_kind();
  return std::move(checker.verdict);
}

}  // namespace fiet
