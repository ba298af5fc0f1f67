#include "fiet/certificate.hpp"

namespace fiet {

const char* to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::Rotations:
      return "rotations";
    case CertificateKind::Commutators:
      return "commutators";
    case CertificateKind::Involutions:
      return "involutions";
    case CertificateKind::StronglyReversible:
      return "strong-reversible";
    case CertificateKind::CornerSupport:
      return "corner";
  }
  return "unknown";
}

std::optional<CertificateKind> parse_kind(std::string_view name) {
  for (auto k : {CertificateKind::Rotations, CertificateKind::Commutators, CertificateKind::Involutions,
                 CertificateKind::StronglyReversible, CertificateKind::CornerSupport}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

unsigned long corner_count(unsigned long n) {
  if (n == 0) throw DomainError("n must be positive");
  // lhs = 5^(k+1), rhs = n 4^(k+1)
  Integer lhs = 5, rhs = Integer(n) * 4;
  unsigned long k = 0;
  while (lhs <= rhs) {
    ++k;
    lhs *= 5;
    rhs *= 4;
  }
  return k + 1;
}

}  // namespace fiet
