#pragma once

// Replays a certificate using only the group operations of fietcore.  Nothing
// computed by the decomposition code is trusted except the maps it stored.

#include <string>
#include <vector>

#include "fiet/certificate.hpp"

namespace fiet {

enum class FailureReason { ProductMismatch, WitnessMismatch, NotInvolution, CountExceeded, SupportViolation, SafNonzero };

const char* to_string(FailureReason reason);

struct Failure {
  long factor;  // -1 for properties of the whole certificate
  FailureReason reason;
  std::string detail;
};

struct Verdict {
  std::vector<Failure> failures;
  bool ok() const { return failures.empty(); }
};

Verdict verify(const Certificate& cert);

}  // namespace fiet
