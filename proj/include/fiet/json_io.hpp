#pragma once

// JSON forms of bases, maps, certificates and verdicts.
//
//   basis:  {"generators": [{"sqrt": "2"}, {"interval": ["0", "1"], "oracle": "0.7071..."}]}
//   real:   {"coords": ["1/2", "-1/4"]} or the text form "1/2 - 1/4*g1"
//   fiet:   {"basis": basis, "pieces": [{"left": real, "right": real, "sign": 1, "offset": real}]}
//
// Maps nested in a certificate omit "basis"; they use the certificate's.

#include <json.hpp>
#include <stdexcept>

#include "fiet/certificate.hpp"
#include "fiet/invariants.hpp"
#include "fiet/verify.hpp"

namespace fiet {

using Json = nlohmann::ordered_json;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json basis_to_json(const BasisPtr& basis);
BasisPtr basis_from_json(const Json& j, PrecisionPolicy policy = {});

Json real_to_json(const ExactReal& x);
ExactReal real_from_json(const BasisPtr& basis, const Json& j);

// with_basis = false drops the "basis" member
Json fiet_to_json(const Fiet& f, bool with_basis = true);
// `basis` is used when the object has no "basis" member.
Fiet fiet_from_json(const Json& j, const BasisPtr& basis = nullptr, PrecisionPolicy policy = {});

Json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j, PrecisionPolicy policy = {});

Json saf_to_json(const SafInvariant& s);
Json verdict_to_json(const Verdict& v);

}  // namespace fiet
