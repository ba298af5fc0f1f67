#include "fiet/json_io.hpp"

namespace fiet {

namespace {

const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing member \"") + key + "\"");
  return j.at(key);
}

std::string string_of(const Json& j, const char* what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw SchemaError(std::string(what) + " must be a string");
}

Rational rational_of(const Json& j) {
  try {
    return parse_rational(string_of(j, "rational"));
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace

Json basis_to_json(const BasisPtr& basis) {
  Json gens = Json::array();
  for (const auto& g : basis->generators()) {
    if (const auto* s = std::get_if<SqrtGenerator>(&g)) {
      gens.push_back({{"sqrt", format_rational(s->radicand)}});
    } else {
      const auto& o = std::get<OracleGenerator>(g);
      gens.push_back({{"interval", {format_rational(o.initial.lo), format_rational(o.initial.hi)}}, {"oracle", o.digits}});
    }
  }
  return {{"generators", gens}};
}

BasisPtr basis_from_json(const Json& j, PrecisionPolicy policy) {
  const Json& gens = member(j, "generators");
  if (!gens.is_array()) throw SchemaError("generators must be an array");
  if (gens.empty()) return Basis::rational();
  std::vector<Generator> out;
  for (const auto& g : gens) {
    if (g.contains("sqrt")) {
      out.push_back(SqrtGenerator{rational_of(g.at("sqrt"))});
    } else if (g.contains("interval")) {
      const Json& iv = g.at("interval");
      if (!iv.is_array() || iv.size() != 2) throw SchemaError("interval must have two bounds");
      std::string digits = g.contains("oracle") ? string_of(g.at("oracle"), "oracle") : std::string();
      try {
        out.push_back(decimal_oracle({rational_of(iv[0]), rational_of(iv[1])}, digits));
      } catch (const DomainError& e) {
        throw SchemaError(e.what());
      }
    } else {
      throw SchemaError("generator must be {\"sqrt\": ...} or {\"interval\": ..., \"oracle\": ...}");
    }
  }
  try {
    return std::make_shared<const Basis>(std::move(out), policy);
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }
}

Json real_to_json(const ExactReal& x) {
  Json coords = Json::array();
  for (const auto& c : x.coords()) coords.push_back(format_rational(c));
  return {{"coords", coords}};
}

ExactReal real_from_json(const BasisPtr& basis, const Json& j) {
  try {
    if (j.is_string()) return parse_exact(basis, j.get<std::string>());
    if (j.is_number_integer()) return ExactReal(basis, Rational(j.get<long>()));
    const Json& coords = member(j, "coords");
    if (!coords.is_array() || coords.size() != basis->dimension())
      throw SchemaError("coords must have " + std::to_string(basis->dimension()) + " entries");
    std::vector<Rational> qs;
    for (const auto& c : coords) qs.push_back(rational_of(c));
    return ExactReal(basis, std::move(qs));
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }
}

Json fiet_to_json(const Fiet& f, bool with_basis) {
  Json pieces = Json::array();
  for (const auto& p : f.pieces()) {
    pieces.push_back({{"left", real_to_json(p.left)},
                      {"right", real_to_json(p.right)},
                      {"sign", p.sign},
                      {"offset", real_to_json(p.offset)}});
  }
  Json out = Json::object();
  if (with_basis) out["basis"] = basis_to_json(f.basis());
  out["pieces"] = pieces;
  return out;
}

Fiet fiet_from_json(const Json& j, const BasisPtr& basis, PrecisionPolicy policy) {
  BasisPtr b = j.is_object() && j.contains("basis") ? basis_from_json(j.at("basis"), policy) : basis;
  if (!b) throw SchemaError("map without a basis");
  if (basis && b != basis && !b->same_as(*basis)) throw SchemaError("map declares a different basis");
  if (basis) b = basis;
  const Json& pieces = member(j, "pieces");
  if (!pieces.is_array()) throw SchemaError("pieces must be an array");
  std::vector<Piece> out;
  for (const auto& p : pieces) {
    const Json& sign = member(p, "sign");
    if (!sign.is_number_integer()) throw SchemaError("sign must be 1 or -1");
    out.push_back({real_from_json(b, member(p, "left")), real_from_json(b, member(p, "right")), sign.get<int>(),
                   real_from_json(b, member(p, "offset"))});
  }
  try {
    return Fiet::canonicalize(b, std::move(out));
  } catch (const InvalidFiet& e) {
    throw SchemaError(e.what());
  }
}

namespace {

Json witness_to_json(const Witness& w) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, CommutatorWitness>) {
          return {{"type", "commutator"}, {"a", fiet_to_json(x.a, false)}, {"b", fiet_to_json(x.b, false)}};
        } else if constexpr (std::is_same_v<T, InvolutionWitness>) {
          return {{"type", "involution"}};
        } else if constexpr (std::is_same_v<T, StrongReversalWitness>) {
          return {{"type", "strong-reversal"}, {"i1", fiet_to_json(x.i1, false)}, {"i2", fiet_to_json(x.i2, false)}};
        } else if constexpr (std::is_same_v<T, RestrictedRotationWitness>) {
          return {{"type", "restricted-rotation"},
                  {"alpha", real_to_json(x.alpha)},
                  {"interval", {real_to_json(x.j.lo), real_to_json(x.j.hi)}}};
        } else if constexpr (std::is_same_v<T, PeriodicWitness>) {
          return {{"type", "periodic"}, {"order", x.order.get_str()}};
        } else {
          return {{"type", "conjugate"}, {"h", fiet_to_json(x.h, false)}, {"g", fiet_to_json(x.g, false)}};
        }
      },
      w);
}

Witness witness_from_json(const BasisPtr& b, const Json& j) {
  const std::string type = string_of(member(j, "type"), "type");
  if (type == "commutator") return CommutatorWitness{fiet_from_json(member(j, "a"), b), fiet_from_json(member(j, "b"), b)};
  if (type == "involution") return InvolutionWitness{};
  if (type == "strong-reversal")
    return StrongReversalWitness{fiet_from_json(member(j, "i1"), b), fiet_from_json(member(j, "i2"), b)};
  if (type == "restricted-rotation") {
    const Json& iv = member(j, "interval");
    if (!iv.is_array() || iv.size() != 2) throw SchemaError("interval must have two ends");
    return RestrictedRotationWitness{real_from_json(b, member(j, "alpha")),
                                     {real_from_json(b, iv[0]), real_from_json(b, iv[1])}};
  }
  if (type == "periodic") {
    try {
      return PeriodicWitness{Integer(string_of(member(j, "order"), "order"))};
    } catch (const std::invalid_argument&) {
      throw SchemaError("order must be an integer");
    }
  }
  if (type == "conjugate") return ConjugateWitness{fiet_from_json(member(j, "h"), b), fiet_from_json(member(j, "g"), b)};
  throw SchemaError("unknown witness type \"" + type + "\"");
}

}  // namespace

Json certificate_to_json(const Certificate& c) {
  Json out = Json::object();
  out["kind"] = to_string(c.kind);
  out["basis"] = basis_to_json(c.target.basis());
  if (c.n) out["n"] = *c.n;
  out["target"] = fiet_to_json(c.target, false);
  Json factors = Json::array();
  for (const auto& f : c.factors) factors.push_back({{"value", fiet_to_json(f.value, false)}, {"witness", witness_to_json(f.witness)}});
  out["factors"] = factors;
  out["meta"] = Json::object();
  for (const auto& [k, v] : c.meta) out["meta"][k] = v;
  return out;
}

Certificate certificate_from_json(const Json& j, PrecisionPolicy policy) {
  auto kind = parse_kind(string_of(member(j, "kind"), "kind"));
  if (!kind) throw SchemaError("unknown certificate kind");
  BasisPtr b = basis_from_json(member(j, "basis"), policy);
  Certificate c{*kind, fiet_from_json(member(j, "target"), b), {}, std::nullopt, {}};
  if (j.contains("n")) {
    if (!j.at("n").is_number_unsigned()) throw SchemaError("n must be a positive integer");
    c.n = j.at("n").get<unsigned long>();
  }
  const Json& factors = member(j, "factors");
  if (!factors.is_array()) throw SchemaError("factors must be an array");
  for (const auto& f : factors)
    c.factors.push_back({fiet_from_json(member(f, "value"), b), witness_from_json(b, member(f, "witness"))});
  if (j.contains("meta") && j.at("meta").is_object())
    for (const auto& [k, v] : j.at("meta").items()) c.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
  return c;
}

Json saf_to_json(const SafInvariant& s) {
  Json rows = Json::array();
  for (const auto& row : s.matrix) {
    Json r = Json::array();
    for (const auto& q : row) r.push_back(format_rational(q));
    rows.push_back(r);
  }
  return rows;
}

Json verdict_to_json(const Verdict& v) {
  Json failures = Json::array();
  for (const auto& f : v.failures) {
    Json entry = {{"factor", f.factor}, {"reason", to_string(f.reason)}, {"detail", f.detail}};
    failures.push_back(entry);
  }
  return {{"ok", v.ok()}, {"failures", failures}};
}

}  // namespace fiet
