#include "fiet/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fiet/decompose.hpp"
#include "fiet/json_io.hpp"
#include "fiet/random.hpp"
#include "fiet/verify.hpp"

namespace fiet::cli {

namespace {

struct Session {
  std::string basis_text;
  unsigned max_bits = 4096;
  std::size_t piece_cap = std::size_t{1} << 16;
  std::uint64_t seed = 1;
  BasisPtr basis;

  PrecisionPolicy policy() const { return {256, max_bits}; }
};

struct Outcome {
  Json body;
  int code = kOk;
};

std::string slurp(const std::string& path, std::istream& in) {
  std::ostringstream ss;
  if (path == "-") {
    ss << in.rdbuf();
  } else {
    std::ifstream f(path);
    if (!f) throw SchemaError("cannot open " + path);
    ss << f.rdbuf();
  }
  return ss.str();
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

// --basis takes inline JSON or a file name.
BasisPtr load_basis(const std::string& text, std::istream& in, PrecisionPolicy policy) {
  auto first = text.find_first_not_of(" \t\n");
  Json j = first != std::string::npos && text[first] == '{' ? parse_json(text) : parse_json(slurp(text, in));
  return basis_from_json(j, policy);
}

class Context {
 public:
  Context(Session& session, std::vector<Json> inputs) : session_(session), inputs_(std::move(inputs)) {}

  std::size_t count() const { return inputs_.size(); }
  const Json& raw(std::size_t i) const { return inputs_.at(i); }

  Fiet fiet(std::size_t i) {
    const Json& j = inputs_.at(i);
    if (!session_.basis && !(j.is_object() && j.contains("basis"))) session_.basis = Basis::rational();
    Fiet f = fiet_from_json(j, session_.basis, session_.policy());
    // the first map fixes the basis for the rest of the command
    if (!session_.basis) session_.basis = f.basis();
    return f;
  }

  void need(std::size_t n, const char* what) const {
    if (inputs_.size() != n) throw SchemaError(std::string(what) + " expects " + std::to_string(n) + " input(s)");
  }

 private:
  Session& session_;
  std::vector<Json> inputs_;
};

Json shrink_to_json(const ShrinkResult& r) {
  Json rotations = Json::array();
  for (const auto& w : r.rotations)
    rotations.push_back({{"alpha", real_to_json(w.alpha)}, {"interval", {real_to_json(w.j.lo), real_to_json(w.j.hi)}}});
  return {{"basis", basis_to_json(r.g.basis())},
          {"p", fiet_to_json(r.p, false)},
          {"p_prime", fiet_to_json(r.p_prime, false)},
          {"g", fiet_to_json(r.g, false)},
          {"p_order", r.p_order.get_str()},
          {"p_prime_order", r.p_prime_order.get_str()},
          {"rotations", rotations},
          {"grid", r.grid.get_str()},
          {"epsilon", real_to_json(r.epsilon)},
          {"support", real_to_json(support_measure(r.g))},
          {"pieces", r.g.piece_count()}};
}

Outcome dispatch(const std::string& name, CLI::App& sub, Session& session, Context& ctx, const CLI::App& root) {
  (void)root;
  if (name == "canon") {
    ctx.need(1, name.c_str());
    return {fiet_to_json(ctx.fiet(0))};
  }
  if (name == "compose") {
    if (ctx.count() < 2) throw SchemaError("compose expects at least two maps");
    Fiet acc = ctx.fiet(0);
    for (std::size_t i = 1; i < ctx.count(); ++i) acc = compose(acc, ctx.fiet(i));
    return {fiet_to_json(acc)};
  }
  if (name == "inverse") {
    ctx.need(1, name.c_str());
    return {fiet_to_json(inverse(ctx.fiet(0)))};
  }
  if (name == "eq") {
    ctx.need(2, name.c_str());
    bool equal = ctx.fiet(0) == ctx.fiet(1);
    return {{{"equal", equal}}, equal ? kOk : kVerifyFailed};
  }
  if (name == "saf") {
    ctx.need(1, name.c_str());
    auto s = saf(ctx.fiet(0));
    return {{{"saf", saf_to_json(s)}, {"zero", s.is_zero()}}};
  }
  if (name == "periodic") {
    ctx.need(1, name.c_str());
    std::size_t cap = sub.get_option("--cap")->as<std::size_t>();
    auto v = is_periodic(ctx.fiet(0), cap);
    Json out = {{"periodic", v.periodic}, {"cap", v.cap}};
    out["order"] = v.periodic ? Json(v.order.get_str()) : Json(nullptr);
    return {out};
  }
  if (name == "metric") {
    ctx.need(2, name.c_str());
    return {{{"d", real_to_json(metric_d(ctx.fiet(0), ctx.fiet(1)))}}};
  }
  if (name == "decompose") {
    ctx.need(1, name.c_str());
    Fiet f = ctx.fiet(0);
    auto kind = parse_kind(sub.get_option("--kind")->as<std::string>());
    if (!kind) throw SchemaError("unknown --kind");
    DecompositionOptions opts;
    opts.force_full_pipeline = sub.get_option("--full")->as<bool>();
    Certificate cert = [&] {
      switch (*kind) {
        case CertificateKind::Rotations:
          return to_restricted_rotations(f);
        case CertificateKind::Commutators:
          return commutator_decomposition(f, opts);
        case CertificateKind::StronglyReversible:
          return strongly_reversible_decomposition(f, opts);
        case CertificateKind::Involutions:
          return involution_decomposition(f, opts);
        case CertificateKind::CornerSupport:
          break;
      }
      auto* n = sub.get_option("--n");
      if (n->count() == 0) throw SchemaError("corner needs --n");
      return corner_support_decomposition(f, n->as<unsigned long>());
    }();
    if (sub.get_option("--verify")->as<bool>()) {
      Verdict v = verify(cert);
      if (!v.ok()) return {verdict_to_json(v), kVerifyFailed};
    }
    return {certificate_to_json(cert)};
  }
  if (name == "shrink") {
    ctx.need(1, name.c_str());
    return {shrink_to_json(shrink_support(ctx.fiet(0), Integer(sub.get_option("--n")->as<unsigned long>())))};
  }
  if (name == "normalize-fix") {
    ctx.need(1, name.c_str());
    auto nf = normalize_fixed_set(ctx.fiet(0));
    return {{{"basis", basis_to_json(nf.h.basis())},
             {"h", fiet_to_json(nf.h, false)},
             {"conjugated", fiet_to_json(nf.conjugated, false)},
             {"fixed_length", real_to_json(nf.fixed_length)}}};
  }
  if (name == "verify") {
    ctx.need(1, name.c_str());
    Verdict v = verify(certificate_from_json(ctx.raw(0), session.policy()));
    return {verdict_to_json(v), v.ok() ? kOk : kVerifyFailed};
  }
  if (name == "gen-random") {
    ctx.need(0, name.c_str());
    BasisPtr basis = Basis::rational();
    if (auto* o = sub.get_option("--basis-coords"); o->count() > 0)
      basis = basis_from_json(parse_json(o->as<std::string>()), session.policy());
    else if (session.basis)
      basis = session.basis;
    std::size_t m = sub.get_option("--m")->as<std::size_t>();
    long grid = sub.get_option("--grid")->as<long>();
    bool flips = sub.get_option("--flips")->as<bool>();
    Json out = fiet_to_json(random_lattice_fiet(basis, m, grid, flips, session.seed));
    out["meta"] = {{"seed", std::to_string(session.seed)}, {"m", m}, {"grid", grid}, {"flips", flips}};
    return {out};
  }
  throw SchemaError("unknown command " + name);
}

struct Parsed {
  std::string command;
  std::vector<std::string> files;
};

// Builds the parser; files named on the command line land in `parsed.files`.
void build_app(CLI::App& app, Session& session, Parsed& parsed, std::string& batch_file) {
  app.require_subcommand(1);
  app.add_option("--basis", session.basis_text, "basis declaration: inline JSON or a file");
  app.add_option("--precision", session.max_bits, "bit budget for oracle comparisons");
  app.add_option("--piece-cap", session.piece_cap, "largest number of pieces a map may have");
  app.add_option("--seed", session.seed, "seed for gen-random");

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("files", parsed.files, "input files, - for stdin");
    sub->callback([&parsed, name] { parsed.command = name; });
    return sub;
  };
  add("canon", "canonical form of a map");
  add("compose", "f1 o f2 o ... of the given maps");
  add("inverse", "inverse map");
  add("eq", "equality in the quotient group (exit 1 when different)");
  add("saf", "SAF invariant as a rational matrix");
  add("periodic", "periodicity verdict")->add_option("--cap", "orbit-length cap")->default_val(std::size_t{256});
  add("metric", "distance between maps of the same combinatorics");
  auto* dec = add("decompose", "emit a certificate");
  dec->add_option("--kind", "rotations|commutators|involutions|strong-reversible|corner")->required();
  dec->add_option("--n", "corner parameter");
  dec->add_flag("--verify", "replay the certificate before emitting it");
  dec->add_flag("--full", "always run the compression pipeline");
  add("shrink", "support shrinking")->add_option("--n", "support bound 1/n")->required();
  add("normalize-fix", "move the fixed set to an initial segment");
  add("verify", "replay a certificate (exit 1 on failure)");
  auto* gen = add("gen-random", "seeded random map");
  gen->add_option("--m", "number of pieces")->default_val(std::size_t{4});
  gen->add_option("--grid", "lattice denominator")->default_val(64L);
  gen->add_option("--basis-coords", "basis JSON whose generators perturb the lattice");
  gen->add_flag("--flips", "allow flipped pieces");
  auto* batch = app.add_subcommand("batch", "one JSON request per line: {\"args\": [...], \"inputs\": [...]}");
  batch->add_option("file", batch_file)->default_val("-");
  batch->callback([&parsed] { parsed.command = "batch"; });
}

int run_one(const std::vector<std::string>& args, std::vector<Json> inputs, std::istream& in, std::ostream& out,
            std::ostream& err, bool allow_batch);

int run_batch(const std::string& file, Session& outer, std::istream& in, std::ostream& out, std::ostream& err) {
  std::string text = slurp(file, in);
  std::istringstream lines(text);
  std::string line;
  int worst = kOk;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::ostringstream body, diag;
    int code;
    try {
      Json req = parse_json(line);
      std::vector<std::string> args;
      if (!outer.basis_text.empty()) args.insert(args.end(), {"--basis", outer.basis_text});
      for (const auto& a : req.value("args", Json::array())) args.push_back(a.get<std::string>());
      std::vector<Json> inputs;
      for (const auto& i : req.value("inputs", Json::array())) inputs.push_back(i);
      std::istringstream none;
      code = run_one(args, std::move(inputs), none, body, diag, false);
    } catch (const std::exception& e) {
      diag << e.what();
      code = kBadInput;
    }
    Json record = {{"exit", code}};
    std::string produced = body.str();
    record["output"] = produced.empty() ? Json(nullptr) : Json::parse(produced);
    if (!diag.str().empty()) record["error"] = diag.str();
    out << record.dump() << "\n";
    worst = std::max(worst, code);
  }
  (void)err;
  return worst;
}

int run_one(const std::vector<std::string>& args, std::vector<Json> inputs, std::istream& in, std::ostream& out,
            std::ostream& err, bool allow_batch) {
  Session session;
  Parsed parsed;
  std::string batch_file;
  CLI::App app{"exact algebra of interval exchanges with flips", "fietool"};
  build_app(app, session, parsed, batch_file);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kBadInput;
  }
  const std::size_t saved_cap = piece_cap();
  struct Restore {
    std::size_t cap;
    ~Restore() { set_piece_cap(cap); }
  } restore{saved_cap};
  try {
    set_piece_cap(session.piece_cap);
    if (parsed.command == "batch") {
      if (!allow_batch) throw SchemaError("batch requests cannot nest");
      return run_batch(batch_file, session, in, out, err);
    }
    if (!session.basis_text.empty()) session.basis = load_basis(session.basis_text, in, session.policy());
    if (inputs.empty())
      for (const auto& f : parsed.files) inputs.push_back(parse_json(slurp(f, in)));
    Context ctx(session, std::move(inputs));
    CLI::App* sub = app.get_subcommand(parsed.command);
    Outcome result = dispatch(parsed.command, *sub, session, ctx, app);
    out << result.body.dump(2) << "\n";
    return result.code;
  } catch (const PrecisionExhausted& e) {
    err << "precision exhausted: " << e.what() << "\n";
    return kPrecision;
  } catch (const PieceCapExceeded& e) {
    err << "piece cap exceeded: " << e.what() << "\n";
    return kPrecision;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  return run_one(args, {}, in, out, err, true);
}

}  // namespace fiet::cli
