#pragma once

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "contextum/catalog.hpp"
#include "contextum/io/format.hpp"
#include "contextum/kosp/nogo.hpp"
#include "contextum/kosp/vectors.hpp"
#include "contextum/sheaf/section.hpp"

namespace contextum::cli {

using io::json;

/// Stable process exit codes.
enum Exit : int { kOk = 0, kViolation = 1, kInputError = 2, kCapacity = 3, kInternal = 4 };

struct Caps {
  unsigned long long enumeration = kDefaultEnumerationCap;
  unsigned long long section = kDefaultSectionCap;
};

/// CONTEXTUM_CAP, when set, replaces every enumeration cap.
inline Caps caps_from_environment() {
  Caps caps;
  char const* raw = std::getenv("CONTEXTUM_CAP");
  if (!raw || !*raw) return caps;
  std::string const s(raw);
  if (!std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw InputError("CONTEXTUM_CAP must be a non-negative integer");
  auto const v = std::stoull(s);
  caps.enumeration = caps.section = v;
  return caps;
}

inline std::string sha256_hex(std::string const& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw InvariantError("SHA-256 failed");
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return ss.str();
}

inline json witness_json(Witness const& w) {
  return {{"kind", w.kind},
          {"measurements", w.measurements},
          {"subject", w.subject},
          {"outcome", w.outcome},
          {"lhs", w.lhs ? json(w.lhs->str()) : json(nullptr)},
          {"rhs", w.rhs ? json(w.rhs->str()) : json(nullptr)},
          {"detail", w.detail}};
}

inline std::string witness_text(Witness const& w) {
  std::string s = w.kind;
  if (!w.measurements.empty()) s += " [" + join(w.measurements, " | ") + "]";
  if (!w.subject.empty()) s += " at " + w.subject;
  if (!w.outcome.empty()) s += " outcome " + w.outcome;
  if (w.lhs && w.rhs) s += ": " + w.lhs->str() + " vs " + w.rhs->str();
  if (!w.detail.empty()) s += " (" + w.detail + ")";
  return s;
}

/// Machine-readable report plus its text rendering.
class Report {
 public:
  explicit Report(std::string command) { data_["command"] = std::move(command); }

  void argument(std::vector<std::string> const& args) { data_["arguments"] = args; }

  void input(std::string const& path, std::string const& content) {
    data_["inputs"].push_back({{"path", path}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  }

  void verdict(std::string const& name, Verdict const& v) {
    json w = json::array();
    for (auto const& x : v.witnesses) w.push_back(witness_json(x));
    data_["verdicts"].push_back({{"name", name}, {"holds", v.holds}, {"flags", v.flags}, {"witnesses", std::move(w)}});
    std::string line = name + ": " + (v.holds ? "holds" : "violated");
    if (!v.holds) line += " (" + std::to_string(v.witnesses.size()) + " witnesses)";
    for (auto const& f : v.flags) line += " [" + f + "]";
    text(line);
    for (std::size_t i = 0; i < v.witnesses.size() && i < kTextWitnesses; ++i) text("  " + witness_text(v.witnesses[i]));
    if (v.witnesses.size() > kTextWitnesses)
      text("  ... " + std::to_string(v.witnesses.size() - kTextWitnesses) + " more");
  }

  void count(std::string const& name, unsigned long long n) {
    data_["counts"][name] = n;
    text(name + ": " + std::to_string(n));
  }

  json& operator[](std::string const& key) { return data_[key]; }

  void text(std::string line) { lines_.push_back(std::move(line)); }

  [[nodiscard]] json finish(int exit_code, double seconds) {
    data_["exit_code"] = exit_code;
    data_["wall_time_seconds"] = seconds;
    return data_;
  }

  [[nodiscard]] std::string rendered() const {
    std::string s;
    for (auto const& l : lines_) s += l + "\n";
    return s;
  }

 private:
  static constexpr std::size_t kTextWitnesses = 10;
  json data_ = json::object();
  std::vector<std::string> lines_;
};

struct Loaded {
  Document doc;
  std::string path;
};

inline Loaded load(Report& report, std::string const& path) {
  auto content = io::read_file(path);
  report.input(path, content);
  return {io::parse_document(content), path};
}

template <typename T>
T const& expect(Loaded const& l, std::string const& kind) {
  if (auto const* p = std::get_if<T>(&l.doc)) return *p;
  throw InputError("'" + l.path + "' is a " + kind_of(l.doc) + " file, expected " + kind);
}

inline void require_valid(Report& report, Document const& doc, std::string const& name) {
  auto const v = validate_document(doc);
  if (!v.holds) {
    report.verdict("validate " + name, v);
    throw ValidationError("invalid input " + name, v);
  }
}

// ---- commands ----

inline int cmd_validate(Report& r, std::string const& path) {
  auto const l = load(r, path);
  r["kind"] = kind_of(l.doc);
  r.text("kind: " + kind_of(l.doc));
  auto const v = validate_document(l.doc);
  r.verdict("validate", v);
  return v.holds ? kOk : kViolation;
}

struct CheckOptions {
  std::string which;
  std::string path;
  std::string theory_path;
  bool discover = false;
  bool components = false;
  std::size_t max_outcomes = 4;
};

inline OperationalTheory theory_for(Report& r, CheckOptions const& o, OntologicalModel const& model) {
  if (o.theory_path.empty()) return reconstruct_theory(model);
  auto const t = load(r, o.theory_path);
  require_valid(r, t.doc, o.theory_path);
  return expect<TheoryDocument>(t, "theory").theory;
}

inline int cmd_check(Report& r, CheckOptions const& o) {
  auto const l = load(r, o.path);
  require_valid(r, l.doc, o.path);
  if (o.which == "nondisturb") {
    auto const& t = expect<TheoryDocument>(l, "theory");
    auto const v = check_nondisturbance(t.theory);
    r.verdict("nondisturbance", v);
    return v.holds ? kOk : kViolation;
  }
  auto const& m = expect<ModelDocument>(l, "model");
  if (o.which == "snc") {
    auto const v = check_simultaneous_nc(m.model);
    r.verdict("simultaneous noncontextuality", v);
    return v.holds ? kOk : kViolation;
  }
  if (o.which == "reproduce") {
    if (o.theory_path.empty()) throw InputError("check reproduce needs --theory");
    auto const theory = theory_for(r, o, m.model);
    auto const v = check_reproduction(m.model, theory);
    r.verdict("reproduction", v);
    return v.holds ? kOk : kViolation;
  }
  if (o.which == "mnc") {
    std::vector<EquivalenceClaim> claims = m.claims;
    if (o.discover) {
      auto const theory = theory_for(r, o, m.model);
      auto found = find_operational_equivalences(theory, o.max_outcomes);
      if (o.components) {
        auto more = find_component_equivalences(theory, o.max_outcomes);
        found.insert(found.end(), more.begin(), more.end());
      }
      r.count("discovered claims", found.size());
      claims.insert(claims.end(), found.begin(), found.end());
    }
    if (claims.empty()) throw InputError("check mnc needs claims in the model file or --discover");
    bool all = true;
    for (auto const& c : claims) {
      auto const v = check_measurement_nc(m.model, {c});
      r.verdict("measurement noncontextuality " + c.first.str() + " ~ " + c.second.str() + " [" +
                    c.describe_bijection() + ", " + to_string(c.provenance) + "]",
                v);
      all = all && v.holds;
    }
    r["holds"] = all;
    r.text(std::string("overall: ") + (all ? "holds" : "violated"));
    return all ? kOk : kViolation;
  }
  throw InputError("unknown check '" + o.which + "'");
}

struct KsOptions {
  std::string action;
  std::string path;
  std::string mode = "one-to-one";
  std::string states_path;
  std::vector<std::string> fine;
  std::string out;
  std::size_t list_limit = 32;
};

inline json assignment_json(kosp::ValueAssignment const& a) {
  json j = json::object();
  for (auto const& [id, v] : a.values) j[id] = v.str();
  return j;
}

inline std::map<std::string, quantum::DensityOperator> states_from(Report& r, std::string const& path) {
  if (path.empty()) return {};
  auto const l = load(r, path);
  require_valid(r, l.doc, path);
  return expect<quantum::QuantumRepresentation>(l, "representation").states;
}

inline int cmd_ks(Report& r, KsOptions const& o, Caps const& caps) {
  auto const l = load(r, o.path);
  require_valid(r, l.doc, o.path);
  if (o.action == "search") {
    if (auto const* vs = std::get_if<kosp::VectorScenario>(&l.doc)) {
      auto const colorings = kosp::color_vectors(*vs, caps.enumeration);
      r.count("colorings", colorings.size());
      json list = json::array();
      for (std::size_t i = 0; i < colorings.size() && i < o.list_limit; ++i) list.push_back(colorings[i]);
      r["colorings"] = std::move(list);
      return kOk;
    }
    auto const& sc = expect<kosp::KSScenario>(l, "ks_scenario or vector_scenario");
    auto const assignments = kosp::enumerate_value_assignments(sc, caps.enumeration);
    r.count("candidates", kosp::candidate_count(sc));
    r.count("value assignments", assignments.size());
    json list = json::array();
    for (std::size_t i = 0; i < assignments.size() && i < o.list_limit; ++i) list.push_back(assignment_json(assignments[i]));
    r["assignments"] = std::move(list);
    return kOk;
  }
  auto const& sc = expect<kosp::KSScenario>(l, "ks_scenario");
  if (o.action == "nogo") {
    auto const rep = kosp::no_go_report(sc, caps.enumeration);
    r.count("candidates", rep.candidates);
    r.count("value assignments", rep.assignment_count);
    r["excludes_simultaneous_nc"] = rep.excludes_simultaneous_nc;
    r["excludes_measurement_nc"] = rep.excludes_measurement_nc;
    r["parity"] = {{"applicable", rep.parity.applicable},
                   {"context_signs", rep.parity.context_signs},
                   {"obstruction", rep.parity.obstruction}};
    r["reasoning"] = rep.reasoning;
    r.text(std::string("excludes simultaneous-noncontextual deterministic models: ") +
           (rep.excludes_simultaneous_nc ? "yes" : "no"));
    r.text(std::string("excludes measurement-noncontextual deterministic models: ") +
           (rep.excludes_measurement_nc ? "yes" : "no"));
    for (auto const& line : rep.reasoning) r.text("  " + line);
    return kOk;
  }
  if (o.action == "interpret") {
    if (o.out.empty()) throw InputError("ks interpret needs --out");
    auto states = states_from(r, o.states_path);
    TheoryDocument doc;
    if (o.mode == "one-to-one") {
      doc.theory = kosp::interpret_one_to_one(sc, std::move(states));
    } else {
      kosp::Interpretation interp;
      if (o.mode == "fine-grained") {
        interp.mode = kosp::Mode::fine_grained;
      } else if (o.mode == "custom") {
        interp.mode = kosp::Mode::custom;
        for (auto const& c : sc.contexts) interp.grouping[c] = kosp::Treatment::one_to_one;
        for (auto const& text : o.fine) {
          auto const key = MeasurementRef::parse(text).key;
          if (!interp.grouping.contains(key)) throw InputError("--fine names unknown context '" + text + "'");
          interp.grouping[key] = kosp::Treatment::fine_grained;
        }
      } else {
        throw InputError("unknown mode '" + o.mode + "'");
      }
      auto fg = kosp::interpret_custom(sc, interp, std::move(states));
      doc.theory = std::move(fg.theory);
      doc.claims = std::move(fg.claims);
    }
    io::write_file(o.out, io::dump_document(doc));
    r["output"] = o.out;
    r.count("measurements", doc.theory.skeleton.measurements.size());
    r.count("contexts", doc.theory.skeleton.contexts.size());
    r.count("claims", doc.claims.size());
    r.text("wrote " + o.out);
    return kOk;
  }
  throw InputError("unknown ks action '" + o.action + "'");
}

struct SheafOptions {
  std::string action;
  std::string path;
  std::string preparation;
};

inline json section_json(sheaf::EmpiricalModel const& em, sheaf::GlobalSection const& s) {
  json atoms = json::array();
  for (auto const& [g, w] : s.weights) {
    json assignment = json::object();
    for (std::size_t i = 0; i < g.size(); ++i) assignment[em.measurements[i].id] = em.measurements[i].outcomes[g[i]];
    atoms.push_back({{"assignment", std::move(assignment)}, {"weight", w.str()}});
  }
  return atoms;
}

inline int cmd_sheaf(Report& r, SheafOptions const& o, Caps const& caps) {
  auto const l = load(r, o.path);
  require_valid(r, l.doc, o.path);
  sheaf::EmpiricalModel em;
  if (auto const* t = std::get_if<TheoryDocument>(&l.doc)) {
    if (o.preparation.empty()) throw InputError("a theory file needs --preparation");
    em = sheaf::to_empirical(t->theory, o.preparation);
  } else {
    em = expect<sheaf::EmpiricalModel>(l, "empirical or theory");
  }
  auto const consistency = sheaf::check_consistency(em);
  if (o.action == "check") {
    r.verdict("consistency", consistency);
    return consistency.holds ? kOk : kViolation;
  }
  if (o.action != "section") throw InputError("unknown sheaf action '" + o.action + "'");
  if (!consistency.holds) {
    r.verdict("consistency", consistency);
    throw InputError("empirical model is inconsistent; no section problem to solve");
  }
  r.count("global assignments", sheaf::global_assignment_count(em));
  auto const result = sheaf::find_global_section(em, caps.section);
  if (auto const* s = std::get_if<sheaf::GlobalSection>(&result)) {
    r["section"] = section_json(em, *s);
    r.count("section atoms", s->weights.size());
    r.text("global section found");
    for (auto const& atom : r["section"]) r.text("  " + atom["weight"].get<std::string>() + " " + atom["assignment"].dump());
    return kOk;
  }
  auto const& cert = std::get<sheaf::FarkasCertificate>(result);
  bool const verified = sheaf::verify_certificate(em, cert);
  json rows = json::array();
  std::size_t row = 0;
  auto const sk = em.skeleton();
  for (std::size_t k = 0; k < em.cover.size(); ++k)
    for (std::size_t i = 0; i < em.distributions[k].weights.size(); ++i, ++row)
      rows.push_back({{"context", key_label(em.cover[k])}, {"outcome", sk.outcome_label(em.cover[k], i)},
                      {"multiplier", cert.multipliers[row].str()}});
  rows.push_back({{"context", "normalization"}, {"outcome", ""}, {"multiplier", cert.multipliers.back().str()}});
  r["certificate"] = {{"multipliers", std::move(rows)}, {"verified", verified}};
  r.text(std::string("no global section; Farkas certificate ") + (verified ? "re-verified" : "FAILED re-verification"));
  if (!verified) throw InvariantError("certificate failed re-verification");
  return kViolation;
}

inline int cmd_catalog(Report& r, std::string const& action, std::string const& key, std::string const& path) {
  if (action == "list") {
    json list = json::array();
    for (auto const& [k, e] : catalog::entries()) {
      list.push_back({{"key", k}, {"kind", e.kind}, {"notes", e.notes}});
      r.text(k + " (" + e.kind + "): " + e.notes);
    }
    r["entries"] = std::move(list);
    return kOk;
  }
  if (action == "export") {
    if (key.empty() || path.empty()) throw InputError("catalog export needs a key and a path");
    auto const& e = catalog::entry(key);
    auto const text = io::dump_document(e.payload);
    io::write_file(path, text);
    r["output"] = path;
    r["sha256"] = sha256_hex(text);
    r.text("wrote " + key + " (" + e.kind + ") to " + path);
    return kOk;
  }
  throw InputError("unknown catalog action '" + action + "'");
}

// ---- entry point ----

/// Runs one command line (without the program name). Text goes to `out`,
/// diagnostics to `err`.
inline int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
  auto const start = std::chrono::steady_clock::now();
  CLI::App app{"contextum: exact checks of contextuality for finite theories and models"};
  app.require_subcommand(1);
  std::string json_path;
  app.add_option("--json", json_path, "also write the machine-readable report to this path");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "validate a scenario file");
  validate->add_option("path", validate_path)->required();

  CheckOptions check_opt;
  auto* check = app.add_subcommand("check", "check a property of a theory or model");
  check->add_option("which", check_opt.which, "nondisturb | snc | mnc | reproduce")
      ->required()
      ->check(CLI::IsMember({"nondisturb", "snc", "mnc", "reproduce"}));
  check->add_option("path", check_opt.path)->required();
  check->add_option("--theory", check_opt.theory_path, "theory file (reproduce; mnc --discover)");
  check->add_flag("--discover", check_opt.discover, "mnc: discover singleton equivalences");
  check->add_flag("--components", check_opt.components, "mnc --discover: also singleton-vs-component equivalences");
  check->add_option("--max-outcomes", check_opt.max_outcomes, "largest outcome count searched by --discover");

  KsOptions ks_opt;
  auto* ks = app.add_subcommand("ks", "Kochen-Specker scenarios");
  ks->add_option("action", ks_opt.action, "search | interpret | nogo")
      ->required()
      ->check(CLI::IsMember({"search", "interpret", "nogo"}));
  ks->add_option("path", ks_opt.path)->required();
  ks->add_option("--mode", ks_opt.mode, "one-to-one | fine-grained | custom")
      ->check(CLI::IsMember({"one-to-one", "fine-grained", "custom"}));
  ks->add_option("--states", ks_opt.states_path, "representation file whose states become preparations");
  ks->add_option("--fine", ks_opt.fine, "custom mode: a context (a&b&c) to fine-grain; repeatable")->allow_extra_args(false);
  ks->add_option("--out", ks_opt.out, "interpret: output theory file");
  ks->add_option("--list-limit", ks_opt.list_limit, "search: largest number of assignments listed");

  SheafOptions sheaf_opt;
  auto* sheaf_cmd = app.add_subcommand("sheaf", "global sections of empirical models");
  sheaf_cmd->add_option("action", sheaf_opt.action, "check | section")->required()->check(CLI::IsMember({"check", "section"}));
  sheaf_cmd->add_option("path", sheaf_opt.path)->required();
  sheaf_cmd->add_option("--preparation", sheaf_opt.preparation, "preparation, when path is a theory file");

  std::string catalog_action, catalog_key, catalog_path;
  auto* cat = app.add_subcommand("catalog", "built-in scenarios and models");
  cat->add_option("action", catalog_action, "list | export")->required()->check(CLI::IsMember({"list", "export"}));
  cat->add_option("key", catalog_key);
  cat->add_option("path", catalog_path);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (CLI::CallForHelp const&) {
    out << app.help();
    return kOk;
  } catch (CLI::ParseError const& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  std::string name;
  for (auto* sub : app.get_subcommands()) name = sub->get_name();
  if (check->parsed()) name += " " + check_opt.which;
  if (ks->parsed()) name += " " + ks_opt.action;
  if (sheaf_cmd->parsed()) name += " " + sheaf_opt.action;
  if (cat->parsed()) name += " " + catalog_action;
  Report report(name);
  report.argument(args);

  int code = kInternal;
  try {
    auto const caps = caps_from_environment();
    if (validate->parsed()) code = cmd_validate(report, validate_path);
    if (check->parsed()) code = cmd_check(report, check_opt);
    if (ks->parsed()) code = cmd_ks(report, ks_opt, caps);
    if (sheaf_cmd->parsed()) code = cmd_sheaf(report, sheaf_opt, caps);
    if (cat->parsed()) code = cmd_catalog(report, catalog_action, catalog_key, catalog_path);
  } catch (CapacityError const& e) {
    report["error"] = {{"type", "capacity"}, {"message", e.what()}, {"required", e.required()}, {"cap", e.cap()}};
    err << "capacity exceeded: " << e.what() << "\n";
    code = kCapacity;
  } catch (InputError const& e) {
    report["error"] = {{"type", "input"}, {"message", e.what()}};
    err << "error: " << e.what() << "\n";
    code = kInputError;
  } catch (InvariantError const& e) {
    report["error"] = {{"type", "internal"}, {"message", e.what()}};
    err << "internal error: " << e.what() << "\n";
    code = kInternal;
  }
  double const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto const data = report.finish(code, seconds);
  out << report.rendered();
  if (!json_path.empty()) {
    try {
      io::write_file(json_path, data.dump(2) + "\n");
    } catch (InputError const& e) {
      err << "error: " << e.what() << "\n";
      if (code == kOk) code = kInputError;
    }
  }
  return code;
}

}  // namespace contextum::cli
