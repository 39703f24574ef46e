#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "contextum/document.hpp"

namespace contextum::io {

using json = nlohmann::json;

/// Decimal ingestion: a JSON float snaps to the simplest rational within
/// `tolerance`, which must have denominator <= kMaxSnapDenominator.
inline constexpr long kMaxSnapDenominator = 1'000'000;
inline constexpr double kDefaultSnapTolerance = 1e-9;

struct ReadOptions {
  std::optional<Rational> snap_tolerance;  ///< absent: decimals are rejected
};

namespace detail {

[[noreturn]] inline void fail(std::string const& where, std::string const& what) {
  throw InputError(where + ": " + what);
}

inline Rational floor_of(Rational const& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.raw().get_num_mpz_t(), r.raw().get_den_mpz_t());
  return Rational(mpq_class(q));
}

/// The rational with least denominator (then least magnitude) in [lo, hi].
inline Rational simplest_between(Rational lo, Rational hi) {
  if (lo.sign() <= 0 && hi.sign() >= 0) return Rational{0};
  if (hi.sign() < 0) return -simplest_between(-hi, -lo);
  auto const fl = floor_of(lo);
  if (fl == lo || fl + Rational{1} <= hi) return fl == lo ? lo : fl + Rational{1};
  return fl + Rational{1} / simplest_between(Rational{1} / (hi - fl), Rational{1} / (lo - fl));
}

inline Rational snap(double x, Rational const& tolerance, std::string const& where) {
  if (!std::isfinite(x)) fail(where, "non-finite number");
  Rational const exact{mpq_class(x)};
  auto const r = simplest_between(exact - tolerance, exact + tolerance);
  if (r.denominator() > kMaxSnapDenominator)
    fail(where, "decimal " + std::to_string(x) + " is not within snap_tolerance of a rational with denominator <= 10^6");
  return r;
}

inline json const& field(json const& j, char const* name, std::string const& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(name);
  if (it == j.end()) fail(where, std::string("missing field '") + name + "'");
  return *it;
}

inline json const& array_field(json const& j, char const* name, std::string const& where) {
  auto const& a = field(j, name, where);
  if (!a.is_array()) fail(where + "." + name, "expected an array");
  return a;
}

inline std::string read_string(json const& j, std::string const& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

inline std::vector<std::string> read_strings(json const& j, std::string const& where) {
  if (!j.is_array()) fail(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_string(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::size_t read_index(json const& j, std::string const& where) {
  if (!j.is_number_unsigned()) fail(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

inline Rational read_rational(json const& j, ReadOptions const& opt, std::string const& where) {
  if (j.is_string()) {
    try {
      return Rational::parse(j.get<std::string>());
    } catch (std::invalid_argument const& e) {
      fail(where, e.what());
    }
  }
  if (j.is_number_integer()) return Rational{j.get<long>()};
  if (j.is_number_float()) {
    if (!opt.snap_tolerance) fail(where, "decimal numbers require snap_tolerance");
    return snap(j.get<double>(), *opt.snap_tolerance, where);
  }
  fail(where, "expected a rational string \"p/q\"");
}

inline std::vector<Rational> read_rationals(json const& j, ReadOptions const& opt, std::string const& where) {
  if (!j.is_array()) fail(where, "expected an array of rationals");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_rational(j[i], opt, where + "[" + std::to_string(i) + "]"));
  return out;
}

inline quantum::GaussianRational read_complex(json const& j, ReadOptions const& opt, std::string const& where) {
  if (j.is_string()) {
    try {
      return quantum::GaussianRational::parse(j.get<std::string>());
    } catch (std::invalid_argument const& e) {
      fail(where, e.what());
    }
  }
  return read_rational(j, opt, where);
}

inline quantum::Vector read_vector(json const& j, ReadOptions const& opt, std::string const& where) {
  if (!j.is_array()) fail(where, "expected a vector");
  quantum::Vector v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(read_complex(j[i], opt, where + "[" + std::to_string(i) + "]"));
  return v;
}

inline quantum::Matrix read_matrix(json const& j, ReadOptions const& opt, std::string const& where) {
  if (!j.is_array()) fail(where, "expected a matrix (array of rows)");
  auto const n = j.size();
  std::vector<quantum::GaussianRational> entries;
  for (std::size_t r = 0; r < n; ++r) {
    auto row = read_vector(j[r], opt, where + "[" + std::to_string(r) + "]");
    if (row.size() != n) fail(where, "matrix is not square");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return quantum::Matrix(n, std::move(entries));
}

inline std::vector<Key> read_keys(json const& j, std::string const& where) {
  if (!j.is_array()) fail(where, "expected an array of measurement sets");
  std::vector<Key> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_strings(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<Measurement> read_measurements(json const& j, std::string const& where) {
  auto const& a = array_field(j, "measurements", where);
  std::vector<Measurement> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto const w = where + ".measurements[" + std::to_string(i) + "]";
    out.push_back({read_string(field(a[i], "id", w), w + ".id"), read_strings(field(a[i], "outcomes", w), w + ".outcomes")});
  }
  return out;
}

inline Skeleton read_skeleton(json const& j) {
  Skeleton sk;
  sk.measurements = read_measurements(j, "$");
  sk.contexts = read_keys(field(j, "contexts", "$"), "$.contexts");
  sk.preparations = read_strings(field(j, "preparations", "$"), "$.preparations");
  return sk;
}

/// Shape from the skeleton, or the flat length when a member is unknown
/// (validation then reports the unknown measurement).
inline Distribution make_distribution(Skeleton const& sk, Key const& key, std::vector<Rational> weights) {
  bool known = std::all_of(key.begin(), key.end(), [&](auto const& id) { return sk.find(id) != nullptr; });
  auto shape = known ? sk.shape_of(key) : std::vector<std::size_t>{weights.size()};
  return {std::move(shape), std::move(weights)};
}

inline std::vector<EquivalenceClaim> read_claims(json const& j) {
  std::vector<EquivalenceClaim> out;
  auto it = j.find("claims");
  if (it == j.end()) return out;
  if (!it->is_array()) fail("$.claims", "expected an array");
  for (std::size_t i = 0; i < it->size(); ++i) {
    auto const w = "$.claims[" + std::to_string(i) + "]";
    auto const& c = (*it)[i];
    EquivalenceClaim claim;
    claim.first = MeasurementRef::parse(read_string(field(c, "first", w), w + ".first"));
    claim.second = MeasurementRef::parse(read_string(field(c, "second", w), w + ".second"));
    auto const& h = field(c, "bijection", w);
    if (!h.is_object()) fail(w + ".bijection", "expected an object");
    for (auto const& [from, to] : h.items()) claim.bijection[from] = read_string(to, w + ".bijection");
    auto const prov = c.contains("provenance") ? read_string(c["provenance"], w + ".provenance") : "declared";
    if (prov == "declared") {
      claim.provenance = Provenance::declared;
    } else if (prov == "discovered") {
      claim.provenance = Provenance::discovered;
    } else {
      fail(w + ".provenance", "expected \"declared\" or \"discovered\"");
    }
    out.push_back(std::move(claim));
  }
  return out;
}

inline TheoryDocument read_theory(json const& j, ReadOptions const& opt) {
  TheoryDocument doc;
  doc.theory.skeleton = read_skeleton(j);
  auto const& tables = array_field(j, "tables", "$");
  for (std::size_t i = 0; i < tables.size(); ++i) {
    auto const w = "$.tables[" + std::to_string(i) + "]";
    auto const& t = tables[i];
    Key key = read_strings(field(t, "measurements", w), w + ".measurements");
    auto prep = read_string(field(t, "preparation", w), w + ".preparation");
    auto weights = read_rationals(field(t, "weights", w), opt, w + ".weights");
    auto& slot = doc.theory.tables[key];
    if (slot.contains(prep)) fail(w, "duplicate table for " + key_label(key) + " at '" + prep + "'");
    slot[prep] = make_distribution(doc.theory.skeleton, key, std::move(weights));
  }
  doc.claims = read_claims(j);
  return doc;
}

inline ModelDocument read_model(json const& j, ReadOptions const& opt) {
  ModelDocument doc;
  auto& m = doc.model;
  m.skeleton = read_skeleton(j);
  m.ontic_states = read_strings(field(j, "ontic_states", "$"), "$.ontic_states");
  auto const& priors = field(j, "priors", "$");
  if (!priors.is_object()) fail("$.priors", "expected an object");
  for (auto const& [prep, w] : priors.items()) {
    auto weights = read_rationals(w, opt, "$.priors." + prep);
    m.priors[prep] = Distribution{{m.ontic_states.size()}, std::move(weights)};
  }
  auto const& responses = array_field(j, "responses", "$");
  for (std::size_t i = 0; i < responses.size(); ++i) {
    auto const w = "$.responses[" + std::to_string(i) + "]";
    auto const& r = responses[i];
    Key key = read_strings(field(r, "measurements", w), w + ".measurements");
    if (m.responses.contains(key)) fail(w, "duplicate response block for " + key_label(key));
    auto const& states = field(r, "states", w);
    if (!states.is_object()) fail(w + ".states", "expected an object");
    auto& slot = m.responses[key];
    for (auto const& [lambda, weights] : states.items())
      slot[lambda] = make_distribution(m.skeleton, key, read_rationals(weights, opt, w + ".states." + lambda));
  }
  doc.claims = read_claims(j);
  return doc;
}

inline std::vector<quantum::SpectralObservable> read_observables(json const& j, ReadOptions const& opt) {
  auto const& a = array_field(j, "observables", "$");
  std::vector<quantum::SpectralObservable> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto const w = "$.observables[" + std::to_string(i) + "]";
    quantum::SpectralObservable o;
    o.id = read_string(field(a[i], "id", w), w + ".id");
    o.eigenvalues = read_rationals(field(a[i], "eigenvalues", w), opt, w + ".eigenvalues");
    auto const& projs = array_field(a[i], "projections", w);
    for (std::size_t k = 0; k < projs.size(); ++k)
      o.projections.push_back(read_matrix(projs[k], opt, w + ".projections[" + std::to_string(k) + "]"));
    out.push_back(std::move(o));
  }
  return out;
}

inline std::size_t read_dimension(json const& j) { return read_index(field(j, "dimension", "$"), "$.dimension"); }

inline kosp::KSScenario read_ks(json const& j, ReadOptions const& opt) {
  auto obs = read_observables(j, opt);
  auto contexts = read_keys(field(j, "contexts", "$"), "$.contexts");
  auto const dim = read_dimension(j);
  for (auto const& o : obs)
    if (o.dim() != dim) fail("$.observables", "observable '" + o.id + "' does not match dimension");
  try {
    return kosp::make_scenario(obs, contexts);
  } catch (InputError const&) {
    // Left without admissible sets; validation reports what is wrong.
    return kosp::KSScenario{std::move(obs), std::move(contexts), {}};
  }
}

inline kosp::VectorScenario read_vectors(json const& j, ReadOptions const& opt) {
  kosp::VectorScenario vs;
  vs.dimension = read_dimension(j);
  auto const& vectors = array_field(j, "vectors", "$");
  for (std::size_t i = 0; i < vectors.size(); ++i)
    vs.vectors.push_back(read_rationals(vectors[i], opt, "$.vectors[" + std::to_string(i) + "]"));
  auto const& bases = array_field(j, "bases", "$");
  for (std::size_t b = 0; b < bases.size(); ++b) {
    auto const w = "$.bases[" + std::to_string(b) + "]";
    if (!bases[b].is_array()) fail(w, "expected an array of vector indices");
    std::vector<std::size_t> basis;
    for (std::size_t k = 0; k < bases[b].size(); ++k) basis.push_back(read_index(bases[b][k], w));
    vs.bases.push_back(std::move(basis));
  }
  return vs;
}

inline sheaf::EmpiricalModel read_empirical(json const& j, ReadOptions const& opt) {
  sheaf::EmpiricalModel em;
  em.measurements = read_measurements(j, "$");
  auto const sk = em.skeleton();
  auto const& cover = array_field(j, "cover", "$");
  for (std::size_t i = 0; i < cover.size(); ++i) {
    auto const w = "$.cover[" + std::to_string(i) + "]";
    Key key = read_strings(field(cover[i], "measurements", w), w + ".measurements");
    auto weights = read_rationals(field(cover[i], "weights", w), opt, w + ".weights");
    em.distributions.push_back(make_distribution(sk, key, std::move(weights)));
    em.cover.push_back(std::move(key));
  }
  return em;
}

inline quantum::DensityOperator read_state(json const& j, ReadOptions const& opt, std::string const& where) {
  quantum::DensityOperator rho;
  rho.matrix = read_matrix(field(j, "matrix", where), opt, where + ".matrix");
  auto const& cert = field(j, "certificate", where);
  rho.certificate.weights = read_rationals(field(cert, "weights", where + ".certificate"), opt, where + ".certificate.weights");
  auto const& vs = array_field(cert, "vectors", where + ".certificate");
  for (std::size_t k = 0; k < vs.size(); ++k)
    rho.certificate.vectors.push_back(read_vector(vs[k], opt, where + ".certificate.vectors[" + std::to_string(k) + "]"));
  return rho;
}

inline quantum::QuantumRepresentation read_representation(json const& j, ReadOptions const& opt) {
  quantum::QuantumRepresentation rep;
  rep.dim = read_dimension(j);
  rep.observables = read_observables(j, opt);
  rep.contexts = read_keys(field(j, "contexts", "$"), "$.contexts");
  auto const& states = field(j, "states", "$");
  if (!states.is_object()) fail("$.states", "expected an object");
  for (auto const& [id, s] : states.items()) rep.states[id] = read_state(s, opt, "$.states." + id);
  return rep;
}

// ---- writing ----

inline json write_rationals(std::vector<Rational> const& rs) {
  json a = json::array();
  for (auto const& r : rs) a.push_back(r.str());
  return a;
}

inline json write_vector(quantum::Vector const& v) {
  json a = json::array();
  for (auto const& z : v) a.push_back(z.str());
  return a;
}

inline json write_matrix(quantum::Matrix const& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.dim(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(m(r, c).str());
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json write_keys(std::vector<Key> const& keys) {
  json a = json::array();
  for (auto const& k : keys) a.push_back(k);
  return a;
}

inline json write_measurements(std::vector<Measurement> const& ms) {
  json a = json::array();
  for (auto const& m : ms) a.push_back({{"id", m.id}, {"outcomes", m.outcomes}});
  return a;
}

inline void write_skeleton(json& j, Skeleton const& sk) {
  j["measurements"] = write_measurements(sk.measurements);
  j["contexts"] = write_keys(sk.contexts);
  j["preparations"] = sk.preparations;
}

inline json write_claims(std::vector<EquivalenceClaim> const& claims) {
  json a = json::array();
  for (auto const& c : claims)
    a.push_back({{"first", c.first.str()}, {"second", c.second.str()}, {"bijection", c.bijection},
                 {"provenance", to_string(c.provenance)}});
  return a;
}

inline json write_observables(std::vector<quantum::SpectralObservable> const& obs) {
  json a = json::array();
  for (auto const& o : obs) {
    json projs = json::array();
    for (auto const& p : o.projections) projs.push_back(write_matrix(p));
    a.push_back({{"id", o.id}, {"eigenvalues", write_rationals(o.eigenvalues)}, {"projections", std::move(projs)}});
  }
  return a;
}

struct Writer {
  json operator()(TheoryDocument const& d) const {
    json j{{"kind", "theory"}};
    write_skeleton(j, d.theory.skeleton);
    json tables = json::array();
    for (auto const& [key, per_prep] : d.theory.tables)
      for (auto const& [prep, dist] : per_prep)
        tables.push_back({{"measurements", key}, {"preparation", prep}, {"weights", write_rationals(dist.weights)}});
    j["tables"] = std::move(tables);
    if (!d.claims.empty()) j["claims"] = write_claims(d.claims);
    return j;
  }
  json operator()(ModelDocument const& d) const {
    json j{{"kind", "model"}};
    write_skeleton(j, d.model.skeleton);
    j["ontic_states"] = d.model.ontic_states;
    json priors = json::object();
    for (auto const& [prep, dist] : d.model.priors) priors[prep] = write_rationals(dist.weights);
    j["priors"] = std::move(priors);
    json responses = json::array();
    for (auto const& [key, per_state] : d.model.responses) {
      json states = json::object();
      for (auto const& [lambda, dist] : per_state) states[lambda] = write_rationals(dist.weights);
      responses.push_back({{"measurements", key}, {"states", std::move(states)}});
    }
    j["responses"] = std::move(responses);
    if (!d.claims.empty()) j["claims"] = write_claims(d.claims);
    return j;
  }
  json operator()(kosp::KSScenario const& s) const {
    return {{"kind", "ks_scenario"}, {"dimension", s.dim()}, {"observables", write_observables(s.observables)},
            {"contexts", write_keys(s.contexts)}};
  }
  json operator()(kosp::VectorScenario const& s) const {
    json vectors = json::array();
    for (auto const& v : s.vectors) vectors.push_back(write_rationals(v));
    return {{"kind", "vector_scenario"}, {"dimension", s.dimension}, {"vectors", std::move(vectors)}, {"bases", s.bases}};
  }
  json operator()(sheaf::EmpiricalModel const& e) const {
    json cover = json::array();
    for (std::size_t k = 0; k < e.cover.size(); ++k)
      cover.push_back({{"measurements", e.cover[k]}, {"weights", write_rationals(e.distributions.at(k).weights)}});
    return {{"kind", "empirical"}, {"measurements", write_measurements(e.measurements)}, {"cover", std::move(cover)}};
  }
  json operator()(quantum::QuantumRepresentation const& r) const {
    json states = json::object();
    for (auto const& [id, rho] : r.states) {
      json vectors = json::array();
      for (auto const& v : rho.certificate.vectors) vectors.push_back(write_vector(v));
      states[id] = {{"matrix", write_matrix(rho.matrix)},
                    {"certificate", {{"weights", write_rationals(rho.certificate.weights)}, {"vectors", std::move(vectors)}}}};
    }
    return {{"kind", "representation"}, {"dimension", r.dim}, {"observables", write_observables(r.observables)},
            {"contexts", write_keys(r.contexts)}, {"states", std::move(states)}};
  }
};

}  // namespace detail

inline json to_json(Document const& doc) { return std::visit(detail::Writer{}, doc); }

/// Canonical text: sorted object keys, reduced fractions, two-space indent.
inline std::string dump_document(Document const& doc) { return to_json(doc).dump(2) + "\n"; }

inline ReadOptions read_options(json const& j) {
  ReadOptions opt;
  auto it = j.find("snap_tolerance");
  if (it == j.end()) return opt;
  if (it->is_boolean() && it->get<bool>()) {
    opt.snap_tolerance = Rational{mpq_class(kDefaultSnapTolerance)};
  } else if (it->is_number_float()) {
    opt.snap_tolerance = Rational{mpq_class(it->get<double>())};
  } else {
    opt.snap_tolerance = detail::read_rational(*it, {}, "$.snap_tolerance");
  }
  if (opt.snap_tolerance->sign() < 0) detail::fail("$.snap_tolerance", "must be non-negative");
  return opt;
}

/// Parses one scenario document; throws InputError on syntax or schema
/// errors. Semantic problems are left for validate_document.
inline Document parse_document(json const& j) {
  auto const kind = detail::read_string(detail::field(j, "kind", "$"), "$.kind");
  auto const opt = read_options(j);
  if (kind == "theory") return detail::read_theory(j, opt);
  if (kind == "model") return detail::read_model(j, opt);
  if (kind == "ks_scenario") return detail::read_ks(j, opt);
  if (kind == "vector_scenario") return detail::read_vectors(j, opt);
  if (kind == "empirical") return detail::read_empirical(j, opt);
  if (kind == "representation") return detail::read_representation(j, opt);
  detail::fail("$.kind", "unknown kind '" + kind + "'");
}

inline Document parse_document(std::string const& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (json::parse_error const& e) {
    throw InputError(std::string("JSON syntax: ") + e.what());
  }
  try {
    return parse_document(j);
  } catch (json::exception const& e) {
    throw InputError(std::string("schema: ") + e.what());
  } catch (std::invalid_argument const& e) {
    throw InputError(e.what());
  }
}

inline std::string read_file(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(std::filesystem::path const& path, std::string const& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

inline Document load_document(std::filesystem::path const& path) { return parse_document(read_file(path)); }

}  // namespace contextum::io
