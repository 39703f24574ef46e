#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "contextum/document.hpp"
#include "contextum/kosp/interpret.hpp"
#include "contextum/kosp/nogo.hpp"
#include "contextum/sheaf/empirical.hpp"

namespace contextum::catalog {

using kosp::KSScenario;
using quantum::Matrix;
using quantum::SpectralObservable;

namespace detail {

inline void require(bool ok, std::string const& what) {
  if (!ok) throw InvariantError("catalog: " + what);
}

inline void require_valid(Verdict const& v, std::string const& what) {
  if (!v.holds) throw InvariantError("catalog: " + what + " fails validation (" + v.witnesses.front().kind + ")");
}

inline std::vector<std::vector<Matrix>> peres_mermin_grid() {
  using namespace quantum::pauli;
  return {
      {kron(Z(), I()), kron(I(), Z()), kron(Z(), Z())},
      {kron(I(), X()), kron(X(), I()), kron(X(), X())},
      {kron(Z(), X()), kron(X(), Z()), kron(Y(), Y())},
  };
}

inline std::string grid_id(std::size_t r, std::size_t c) { return "A" + std::to_string(r + 1) + std::to_string(c + 1); }

}  // namespace detail

/// The 3x3 Peres-Mermin square of two-qubit observables. Contexts are the
/// three rows followed by the three columns.
inline KSScenario const& peres_mermin_scenario() {
  static KSScenario const sc = [] {
    auto const grid = detail::peres_mermin_grid();
    auto const id4 = Matrix::identity(4);
    for (std::size_t r = 0; r < 3; ++r)
      detail::require(grid[r][0] * grid[r][1] * grid[r][2] == id4, "row " + std::to_string(r + 1) + " product is not I");
    for (std::size_t c = 0; c < 3; ++c) {
      auto const expected = c == 2 ? id4 * quantum::GaussianRational(Rational{-1}) : id4;
      detail::require(grid[0][c] * grid[1][c] * grid[2][c] == expected, "column " + std::to_string(c + 1) + " product");
    }
    std::vector<SpectralObservable> obs;
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) obs.push_back(SpectralObservable::from_involution(detail::grid_id(r, c), grid[r][c]));
    std::vector<Key> contexts;
    for (std::size_t r = 0; r < 3; ++r) contexts.push_back({detail::grid_id(r, 0), detail::grid_id(r, 1), detail::grid_id(r, 2)});
    for (std::size_t c = 0; c < 3; ++c) contexts.push_back({detail::grid_id(0, c), detail::grid_id(1, c), detail::grid_id(2, c)});
    return kosp::make_scenario(std::move(obs), std::move(contexts));
  }();
  return sc;
}

/// PM observables with the maximally mixed state "mixed".
inline quantum::QuantumRepresentation const& peres_mermin_representation() {
  static quantum::QuantumRepresentation const rep = [] {
    auto const& sc = peres_mermin_scenario();
    quantum::QuantumRepresentation r{sc.dim(), sc.observables, kosp::with_default_states(sc, {}), sc.contexts};
    detail::require_valid(quantum::validate_representation(r), "peres_mermin_representation");
    return r;
  }();
  return rep;
}

/// One-to-one reading of PM at rho = I/4.
inline OperationalTheory const& peres_mermin_theory() {
  static OperationalTheory const t = [] {
    auto theory = kosp::interpret_one_to_one(peres_mermin_scenario());
    detail::require_valid(validate_theory(theory), "peres_mermin_theory");
    return theory;
  }();
  return t;
}

/// Fine-grained reading of PM at rho = I/4, with its identity claims.
inline kosp::InterpretedTheory const& peres_mermin_fine_grained() {
  static kosp::InterpretedTheory const fg = [] {
    auto out = kosp::interpret_fine_grained(peres_mermin_scenario());
    detail::require_valid(validate_theory(out.theory), "peres_mermin_fine_grained");
    return out;
  }();
  return fg;
}

inline sheaf::EmpiricalModel const& peres_mermin_empirical() {
  static sheaf::EmpiricalModel const em = [] {
    auto e = sheaf::to_empirical(peres_mermin_theory(), "mixed");
    detail::require_valid(sheaf::validate_empirical(e), "peres_mermin_empirical");
    return e;
  }();
  return em;
}

struct AlbertModel {
  OperationalTheory theory;
  OntologicalModel model;
  EquivalenceClaim claim;
};

/// Two spin measurements differing only in the polarity of the magnets: the
/// same statistics, but each ontic state gives them opposite outcomes.
inline AlbertModel const& albert_toy_model() {
  static AlbertModel const a = [] {
    Skeleton sk{{{"m1", {"+1", "-1"}}, {"m2", {"+1", "-1"}}}, {}, {"psi"}};
    OperationalTheory theory{sk, {}};
    for (auto const* m : {"m1", "m2"}) theory.tables[Key{m}]["psi"] = uniform({2});
    OntologicalModel model{sk, {"above", "below"}, {{"psi", uniform({2})}}, {}};
    model.responses[Key{"m1"}]["above"] = point_mass({2}, 0);
    model.responses[Key{"m1"}]["below"] = point_mass({2}, 1);
    model.responses[Key{"m2"}]["above"] = point_mass({2}, 1);
    model.responses[Key{"m2"}]["below"] = point_mass({2}, 0);
    EquivalenceClaim claim{MeasurementRef::plain("m1"), MeasurementRef::plain("m2"), {{"+1", "+1"}, {"-1", "-1"}},
                           Provenance::declared};
    detail::require_valid(validate_theory(theory), "albert theory");
    detail::require_valid(validate_model(model), "albert model");
    detail::require_valid(check_equivalence_premises(theory, {claim}), "albert claim premise");
    return AlbertModel{std::move(theory), std::move(model), std::move(claim)};
  }();
  return a;
}

/// Deterministic model of the PM one-to-one theory: one ontic state per
/// choice of admissible tuple in each of the six contexts. Singleton
/// responses read the value from the observable's row.
inline OntologicalModel const& pm_contextual_model() {
  static OntologicalModel const m = [] {
    auto model = kosp::one_to_one_assembly_model(peres_mermin_scenario(), peres_mermin_theory());
    detail::require_valid(validate_model(model), "pm_contextual_model");
    return model;
  }();
  return m;
}

/// Two perfectly correlated fair coins on a single context.
inline sheaf::EmpiricalModel const& classical_coins_empirical() {
  static sheaf::EmpiricalModel const em = [] {
    sheaf::EmpiricalModel e{{{"a", {"0", "1"}}, {"b", {"0", "1"}}}, {{"a", "b"}}, {}};
    e.distributions.push_back({{2, 2}, {Rational(1, 2), Rational{0}, Rational{0}, Rational(1, 2)}});
    detail::require_valid(sheaf::validate_empirical(e), "classical_coins");
    return e;
  }();
  return em;
}

/// 18 vectors in 4 dimensions forming 9 orthogonal bases, each vector in
/// exactly two bases; no admissible {0,1} colouring exists.
inline kosp::VectorScenario const& kochen_specker_18() {
  static kosp::VectorScenario const vs = [] {
    std::vector<std::vector<long>> const raw{
        {0, 0, 0, 1}, {0, 0, 1, 0}, {1, 1, 0, 0},  {1, -1, 0, 0}, {0, 1, 0, 0},   {1, 0, 1, 0},
        {1, 0, -1, 0}, {1, -1, 1, -1}, {1, -1, -1, 1}, {0, 0, 1, 1}, {1, 1, 1, 1},  {0, 1, 0, -1},
        {1, 0, 0, 1}, {1, 0, 0, -1}, {0, 1, -1, 0}, {1, 1, -1, 1}, {1, 1, 1, -1}, {-1, 1, 1, 1},
    };
    kosp::VectorScenario s;
    s.dimension = 4;
    for (auto const& v : raw) {
      std::vector<Rational> r;
      for (auto x : v) r.emplace_back(x);
      s.vectors.push_back(std::move(r));
    }
    s.bases = {{0, 1, 2, 3},   {0, 4, 5, 6},   {7, 8, 2, 9},    {7, 10, 6, 11}, {1, 4, 12, 13},
               {8, 10, 13, 14}, {15, 16, 3, 9}, {15, 17, 5, 11}, {16, 17, 12, 14}};
    detail::require_valid(kosp::validate_vector_scenario(s), "kochen_specker_18");
    return s;
  }();
  return vs;
}

struct CatalogEntry {
  std::string key;
  std::string kind;
  Document payload;
  std::string notes;
};

/// All entries, keyed and sorted by name.
inline std::map<std::string, CatalogEntry> const& entries() {
  static std::map<std::string, CatalogEntry> const all = [] {
    std::map<std::string, CatalogEntry> m;
    auto add = [&](std::string key, Document doc, std::string notes) {
      auto const v = validate_document(doc);
      detail::require_valid(v, key);
      auto kind = kind_of(doc);
      m.emplace(key, CatalogEntry{key, std::move(kind), std::move(doc), std::move(notes)});
    };
    add("peres_mermin", peres_mermin_scenario(), "Peres-Mermin square: 9 two-qubit observables, 3 rows and 3 columns");
    add("peres_mermin_representation", peres_mermin_representation(),
        "Peres-Mermin observables, row/column contexts, maximally mixed state 'mixed'");
    add("peres_mermin_theory", TheoryDocument{peres_mermin_theory(), {}},
        "one-to-one reading of Peres-Mermin at the maximally mixed state");
    add("peres_mermin_fine_grained",
        TheoryDocument{peres_mermin_fine_grained().theory, peres_mermin_fine_grained().claims},
        "fine-grained reading of Peres-Mermin: 6 context measurements, 18 derived, 9 identity claims");
    add("peres_mermin_empirical", peres_mermin_empirical(), "Peres-Mermin statistics at the maximally mixed state");
    add("albert", ModelDocument{albert_toy_model().model, {albert_toy_model().claim}},
        "two-state deterministic model with mirrored responses and a declared identity claim");
    add("albert_theory", TheoryDocument{albert_toy_model().theory, {}}, "statistics of the two spin measurements");
    add("pm_contextual_model", ModelDocument{pm_contextual_model(), {}},
        "4096-state deterministic per-context model of the Peres-Mermin theory");
    add("classical_coins", classical_coins_empirical(), "two perfectly correlated fair coins");
    add("kochen_specker_18", kochen_specker_18(), "18 vectors in 4 dimensions, 9 bases, no colouring");
    return m;
  }();
  return all;
}

inline CatalogEntry const& entry(std::string const& key) {
  auto const& all = entries();
  auto it = all.find(key);
  if (it == all.end()) throw InputError("unknown catalog key '" + key + "'");
  return it->second;
}

}  // namespace contextum::catalog
