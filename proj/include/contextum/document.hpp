#pragma once

#include <string>
#include <variant>
#include <vector>

#include "contextum/equivalence.hpp"
#include "contextum/kosp/scenario.hpp"
#include "contextum/kosp/vectors.hpp"
#include "contextum/model.hpp"
#include "contextum/quantum/representation.hpp"
#include "contextum/sheaf/empirical.hpp"

namespace contextum {

/// A theory together with any equivalence claims that travel with it.
struct TheoryDocument {
  OperationalTheory theory;
  std::vector<EquivalenceClaim> claims;

  friend bool operator==(TheoryDocument const&, TheoryDocument const&) = default;
};

struct ModelDocument {
  OntologicalModel model;
  std::vector<EquivalenceClaim> claims;

  friend bool operator==(ModelDocument const&, ModelDocument const&) = default;
};

/// Everything a scenario file can hold.
using Document = std::variant<TheoryDocument, ModelDocument, kosp::KSScenario, kosp::VectorScenario,
                              sheaf::EmpiricalModel, quantum::QuantumRepresentation>;

inline std::string kind_of(Document const& doc) {
  struct {
    std::string operator()(TheoryDocument const&) const { return "theory"; }
    std::string operator()(ModelDocument const&) const { return "model"; }
    std::string operator()(kosp::KSScenario const&) const { return "ks_scenario"; }
    std::string operator()(kosp::VectorScenario const&) const { return "vector_scenario"; }
    std::string operator()(sheaf::EmpiricalModel const&) const { return "empirical"; }
    std::string operator()(quantum::QuantumRepresentation const&) const { return "representation"; }
  } visitor;
  return std::visit(visitor, doc);
}

namespace detail {

/// Claims must reference outcome labels that exist with a bijective map.
inline void claim_witnesses(Skeleton const& sk, std::vector<EquivalenceClaim> const& claims, std::vector<Witness>& out) {
  for (auto const& c : claims) {
    try {
      (void)bijection_indices(sk, c);
    } catch (InputError const& e) {
      out.push_back({"invalid-claim", {c.first.str(), c.second.str()}, "", "", {}, {}, e.what()});
    }
  }
}

}  // namespace detail

/// The validator of the document's own module.
inline Verdict validate_document(Document const& doc) {
  struct {
    Verdict operator()(TheoryDocument const& d) const {
      auto v = validate_theory(d.theory);
      if (!v.holds || d.claims.empty()) return v;
      std::vector<Witness> out;
      detail::claim_witnesses(d.theory.skeleton, d.claims, out);
      return make_verdict(std::move(out));
    }
    Verdict operator()(ModelDocument const& d) const {
      auto v = validate_model(d.model);
      if (!v.holds || d.claims.empty()) return v;
      std::vector<Witness> out;
      detail::claim_witnesses(d.model.skeleton, d.claims, out);
      return make_verdict(std::move(out));
    }
    Verdict operator()(kosp::KSScenario const& s) const { return kosp::validate_scenario(s); }
    Verdict operator()(kosp::VectorScenario const& s) const { return kosp::validate_vector_scenario(s); }
    Verdict operator()(sheaf::EmpiricalModel const& e) const { return sheaf::validate_empirical(e); }
    Verdict operator()(quantum::QuantumRepresentation const& r) const { return quantum::validate_representation(r); }
  } visitor;
  return std::visit(visitor, doc);
}

}  // namespace contextum
