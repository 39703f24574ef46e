#pragma once

#include <string>
#include <vector>

#include "contextum/theory.hpp"
#include "contextum/verdict.hpp"

namespace contextum::sheaf {

/// Per-context outcome distributions over a cover of measurement contexts.
struct EmpiricalModel {
  std::vector<Measurement> measurements;
  std::vector<Key> cover;
  std::vector<Distribution> distributions;  ///< aligned with cover

  [[nodiscard]] Skeleton skeleton() const { return {measurements, cover, {}}; }

  friend bool operator==(EmpiricalModel const&, EmpiricalModel const&) = default;
};

/// Shape and normalisation checks (consistency is separate).
inline Verdict validate_empirical(EmpiricalModel const& em) {
  auto const sk = em.skeleton();
  std::vector<Witness> out;
  std::set<std::string> ids;
  for (auto const& m : em.measurements) {
    if (!ids.insert(m.id).second) out.push_back({"duplicate-id", {m.id}, "", "", {}, {}, ""});
    if (m.outcomes.empty()) out.push_back({"no-outcomes", {m.id}, "", "", {}, {}, ""});
  }
  if (em.cover.size() != em.distributions.size()) {
    out.push_back({"cover-shape", {}, "", "", {}, {}, "one distribution per cover element required"});
    return make_verdict(std::move(out));
  }
  for (std::size_t k = 0; k < em.cover.size(); ++k) {
    auto const& c = em.cover[k];
    auto const label = key_label(c);
    if (!is_canonical_key(c) || !std::all_of(c.begin(), c.end(), [&](auto const& id) { return ids.contains(id); })) {
      out.push_back({"malformed-context", {label}, "", "", {}, {}, "cover element must be a sorted set of declared measurements"});
      continue;
    }
    auto const& d = em.distributions[k];
    auto const shape = sk.shape_of(c);
    if (d.shape != shape || d.weights.size() != joint_size(shape)) {
      out.push_back({"shape-mismatch", {label}, "", "", {}, {}, ""});
      continue;
    }
    for (std::size_t i = 0; i < d.weights.size(); ++i)
      if (d.weights[i].sign() < 0) out.push_back({"negative-weight", {label}, "", sk.outcome_label(c, i), d.weights[i], Rational{0}, ""});
    if (d.total() != Rational{1}) out.push_back({"normalization", {label}, "", "", d.total(), Rational{1}, ""});
  }
  return make_verdict(std::move(out));
}

/// Overlapping cover elements marginalise to the same distribution.
inline Verdict check_consistency(EmpiricalModel const& em) {
  auto const sk = em.skeleton();
  std::vector<Witness> out;
  for (std::size_t k = 0; k < em.cover.size(); ++k)
    for (std::size_t l = k + 1; l < em.cover.size(); ++l) {
      auto const overlap = key_intersection(em.cover[k], em.cover[l]);
      if (overlap.empty()) continue;
      auto const a = marginalize(em.distributions[k], em.cover[k], overlap);
      auto const b = marginalize(em.distributions[l], em.cover[l], overlap);
      for (std::size_t i = 0; i < a.weights.size(); ++i)
        if (a.weights[i] != b.weights[i])
          out.push_back({"inconsistent-overlap", {key_label(em.cover[k]), key_label(em.cover[l])}, key_label(overlap),
                         sk.outcome_label(overlap, i), a.weights[i], b.weights[i], ""});
    }
  return make_verdict(std::move(out));
}

/// The theory's statistics at one preparation, on its maximal contexts.
inline EmpiricalModel to_empirical(OperationalTheory const& theory, std::string const& preparation) {
  auto const v = validate_theory(theory);
  if (!v.holds) throw ValidationError("invalid theory", v);
  auto const& preps = theory.skeleton.preparations;
  if (std::find(preps.begin(), preps.end(), preparation) == preps.end())
    throw InputError("unknown preparation '" + preparation + "'");
  auto const nd = check_nondisturbance(theory);
  if (!nd.holds) throw ValidationError("disturbing theory has no empirical model", nd);
  EmpiricalModel em;
  em.measurements = theory.skeleton.measurements;
  for (auto const& c : theory.skeleton.maximal_contexts()) {
    em.cover.push_back(c);
    em.distributions.push_back(theory.table(c, preparation));
  }
  return em;
}

}  // namespace contextum::sheaf
