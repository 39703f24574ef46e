#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contextum/equivalence.hpp"
#include "contextum/kosp/scenario.hpp"
#include "contextum/quantum/representation.hpp"

namespace contextum::kosp {

using quantum::DensityOperator;
using quantum::ProjectiveMeasurement;

/// How a context is associated with measurements.
enum class Treatment {
  one_to_one,    ///< each member is its own measurement; the context is a simultaneous measurement
  fine_grained,  ///< the context is one measurement; members are functions of its outcome
};

enum class Mode { one_to_one, fine_grained, custom };

/// An interpretation of a scenario. For `custom`, `grouping` names the
/// treatment of each context that is realised; contexts left out are not
/// realised at all.
struct Interpretation {
  Mode mode = Mode::one_to_one;
  std::map<Key, Treatment> grouping;
};

struct InterpretedTheory {
  OperationalTheory theory;
  std::vector<EquivalenceClaim> claims;
  /// Fine-grained contexts: context key -> measurement id of the context.
  std::map<Key, std::string> parent_of;
  /// (observable id, fine-grained context key) -> derived measurement id.
  std::map<std::pair<std::string, Key>, std::string> derived_of;

  friend bool operator==(InterpretedTheory const&, InterpretedTheory const&) = default;
};

inline std::string parent_id(Key const& context) { return join(context, "."); }
inline std::string derived_id(std::string const& observable, Key const& context) {
  return observable + ":" + parent_id(context);
}

/// The supplied states plus the maximally mixed state under id "mixed".
inline std::map<std::string, DensityOperator> with_default_states(KSScenario const& sc,
                                                                  std::map<std::string, DensityOperator> states) {
  if (!states.contains("mixed")) states.emplace("mixed", DensityOperator::maximally_mixed(sc.dim()));
  return states;
}

/// One measurement per observable (outcomes = eigenvalue labels); scenario
/// contexts become simultaneous measurements.
inline OperationalTheory interpret_one_to_one(KSScenario const& sc, std::map<std::string, DensityOperator> states = {}) {
  auto const v = validate_scenario(sc);
  if (!v.holds) throw ValidationError("invalid scenario", v);
  quantum::QuantumRepresentation rep{sc.dim(), sc.observables, with_default_states(sc, std::move(states)), sc.contexts};
  return quantum::generate_theory(rep);
}

namespace detail {

/// The context measurement: one outcome per admissible tuple, projection =
/// product of the members' spectral projections.
inline ProjectiveMeasurement context_measurement(KSScenario const& sc, std::size_t c) {
  auto const& ctx = sc.contexts[c];
  ProjectiveMeasurement m{parent_id(ctx), {}, {}};
  for (auto const& t : sc.admissible[c]) {
    m.outcomes.push_back(sc.tuple_label(ctx, t));
    Matrix prod = sc.at(ctx[0]).projections[t[0]];
    for (std::size_t k = 1; k < ctx.size(); ++k) prod = prod * sc.at(ctx[k]).projections[t[k]];
    m.projections.push_back(std::move(prod));
  }
  return m;
}

/// "perform the context measurement and read off `observable`".
inline ProjectiveMeasurement derived_measurement(KSScenario const& sc, Key const& ctx, std::string const& observable) {
  auto const obs = sc.at(observable);
  return {derived_id(observable, ctx), obs.outcome_labels(), obs.projections};
}

inline std::map<std::string, std::string> identity_bijection(std::vector<std::string> const& labels) {
  std::map<std::string, std::string> h;
  for (auto const& l : labels) h[l] = l;
  return h;
}

inline void verify_claims(InterpretedTheory const& out) {
  auto const premises = check_equivalence_premises(out.theory, out.claims);
  if (!premises.holds) throw InvariantError("generated equivalence claim fails operational equivalence");
}

}  // namespace detail

/// Mixed interpretation: fine-grained contexts become one measurement each
/// with derived coarse-grained members; observables outside any
/// fine-grained context keep their own measurement; an observable that is
/// in a one-to-one context but also fine-grained somewhere is represented
/// there by its derived measurement from the first such context.
inline InterpretedTheory interpret_custom(KSScenario const& sc, Interpretation const& interp,
                                          std::map<std::string, DensityOperator> states = {}) {
  auto const v = validate_scenario(sc);
  if (!v.holds) throw ValidationError("invalid scenario", v);
  std::map<Key, Treatment> grouping;
  if (interp.mode == Mode::one_to_one || interp.mode == Mode::fine_grained) {
    auto const t = interp.mode == Mode::one_to_one ? Treatment::one_to_one : Treatment::fine_grained;
    for (auto const& c : sc.contexts) grouping[c] = t;
  } else {
    grouping = interp.grouping;
  }
  for (auto const& [key, _] : grouping)
    if (std::find(sc.contexts.begin(), sc.contexts.end(), key) == sc.contexts.end())
      throw InputError("grouping names unknown context " + key_label(key));
  for (auto const& o : sc.observables) {
    bool covered = false;
    for (auto const& [key, _] : grouping)
      if (std::binary_search(key.begin(), key.end(), o.id)) covered = true;
    if (!covered) throw InputError("grouping does not cover observable '" + o.id + "'");
  }

  InterpretedTheory out;
  std::vector<ProjectiveMeasurement> measurements;
  std::vector<Key> contexts;
  std::map<std::string, std::string> representative;  // observable -> first derived id
  std::map<std::string, std::vector<std::string>> realisations;

  for (std::size_t c = 0; c < sc.contexts.size(); ++c) {
    auto const& ctx = sc.contexts[c];
    auto it = grouping.find(ctx);
    if (it == grouping.end() || it->second != Treatment::fine_grained) continue;
    auto parent = detail::context_measurement(sc, c);
    out.parent_of[ctx] = parent.id;
    auto const pid = parent.id;
    measurements.push_back(std::move(parent));
    for (auto const& id : ctx) {
      auto d = detail::derived_measurement(sc, ctx, id);
      out.derived_of[{id, ctx}] = d.id;
      representative.emplace(id, d.id);
      realisations[id].push_back(d.id);
      contexts.push_back(make_key({pid, d.id}));
      measurements.push_back(std::move(d));
    }
  }
  // Singletons and one-to-one contexts follow in scenario order, so an
  // all-one-to-one grouping reproduces the pure interpretation exactly.
  std::vector<ProjectiveMeasurement> singles;
  for (auto const& o : sc.observables)
    if (!representative.contains(o.id)) singles.push_back(o.as_measurement());
  measurements.insert(measurements.end(), singles.begin(), singles.end());
  std::vector<Key> remapped;
  for (auto const& ctx : sc.contexts) {
    auto it = grouping.find(ctx);
    if (it == grouping.end() || it->second != Treatment::one_to_one) continue;
    std::vector<std::string> ids;
    for (auto const& id : ctx) ids.push_back(representative.contains(id) ? representative.at(id) : id);
    remapped.push_back(make_key(std::move(ids)));
  }
  contexts.insert(contexts.end(), remapped.begin(), remapped.end());

  out.theory = quantum::generate_theory(measurements, contexts, with_default_states(sc, std::move(states)));
  for (auto const& o : sc.observables) {
    auto it = realisations.find(o.id);
    if (it == realisations.end()) continue;
    auto const& ds = it->second;
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t j = i + 1; j < ds.size(); ++j)
        out.claims.push_back({MeasurementRef::plain(ds[i]), MeasurementRef::plain(ds[j]),
                              detail::identity_bijection(o.outcome_labels()), Provenance::declared});
  }
  detail::verify_claims(out);
  return out;
}

/// One measurement per maximal context whose outcomes are the context's
/// admissible tuples, plus one derived two-way measurement per (observable,
/// context) declared commeasurable with its parent only; every observable
/// shared by two contexts yields an identity claim between its derived
/// measurements.
inline InterpretedTheory interpret_fine_grained(KSScenario const& sc,
                                                std::map<std::string, DensityOperator> states = {}) {
  auto const v = validate_scenario(sc);
  if (!v.holds) throw ValidationError("invalid scenario", v);
  InterpretedTheory out;
  std::vector<ProjectiveMeasurement> measurements;
  std::vector<Key> contexts;
  for (std::size_t c = 0; c < sc.contexts.size(); ++c) {
    auto const& ctx = sc.contexts[c];
    auto parent = detail::context_measurement(sc, c);
    auto const pid = parent.id;
    out.parent_of[ctx] = pid;
    measurements.push_back(std::move(parent));
    for (auto const& id : ctx) {
      auto d = detail::derived_measurement(sc, ctx, id);
      out.derived_of[{id, ctx}] = d.id;
      contexts.push_back(make_key({pid, d.id}));
      measurements.push_back(std::move(d));
    }
  }
  out.theory = quantum::generate_theory(measurements, contexts, with_default_states(sc, std::move(states)));
  for (auto const& o : sc.observables) {
    std::vector<Key> homes;
    for (auto const& ctx : sc.contexts)
      if (std::binary_search(ctx.begin(), ctx.end(), o.id)) homes.push_back(ctx);
    for (std::size_t i = 0; i < homes.size(); ++i)
      for (std::size_t j = i + 1; j < homes.size(); ++j)
        out.claims.push_back({MeasurementRef::plain(derived_id(o.id, homes[i])),
                              MeasurementRef::plain(derived_id(o.id, homes[j])),
                              detail::identity_bijection(o.outcome_labels()), Provenance::declared});
  }
  detail::verify_claims(out);
  return out;
}

}  // namespace contextum::kosp
