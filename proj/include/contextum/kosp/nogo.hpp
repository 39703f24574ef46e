#pragma once

#include <set>
#include <string>
#include <vector>

#include "contextum/equivalence.hpp"
#include "contextum/kosp/assignments.hpp"
#include "contextum/kosp/interpret.hpp"
#include "contextum/model.hpp"

namespace contextum::kosp {

/// Number of ways to pick one admissible tuple per context.
inline unsigned long long assembly_count(KSScenario const& sc) {
  unsigned long long n = 1;
  for (auto const& a : sc.admissible) {
    if (!a.empty() && n > std::numeric_limits<unsigned long long>::max() / a.size()) return std::numeric_limits<unsigned long long>::max();
    n *= a.size();
  }
  return n;
}

namespace detail {

inline std::vector<std::vector<std::size_t>> all_assemblies(KSScenario const& sc, unsigned long long cap) {
  auto const total = assembly_count(sc);
  if (total > cap) throw CapacityError("context assembly enumeration", total, cap);
  for (auto const& o : sc.observables) {
    bool covered = std::any_of(sc.contexts.begin(), sc.contexts.end(),
                               [&](Key const& c) { return std::binary_search(c.begin(), c.end(), o.id); });
    if (!covered) throw InputError("observable '" + o.id + "' is in no context");
  }
  std::vector<std::size_t> shape;
  for (auto const& a : sc.admissible) shape.push_back(a.size());
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < total; ++i) out.push_back(decode_joint(i, shape));
  return out;
}

inline std::string assembly_id(std::vector<std::size_t> const& choice) {
  bool small = std::all_of(choice.begin(), choice.end(), [](auto c) { return c < 10; });
  std::string id = "L";
  for (std::size_t i = 0; i < choice.size(); ++i) {
    if (!small && i) id += ".";
    id += std::to_string(choice[i]);
  }
  return id;
}

inline std::size_t position_in(Key const& key, std::string const& id) {
  return static_cast<std::size_t>(std::find(key.begin(), key.end(), id) - key.begin());
}

inline Distribution point_mass_for(Skeleton const& sk, Key const& key, std::vector<std::size_t> const& digits) {
  auto shape = sk.shape_of(key);
  auto const idx = encode_joint(digits, shape);
  return point_mass(std::move(shape), idx);
}

inline OntologicalModel empty_assembly_model(Skeleton const& sk, std::size_t states) {
  OntologicalModel m;
  m.skeleton = sk;
  for (auto const& s : sk.preparations) m.priors[s] = uniform({states});
  return m;
}

}  // namespace detail

/// Which context a singleton response is read from in a one-to-one assembly.
enum class SingletonRule { first_context, last_context };

/// Outcome-deterministic model over a one-to-one theory: one ontic state per
/// assembly (an admissible tuple for every context), uniform prior. Context
/// responses are point masses on the chosen tuple; singleton responses copy
/// the observable's value from the first (or last) declared context
/// containing it.
inline OntologicalModel one_to_one_assembly_model(KSScenario const& sc, OperationalTheory const& theory,
                                                  SingletonRule rule = SingletonRule::first_context,
                                                  unsigned long long cap = kDefaultEnumerationCap) {
  auto const assemblies = detail::all_assemblies(sc, cap);
  auto model = detail::empty_assembly_model(theory.skeleton, assemblies.size());
  for (auto const& choice : assemblies) {
    auto const lambda = detail::assembly_id(choice);
    model.ontic_states.push_back(lambda);
    for (std::size_t c = 0; c < sc.contexts.size(); ++c) {
      auto const& ctx = sc.contexts[c];
      if (ctx.size() > 1) model.responses[ctx][lambda] = detail::point_mass_for(theory.skeleton, ctx, sc.admissible[c][choice[c]]);
    }
    for (auto const& o : sc.observables) {
      std::optional<std::size_t> home;
      for (std::size_t c = 0; c < sc.contexts.size(); ++c) {
        if (!std::binary_search(sc.contexts[c].begin(), sc.contexts[c].end(), o.id)) continue;
        if (!home || rule == SingletonRule::last_context) home = c;
      }
      auto const& ctx = sc.contexts[*home];
      auto const value = sc.admissible[*home][choice[*home]][detail::position_in(ctx, o.id)];
      model.responses[Key{o.id}][lambda] = point_mass({o.eigenvalues.size()}, value);
    }
  }
  return model;
}

/// Outcome-deterministic model over a fine-grained interpretation: one ontic
/// state per assembly; every context measurement reveals its chosen tuple,
/// and each derived measurement reveals the corresponding component.
inline OntologicalModel fine_grained_assembly_model(KSScenario const& sc, InterpretedTheory const& fg,
                                                    unsigned long long cap = kDefaultEnumerationCap) {
  auto const assemblies = detail::all_assemblies(sc, cap);
  auto const& sk = fg.theory.skeleton;
  auto model = detail::empty_assembly_model(sk, assemblies.size());
  for (auto const& choice : assemblies) {
    auto const lambda = detail::assembly_id(choice);
    model.ontic_states.push_back(lambda);
    for (std::size_t c = 0; c < sc.contexts.size(); ++c) {
      auto const& ctx = sc.contexts[c];
      auto it = fg.parent_of.find(ctx);
      if (it == fg.parent_of.end()) continue;
      auto const& pid = it->second;
      auto const& tuple = sc.admissible[c][choice[c]];
      model.responses[Key{pid}][lambda] = detail::point_mass_for(sk, Key{pid}, {choice[c]});
      for (std::size_t k = 0; k < ctx.size(); ++k) {
        auto const& did = fg.derived_of.at({ctx[k], ctx});
        model.responses[Key{did}][lambda] = detail::point_mass_for(sk, Key{did}, {tuple[k]});
        auto const joint = make_key({pid, did});
        std::vector<std::size_t> digits(2);
        digits[detail::position_in(joint, pid)] = choice[c];
        digits[detail::position_in(joint, did)] = tuple[k];
        model.responses[joint][lambda] = detail::point_mass_for(sk, joint, digits);
      }
    }
  }
  return model;
}

/// Correspondence between noncontextual deterministic assemblies and value
/// assignments for one interpretation.
struct BridgeResult {
  std::size_t assemblies = 0;
  std::vector<ValueAssignment> induced;  ///< from the noncontextual assemblies
  std::vector<ValueAssignment> enumerated;
  bool bijective = false;
};

namespace detail {

inline BridgeResult compare_induced(std::size_t total, std::vector<ValueAssignment> induced,
                                    std::vector<ValueAssignment> enumerated) {
  BridgeResult r;
  r.assemblies = total;
  std::sort(induced.begin(), induced.end());
  bool const distinct = std::adjacent_find(induced.begin(), induced.end()) == induced.end();
  std::sort(enumerated.begin(), enumerated.end());
  r.bijective = distinct && induced == enumerated;
  r.induced = std::move(induced);
  r.enumerated = std::move(enumerated);
  return r;
}

inline std::set<std::string> witnessed_states(Verdict const& v) {
  std::set<std::string> out;
  for (auto const& w : v.witnesses) out.insert(w.subject);
  return out;
}

}  // namespace detail

/// One-to-one reading: the simultaneous-noncontextual assemblies are exactly
/// the value assignments.
inline BridgeResult bridge_one_to_one(KSScenario const& sc, unsigned long long cap = kDefaultEnumerationCap) {
  auto const theory = interpret_one_to_one(sc);
  auto const model = one_to_one_assembly_model(sc, theory, SingletonRule::first_context, cap);
  auto const bad = detail::witnessed_states(check_simultaneous_nc(model));
  std::vector<ValueAssignment> induced;
  for (auto const& l : model.ontic_states) {
    if (bad.contains(l)) continue;
    ValueAssignment a;
    for (auto const& o : sc.observables) {
      auto const& d = model.responses.at(Key{o.id}).at(l);
      auto const idx = static_cast<std::size_t>(std::find(d.weights.begin(), d.weights.end(), Rational{1}) - d.weights.begin());
      a.values[o.id] = o.eigenvalues[idx];
    }
    induced.push_back(std::move(a));
  }
  return detail::compare_induced(model.ontic_states.size(), std::move(induced), enumerate_value_assignments(sc, cap));
}

/// Fine-grained reading: the assemblies that are measurement-noncontextual
/// under every emitted claim are exactly the value assignments.
inline BridgeResult bridge_fine_grained(KSScenario const& sc, unsigned long long cap = kDefaultEnumerationCap) {
  auto const fg = interpret_fine_grained(sc);
  auto const model = fine_grained_assembly_model(sc, fg, cap);
  auto const bad = detail::witnessed_states(check_measurement_nc(model, fg.claims));
  std::vector<ValueAssignment> induced;
  for (auto const& l : model.ontic_states) {
    if (bad.contains(l)) continue;
    ValueAssignment a;
    for (auto const& o : sc.observables) {
      for (auto const& ctx : sc.contexts) {
        if (!std::binary_search(ctx.begin(), ctx.end(), o.id)) continue;
        auto const& d = model.responses.at(Key{fg.derived_of.at({o.id, ctx})}).at(l);
        auto const idx = static_cast<std::size_t>(std::find(d.weights.begin(), d.weights.end(), Rational{1}) - d.weights.begin());
        a.values[o.id] = o.eigenvalues[idx];
        break;
      }
    }
    induced.push_back(std::move(a));
  }
  return detail::compare_induced(model.ontic_states.size(), std::move(induced), enumerate_value_assignments(sc, cap));
}

struct NoGoReport {
  unsigned long long candidates = 0;
  std::size_t assignment_count = 0;
  std::vector<ValueAssignment> assignments;
  /// No outcome-deterministic simultaneous-noncontextual model of the
  /// one-to-one theory exists.
  bool excludes_simultaneous_nc = false;
  /// No outcome-deterministic measurement-noncontextual model of the
  /// fine-grained theory exists.
  bool excludes_measurement_nc = false;
  ParityResult parity;
  std::vector<std::string> reasoning;
};

inline NoGoReport no_go_report(KSScenario const& sc, unsigned long long cap = kDefaultEnumerationCap) {
  NoGoReport r;
  r.candidates = candidate_count(sc);
  r.assignments = enumerate_value_assignments(sc, cap);
  r.assignment_count = r.assignments.size();
  r.parity = parity_argument(sc);
  bool const none = r.assignment_count == 0;
  r.excludes_simultaneous_nc = none;
  r.excludes_measurement_nc = none;
  r.reasoning.push_back(std::to_string(r.assignment_count) + " of " + std::to_string(r.candidates) +
                        " candidate value assignments respect every context's joint spectrum");
  r.reasoning.push_back(
      "one-to-one reading: a deterministic simultaneous-noncontextual model gives each ontic state one value per "
      "observable, which is admissible on every context, hence a value assignment");
  r.reasoning.push_back(
      "fine-grained reading: a deterministic model that is measurement-noncontextual under the derived-measurement "
      "claims gives every observable the same value from each of its contexts, hence a value assignment");
  if (r.parity.applicable) {
    r.reasoning.push_back(std::string("parity argument: product of context signs is ") +
                          (r.parity.obstruction ? "-1, no assignment can exist" : "+1, inconclusive"));
  }
  if (none) {
    r.reasoning.push_back("no value assignment exists, so both model classes are excluded");
  }
  return r;
}

}  // namespace contextum::kosp
