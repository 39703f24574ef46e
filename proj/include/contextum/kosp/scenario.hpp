#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "contextum/quantum/observable.hpp"
#include "contextum/theory.hpp"
#include "contextum/verdict.hpp"

namespace contextum::kosp {

using quantum::Matrix;
using quantum::SpectralObservable;

/// A joint eigenvalue tuple, as eigenvalue indices per context member.
using JointOutcome = std::vector<std::size_t>;

/// Tuples (x_1..x_k) whose spectral projections have a nonzero product,
/// i.e. the joint eigenvalues of a common eigenvector. Members must
/// pairwise commute.
inline std::vector<JointOutcome> joint_spectrum(std::vector<SpectralObservable const*> const& context) {
  for (std::size_t i = 0; i < context.size(); ++i)
    for (std::size_t j = i + 1; j < context.size(); ++j)
      if (!quantum::commute(*context[i], *context[j]))
        throw InputError("joint spectrum of non-commuting '" + context[i]->id + "' and '" + context[j]->id + "'");
  std::vector<JointOutcome> out;
  if (context.empty()) return out;
  std::vector<std::size_t> shape;
  for (auto const* o : context) shape.push_back(o->eigenvalues.size());
  auto const n = joint_size(shape);
  for (std::size_t idx = 0; idx < n; ++idx) {
    auto digits = decode_joint(idx, shape);
    Matrix prod = context[0]->projections[digits[0]];
    for (std::size_t k = 1; k < context.size() && !prod.is_zero(); ++k) prod = prod * context[k]->projections[digits[k]];
    if (!prod.is_zero()) out.push_back(std::move(digits));
  }
  return out;
}

inline std::vector<JointOutcome> joint_spectrum(std::vector<SpectralObservable> const& context) {
  std::vector<SpectralObservable const*> ptrs;
  for (auto const& o : context) ptrs.push_back(&o);
  return joint_spectrum(ptrs);
}

/// Operators with their maximal commuting contexts and, per context, the
/// admissible joint eigenvalue tuples. Construct through `make_scenario`.
struct KSScenario {
  std::vector<SpectralObservable> observables;
  std::vector<Key> contexts;
  std::vector<std::vector<JointOutcome>> admissible;  ///< aligned with contexts; members in key order

  [[nodiscard]] std::size_t index_of(std::string const& id) const {
    for (std::size_t i = 0; i < observables.size(); ++i)
      if (observables[i].id == id) return i;
    throw InputError("scenario has no observable '" + id + "'");
  }
  [[nodiscard]] SpectralObservable const& at(std::string const& id) const { return observables[index_of(id)]; }

  [[nodiscard]] std::size_t dim() const { return observables.empty() ? 0 : observables.front().dim(); }

  [[nodiscard]] std::vector<SpectralObservable const*> members(Key const& context) const {
    std::vector<SpectralObservable const*> out;
    for (auto const& id : context) out.push_back(&at(id));
    return out;
  }

  /// "(+1,-1,-1)" for an admissible tuple of `context`.
  [[nodiscard]] std::string tuple_label(Key const& context, JointOutcome const& t) const {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < context.size(); ++k)
      labels.push_back(quantum::eigenvalue_label(at(context[k]).eigenvalues[t[k]]));
    return "(" + join(labels, ",") + ")";
  }

  friend bool operator==(KSScenario const&, KSScenario const&) = default;
};

inline Verdict validate_scenario(KSScenario const& sc) {
  std::vector<Witness> out;
  std::set<std::string> ids;
  for (auto const& o : sc.observables) {
    if (!ids.insert(o.id).second) out.push_back({"duplicate-id", {o.id}, "", "", {}, {}, "observable declared twice"});
    if (has_reserved_char(o.id)) out.push_back({"reserved-character", {o.id}, "", "", {}, {}, "ids may not contain '@' or '&'"});
    if (o.dim() != sc.dim()) {
      out.push_back({"dimension", {o.id}, "", "", {}, {}, "observables differ in dimension"});
      continue;
    }
    auto v = quantum::validate_spectral(o);
    out.insert(out.end(), v.witnesses.begin(), v.witnesses.end());
  }
  if (!out.empty()) return make_verdict(std::move(out));
  if (sc.admissible.size() != sc.contexts.size())
    out.push_back({"constraints-shape", {}, "", "", {}, {}, "one admissible set per context required"});
  for (std::size_t c = 0; c < sc.contexts.size(); ++c) {
    auto const& ctx = sc.contexts[c];
    auto const label = key_label(ctx);
    if (!is_canonical_key(ctx) || !std::all_of(ctx.begin(), ctx.end(), [&](auto const& id) { return ids.contains(id); })) {
      out.push_back({"malformed-context", {label}, "", "", {}, {}, "context must be a sorted set of declared observables"});
      continue;
    }
    auto const ms = sc.members(ctx);
    bool commuting = true;
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (std::size_t j = i + 1; j < ms.size(); ++j)
        if (!quantum::commute(*ms[i], *ms[j])) {
          commuting = false;
          out.push_back({"non-commuting-context", {label, ms[i]->id, ms[j]->id}, "", "", {}, {}, ""});
        }
    if (commuting && c < sc.admissible.size() && sc.admissible[c] != joint_spectrum(ms))
      out.push_back({"constraints-mismatch", {label}, "", "", {}, {}, "admissible tuples differ from the joint spectrum"});
  }
  return make_verdict(std::move(out));
}

/// Builds a scenario and derives its admissible sets; throws on invalid
/// input.
inline KSScenario make_scenario(std::vector<SpectralObservable> observables, std::vector<Key> contexts) {
  KSScenario sc{std::move(observables), {}, {}};
  for (auto& c : contexts) sc.contexts.push_back(make_key(std::move(c)));
  sc.admissible.resize(sc.contexts.size());
  // Validate observables and commutation before computing spectra.
  auto pre = validate_scenario(KSScenario{sc.observables, {}, {}});
  if (!pre.holds) throw ValidationError("invalid scenario", pre);
  for (std::size_t c = 0; c < sc.contexts.size(); ++c) {
    auto const& ctx = sc.contexts[c];
    for (auto const& id : ctx) (void)sc.index_of(id);  // throws on unknown ids
    sc.admissible[c] = joint_spectrum(sc.members(ctx));
  }
  auto v = validate_scenario(sc);
  if (!v.holds) throw ValidationError("invalid scenario", v);
  return sc;
}

/// The sub-scenario on a subset of contexts (by index), keeping only the
/// observables that occur in them.
inline KSScenario restrict_contexts(KSScenario const& sc, std::vector<std::size_t> const& context_indices) {
  std::set<std::string> used;
  KSScenario out;
  for (auto c : context_indices) {
    out.contexts.push_back(sc.contexts.at(c));
    out.admissible.push_back(sc.admissible.at(c));
    used.insert(sc.contexts[c].begin(), sc.contexts[c].end());
  }
  for (auto const& o : sc.observables)
    if (used.contains(o.id)) out.observables.push_back(o);
  return out;
}

}  // namespace contextum::kosp
