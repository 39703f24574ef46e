#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contextum/theory.hpp"

namespace contextum {

/// A finite ontological (hidden variable) model over a skeleton. Priors are
/// indexed by preparation only and responses by ontic state only, so
/// no-conspiracy and lambda-sufficiency hold by construction.
struct OntologicalModel {
  Skeleton skeleton;
  std::vector<std::string> ontic_states;
  std::map<std::string, Distribution> priors;  ///< preparation -> weights over ontic_states
  TableMap responses;                          ///< key -> ontic state -> outcome weights

  [[nodiscard]] Distribution response(Key const& key, std::string const& ontic_state) const {
    auto d = lookup_table(skeleton, responses, key, ontic_state);
    if (!d) throw InputError("no response for " + key_label(key) + " at ontic state '" + ontic_state + "'");
    return *d;
  }

  friend bool operator==(OntologicalModel const&, OntologicalModel const&) = default;
};

inline Verdict validate_model(OntologicalModel const& model) {
  auto witnesses = detail::skeleton_witnesses(model.skeleton);
  detail::check_unique_ids(model.ontic_states, "ontic state", witnesses);
  if (model.ontic_states.empty()) witnesses.push_back({"no-ontic-states", {}, "", "", {}, {}, "ontic state set is empty"});
  std::vector<std::size_t> const prior_shape{model.ontic_states.size()};
  for (auto const& s : model.skeleton.preparations) {
    auto it = model.priors.find(s);
    if (it == model.priors.end()) {
      witnesses.push_back({"missing-prior", {}, s, "", {}, {}, "preparation has no prior"});
      continue;
    }
    auto const& d = it->second;
    if (d.shape != prior_shape || d.weights.size() != model.ontic_states.size()) {
      witnesses.push_back({"shape-mismatch", {}, s, "", {}, {}, "prior does not match the ontic state set"});
      continue;
    }
    for (std::size_t i = 0; i < d.weights.size(); ++i)
      if (d.weights[i].sign() < 0)
        witnesses.push_back({"negative-weight", {}, s, model.ontic_states[i], d.weights[i], Rational{0}, "prior"});
    if (d.total() != Rational{1}) witnesses.push_back({"normalization", {}, s, "", d.total(), Rational{1}, "prior"});
  }
  for (auto const& [s, _] : model.priors) {
    auto const& preps = model.skeleton.preparations;
    if (std::find(preps.begin(), preps.end(), s) == preps.end())
      witnesses.push_back({"unknown-preparation", {}, s, "", {}, {}, "prior for undeclared preparation"});
  }
  detail::table_witnesses(model.skeleton, model.responses, model.ontic_states, "ontic state", witnesses);
  return make_verdict(std::move(witnesses));
}

/// Recovers the operational theory by the law of total probability:
/// p(x|K,s) = sum over lambda of response(K,lambda)(x) * prior(lambda|s).
/// Tables are produced for every singleton and context of `skeleton`.
inline OperationalTheory reconstruct_theory(OntologicalModel const& model, Skeleton const& skeleton) {
  OperationalTheory out;
  out.skeleton = skeleton;
  for (auto const& key : skeleton.required_keys()) {
    auto const shape = skeleton.shape_of(key);
    for (auto const& s : skeleton.preparations) {
      auto pit = model.priors.find(s);
      if (pit == model.priors.end()) throw InputError("model has no prior for preparation '" + s + "'");
      auto const& prior = pit->second;
      Distribution acc{shape, std::vector<Rational>(joint_size(shape))};
      for (std::size_t l = 0; l < model.ontic_states.size(); ++l) {
        auto const& w = prior.weights.at(l);
        if (w.is_zero()) continue;
        auto r = lookup_table(model.skeleton, model.responses, key, model.ontic_states[l]);
        if (!r) {
          throw InputError("missing response for " + key_label(key) + " at ontic state '" + model.ontic_states[l] + "'");
        }
        if (r->shape != shape) throw InputError("response shape mismatch for " + key_label(key));
        for (std::size_t i = 0; i < acc.weights.size(); ++i)
          if (!r->weights[i].is_zero()) acc.weights[i] += r->weights[i] * w;
      }
      out.tables[key][s] = std::move(acc);
    }
  }
  return out;
}

inline OperationalTheory reconstruct_theory(OntologicalModel const& model) {
  return reconstruct_theory(model, model.skeleton);
}

/// The model recovers `theory` exactly, table by table.
inline Verdict check_reproduction(OntologicalModel const& model, OperationalTheory const& theory) {
  if (!(model.skeleton == theory.skeleton)) throw InputError("model and theory skeletons differ");
  auto const recovered = reconstruct_theory(model, theory.skeleton);
  std::set<Key> keys;
  for (auto const& [k, _] : recovered.tables) keys.insert(k);
  for (auto const& [k, _] : theory.tables) keys.insert(k);
  std::vector<Witness> witnesses;
  for (auto const& key : keys) {
    if (!theory.skeleton.is_commeasurable(key)) continue;
    for (auto const& s : theory.skeleton.preparations) {
      auto const expected = lookup_table(theory.skeleton, theory.tables, key, s);
      if (!expected) {
        witnesses.push_back({"missing-table", {key_label(key)}, s, "", {}, {}, "theory lacks table"});
        continue;
      }
      Distribution got;
      if (auto it = recovered.tables.find(key); it != recovered.tables.end()) {
        got = it->second.at(s);
      } else {
        // Keys explicit only in the theory are recovered through the model's
        // own responses for them.
        got = Distribution{expected->shape, std::vector<Rational>(expected->weights.size())};
        auto const& prior = model.priors.at(s);
        for (std::size_t l = 0; l < model.ontic_states.size(); ++l) {
          if (prior.weights[l].is_zero()) continue;
          auto const r = model.response(key, model.ontic_states[l]);
          for (std::size_t i = 0; i < got.weights.size(); ++i) got.weights[i] += r.weights[i] * prior.weights[l];
        }
      }
      for (std::size_t i = 0; i < got.weights.size(); ++i) {
        if (got.weights[i] != expected->weights[i]) {
          witnesses.push_back({"reproduction", {key_label(key)}, s, theory.skeleton.outcome_label(key, i),
                               got.weights[i], expected->weights[i], "model vs theory"});
        }
      }
    }
  }
  return make_verdict(std::move(witnesses));
}

inline std::map<std::string, std::optional<std::string>> eigenstates_of(OntologicalModel const& model,
                                                                        std::string const& m) {
  auto const& meas = model.skeleton.at(m);
  std::map<std::string, std::optional<std::string>> out;
  for (auto const& l : model.ontic_states) {
    auto const d = model.response(Key{m}, l);
    std::optional<std::string> value;
    for (std::size_t i = 0; i < d.weights.size(); ++i)
      if (d.weights[i] == Rational{1}) value = meas.outcomes[i];
    out[l] = value;
  }
  return out;
}

/// Every response distribution is a point mass.
inline Verdict is_outcome_deterministic(OntologicalModel const& model) {
  std::vector<Witness> witnesses;
  for (auto const& [key, per_state] : model.responses) {
    for (auto const& [l, d] : per_state) {
      for (std::size_t i = 0; i < d.weights.size(); ++i) {
        auto const& w = d.weights[i];
        if (!w.is_zero() && w != Rational{1}) {
          witnesses.push_back({"indeterministic", {key_label(key)}, l, model.skeleton.outcome_label(key, i), w, {},
                               "response weight strictly between 0 and 1"});
        }
      }
    }
  }
  return make_verdict(std::move(witnesses));
}

namespace detail {

inline bool model_theory_is_disturbing(OntologicalModel const& model) {
  return !check_nondisturbance(reconstruct_theory(model)).holds;
}

}  // namespace detail

/// Each ontic state's response to a measurement subset equals the marginal
/// of its response to every commeasurable superset.
inline Verdict check_simultaneous_nc(OntologicalModel const& model) {
  auto witnesses = detail::coherence_witnesses(model.skeleton, model.responses, model.ontic_states,
                                               "simultaneous-contextuality");
  std::set<std::string> fl;
  if (!model.skeleton.has_multi_member_context()) fl.insert(flags::kVacuous);
  if (detail::model_theory_is_disturbing(model)) fl.insert(flags::kDisturbing);
  return make_verdict(std::move(witnesses), std::move(fl));
}

}  // namespace contextum
