#pragma once

#include <map>
#include <string>
#include <vector>

#include "contextum/quantum/born.hpp"
#include "contextum/quantum/observable.hpp"
#include "contextum/quantum/state.hpp"
#include "contextum/theory.hpp"

namespace contextum::quantum {

/// Measurements represented by observables, preparations by density
/// operators, and declared contexts of commuting observables.
struct QuantumRepresentation {
  std::size_t dim = 0;
  std::vector<SpectralObservable> observables;
  std::map<std::string, DensityOperator> states;
  std::vector<Key> contexts;

  [[nodiscard]] SpectralObservable const* find(std::string const& id) const {
    for (auto const& o : observables)
      if (o.id == id) return &o;
    return nullptr;
  }

  friend bool operator==(QuantumRepresentation const&, QuantumRepresentation const&) = default;
};

namespace detail {

inline void context_witnesses(std::vector<Key> const& contexts, std::vector<ProjectiveMeasurement> const& ms,
                              std::vector<Witness>& out) {
  auto const find = [&](std::string const& id) -> ProjectiveMeasurement const* {
    for (auto const& m : ms)
      if (m.id == id) return &m;
    return nullptr;
  };
  for (auto const& c : contexts) {
    if (!is_canonical_key(c)) {
      out.push_back({"malformed-context", {key_label(c)}, "", "", {}, {}, "context must be a sorted set"});
      continue;
    }
    bool known = true;
    for (auto const& id : c) {
      if (!find(id)) {
        out.push_back({"unknown-measurement", {key_label(c), id}, "", "", {}, {}, "context member not declared"});
        known = false;
      }
    }
    if (!known) continue;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        if (!commute(*find(c[i]), *find(c[j])))
          out.push_back({"non-commuting-context", {key_label(c), c[i], c[j]}, "", "", {}, {}, "context members do not commute"});
  }
}

}  // namespace detail

inline Verdict validate_representation(QuantumRepresentation const& rep) {
  std::vector<Witness> out;
  std::set<std::string> ids;
  std::vector<ProjectiveMeasurement> ms;
  for (auto const& o : rep.observables) {
    if (!ids.insert(o.id).second) out.push_back({"duplicate-id", {o.id}, "", "", {}, {}, "observable declared twice"});
    if (o.dim() != rep.dim) {
      out.push_back({"dimension", {o.id}, "", "", {}, {}, "observable dimension differs from representation"});
      continue;
    }
    auto v = validate_spectral(o);
    out.insert(out.end(), v.witnesses.begin(), v.witnesses.end());
    ms.push_back(o.as_measurement());
  }
  for (auto const& [id, rho] : rep.states) {
    if (rho.dim() != rep.dim) {
      out.push_back({"dimension", {}, id, "", {}, {}, "state dimension differs from representation"});
      continue;
    }
    auto v = validate_state(rho, id);
    out.insert(out.end(), v.witnesses.begin(), v.witnesses.end());
  }
  detail::context_witnesses(rep.contexts, ms, out);
  return make_verdict(std::move(out));
}

/// Builds the operational theory of projective measurements: singleton
/// tables by the Born rule, context tables by the joint Born rule over
/// the context's joint outcome space.
inline OperationalTheory generate_theory(std::vector<ProjectiveMeasurement> const& measurements,
                                         std::vector<Key> const& contexts,
                                         std::map<std::string, DensityOperator> const& states) {
  std::vector<Witness> problems;
  for (auto const& m : measurements) {
    auto v = validate_projective(m);
    problems.insert(problems.end(), v.witnesses.begin(), v.witnesses.end());
  }
  detail::context_witnesses(contexts, measurements, problems);
  for (auto const& [id, rho] : states) {
    auto v = validate_state(rho, id);
    problems.insert(problems.end(), v.witnesses.begin(), v.witnesses.end());
  }
  if (!problems.empty()) throw ValidationError("invalid quantum representation", make_verdict(std::move(problems)));

  OperationalTheory theory;
  std::map<std::string, ProjectiveMeasurement const*> by_id;
  for (auto const& m : measurements) {
    theory.skeleton.measurements.push_back({m.id, m.outcomes});
    by_id[m.id] = &m;
  }
  theory.skeleton.contexts = contexts;
  for (auto const& [id, _] : states) theory.skeleton.preparations.push_back(id);

  for (auto const& m : measurements) {
    for (auto const& [sid, rho] : states) {
      Distribution d{{m.outcomes.size()}, {}};
      for (auto const& p : m.projections) d.weights.push_back(born(rho, p));
      theory.tables[Key{m.id}][sid] = std::move(d);
    }
  }
  for (auto const& c : contexts) {
    if (c.size() < 2) continue;
    auto const shape = theory.skeleton.shape_of(c);
    auto const n = joint_size(shape);
    std::vector<Matrix> products;
    for (std::size_t idx = 0; idx < n; ++idx) {
      auto const digits = decode_joint(idx, shape);
      Matrix prod = by_id.at(c[0])->projections[digits[0]];
      for (std::size_t k = 1; k < c.size(); ++k) prod = prod * by_id.at(c[k])->projections[digits[k]];
      products.push_back(std::move(prod));
    }
    for (auto const& [sid, rho] : states) {
      Distribution d{shape, {}};
      for (auto const& prod : products) d.weights.push_back(born(rho, prod));
      theory.tables[c][sid] = std::move(d);
    }
  }
  return theory;
}

inline OperationalTheory generate_theory(QuantumRepresentation const& rep) {
  auto const v = validate_representation(rep);
  if (!v.holds) throw ValidationError("invalid quantum representation", v);
  std::vector<ProjectiveMeasurement> ms;
  for (auto const& o : rep.observables) ms.push_back(o.as_measurement());
  return generate_theory(ms, rep.contexts, rep.states);
}

}  // namespace contextum::quantum
