#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "contextum/model.hpp"
#include "contextum/theory.hpp"

namespace contextum {

/// Names a measurement: either a plain key ("m", or a joint "a&b"), or the
/// component of a larger joint measurement ("a@a&b&c": perform a&b&c and
/// read off a).
struct MeasurementRef {
  Key key;
  std::optional<Key> within;

  static MeasurementRef plain(std::string id) { return {Key{std::move(id)}, std::nullopt}; }

  [[nodiscard]] std::string str() const {
    return within ? key_label(key) + "@" + key_label(*within) : key_label(key);
  }

  static MeasurementRef parse(std::string const& text) {
    auto const split = [](std::string const& s) {
      std::vector<std::string> parts;
      std::size_t start = 0;
      while (true) {
        auto const pos = s.find('&', start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
      return parts;
    };
    MeasurementRef ref;
    auto const at = text.find('@');
    ref.key = make_key(split(text.substr(0, at)));
    if (at != std::string::npos) ref.within = make_key(split(text.substr(at + 1)));
    auto bad = [](Key const& k) {
      return k.empty() || std::any_of(k.begin(), k.end(), [](auto const& s) { return s.empty(); });
    };
    if (bad(ref.key) || (ref.within && bad(*ref.within))) throw InputError("malformed measurement reference '" + text + "'");
    return ref;
  }

  friend bool operator==(MeasurementRef const&, MeasurementRef const&) = default;
  friend auto operator<=>(MeasurementRef const& a, MeasurementRef const& b) { return a.str() <=> b.str(); }
};

enum class Provenance { declared, discovered };

inline std::string to_string(Provenance p) { return p == Provenance::declared ? "declared" : "discovered"; }

/// Two measurements claimed operationally equivalent under an outcome
/// bijection h (outcome labels of `first` -> outcome labels of `second`).
struct EquivalenceClaim {
  MeasurementRef first;
  MeasurementRef second;
  std::map<std::string, std::string> bijection;
  Provenance provenance = Provenance::declared;

  [[nodiscard]] bool is_identity() const {
    return std::all_of(bijection.begin(), bijection.end(), [](auto const& p) { return p.first == p.second; });
  }

  [[nodiscard]] std::string describe_bijection() const {
    if (is_identity()) return "identity";
    std::vector<std::string> parts;
    for (auto const& [a, b] : bijection) parts.push_back(a + "->" + b);
    return join(parts, ";");
  }

  friend bool operator==(EquivalenceClaim const&, EquivalenceClaim const&) = default;
};

/// Joint outcome labels of a referenced measurement, in table order.
inline std::vector<std::string> outcome_labels(Skeleton const& sk, MeasurementRef const& ref) {
  for (auto const& id : ref.key)
    if (!sk.find(id)) throw InputError("dangling measurement reference '" + ref.str() + "'");
  if (ref.within) {
    if (!is_subset(ref.key, *ref.within) || ref.key == *ref.within)
      throw InputError("component reference '" + ref.str() + "' must name a strict subset");
    if (!sk.is_commeasurable(*ref.within)) throw InputError("'" + ref.str() + "' is not inside a declared context");
  }
  std::vector<std::string> labels;
  auto const n = joint_size(sk.shape_of(ref.key));
  for (std::size_t i = 0; i < n; ++i) labels.push_back(sk.outcome_label(ref.key, i));
  return labels;
}

namespace detail {

inline Distribution resolve(Skeleton const& sk, TableMap const& tables, MeasurementRef const& ref,
                            std::string const& subject) {
  if (ref.within) {
    auto it = tables.find(*ref.within);
    if (it == tables.end() || !it->second.contains(subject))
      throw InputError("no table for " + key_label(*ref.within) + " at '" + subject + "'");
    return marginalize(it->second.at(subject), *ref.within, ref.key);
  }
  auto d = lookup_table(sk, tables, ref.key, subject);
  if (!d) throw InputError("no table for " + key_label(ref.key) + " at '" + subject + "'");
  return *d;
}

/// Claim bijection as an index permutation; throws on a non-bijection.
inline std::vector<std::size_t> bijection_indices(Skeleton const& sk, EquivalenceClaim const& c) {
  auto const from = outcome_labels(sk, c.first);
  auto const to = outcome_labels(sk, c.second);
  if (from.size() != to.size() || c.bijection.size() != from.size())
    throw InputError("claim " + c.first.str() + " ~ " + c.second.str() + " is not a bijection of outcomes");
  std::vector<std::size_t> perm;
  std::vector<bool> used(to.size(), false);
  for (auto const& x : from) {
    auto it = c.bijection.find(x);
    if (it == c.bijection.end()) throw InputError("claim bijection misses outcome '" + x + "'");
    auto jt = std::find(to.begin(), to.end(), it->second);
    if (jt == to.end()) throw InputError("claim bijection maps to unknown outcome '" + it->second + "'");
    auto const j = static_cast<std::size_t>(jt - to.begin());
    if (used[j]) throw InputError("claim bijection is not injective");
    used[j] = true;
    perm.push_back(j);
  }
  if (c.first == c.second) throw InputError("claim relates a measurement to itself");
  return perm;
}

inline bool same_under(Distribution const& a, Distribution const& b, std::vector<std::size_t> const& perm) {
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (a.weights[i] != b.weights[perm[i]]) return false;
  return true;
}

inline void collect_bijections(Skeleton const& sk, TableMap const& tables, MeasurementRef const& a,
                               MeasurementRef const& b, std::size_t max_outcomes,
                               std::vector<EquivalenceClaim>& out) {
  auto const la = outcome_labels(sk, a);
  auto const lb = outcome_labels(sk, b);
  if (la.size() != lb.size() || la.size() > max_outcomes) return;
  std::vector<Distribution> da, db;
  for (auto const& s : sk.preparations) {
    da.push_back(resolve(sk, tables, a, s));
    db.push_back(resolve(sk, tables, b, s));
  }
  std::vector<std::size_t> perm(la.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t s = 0; s < da.size() && ok; ++s) ok = same_under(da[s], db[s], perm);
    if (!ok) continue;
    EquivalenceClaim c{a, b, {}, Provenance::discovered};
    for (std::size_t i = 0; i < perm.size(); ++i) c.bijection[la[i]] = lb[perm[i]];
    out.push_back(std::move(c));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace detail

/// Statistics of a referenced measurement in a preparation.
inline Distribution statistics(OperationalTheory const& theory, MeasurementRef const& ref,
                               std::string const& preparation) {
  outcome_labels(theory.skeleton, ref);
  return detail::resolve(theory.skeleton, theory.tables, ref, preparation);
}

/// Response of a referenced measurement in an ontic state.
inline Distribution response_of(OntologicalModel const& model, MeasurementRef const& ref,
                                std::string const& ontic_state) {
  outcome_labels(model.skeleton, ref);
  return detail::resolve(model.skeleton, model.responses, ref, ontic_state);
}

/// Every pair of singleton measurements (in id order) with equal outcome
/// counts up to `max_outcomes`, together with every outcome bijection under
/// which their statistics coincide at all preparations.
inline std::vector<EquivalenceClaim> find_operational_equivalences(OperationalTheory const& theory,
                                                                   std::size_t max_outcomes) {
  std::vector<std::string> ids;
  for (auto const& m : theory.skeleton.measurements) ids.push_back(m.id);
  std::sort(ids.begin(), ids.end());
  std::vector<EquivalenceClaim> out;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j)
      detail::collect_bijections(theory.skeleton, theory.tables, MeasurementRef::plain(ids[i]),
                                 MeasurementRef::plain(ids[j]), max_outcomes, out);
  return out;
}

/// Equivalences between each measurement subset and its own component inside
/// each explicit strict superset table ("m" vs "m@K"). In a non-disturbing
/// theory the identity bijection always qualifies.
inline std::vector<EquivalenceClaim> find_component_equivalences(OperationalTheory const& theory,
                                                                 std::size_t max_outcomes) {
  std::vector<EquivalenceClaim> out;
  auto const keys = detail::comparison_keys(theory.tables);
  for (auto const& sub : keys) {
    if (!theory.skeleton.is_commeasurable(sub)) continue;
    for (auto const& [super, _] : theory.tables) {
      if (super == sub || !is_subset(sub, super)) continue;
      detail::collect_bijections(theory.skeleton, theory.tables, MeasurementRef{sub, std::nullopt},
                                 MeasurementRef{sub, super}, max_outcomes, out);
    }
  }
  return out;
}

/// For every claim whose premise is the equality of statistics, the
/// responses must coincide under the bijection at every ontic state.
inline Verdict check_measurement_nc(OntologicalModel const& model, std::vector<EquivalenceClaim> const& claims) {
  std::vector<Witness> witnesses;
  for (auto const& c : claims) {
    auto const perm = detail::bijection_indices(model.skeleton, c);
    auto const labels = outcome_labels(model.skeleton, c.first);
    auto const detail_text = c.describe_bijection() + " (" + to_string(c.provenance) + ")";
    for (auto const& l : model.ontic_states) {
      auto const a = response_of(model, c.first, l);
      auto const b = response_of(model, c.second, l);
      for (std::size_t i = 0; i < perm.size(); ++i) {
        if (a.weights[i] != b.weights[perm[i]]) {
          witnesses.push_back({"measurement-contextuality", {c.first.str(), c.second.str()}, l, labels[i],
                               a.weights[i], b.weights[perm[i]], detail_text});
        }
      }
    }
  }
  std::set<std::string> fl;
  if (detail::model_theory_is_disturbing(model)) fl.insert(flags::kDisturbing);
  return make_verdict(std::move(witnesses), std::move(fl));
}

/// Checks that each claim's premise (equal statistics at every preparation)
/// holds in `theory`.
inline Verdict check_equivalence_premises(OperationalTheory const& theory,
                                          std::vector<EquivalenceClaim> const& claims) {
  std::vector<Witness> witnesses;
  for (auto const& c : claims) {
    auto const perm = detail::bijection_indices(theory.skeleton, c);
    auto const labels = outcome_labels(theory.skeleton, c.first);
    for (auto const& s : theory.skeleton.preparations) {
      auto const a = statistics(theory, c.first, s);
      auto const b = statistics(theory, c.second, s);
      for (std::size_t i = 0; i < perm.size(); ++i)
        if (a.weights[i] != b.weights[perm[i]])
          witnesses.push_back({"operational-inequivalence", {c.first.str(), c.second.str()}, s, labels[i],
                               a.weights[i], b.weights[perm[i]], c.describe_bijection()});
    }
  }
  return make_verdict(std::move(witnesses));
}

}  // namespace contextum
