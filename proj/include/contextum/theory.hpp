#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "contextum/rational.hpp"
#include "contextum/verdict.hpp"

namespace contextum {

/// A measurement with its ordered outcome labels.
struct Measurement {
  std::string id;
  std::vector<std::string> outcomes;

  friend bool operator==(Measurement const&, Measurement const&) = default;
};

/// A set of measurement ids, stored sorted and duplicate-free. Used both for
/// declared contexts and for the subsets that key probability tables.
using Key = std::vector<std::string>;

inline Key make_key(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

inline bool is_canonical_key(Key const& k) {
  return !k.empty() && std::adjacent_find(k.begin(), k.end(), [](auto const& a, auto const& b) {
                         return !(a < b);
                       }) == k.end();
}

inline bool is_subset(Key const& small, Key const& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

inline Key key_intersection(Key const& a, Key const& b) {
  Key out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::string join(std::vector<std::string> const& parts, std::string const& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

/// "a&b&c"
inline std::string key_label(Key const& k) { return join(k, "&"); }

/// Characters reserved for measurement references ("a&b@a&b&c").
inline bool has_reserved_char(std::string const& id) {
  return id.find_first_of("@&") != std::string::npos;
}

/// Probability weights over a joint outcome space. `shape[i]` is the number
/// of outcomes of the i-th member; weights are stored densely in mixed radix
/// order with the first member most significant, i.e. lexicographically by
/// member then outcome index.
struct Distribution {
  std::vector<std::size_t> shape;
  std::vector<Rational> weights;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
  [[nodiscard]] Rational total() const {
    Rational t;
    for (auto const& w : weights) t += w;
    return t;
  }
  friend bool operator==(Distribution const&, Distribution const&) = default;
};

inline std::size_t joint_size(std::vector<std::size_t> const& shape) {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

inline std::vector<std::size_t> decode_joint(std::size_t index, std::vector<std::size_t> const& shape) {
  std::vector<std::size_t> digits(shape.size());
  for (std::size_t i = shape.size(); i-- > 0;) {
    digits[i] = index % shape[i];
    index /= shape[i];
  }
  return digits;
}

inline std::size_t encode_joint(std::vector<std::size_t> const& digits, std::vector<std::size_t> const& shape) {
  std::size_t index = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) index = index * shape[i] + digits[i];
  return index;
}

inline Distribution point_mass(std::vector<std::size_t> shape, std::size_t index) {
  Distribution d{std::move(shape), {}};
  d.weights.assign(joint_size(d.shape), Rational{});
  d.weights.at(index) = Rational{1};
  return d;
}

inline Distribution uniform(std::vector<std::size_t> shape) {
  Distribution d{std::move(shape), {}};
  auto const n = joint_size(d.shape);
  d.weights.assign(n, Rational(1, static_cast<long>(n)));
  return d;
}

/// Exact marginal of `dist` (over the members of `members`) onto `target`.
inline Distribution marginalize(Distribution const& dist, Key const& members, Key const& target) {
  if (target.empty()) throw InputError("marginal target is empty");
  if (members.size() != dist.shape.size()) throw InputError("distribution shape does not match its key");
  std::vector<std::size_t> positions;
  for (auto const& t : target) {
    auto it = std::find(members.begin(), members.end(), t);
    if (it == members.end()) {
      throw InputError("marginal target " + key_label(target) + " is not a subset of " + key_label(members));
    }
    positions.push_back(static_cast<std::size_t>(it - members.begin()));
  }
  Distribution out;
  for (auto p : positions) out.shape.push_back(dist.shape[p]);
  out.weights.assign(joint_size(out.shape), Rational{});
  std::vector<std::size_t> sub(positions.size());
  for (std::size_t i = 0; i < dist.weights.size(); ++i) {
    if (dist.weights[i].is_zero()) continue;
    auto const digits = decode_joint(i, dist.shape);
    for (std::size_t j = 0; j < positions.size(); ++j) sub[j] = digits[positions[j]];
    out.weights[encode_joint(sub, out.shape)] += dist.weights[i];
  }
  return out;
}

/// The declared structure shared by a theory and its ontological models:
/// measurements, commeasurability contexts and preparations.
struct Skeleton {
  std::vector<Measurement> measurements;
  std::vector<Key> contexts;
  std::vector<std::string> preparations;

  [[nodiscard]] Measurement const* find(std::string const& id) const {
    for (auto const& m : measurements)
      if (m.id == id) return &m;
    return nullptr;
  }

  [[nodiscard]] Measurement const& at(std::string const& id) const {
    if (auto const* m = find(id)) return *m;
    throw InputError("unknown measurement '" + id + "'");
  }

  [[nodiscard]] std::vector<std::size_t> shape_of(Key const& key) const {
    std::vector<std::size_t> shape;
    for (auto const& id : key) shape.push_back(at(id).outcomes.size());
    return shape;
  }

  [[nodiscard]] std::string outcome_label(Key const& key, std::size_t joint_index) const {
    auto const digits = decode_joint(joint_index, shape_of(key));
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < key.size(); ++i) labels.push_back(at(key[i]).outcomes[digits[i]]);
    return join(labels, ",");
  }

  /// Singletons are always commeasurable with themselves.
  [[nodiscard]] bool is_commeasurable(Key const& key) const {
    if (key.size() == 1) return find(key.front()) != nullptr;
    return std::any_of(contexts.begin(), contexts.end(), [&](Key const& c) { return is_subset(key, c); });
  }

  /// Declared contexts followed by implicit singleton contexts for every
  /// measurement absent from all declared contexts.
  [[nodiscard]] std::vector<Key> maximal_contexts() const {
    std::vector<Key> out = contexts;
    for (auto const& m : measurements) {
      bool covered = std::any_of(contexts.begin(), contexts.end(), [&](Key const& c) {
        return std::binary_search(c.begin(), c.end(), m.id);
      });
      if (!covered) out.push_back(Key{m.id});
    }
    return out;
  }

  [[nodiscard]] bool has_multi_member_context() const {
    return std::any_of(contexts.begin(), contexts.end(), [](Key const& c) { return c.size() > 1; });
  }

  /// Keys that must carry a table (or response): all singletons and all
  /// maximal contexts, in canonical order.
  [[nodiscard]] std::set<Key> required_keys() const {
    std::set<Key> out;
    for (auto const& m : measurements) out.insert(Key{m.id});
    for (auto const& c : contexts) out.insert(c);
    return out;
  }

  friend bool operator==(Skeleton const&, Skeleton const&) = default;
};

/// Per-key, per-subject tables. The subject is a preparation id for
/// operational theories and an ontic state id for response functions.
using TableMap = std::map<Key, std::map<std::string, Distribution>>;

/// Looks up the table of `key` at `subject`; keys without an explicit table
/// are the marginal of the first declared context (in declaration order)
/// containing them that has one.
inline std::optional<Distribution> lookup_table(Skeleton const& sk, TableMap const& tables, Key const& key,
                                                std::string const& subject) {
  if (auto it = tables.find(key); it != tables.end()) {
    if (auto jt = it->second.find(subject); jt != it->second.end()) return jt->second;
  }
  for (auto const& c : sk.contexts) {
    if (c == key || !is_subset(key, c)) continue;
    auto it = tables.find(c);
    if (it == tables.end()) continue;
    auto jt = it->second.find(subject);
    if (jt == it->second.end()) continue;
    return marginalize(jt->second, c, key);
  }
  return std::nullopt;
}

/// An operational theory: exact outcome probabilities for every measurement
/// subset and preparation.
struct OperationalTheory {
  Skeleton skeleton;
  TableMap tables;

  [[nodiscard]] Distribution table(Key const& key, std::string const& preparation) const {
    auto d = lookup_table(skeleton, tables, key, preparation);
    if (!d) throw InputError("no table for " + key_label(key) + " at preparation '" + preparation + "'");
    return *d;
  }

  friend bool operator==(OperationalTheory const&, OperationalTheory const&) = default;
};

namespace detail {

inline void check_unique_ids(std::vector<std::string> const& ids, std::string const& what,
                             std::vector<Witness>& out) {
  std::set<std::string> seen;
  for (auto const& id : ids) {
    if (id.empty()) out.push_back({"empty-id", {}, "", "", {}, {}, what + " id is empty"});
    if (!seen.insert(id).second) out.push_back({"duplicate-id", {id}, "", "", {}, {}, "duplicate " + what + " id"});
  }
}

inline std::vector<Witness> skeleton_witnesses(Skeleton const& sk) {
  std::vector<Witness> out;
  std::vector<std::string> ids;
  for (auto const& m : sk.measurements) {
    ids.push_back(m.id);
    if (has_reserved_char(m.id)) out.push_back({"reserved-character", {m.id}, "", "", {}, {}, "ids may not contain '@' or '&'"});
    if (m.outcomes.empty()) out.push_back({"no-outcomes", {m.id}, "", "", {}, {}, "measurement has no outcomes"});
    std::set<std::string> labels;
    for (auto const& o : m.outcomes) {
      if (!labels.insert(o).second) out.push_back({"duplicate-outcome", {m.id}, "", o, {}, {}, "outcome label repeated"});
    }
  }
  check_unique_ids(ids, "measurement", out);
  check_unique_ids(sk.preparations, "preparation", out);
  for (std::size_t i = 0; i < sk.contexts.size(); ++i) {
    auto const& c = sk.contexts[i];
    if (!is_canonical_key(c)) {
      out.push_back({"malformed-context", {key_label(c)}, "", "", {}, {}, "context must be a non-empty sorted set"});
      continue;
    }
    for (auto const& id : c)
      if (!sk.find(id)) out.push_back({"unknown-measurement", {key_label(c), id}, "", "", {}, {}, "context member not declared"});
    for (std::size_t j = 0; j < sk.contexts.size(); ++j) {
      if (i == j) continue;
      auto const& other = sk.contexts[j];
      if (c == other && i < j) {
        out.push_back({"duplicate-context", {key_label(c)}, "", "", {}, {}, "context declared twice"});
      } else if (c != other && is_subset(c, other)) {
        out.push_back({"non-maximal-context", {key_label(c), key_label(other)}, "", "", {}, {}, "declared context is contained in another"});
      }
    }
  }
  return out;
}

/// Checks one table family (theory tables or model responses) against the
/// skeleton. `subjects` are the ids every required key must cover.
inline void table_witnesses(Skeleton const& sk, TableMap const& tables, std::vector<std::string> const& subjects,
                            std::string const& subject_kind, std::vector<Witness>& out) {
  std::set<std::string> const subject_set(subjects.begin(), subjects.end());
  for (auto const& [key, per_subject] : tables) {
    auto const label = key_label(key);
    if (!is_canonical_key(key)) {
      out.push_back({"malformed-key", {label}, "", "", {}, {}, "table key must be a non-empty sorted set"});
      continue;
    }
    bool known = true;
    for (auto const& id : key) {
      if (!sk.find(id)) {
        out.push_back({"unknown-measurement", {label, id}, "", "", {}, {}, "table references undeclared measurement"});
        known = false;
      }
    }
    if (!known) continue;
    if (!sk.is_commeasurable(key)) {
      out.push_back({"not-in-context", {label}, "", "", {}, {}, "table key is not contained in any declared context"});
    }
    auto const shape = sk.shape_of(key);
    for (auto const& [subject, dist] : per_subject) {
      if (!subject_set.contains(subject)) {
        out.push_back({"unknown-" + subject_kind, {label}, subject, "", {}, {}, "table for undeclared " + subject_kind});
      }
      if (dist.shape != shape || dist.weights.size() != joint_size(shape)) {
        out.push_back({"shape-mismatch", {label}, subject, "", {}, {}, "weights do not match the joint outcome space"});
        continue;
      }
      for (std::size_t i = 0; i < dist.weights.size(); ++i) {
        if (dist.weights[i].sign() < 0) {
          out.push_back({"negative-weight", {label}, subject, sk.outcome_label(key, i), dist.weights[i], Rational{0}, ""});
        }
      }
      auto const total = dist.total();
      if (total != Rational{1}) {
        out.push_back({"normalization", {label}, subject, "", total, Rational{1}, "weights must sum to 1"});
      }
    }
  }
  for (auto const& key : sk.required_keys()) {
    if (!is_canonical_key(key)) continue;
    bool ok = std::all_of(key.begin(), key.end(), [&](auto const& id) { return sk.find(id) != nullptr; });
    if (!ok) continue;
    auto it = tables.find(key);
    for (auto const& s : subjects) {
      if (it == tables.end() || !it->second.contains(s)) {
        out.push_back({"missing-table", {key_label(key)}, s, "", {}, {}, "required " + subject_kind + " table absent"});
      }
    }
  }
}

}  // namespace detail

/// Every broken invariant of the theory, one witness each.
inline Verdict validate_theory(OperationalTheory const& theory) {
  auto witnesses = detail::skeleton_witnesses(theory.skeleton);
  detail::table_witnesses(theory.skeleton, theory.tables, theory.skeleton.preparations, "preparation", witnesses);
  return make_verdict(std::move(witnesses));
}

namespace detail {

/// Explicit keys plus pairwise intersections of explicit keys.
inline std::set<Key> comparison_keys(TableMap const& tables) {
  std::set<Key> keys;
  for (auto const& [k, _] : tables) keys.insert(k);
  std::vector<Key> const explicit_keys(keys.begin(), keys.end());
  for (std::size_t i = 0; i < explicit_keys.size(); ++i)
    for (std::size_t j = i + 1; j < explicit_keys.size(); ++j) {
      auto inter = key_intersection(explicit_keys[i], explicit_keys[j]);
      if (!inter.empty()) keys.insert(std::move(inter));
    }
  return keys;
}

/// Compares every sub-key table with the marginal of every explicit strict
/// superset, for each subject. Shared by the non-disturbance and
/// simultaneous-noncontextuality checks.
inline std::vector<Witness> coherence_witnesses(Skeleton const& sk, TableMap const& tables,
                                                std::vector<std::string> const& subjects,
                                                std::string const& kind) {
  std::vector<Witness> out;
  auto const keys = comparison_keys(tables);
  for (auto const& sub : keys) {
    for (auto const& [super, per_subject] : tables) {
      if (super == sub || !is_subset(sub, super)) continue;
      for (auto const& s : subjects) {
        auto jt = per_subject.find(s);
        if (jt == per_subject.end()) continue;
        auto const lhs = lookup_table(sk, tables, sub, s);
        if (!lhs) continue;
        auto const rhs = marginalize(jt->second, super, sub);
        for (std::size_t i = 0; i < rhs.weights.size(); ++i) {
          if (lhs->weights[i] != rhs.weights[i]) {
            out.push_back({kind, {key_label(sub), key_label(super)}, s, sk.outcome_label(sub, i), lhs->weights[i],
                           rhs.weights[i], ""});
          }
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/// Every subset table equals the marginal of each declared superset table,
/// at every preparation.
inline Verdict check_nondisturbance(OperationalTheory const& theory) {
  return make_verdict(detail::coherence_witnesses(theory.skeleton, theory.tables, theory.skeleton.preparations,
                                                  "disturbance"));
}

/// Maps each subject (preparation) to the eigenvalue label of `m` if the
/// subject is an eigenstate of `m`.
inline std::map<std::string, std::optional<std::string>> eigenstates_of(OperationalTheory const& theory,
                                                                        std::string const& m) {
  auto const& meas = theory.skeleton.at(m);
  std::map<std::string, std::optional<std::string>> out;
  for (auto const& s : theory.skeleton.preparations) {
    auto const d = theory.table(Key{m}, s);
    std::optional<std::string> value;
    for (std::size_t i = 0; i < d.weights.size(); ++i)
      if (d.weights[i] == Rational{1}) value = meas.outcomes[i];
    out[s] = value;
  }
  return out;
}

}  // namespace contextum
