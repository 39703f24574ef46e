#pragma once

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "contextum/kosp/scenario.hpp"

namespace contextum::kosp {

/// Sends each observable of a scenario to one of its eigenvalues.
struct ValueAssignment {
  std::map<std::string, Rational> values;

  friend bool operator==(ValueAssignment const&, ValueAssignment const&) = default;
  friend auto operator<=>(ValueAssignment const& a, ValueAssignment const& b) {
    return a.values <=> b.values;
  }
};

/// Product of the spectrum sizes, saturating at the maximum value.
inline unsigned long long candidate_count(KSScenario const& sc) {
  unsigned long long n = 1;
  for (auto const& o : sc.observables) {
    auto const k = static_cast<unsigned long long>(o.eigenvalues.size());
    if (k != 0 && n > std::numeric_limits<unsigned long long>::max() / k) return std::numeric_limits<unsigned long long>::max();
    n *= k;
  }
  return n;
}

/// Exhaustive search for assignments whose restriction to every context is
/// an admissible joint eigenvalue tuple. Results are in lexicographic order
/// of eigenvalue indices, taken in scenario observable order.
inline std::vector<ValueAssignment> enumerate_value_assignments(KSScenario const& sc,
                                                                unsigned long long cap = kDefaultEnumerationCap) {
  auto const candidates = candidate_count(sc);
  if (candidates > cap) throw CapacityError("value assignment enumeration", candidates, cap);

  auto const n = sc.observables.size();
  // Contexts are checked once their last member (in observable order) is set.
  std::vector<std::vector<std::size_t>> checks_at(n);
  std::vector<std::vector<std::size_t>> member_pos(sc.contexts.size());
  std::vector<std::set<JointOutcome>> allowed(sc.contexts.size());
  for (std::size_t c = 0; c < sc.contexts.size(); ++c) {
    std::size_t last = 0;
    for (auto const& id : sc.contexts[c]) {
      auto const p = sc.index_of(id);
      member_pos[c].push_back(p);
      last = std::max(last, p);
    }
    allowed[c] = std::set<JointOutcome>(sc.admissible[c].begin(), sc.admissible[c].end());
    checks_at[last].push_back(c);
  }

  std::vector<ValueAssignment> out;
  std::vector<std::size_t> current(n, 0);
  JointOutcome probe;
  auto consistent_at = [&](std::size_t pos) {
    for (auto c : checks_at[pos]) {
      probe.clear();
      for (auto p : member_pos[c]) probe.push_back(current[p]);
      if (!allowed[c].contains(probe)) return false;
    }
    return true;
  };
  auto recurse = [&](auto&& self, std::size_t pos) -> void {
    if (pos == n) {
      ValueAssignment a;
      for (std::size_t i = 0; i < n; ++i) a.values[sc.observables[i].id] = sc.observables[i].eigenvalues[current[i]];
      out.push_back(std::move(a));
      return;
    }
    for (std::size_t v = 0; v < sc.observables[pos].eigenvalues.size(); ++v) {
      current[pos] = v;
      if (consistent_at(pos)) self(self, pos + 1);
    }
  };
  recurse(recurse, 0);
  return out;
}

/// Outcome of the algebraic parity argument: applies when every observable
/// has spectrum {+1,-1}, every context's operator product is +-I and every
/// observable lies in an even number of contexts. The product of all
/// context signs must then be +1 for any assignment to exist.
struct ParityResult {
  bool applicable = false;
  std::vector<int> context_signs;  ///< operator product of each context is sign * I
  bool obstruction = false;        ///< product of signs is -1: no assignment possible
};

inline ParityResult parity_argument(KSScenario const& sc) {
  ParityResult r;
  std::set<Rational> const pm{Rational{1}, Rational{-1}};
  std::map<std::string, int> occurrences;
  for (auto const& o : sc.observables) {
    if (std::set<Rational>(o.eigenvalues.begin(), o.eigenvalues.end()) != pm || o.eigenvalues.size() != 2) return r;
    occurrences[o.id] = 0;
  }
  auto const identity = Matrix::identity(sc.dim());
  int total = 1;
  for (auto const& ctx : sc.contexts) {
    Matrix prod = identity;
    for (auto const& id : ctx) {
      prod = prod * sc.at(id).matrix();
      ++occurrences[id];
    }
    int sign;
    if (prod == identity) {
      sign = 1;
    } else if (prod == identity * quantum::GaussianRational(-1)) {
      sign = -1;
    } else {
      return r;
    }
    r.context_signs.push_back(sign);
    total *= sign;
  }
  for (auto const& [_, k] : occurrences)
    if (k % 2 != 0) return r;
  r.applicable = true;
  r.obstruction = total < 0;
  return r;
}

}  // namespace contextum::kosp
