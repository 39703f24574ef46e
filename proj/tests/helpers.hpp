#pragma once

// Test-side construction helpers and independent oracles. Nothing here calls
// the library routine it is used to check.

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "contextum/catalog.hpp"
#include "contextum/model.hpp"
#include "contextum/sheaf/empirical.hpp"
#include "contextum/theory.hpp"

namespace testing_support {

using namespace contextum;
using quantum::GaussianRational;
using quantum::Matrix;
using quantum::Vector;

inline Rational q(long n, long d = 1) { return Rational(n, d); }

inline Distribution dist(std::vector<std::size_t> shape, std::vector<Rational> w) { return {std::move(shape), std::move(w)}; }

inline Measurement binary(std::string id) { return {std::move(id), {"0", "1"}}; }

/// v^dagger M v
inline GaussianRational expectation(Matrix const& m, Vector const& v) {
  GaussianRational s;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) s += v[i].conj() * m(i, j) * v[j];
  return s;
}

inline GaussianRational inner(Vector const& a, Vector const& b) {
  GaussianRational s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].conj() * b[i];
  return s;
}

inline Vector apply_matrix(Matrix const& m, Vector const& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m(i, j) * v[j];
  return out;
}

/// Common eigenbasis of commuting two-qubit operators, found by scanning
/// vectors with entries in {0, +-1, +-i}; eigenvalues are Rayleigh
/// quotients. Returns one (vector, eigenvalue tuple) per joint eigenspace
/// found, mutually orthogonal.
inline std::vector<std::pair<Vector, std::vector<Rational>>> common_eigenbasis(std::vector<Matrix> const& ops) {
  std::vector<GaussianRational> const alphabet{Rational{0}, Rational{1}, Rational{-1}, GaussianRational(Rational{0}, Rational{1}),
                                               GaussianRational(Rational{0}, Rational{-1})};
  auto const n = ops.front().dim();
  std::vector<std::pair<Vector, std::vector<Rational>>> basis;
  std::vector<std::size_t> digits(n, 0);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= alphabet.size();
  for (std::size_t code = 0; code < total && basis.size() < n; ++code) {
    auto c = code;
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = alphabet[c % alphabet.size()];
      c /= alphabet.size();
    }
    auto const norm = inner(v, v);
    if (norm.is_zero()) continue;
    bool eigen = true;
    std::vector<Rational> values;
    for (auto const& op : ops) {
      auto const lambda = expectation(op, v) / norm;
      auto const ov = apply_matrix(op, v);
      for (std::size_t i = 0; i < n && eigen; ++i)
        if (!(ov[i] == lambda * v[i])) eigen = false;
      if (!eigen) break;
      values.push_back(lambda.re);
    }
    if (!eigen) continue;
    bool orthogonal = true;
    for (auto const& [w, _] : basis)
      if (!inner(w, v).is_zero()) orthogonal = false;
    if (orthogonal) basis.emplace_back(std::move(v), std::move(values));
  }
  return basis;
}

/// Joint outcome probabilities at I/n from a common eigenbasis: each basis
/// vector contributes 1/n to its eigenvalue tuple.
inline std::map<std::vector<Rational>, Rational> mixed_state_joint(std::vector<Matrix> const& ops) {
  auto const basis = common_eigenbasis(ops);
  std::map<std::vector<Rational>, Rational> p;
  for (auto const& [_, tuple] : basis) p[tuple] += Rational(1, static_cast<long>(ops.front().dim()));
  return p;
}

/// Brute force over all 2^9 sign assignments of the PM square, admissible
/// when every context's sign tuple occurs in the eigenbasis oracle.
inline std::size_t pm_bruteforce_assignments() {
  auto const& sc = catalog::peres_mermin_scenario();
  std::vector<std::set<std::vector<Rational>>> allowed;
  for (auto const& ctx : sc.contexts) {
    std::vector<Matrix> ops;
    for (auto const& id : ctx) ops.push_back(sc.at(id).matrix());
    std::set<std::vector<Rational>> s;
    for (auto const& [_, t] : common_eigenbasis(ops)) s.insert(t);
    allowed.push_back(std::move(s));
  }
  std::size_t count = 0;
  for (unsigned bits = 0; bits < 512; ++bits) {
    std::map<std::string, Rational> value;
    for (std::size_t k = 0; k < sc.observables.size(); ++k) value[sc.observables[k].id] = (bits >> k) & 1 ? q(-1) : q(1);
    bool ok = true;
    for (std::size_t c = 0; c < sc.contexts.size() && ok; ++c) {
      std::vector<Rational> t;
      for (auto const& id : sc.contexts[c]) t.push_back(value[id]);
      ok = allowed[c].contains(t);
    }
    count += ok;
  }
  return count;
}

/// Random distribution over `size` outcomes with small denominators and
/// optional zeros.
inline std::vector<Rational> random_weights(std::mt19937& rng, std::size_t size, int max_part = 4) {
  std::uniform_int_distribution<int> part(0, max_part);
  std::vector<long> parts(size);
  long total = 0;
  while (total == 0) {
    total = 0;
    for (auto& p : parts) total += (p = part(rng));
  }
  std::vector<Rational> w;
  for (auto p : parts) w.push_back(Rational(p, total));
  return w;
}

/// Brute-force marginal over explicitly enumerated joint outcomes.
inline std::vector<Rational> brute_marginal(std::vector<std::size_t> const& shape, std::vector<Rational> const& weights,
                                            std::vector<std::size_t> const& keep) {
  std::vector<std::size_t> kept_shape;
  for (auto k : keep) kept_shape.push_back(shape[k]);
  std::size_t kept_size = 1;
  for (auto s : kept_shape) kept_size *= s;
  std::vector<Rational> out(kept_size);
  for (std::size_t idx = 0; idx < weights.size(); ++idx) {
    std::vector<std::size_t> digits(shape.size());
    auto rem = idx;
    for (std::size_t i = shape.size(); i-- > 0;) {
      digits[i] = rem % shape[i];
      rem /= shape[i];
    }
    std::size_t t = 0;
    for (std::size_t j = 0; j < keep.size(); ++j) t = t * kept_shape[j] + digits[keep[j]];
    out[t] += weights[idx];
  }
  return out;
}


/// Uniform draw from {lo + (hi - lo) * k / den}, biased towards the ends so
/// that perfect (anti)correlations appear often.
inline Rational random_between(std::mt19937& rng, Rational const& lo, Rational const& hi) {
  std::uniform_int_distribution<int> pick(0, 5);
  int const mode = pick(rng);
  if (mode == 0) return lo;
  if (mode == 1) return hi;
  std::uniform_int_distribution<long> den_d(1, 6);
  long const den = den_d(rng);
  std::uniform_int_distribution<long> k_d(0, den);
  return lo + (hi - lo) * Rational(k_d(rng), den);
}

/// Consistent empirical model on at most three measurements with at most
/// two outcomes each. Pair contexts are random couplings of shared
/// singleton marginals, so overlaps always agree while a global section
/// may or may not exist.
inline sheaf::EmpiricalModel random_consistent_empirical(std::mt19937& rng) {
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_int_distribution<int> coin(0, 3);
  auto const n = static_cast<std::size_t>(count(rng));
  sheaf::EmpiricalModel em;
  std::vector<Rational> p0;  // probability of outcome 0
  for (std::size_t i = 0; i < n; ++i) {
    bool const two = coin(rng) != 0;
    em.measurements.push_back(two ? Measurement{"m" + std::to_string(i), {"0", "1"}} : Measurement{"m" + std::to_string(i), {"0"}});
    Rational const half{1, 2};
    p0.push_back(!two ? Rational{1} : coin(rng) < 2 ? half : random_between(rng, Rational{0}, Rational{1}));
  }
  auto id = [&](std::size_t i) { return em.measurements[i].id; };
  auto single = [&](std::size_t i) {
    if (em.measurements[i].outcomes.size() == 1) return Distribution{{1}, {Rational{1}}};
    return Distribution{{2}, {p0[i], Rational{1} - p0[i]}};
  };
  auto pair = [&](std::size_t i, std::size_t j) {
    auto const si = em.measurements[i].outcomes.size();
    auto const sj = em.measurements[j].outcomes.size();
    if (si == 1 || sj == 1) {
      auto const a = single(i);
      auto const b = single(j);
      Distribution d{{si, sj}, {}};
      for (auto const& x : a.weights)
        for (auto const& y : b.weights) d.weights.push_back(x * y);
      return d;
    }
    Rational lo = p0[i] + p0[j] - Rational{1};
    if (lo.sign() < 0) lo = Rational{0};
    Rational const hi = p0[i] < p0[j] ? p0[i] : p0[j];
    auto const p00 = random_between(rng, lo, hi);
    return Distribution{{2, 2}, {p00, p0[i] - p00, p0[j] - p00, Rational{1} - p0[i] - p0[j] + p00}};
  };
  if (n == 1) {
    em.cover = {{id(0)}};
    em.distributions = {single(0)};
  } else if (n == 2) {
    if (coin(rng) == 0) {
      em.cover = {{id(0)}, {id(1)}};
      em.distributions = {single(0), single(1)};
    } else {
      em.cover = {{id(0), id(1)}};
      em.distributions = {pair(0, 1)};
    }
  } else {
    // A nonempty subset of the three pairs, plus any uncovered singleton.
    std::vector<std::pair<std::size_t, std::size_t>> const pairs{{0, 1}, {1, 2}, {0, 2}};
    std::uniform_int_distribution<int> mask_d(1, 7);
    int const mask = mask_d(rng);
    std::set<std::size_t> covered;
    for (int b = 0; b < 3; ++b) {
      if (!(mask >> b & 1)) continue;
      auto [i, j] = pairs[b];
      em.cover.push_back({id(i), id(j)});
      em.distributions.push_back(pair(i, j));
      covered.insert({i, j});
    }
    for (std::size_t i = 0; i < 3; ++i)
      if (!covered.contains(i)) {
        em.cover.push_back({id(i)});
        em.distributions.push_back(single(i));
      }
  }
  return em;
}

/// A random ontological model whose reconstructed theory is non-disturbing
/// by construction. Each ontic state mixes a few global deterministic
/// assignments; contexts respond with the induced marginals. With some
/// probability two ontic states with identical priors trade their response
/// for one singleton or one context: aggregate statistics are unchanged
/// but the responses become context-dependent.
struct RandomModel {
  OntologicalModel model;
  bool perturbed = false;
};

inline RandomModel random_nondisturbing_model(std::mt19937& rng) {
  std::uniform_int_distribution<int> n_meas(2, 4), n_states(2, 4), n_preps(1, 2), coin(0, 1), n_atoms(1, 2);
  RandomModel out;
  auto& m = out.model;
  auto const nm = static_cast<std::size_t>(n_meas(rng));
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < nm; ++i) {
    sizes.push_back(coin(rng) ? 2 : (coin(rng) ? 2 : 3));
    Measurement meas{"m" + std::to_string(i), {}};
    for (std::size_t k = 0; k < sizes.back(); ++k) meas.outcomes.push_back(std::to_string(k));
    m.skeleton.measurements.push_back(std::move(meas));
  }
  // Random distinct pairs as contexts.
  std::vector<Key> all_pairs;
  for (std::size_t i = 0; i < nm; ++i)
    for (std::size_t j = i + 1; j < nm; ++j) all_pairs.push_back({"m" + std::to_string(i), "m" + std::to_string(j)});
  std::shuffle(all_pairs.begin(), all_pairs.end(), rng);
  std::uniform_int_distribution<std::size_t> n_ctx(1, std::min<std::size_t>(3, all_pairs.size()));
  all_pairs.resize(n_ctx(rng));
  m.skeleton.contexts = all_pairs;
  auto const np = static_cast<std::size_t>(n_preps(rng));
  for (std::size_t s = 0; s < np; ++s) m.skeleton.preparations.push_back("s" + std::to_string(s));
  auto const nl = static_cast<std::size_t>(n_states(rng));
  for (std::size_t l = 0; l < nl; ++l) m.ontic_states.push_back("l" + std::to_string(l));

  bool const perturb = coin(rng) == 1;
  for (auto const& s : m.skeleton.preparations) {
    auto w = random_weights(rng, nl, 3);
    if (perturb) {
      // ontic states l0 and l1 get identical priors everywhere
      Rational const avg = (w[0] + w[1]) / Rational{2};
      w[0] = w[1] = avg;
    }
    m.priors[s] = Distribution{{nl}, std::move(w)};
  }

  // Per ontic state: a mixture of global deterministic assignments.
  std::vector<std::vector<std::pair<std::vector<std::size_t>, Rational>>> hidden(nl);
  for (auto& h : hidden) {
    auto const atoms = static_cast<std::size_t>(n_atoms(rng));
    auto const w = random_weights(rng, atoms, 3);
    for (std::size_t a = 0; a < atoms; ++a) {
      std::vector<std::size_t> g;
      for (auto sz : sizes) g.push_back(std::uniform_int_distribution<std::size_t>(0, sz - 1)(rng));
      h.emplace_back(std::move(g), w[a]);
    }
  }
  auto index_of = [](std::string const& id) { return static_cast<std::size_t>(std::stoul(id.substr(1))); };
  auto response = [&](Key const& key, std::size_t l) {
    std::vector<std::size_t> shape;
    for (auto const& id : key) shape.push_back(sizes[index_of(id)]);
    Distribution d{shape, std::vector<Rational>(joint_size(shape))};
    for (auto const& [g, w] : hidden[l]) {
      std::vector<std::size_t> digits;
      for (auto const& id : key) digits.push_back(g[index_of(id)]);
      d.weights[encode_joint(digits, shape)] += w;
    }
    return d;
  };
  // Responses are required for every singleton and every context.
  std::vector<Key> keys = m.skeleton.contexts;
  for (auto const& meas : m.skeleton.measurements) keys.push_back({meas.id});
  for (auto const& key : keys)
    for (std::size_t l = 0; l < nl; ++l) m.responses[key][m.ontic_states[l]] = response(key, l);

  if (perturb) {
    std::uniform_int_distribution<std::size_t> pick(0, keys.size() - 1);
    auto& table = m.responses[keys[pick(rng)]];
    std::swap(table["l0"], table["l1"]);
    out.perturbed = true;
  }
  return out;
}

}  // namespace testing_support
