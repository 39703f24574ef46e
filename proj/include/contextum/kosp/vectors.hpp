#pragma once

#include <set>
#include <string>
#include <vector>

#include "contextum/rational.hpp"
#include "contextum/verdict.hpp"

namespace contextum::kosp {

/// Rank-1 projections given by rational vectors, with listed orthogonal
/// bases (each a set of vector indices).
struct VectorScenario {
  std::size_t dimension = 0;
  std::vector<std::vector<Rational>> vectors;
  std::vector<std::vector<std::size_t>> bases;

  friend bool operator==(VectorScenario const&, VectorScenario const&) = default;
};

inline Rational inner(std::vector<Rational> const& a, std::vector<Rational> const& b) {
  Rational s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Exact determinant by Gaussian elimination with row swaps.
inline Rational determinant(std::vector<std::vector<Rational>> m) {
  auto const n = m.size();
  Rational det{1};
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col].is_zero()) ++pivot;
    if (pivot == n) return Rational{0};
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m[r][col].is_zero()) continue;
      auto const f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

inline Verdict validate_vector_scenario(VectorScenario const& vs) {
  std::vector<Witness> out;
  auto const name = [](std::size_t i) { return "v" + std::to_string(i); };
  for (std::size_t i = 0; i < vs.vectors.size(); ++i) {
    auto const& v = vs.vectors[i];
    if (v.size() != vs.dimension) {
      out.push_back({"dimension", {name(i)}, "", "", {}, {}, "vector length differs from dimension"});
    } else if (inner(v, v).is_zero()) {
      out.push_back({"zero-vector", {name(i)}, "", "", {}, {}, ""});
    }
  }
  if (!out.empty()) return make_verdict(std::move(out));
  for (std::size_t b = 0; b < vs.bases.size(); ++b) {
    auto const& basis = vs.bases[b];
    auto const label = "basis" + std::to_string(b);
    bool indices_ok = basis.size() == vs.dimension && std::set<std::size_t>(basis.begin(), basis.end()).size() == basis.size();
    for (auto i : basis)
      if (i >= vs.vectors.size()) indices_ok = false;
    if (!indices_ok) {
      out.push_back({"basis-shape", {label}, "", "", {}, {}, "a basis lists `dimension` distinct vector indices"});
      continue;
    }
    for (std::size_t x = 0; x < basis.size(); ++x)
      for (std::size_t y = x + 1; y < basis.size(); ++y) {
        auto const ip = inner(vs.vectors[basis[x]], vs.vectors[basis[y]]);
        if (!ip.is_zero()) out.push_back({"not-orthogonal", {label, name(basis[x]), name(basis[y])}, "", "", ip, Rational{0}, ""});
      }
    std::vector<std::vector<Rational>> gram(basis.size(), std::vector<Rational>(basis.size()));
    for (std::size_t x = 0; x < basis.size(); ++x)
      for (std::size_t y = 0; y < basis.size(); ++y) gram[x][y] = inner(vs.vectors[basis[x]], vs.vectors[basis[y]]);
    if (determinant(gram).is_zero()) out.push_back({"not-spanning", {label}, "", "", {}, {}, "Gram determinant is zero"});
  }
  return make_verdict(std::move(out));
}

/// All {0,1} colourings with exactly one 1 in every listed basis and no two
/// orthogonal vectors both 1, in lexicographic order (vector order, 0 < 1).
inline std::vector<std::vector<int>> color_vectors(VectorScenario const& vs,
                                                   unsigned long long cap = kDefaultEnumerationCap) {
  auto const v = validate_vector_scenario(vs);
  if (!v.holds) throw ValidationError("invalid vector scenario", v);
  auto const n = vs.vectors.size();
  unsigned long long const candidates = n >= 64 ? ~0ULL : (1ULL << n);
  if (candidates > cap) throw CapacityError("vector colouring enumeration", candidates, cap);

  std::vector<std::vector<std::size_t>> orthogonal(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (inner(vs.vectors[i], vs.vectors[j]).is_zero()) orthogonal[i].push_back(j);
  std::vector<std::vector<std::size_t>> bases_of(n);
  std::vector<std::size_t> basis_last(vs.bases.size(), 0);
  for (std::size_t b = 0; b < vs.bases.size(); ++b)
    for (auto i : vs.bases[b]) {
      bases_of[i].push_back(b);
      basis_last[b] = std::max(basis_last[b], i);
    }

  std::vector<int> color(n, 0);
  std::vector<int> ones_in_basis(vs.bases.size(), 0);
  std::vector<std::vector<int>> out;
  auto recurse = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      out.push_back(color);
      return;
    }
    // colour 0: every basis that closes here must already hold a 1
    {
      color[i] = 0;
      bool ok = true;
      for (auto b : bases_of[i])
        if (basis_last[b] == i && ones_in_basis[b] == 0) ok = false;
      if (ok) self(self, i + 1);
    }
    // colour 1: no orthogonal earlier 1, no basis already holding a 1
    {
      bool ok = true;
      for (auto j : orthogonal[i])
        if (color[j] == 1) ok = false;
      for (auto b : bases_of[i])
        if (ones_in_basis[b] != 0) ok = false;
      if (ok) {
        color[i] = 1;
        for (auto b : bases_of[i]) ++ones_in_basis[b];
        self(self, i + 1);
        for (auto b : bases_of[i]) --ones_in_basis[b];
        color[i] = 0;
      }
    }
  };
  recurse(recurse, 0);
  return out;
}

}  // namespace contextum::kosp
