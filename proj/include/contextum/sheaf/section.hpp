#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "contextum/sheaf/empirical.hpp"
#include "contextum/sheaf/simplex.hpp"

namespace contextum::sheaf {

/// Outcome index for each measurement of the model, in model order.
using GlobalAssignment = std::vector<std::size_t>;

/// A distribution over global assignments (zero weights omitted).
struct GlobalSection {
  std::map<GlobalAssignment, Rational> weights;

  friend bool operator==(GlobalSection const&, GlobalSection const&) = default;
};

/// Multipliers for the constraint rows of the section system: one per
/// (cover element, joint outcome) in cover order, then one for
/// normalisation.
struct FarkasCertificate {
  std::vector<Rational> multipliers;

  friend bool operator==(FarkasCertificate const&, FarkasCertificate const&) = default;
};

using SectionResult = std::variant<GlobalSection, FarkasCertificate>;

inline unsigned long long global_assignment_count(EmpiricalModel const& em) {
  unsigned long long n = 1;
  for (auto const& m : em.measurements) {
    auto const k = static_cast<unsigned long long>(m.outcomes.size());
    if (k != 0 && n > std::numeric_limits<unsigned long long>::max() / k) return std::numeric_limits<unsigned long long>::max();
    n *= k;
  }
  return n;
}

inline std::size_t constraint_count(EmpiricalModel const& em) {
  std::size_t n = 1;
  for (auto const& d : em.distributions) n += d.weights.size();
  return n;
}

namespace detail {

/// Positions of each cover element's members in the model measurement list.
inline std::vector<std::vector<std::size_t>> cover_positions(EmpiricalModel const& em) {
  std::vector<std::vector<std::size_t>> out;
  for (auto const& c : em.cover) {
    std::vector<std::size_t> pos;
    for (auto const& id : c) {
      auto it = std::find_if(em.measurements.begin(), em.measurements.end(), [&](auto const& m) { return m.id == id; });
      if (it == em.measurements.end()) throw InputError("cover references unknown measurement '" + id + "'");
      pos.push_back(static_cast<std::size_t>(it - em.measurements.begin()));
    }
    out.push_back(std::move(pos));
  }
  return out;
}

inline std::vector<std::size_t> global_shape(EmpiricalModel const& em) {
  std::vector<std::size_t> shape;
  for (auto const& m : em.measurements) shape.push_back(m.outcomes.size());
  return shape;
}

/// Row index, for every cover element, hit by a global assignment.
inline std::vector<std::size_t> rows_hit(EmpiricalModel const& em, std::vector<std::vector<std::size_t>> const& positions,
                                         GlobalAssignment const& g) {
  std::vector<std::size_t> rows;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < em.cover.size(); ++k) {
    std::vector<std::size_t> digits;
    for (auto p : positions[k]) digits.push_back(g[p]);
    rows.push_back(offset + encode_joint(digits, em.distributions[k].shape));
    offset += em.distributions[k].weights.size();
  }
  return rows;
}

inline std::vector<Rational> right_hand_side(EmpiricalModel const& em) {
  std::vector<Rational> b;
  for (auto const& d : em.distributions) b.insert(b.end(), d.weights.begin(), d.weights.end());
  b.emplace_back(1);
  return b;
}

inline void require_valid(EmpiricalModel const& em) {
  auto const v = validate_empirical(em);
  if (!v.holds) throw ValidationError("invalid empirical model", v);
}

}  // namespace detail

/// Exact marginal of a global section onto cover element `k`.
inline Distribution section_marginal(EmpiricalModel const& em, GlobalSection const& s, std::size_t k) {
  auto const positions = detail::cover_positions(em);
  Distribution d{em.distributions.at(k).shape, std::vector<Rational>(em.distributions.at(k).weights.size())};
  for (auto const& [g, w] : s.weights) {
    std::vector<std::size_t> digits;
    for (auto p : positions[k]) digits.push_back(g[p]);
    d.weights[encode_joint(digits, d.shape)] += w;
  }
  return d;
}

inline bool is_global_section(EmpiricalModel const& em, GlobalSection const& s) {
  Rational total;
  for (auto const& [g, w] : s.weights) {
    if (w.sign() < 0 || g.size() != em.measurements.size()) return false;
    total += w;
  }
  if (total != Rational{1}) return false;
  for (std::size_t k = 0; k < em.cover.size(); ++k)
    if (section_marginal(em, s, k) != em.distributions[k]) return false;
  return true;
}

/// Checks the certificate directly against the section system: for every
/// global assignment the combined coefficient must be >= 0 while the
/// combined right-hand side is < 0. Independent of the solver.
inline bool verify_certificate(EmpiricalModel const& em, FarkasCertificate const& cert) {
  detail::require_valid(em);
  if (cert.multipliers.size() != constraint_count(em))
    throw InputError("certificate has " + std::to_string(cert.multipliers.size()) + " multipliers, expected " +
                     std::to_string(constraint_count(em)));
  auto const b = detail::right_hand_side(em);
  Rational constant;
  for (std::size_t i = 0; i < b.size(); ++i) constant += cert.multipliers[i] * b[i];
  if (constant.sign() >= 0) return false;
  auto const positions = detail::cover_positions(em);
  auto const shape = detail::global_shape(em);
  auto const n = joint_size(shape);
  auto const& norm = cert.multipliers.back();
  for (std::size_t gi = 0; gi < n; ++gi) {
    auto const g = decode_joint(gi, shape);
    Rational coeff = norm;
    for (auto r : detail::rows_hit(em, positions, g)) coeff += cert.multipliers[r];
    if (coeff.sign() < 0) return false;
  }
  return true;
}

/// Decides whether a global section exists by exact phase-one simplex over
/// all global assignments. Returns the section or an infeasibility
/// certificate; never undecided.
inline SectionResult find_global_section(EmpiricalModel const& em, unsigned long long cap = kDefaultSectionCap) {
  detail::require_valid(em);
  auto const consistency = check_consistency(em);
  if (!consistency.holds) throw ValidationError("inconsistent empirical model", consistency);
  auto const n = global_assignment_count(em);
  if (n > cap) throw CapacityError("global section variables", n, cap);

  auto const positions = detail::cover_positions(em);
  auto const shape = detail::global_shape(em);
  auto const b = detail::right_hand_side(em);
  std::vector<std::vector<Rational>> a(b.size(), std::vector<Rational>(n));
  for (std::size_t gi = 0; gi < n; ++gi) {
    auto const g = decode_joint(gi, shape);
    for (auto r : detail::rows_hit(em, positions, g)) a[r][gi] = Rational{1};
    a.back()[gi] = Rational{1};
  }
  auto const result = solve_feasibility(a, b);
  if (result.feasible) {
    GlobalSection s;
    for (std::size_t gi = 0; gi < n; ++gi)
      if (!result.x[gi].is_zero()) s.weights[decode_joint(gi, shape)] = result.x[gi];
    if (!is_global_section(em, s)) throw InvariantError("simplex returned a non-section");
    return s;
  }
  FarkasCertificate cert{result.y};
  if (!verify_certificate(em, cert)) throw InvariantError("simplex returned an invalid certificate");
  return cert;
}

/// Global assignments whose restriction to every cover element has nonzero
/// probability; any global section is supported on these.
inline std::vector<GlobalAssignment> supported_assignments(EmpiricalModel const& em) {
  detail::require_valid(em);
  auto const positions = detail::cover_positions(em);
  auto const shape = detail::global_shape(em);
  auto const b = detail::right_hand_side(em);
  std::vector<GlobalAssignment> out;
  for (std::size_t gi = 0; gi < joint_size(shape); ++gi) {
    auto g = decode_joint(gi, shape);
    auto const rows = detail::rows_hit(em, positions, g);
    if (std::all_of(rows.begin(), rows.end(), [&](auto r) { return !b[r].is_zero(); })) out.push_back(std::move(g));
  }
  return out;
}

/// Independent oracle: prunes global assignments that hit a zero-probability
/// joint outcome, then searches supports of increasing size for an exact
/// nonnegative solution by Gaussian elimination. Any feasible system has a
/// basic solution whose support columns are independent, so the search is
/// complete. `cap` bounds the number of surviving assignments.
inline bool brute_force_section_exists(EmpiricalModel const& em, unsigned long long cap = 16) {
  detail::require_valid(em);
  if (!check_consistency(em).holds) return false;
  auto const positions = detail::cover_positions(em);
  auto const b = detail::right_hand_side(em);
  std::vector<std::vector<std::size_t>> columns;  // rows with a 1, including normalisation
  for (auto const& g : supported_assignments(em)) {
    auto rows = detail::rows_hit(em, positions, g);
    rows.push_back(b.size() - 1);
    columns.push_back(std::move(rows));
  }
  if (columns.size() > cap) throw CapacityError("brute-force section support search", columns.size(), cap);
  if (columns.empty()) return false;

  auto const m = b.size();
  // Solves A_S x = b exactly; true iff consistent, full column rank and x >= 0.
  auto solve_support = [&](std::vector<std::size_t> const& support) {
    auto const k = support.size();
    std::vector<std::vector<Rational>> aug(m, std::vector<Rational>(k + 1));
    for (std::size_t c = 0; c < k; ++c)
      for (auto r : columns[support[c]]) aug[r][c] = Rational{1};
    for (std::size_t r = 0; r < m; ++r) aug[r][k] = b[r];
    std::size_t row = 0;
    std::vector<std::size_t> pivot_row(k);
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t p = row;
      while (p < m && aug[p][c].is_zero()) ++p;
      if (p == m) return false;  // dependent columns: a smaller support covers this
      std::swap(aug[p], aug[row]);
      Rational const piv = aug[row][c];
      for (std::size_t j = c; j <= k; ++j) aug[row][j] /= piv;
      for (std::size_t r = 0; r < m; ++r) {
        if (r == row || aug[r][c].is_zero()) continue;
        Rational const f = aug[r][c];
        for (std::size_t j = c; j <= k; ++j) aug[r][j] -= f * aug[row][j];
      }
      pivot_row[c] = row++;
    }
    for (std::size_t r = row; r < m; ++r)
      if (!aug[r][k].is_zero()) return false;
    for (std::size_t c = 0; c < k; ++c)
      if (aug[pivot_row[c]][k].sign() < 0) return false;
    return true;
  };

  auto const total = columns.size();
  auto const max_size = std::min<std::size_t>(total, m);
  for (std::size_t size = 1; size <= max_size; ++size) {
    std::vector<std::size_t> support(size);
    std::iota(support.begin(), support.end(), 0);
    while (true) {
      if (solve_support(support)) return true;
      // next combination in lexicographic order
      std::size_t i = size;
      while (i > 0 && support[i - 1] == total - size + i - 1) --i;
      if (i == 0) break;
      ++support[i - 1];
      for (std::size_t j = i; j < size; ++j) support[j] = support[j - 1] + 1;
    }
  }
  return false;
}

}  // namespace contextum::sheaf
