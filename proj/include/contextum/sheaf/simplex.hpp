#pragma once

#include <optional>
#include <vector>

#include "contextum/rational.hpp"
#include "contextum/verdict.hpp"

namespace contextum::sheaf {

/// Result of deciding { x : A x = b, x >= 0 }.
struct FeasibilityResult {
  bool feasible = false;
  std::vector<Rational> x;  ///< a basic feasible solution when feasible
  std::vector<Rational> y;  ///< Farkas ray when infeasible: y^T A >= 0, y^T b < 0
  std::size_t pivots = 0;
};

/// Exact phase-one simplex with Bland's rule. Deterministic and
/// single-threaded; every step is in exact rational arithmetic.
class PhaseOneSimplex {
 public:
  PhaseOneSimplex(std::vector<std::vector<Rational>> const& a, std::vector<Rational> const& b)
      : rows_(a.size()), cols_(rows_ ? a.front().size() : 0), flip_(rows_, 1) {
    for (auto const& row : a)
      if (row.size() != cols_) throw InputError("constraint matrix rows differ in length");
    if (b.size() != rows_) throw InputError("right-hand side length mismatch");
    width_ = cols_ + rows_ + 1;
    tableau_.assign((rows_ + 1) * width_, Rational{});
    basis_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (b[i].sign() < 0) flip_[i] = -1;
      Rational const f{flip_[i]};
      for (std::size_t j = 0; j < cols_; ++j)
        if (!a[i][j].is_zero()) at(i, j) = a[i][j] * f;
      at(i, cols_ + i) = Rational{1};
      rhs(i) = b[i] * f;
      basis_[i] = cols_ + i;
    }
    // Reduced costs of the phase-one objective (sum of artificials).
    for (std::size_t j = 0; j < cols_; ++j) {
      Rational s;
      for (std::size_t i = 0; i < rows_; ++i) s -= at(i, j);
      at(rows_, j) = s;
    }
    Rational obj;
    for (std::size_t i = 0; i < rows_; ++i) obj -= rhs(i);
    rhs(rows_) = obj;  // holds -objective
  }

  FeasibilityResult solve() {
    FeasibilityResult r;
    while (true) {
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < cols_ + rows_; ++j)
        if (at(rows_, j).sign() < 0) {
          entering = j;
          break;
        }
      if (!entering) break;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < rows_; ++i) {
        auto const& aij = at(i, *entering);
        if (aij.sign() <= 0) continue;
        Rational ratio = rhs(i) / aij;
        if (!leave || ratio < best || (ratio == best && basis_[i] < basis_[*leave])) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (!leave) throw InvariantError("phase-one objective is bounded below; unbounded ray impossible");
      pivot(*leave, *entering);
      ++r.pivots;
    }
    r.feasible = rhs(rows_).is_zero();
    if (r.feasible) {
      r.x.assign(cols_, Rational{});
      for (std::size_t i = 0; i < rows_; ++i)
        if (basis_[i] < cols_) r.x[basis_[i]] = rhs(i);
    } else {
      // y = c_B^T B^{-1}; B^{-1} sits in the artificial columns. The ray is -y
      // mapped back through the row sign flips.
      r.y.assign(rows_, Rational{});
      for (std::size_t k = 0; k < rows_; ++k) {
        Rational yk;
        for (std::size_t i = 0; i < rows_; ++i)
          if (basis_[i] >= cols_) yk += at(i, cols_ + k);
        r.y[k] = -yk * Rational{flip_[k]};
      }
    }
    return r;
  }

 private:
  Rational& at(std::size_t i, std::size_t j) { return tableau_[i * width_ + j]; }
  Rational& rhs(std::size_t i) { return tableau_[i * width_ + width_ - 1]; }

  void pivot(std::size_t row, std::size_t col) {
    Rational const p = at(row, col);
    for (std::size_t j = 0; j < width_; ++j)
      if (!tableau_[row * width_ + j].is_zero()) tableau_[row * width_ + j] /= p;
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < width_; ++j)
      if (!tableau_[row * width_ + j].is_zero()) nz.push_back(j);
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == row) continue;
      Rational const f = at(i, col);
      if (f.is_zero()) continue;
      for (auto j : nz) tableau_[i * width_ + j] -= f * tableau_[row * width_ + j];
    }
    basis_[row] = col;
  }

  std::size_t rows_;
  std::size_t cols_;
  std::size_t width_ = 0;
  std::vector<int> flip_;
  std::vector<Rational> tableau_;
  std::vector<std::size_t> basis_;
};

inline FeasibilityResult solve_feasibility(std::vector<std::vector<Rational>> const& a, std::vector<Rational> const& b) {
  return PhaseOneSimplex(a, b).solve();
}

}  // namespace contextum::sheaf
