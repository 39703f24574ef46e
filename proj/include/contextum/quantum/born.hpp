#pragma once

#include <vector>

#include "contextum/quantum/linalg.hpp"
#include "contextum/quantum/state.hpp"
#include "contextum/verdict.hpp"

namespace contextum::quantum {

namespace detail {

/// Tr(rho M) without forming the product.
inline GaussianRational trace_product(Matrix const& rho, Matrix const& m) {
  GaussianRational t;
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t k = 0; k < rho.dim(); ++k) {
      auto const& a = rho(i, k);
      auto const& b = m(k, i);
      if (!a.is_zero() && !b.is_zero()) t += a * b;
    }
  return t;
}

inline Rational real_probability(GaussianRational const& t) {
  if (!t.is_real()) throw InvariantError("Born trace has nonzero imaginary part " + t.str());
  if (t.re.sign() < 0 || t.re > Rational{1}) throw InvariantError("Born probability " + t.re.str() + " outside [0,1]");
  return t.re;
}

}  // namespace detail

/// Tr(rho P).
inline Rational born(DensityOperator const& state, Matrix const& projection) {
  if (state.dim() != projection.dim()) throw InputError("state and projection dimensions differ");
  return detail::real_probability(detail::trace_product(state.matrix, projection));
}

/// Tr(rho P_1 P_2 ... P_k) for pairwise commuting projections.
inline Rational joint_born(DensityOperator const& state, std::vector<Matrix> const& projections) {
  if (projections.empty()) return Rational{1};
  for (auto const& p : projections)
    if (p.dim() != state.dim()) throw InputError("state and projection dimensions differ");
  for (std::size_t i = 0; i < projections.size(); ++i)
    for (std::size_t j = i + 1; j < projections.size(); ++j)
      if (!commute(projections[i], projections[j])) throw InputError("joint Born rule needs commuting projections");
  Matrix product = projections.front();
  for (std::size_t i = 1; i < projections.size(); ++i) product = product * projections[i];
  return detail::real_probability(detail::trace_product(state.matrix, product));
}

}  // namespace contextum::quantum
