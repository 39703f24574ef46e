#pragma once

#include <set>
#include <string>
#include <vector>

#include "contextum/quantum/linalg.hpp"
#include "contextum/verdict.hpp"

namespace contextum::quantum {

/// Outcome label for an eigenvalue: "+1", "-1", "0", "+1/2", ...
inline std::string eigenvalue_label(Rational const& x) {
  return x.sign() > 0 ? "+" + x.str() : x.str();
}

/// A sharp measurement given by labelled, mutually orthogonal projections
/// that resolve the identity. The common currency between observables and
/// the measurements an operational theory is generated from.
struct ProjectiveMeasurement {
  std::string id;
  std::vector<std::string> outcomes;
  std::vector<Matrix> projections;
};

/// A self-adjoint operator supplied together with its spectral
/// decomposition sum_i x_i P_i.
struct SpectralObservable {
  std::string id;
  std::vector<Rational> eigenvalues;
  std::vector<Matrix> projections;

  [[nodiscard]] std::size_t dim() const { return projections.empty() ? 0 : projections.front().dim(); }

  /// The operator sum_i x_i P_i.
  [[nodiscard]] Matrix matrix() const {
    Matrix m(dim());
    for (std::size_t i = 0; i < projections.size(); ++i) m += projections[i] * GaussianRational(eigenvalues[i]);
    return m;
  }

  [[nodiscard]] std::vector<std::string> outcome_labels() const {
    std::vector<std::string> out;
    for (auto const& x : eigenvalues) out.push_back(eigenvalue_label(x));
    return out;
  }

  [[nodiscard]] ProjectiveMeasurement as_measurement() const { return {id, outcome_labels(), projections}; }

  /// Observable with spectrum {+1, -1} and projections (I +- O)/2, for an
  /// involution O (O^2 = I), e.g. a tensor product of Paulis.
  static SpectralObservable from_involution(std::string id, Matrix const& op) {
    auto const id_m = Matrix::identity(op.dim());
    GaussianRational const half(Rational(1, 2));
    return {std::move(id), {Rational{1}, Rational{-1}}, {(id_m + op) * half, (id_m - op) * half}};
  }

  friend bool operator==(SpectralObservable const&, SpectralObservable const&) = default;
};

namespace detail {

inline std::vector<Witness> projection_witnesses(std::string const& id, std::vector<std::string> const& labels,
                                                 std::vector<Matrix> const& projections) {
  std::vector<Witness> out;
  if (projections.empty()) {
    out.push_back({"empty-spectrum", {id}, "", "", {}, {}, "no projections"});
    return out;
  }
  auto const n = projections.front().dim();
  for (auto const& p : projections)
    if (p.dim() != n) throw InputError("projections of '" + id + "' have different dimensions");
  Matrix sum(n);
  for (std::size_t i = 0; i < projections.size(); ++i) {
    auto const& p = projections[i];
    if (!p.is_self_adjoint()) out.push_back({"not-self-adjoint", {id}, "", labels[i], {}, {}, "P != P^dagger"});
    if (!(p * p == p)) out.push_back({"not-idempotent", {id}, "", labels[i], {}, {}, "P != P^2"});
    if (p.is_zero()) out.push_back({"zero-projection", {id}, "", labels[i], {}, {}, "eigenvalue has an empty eigenspace"});
    for (std::size_t j = i + 1; j < projections.size(); ++j)
      if (!(p * projections[j]).is_zero())
        out.push_back({"not-orthogonal", {id}, "", labels[i] + "," + labels[j], {}, {}, "P_i P_j != 0"});
    sum += p;
  }
  if (!(sum == Matrix::identity(n))) out.push_back({"incomplete", {id}, "", "", {}, {}, "projections do not sum to identity"});
  return out;
}

}  // namespace detail

inline Verdict validate_spectral(SpectralObservable const& obs) {
  if (obs.eigenvalues.size() != obs.projections.size())
    throw InputError("observable '" + obs.id + "' has " + std::to_string(obs.eigenvalues.size()) +
                     " eigenvalues but " + std::to_string(obs.projections.size()) + " projections");
  auto witnesses = detail::projection_witnesses(obs.id, obs.outcome_labels(), obs.projections);
  std::set<Rational> seen;
  for (auto const& x : obs.eigenvalues)
    if (!seen.insert(x).second) witnesses.push_back({"repeated-eigenvalue", {obs.id}, "", eigenvalue_label(x), {}, {}, ""});
  return make_verdict(std::move(witnesses));
}

inline Verdict validate_projective(ProjectiveMeasurement const& m) {
  if (m.outcomes.size() != m.projections.size())
    throw InputError("measurement '" + m.id + "' has mismatched outcomes and projections");
  auto witnesses = detail::projection_witnesses(m.id, m.outcomes, m.projections);
  std::set<std::string> seen;
  for (auto const& o : m.outcomes)
    if (!seen.insert(o).second) witnesses.push_back({"duplicate-outcome", {m.id}, "", o, {}, {}, ""});
  return make_verdict(std::move(witnesses));
}

/// Exact commutation of the two operators.
inline bool commute(SpectralObservable const& a, SpectralObservable const& b) {
  if (a.dim() != b.dim()) throw InputError("cannot compare observables of different dimension");
  return commute(a.matrix(), b.matrix());
}

/// Two projective measurements commute iff all their projections commute.
inline bool commute(ProjectiveMeasurement const& a, ProjectiveMeasurement const& b) {
  for (auto const& p : a.projections)
    for (auto const& q : b.projections) {
      if (p.dim() != q.dim()) throw InputError("cannot compare measurements of different dimension");
      if (!commute(p, q)) return false;
    }
  return true;
}

}  // namespace contextum::quantum
