#pragma once

#include <string>
#include <vector>

#include "contextum/quantum/linalg.hpp"
#include "contextum/verdict.hpp"

namespace contextum::quantum {

/// Exact positivity certificate rho = sum_k w_k |v_k><v_k| with w_k >= 0.
/// A weighted Gram form is needed because e.g. I/2 has no factorisation
/// B^dagger B with rational B.
struct PsdCertificate {
  std::vector<Rational> weights;
  std::vector<Vector> vectors;

  [[nodiscard]] Matrix expand(std::size_t dim) const {
    Matrix m(dim);
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      if (vectors[k].size() != dim) throw InputError("certificate vector has wrong dimension");
      m += Matrix::outer(vectors[k]) * GaussianRational(weights[k]);
    }
    return m;
  }

  friend bool operator==(PsdCertificate const&, PsdCertificate const&) = default;
};

struct DensityOperator {
  Matrix matrix;
  PsdCertificate certificate;

  [[nodiscard]] std::size_t dim() const { return matrix.dim(); }

  static DensityOperator from_certificate(PsdCertificate cert, std::size_t dim) {
    auto m = cert.expand(dim);
    return {std::move(m), std::move(cert)};
  }

  /// |psi><psi| for a unit vector with rational amplitudes.
  static DensityOperator pure(Vector psi) {
    auto const n = psi.size();
    return from_certificate({{Rational{1}}, {std::move(psi)}}, n);
  }

  /// I/n, certified by the computational basis.
  static DensityOperator maximally_mixed(std::size_t n) {
    PsdCertificate cert;
    for (std::size_t i = 0; i < n; ++i) {
      Vector e(n);
      e[i] = Rational{1};
      cert.weights.push_back(Rational(1, static_cast<long>(n)));
      cert.vectors.push_back(std::move(e));
    }
    return from_certificate(std::move(cert), n);
  }

  static DensityOperator basis_state(std::size_t n, std::size_t index) {
    Vector e(n);
    e.at(index) = Rational{1};
    return pure(std::move(e));
  }

  friend bool operator==(DensityOperator const&, DensityOperator const&) = default;
};

inline Verdict validate_state(DensityOperator const& rho, std::string const& id) {
  std::vector<Witness> out;
  if (!rho.matrix.is_self_adjoint()) out.push_back({"not-self-adjoint", {}, id, "", {}, {}, "rho != rho^dagger"});
  auto const tr = rho.matrix.trace();
  if (!(tr == GaussianRational(Rational{1}))) out.push_back({"trace", {}, id, "", tr.re, Rational{1}, "trace must be 1"});
  auto const& cert = rho.certificate;
  if (cert.weights.size() != cert.vectors.size()) {
    out.push_back({"certificate-shape", {}, id, "", {}, {}, "weights and vectors differ in count"});
  } else {
    bool shape_ok = true;
    for (auto const& w : cert.weights)
      if (w.sign() < 0) out.push_back({"certificate-weight", {}, id, "", w, Rational{0}, "negative weight"});
    for (auto const& v : cert.vectors)
      if (v.size() != rho.dim()) shape_ok = false;
    if (!shape_ok) {
      out.push_back({"certificate-shape", {}, id, "", {}, {}, "certificate vector dimension"});
    } else if (!(cert.expand(rho.dim()) == rho.matrix)) {
      out.push_back({"certificate-mismatch", {}, id, "", {}, {}, "sum w_k v_k v_k^dagger != rho"});
    }
  }
  return make_verdict(std::move(out));
}

}  // namespace contextum::quantum
