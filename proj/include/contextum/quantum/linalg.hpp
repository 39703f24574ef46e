#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "contextum/rational.hpp"
#include "contextum/verdict.hpp"

namespace contextum::quantum {

/// Complex number with rational real and imaginary parts.
struct GaussianRational {
  Rational re;
  Rational im;

  GaussianRational() = default;
  GaussianRational(Rational r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(long r) : re(r) {}                 // NOLINT(google-explicit-constructor)
  GaussianRational(int r) : re(r) {}                  // NOLINT(google-explicit-constructor)
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static GaussianRational i() { return {Rational{0}, Rational{1}}; }

  [[nodiscard]] GaussianRational conj() const { return {re, -im}; }
  [[nodiscard]] bool is_zero() const { return re.is_zero() && im.is_zero(); }
  [[nodiscard]] bool is_real() const { return im.is_zero(); }

  GaussianRational& operator+=(GaussianRational const& o) { re += o.re; im += o.im; return *this; }
  GaussianRational& operator-=(GaussianRational const& o) { re -= o.re; im -= o.im; return *this; }
  GaussianRational& operator*=(GaussianRational const& o) {
    Rational r = re * o.re - im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  GaussianRational& operator/=(GaussianRational const& o) {
    Rational const n = o.re * o.re + o.im * o.im;
    if (n.is_zero()) throw std::domain_error("division by zero");
    *this *= o.conj();
    re /= n;
    im /= n;
    return *this;
  }
  friend GaussianRational operator+(GaussianRational a, GaussianRational const& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, GaussianRational const& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, GaussianRational const& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, GaussianRational const& b) { return a /= b; }
  friend GaussianRational operator-(GaussianRational const& a) { return {-a.re, -a.im}; }
  friend bool operator==(GaussianRational const&, GaussianRational const&) = default;

  /// Canonical text: "re" when real, otherwise "re+im i" / "re-im i".
  [[nodiscard]] std::string str() const {
    if (im.is_zero()) return re.str();
    return re.str() + (im.sign() < 0 ? "-" : "+") + abs(im).str() + " i";
  }

  /// Accepts "a/b", "a/b+c/d i", "a/b-c/d i", "c/d i", "i", "-i" with
  /// optional spaces.
  static GaussianRational parse(std::string_view text) {
    std::string s;
    for (char ch : text)
      if (ch != ' ') s += ch;
    if (s.empty()) throw std::invalid_argument("empty complex number");
    if (s.back() != 'i') return {Rational::parse(s), Rational{0}};
    s.pop_back();
    // Find the sign separating the real and imaginary parts (not a leading sign).
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
      if (s[k] == '+' || s[k] == '-') {
        split = k;
        break;
      }
    }
    auto const imag_of = [](std::string part) {
      if (part.empty() || part == "+") return Rational{1};
      if (part == "-") return Rational{-1};
      return Rational::parse(part);
    };
    if (split == std::string::npos) return {Rational{0}, imag_of(s)};
    return {Rational::parse(s.substr(0, split)), imag_of(s.substr(split))};
  }
};

inline std::ostream& operator<<(std::ostream& os, GaussianRational const& z) { return os << z.str(); }

using Vector = std::vector<GaussianRational>;

/// Dense square matrix over the Gaussian rationals, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}
  Matrix(std::size_t dim, std::vector<GaussianRational> entries) : dim_(dim), entries_(std::move(entries)) {
    if (entries_.size() != dim_ * dim_) throw InputError("matrix entry count does not match dimension");
  }

  static Matrix identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = Rational{1};
    return m;
  }

  /// |v><v|
  static Matrix outer(Vector const& v) {
    Matrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * v[j].conj();
    return m;
  }

  [[nodiscard]] std::size_t dim() const { return dim_; }
  GaussianRational& operator()(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
  GaussianRational const& operator()(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }
  [[nodiscard]] std::vector<GaussianRational> const& entries() const { return entries_; }

  [[nodiscard]] Matrix adjoint() const {
    Matrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(j, i).conj();
    return m;
  }

  [[nodiscard]] GaussianRational trace() const {
    GaussianRational t;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  [[nodiscard]] bool is_zero() const {
    for (auto const& e : entries_)
      if (!e.is_zero()) return false;
    return true;
  }

  [[nodiscard]] bool is_self_adjoint() const { return *this == adjoint(); }

  Matrix& operator+=(Matrix const& o) {
    require_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }
  Matrix& operator-=(Matrix const& o) {
    require_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
  }
  Matrix& operator*=(GaussianRational const& s) {
    for (auto& e : entries_) e *= s;
    return *this;
  }
  friend Matrix operator+(Matrix a, Matrix const& b) { return a += b; }
  friend Matrix operator-(Matrix a, Matrix const& b) { return a -= b; }
  friend Matrix operator*(Matrix a, GaussianRational const& s) { return a *= s; }
  friend Matrix operator*(GaussianRational const& s, Matrix a) { return a *= s; }

  friend Matrix operator*(Matrix const& a, Matrix const& b) {
    a.require_same(b);
    Matrix m(a.dim_);
    for (std::size_t i = 0; i < a.dim_; ++i)
      for (std::size_t k = 0; k < a.dim_; ++k) {
        auto const& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < a.dim_; ++j) {
          auto const& bkj = b(k, j);
          if (!bkj.is_zero()) m(i, j) += aik * bkj;
        }
      }
    return m;
  }

  friend bool operator==(Matrix const&, Matrix const&) = default;

 private:
  void require_same(Matrix const& o) const {
    if (dim_ != o.dim_) {
      throw InputError("matrix dimension mismatch: " + std::to_string(dim_) + " vs " + std::to_string(o.dim_));
    }
  }

  std::size_t dim_ = 0;
  std::vector<GaussianRational> entries_;
};

/// Kronecker product a (x) b.
inline Matrix kron(Matrix const& a, Matrix const& b) {
  std::size_t const n = a.dim() * b.dim();
  Matrix m(n);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      for (std::size_t k = 0; k < b.dim(); ++k)
        for (std::size_t l = 0; l < b.dim(); ++l) m(i * b.dim() + k, j * b.dim() + l) = a(i, j) * b(k, l);
  return m;
}

inline bool commute(Matrix const& a, Matrix const& b) { return a * b == b * a; }

namespace pauli {

inline Matrix I() { return Matrix::identity(2); }
inline Matrix X() { return Matrix(2, {0, 1, 1, 0}); }
inline Matrix Y() {
  auto const i = GaussianRational::i();
  return Matrix(2, {0, -i, i, 0});
}
inline Matrix Z() { return Matrix(2, {1, 0, 0, -1}); }

}  // namespace pauli

}  // namespace contextum::quantum
