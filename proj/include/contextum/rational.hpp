#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace contextum {

/// Exact rational number, always kept in lowest terms with a positive
/// denominator. Thin value wrapper over GMP so that no arithmetic can
/// overflow.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(int value) : value_(value) {}   // NOLINT(google-explicit-constructor)
  Rational(long numerator, long denominator) {
    if (denominator == 0) throw std::domain_error("rational with zero denominator");
    value_ = mpq_class(mpz_class(numerator), mpz_class(denominator));
    value_.canonicalize();
  }
  explicit Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

  /// Parses "p", "-p" or "p/q" (integers of any size). Whitespace is not
  /// accepted.
  static Rational parse(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty rational");
    auto const slash = text.find('/');
    auto const check_int = [&](std::string_view part, bool allow_sign) {
      std::size_t i = 0;
      if (allow_sign && !part.empty() && (part[0] == '-' || part[0] == '+')) i = 1;
      if (i == part.size()) throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
      for (; i < part.size(); ++i) {
        if (part[i] < '0' || part[i] > '9') {
          throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
        }
      }
    };
    std::string_view num = text.substr(0, slash);
    check_int(num, true);
    std::string num_str(num.front() == '+' ? num.substr(1) : num);
    mpz_class n(num_str, 10);
    mpz_class d(1);
    if (slash != std::string_view::npos) {
      std::string_view den = text.substr(slash + 1);
      check_int(den, false);
      d = mpz_class(std::string(den), 10);
      if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    }
    return Rational(mpq_class(n, d));
  }

  [[nodiscard]] std::string str() const {
    if (value_.get_den() == 1) return value_.get_num().get_str();
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
  }

  [[nodiscard]] mpz_class numerator() const { return value_.get_num(); }
  [[nodiscard]] mpz_class denominator() const { return value_.get_den(); }
  [[nodiscard]] mpq_class const& raw() const { return value_; }

  [[nodiscard]] int sign() const { return sgn(value_); }
  [[nodiscard]] bool is_zero() const { return sgn(value_) == 0; }
  [[nodiscard]] double to_double() const { return value_.get_d(); }

  Rational& operator+=(Rational const& o) { value_ += o.value_; return *this; }
  Rational& operator-=(Rational const& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(Rational const& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(Rational const& o) {
    if (o.is_zero()) throw std::domain_error("rational division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend Rational operator+(Rational a, Rational const& b) { return a += b; }
  friend Rational operator-(Rational a, Rational const& b) { return a -= b; }
  friend Rational operator*(Rational a, Rational const& b) { return a *= b; }
  friend Rational operator/(Rational a, Rational const& b) { return a /= b; }
  friend Rational operator-(Rational const& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(Rational const& a, Rational const& b) { return cmp(a.value_, b.value_) == 0; }
  friend std::strong_ordering operator<=>(Rational const& a, Rational const& b) {
    int const c = cmp(a.value_, b.value_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, Rational const& r) { return os << r.str(); }

 private:
  mpq_class value_{0};
};

inline Rational abs(Rational const& r) { return r.sign() < 0 ? -r : r; }

}  // namespace contextum

template <>
struct std::hash<contextum::Rational> {
  std::size_t operator()(contextum::Rational const& r) const noexcept {
    return std::hash<std::string>{}(r.str());
  }
};
