#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "contextum/rational.hpp"

namespace contextum {

/// Malformed or mismatched input handed to an operation.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive search or solver would exceed its configured cap.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(std::string const& what, unsigned long long required, unsigned long long cap)
      : std::runtime_error(what + ": " + std::to_string(required) + " exceeds cap " + std::to_string(cap)),
        required_(required),
        cap_(cap) {}
  [[nodiscard]] unsigned long long required() const { return required_; }
  [[nodiscard]] unsigned long long cap() const { return cap_; }

 private:
  unsigned long long required_;
  unsigned long long cap_;
};

/// A broken internal invariant (e.g. a complex trace where a real one is
/// guaranteed).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr unsigned long long kDefaultEnumerationCap = 1ULL << 24;
inline constexpr unsigned long long kDefaultSectionCap = 1ULL << 20;

/// One violation record. `measurements` names the keys involved (each a
/// key label such as "A11&A12"), `subject` the preparation or ontic state.
struct Witness {
  std::string kind;
  std::vector<std::string> measurements;
  std::string subject;
  std::string outcome;
  std::optional<Rational> lhs;
  std::optional<Rational> rhs;
  std::string detail;

  friend bool operator==(Witness const&, Witness const&) = default;
};

inline bool canonical_less(Witness const& a, Witness const& b) {
  return std::tie(a.measurements, a.subject, a.outcome, a.kind, a.detail) <
         std::tie(b.measurements, b.subject, b.outcome, b.kind, b.detail);
}

namespace flags {
inline constexpr char const* kVacuous = "vacuous";
inline constexpr char const* kDisturbing = "theory-is-disturbing";
}  // namespace flags

struct Verdict {
  bool holds = true;
  std::vector<Witness> witnesses;
  std::set<std::string> flags;

  [[nodiscard]] bool has_flag(std::string const& f) const { return flags.contains(f); }
  friend bool operator==(Verdict const&, Verdict const&) = default;
};

/// Builds a verdict in canonical form: witnesses sorted and de-duplicated,
/// `holds` derived from emptiness.
inline Verdict make_verdict(std::vector<Witness> witnesses, std::set<std::string> flag_set = {}) {
  std::sort(witnesses.begin(), witnesses.end(), canonical_less);
  witnesses.erase(std::unique(witnesses.begin(), witnesses.end()), witnesses.end());
  Verdict v;
  v.holds = witnesses.empty();
  v.witnesses = std::move(witnesses);
  v.flags = std::move(flag_set);
  return v;
}

/// Thrown by constructors that require a valid object; carries the verdict.
class ValidationError : public InputError {
 public:
  ValidationError(std::string const& what, Verdict verdict)
      : InputError(what + describe(verdict)), verdict_(std::move(verdict)) {}
  [[nodiscard]] Verdict const& verdict() const { return verdict_; }

 private:
  static std::string describe(Verdict const& v) {
    if (v.witnesses.empty()) return {};
    auto const& w = v.witnesses.front();
    std::string s = ": " + w.kind;
    for (auto const& m : w.measurements) s += " " + m;
    if (!w.subject.empty()) s += " [" + w.subject + "]";
    if (!w.detail.empty()) s += " (" + w.detail + ")";
    return s;
  }
  Verdict verdict_;
};

}  // namespace contextum
