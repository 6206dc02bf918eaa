#pragma once

#include <cmath>
#include <compare>
#include <cstdio>
#include <limits>
#include <string>

#include "scoring/error.hpp"

namespace scoring {

/// A value in [-inf, +inf) restricted to finite reals and negative infinity.
///
/// Negative infinity is a distinguished value: it is only ever produced by
/// neg_inf(), by from_double(-inf) when parsing, or by arithmetic that already
/// involves it. Finite arithmetic that overflows raises ErrorKind::Overflow.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;

  ExtendedReal(double v) : value_(v) {  // NOLINT(google-explicit-constructor)
    if (!std::isfinite(v)) {
      fail(ErrorKind::BadInput, "ExtendedReal from a non-finite double; use neg_inf()");
    }
  }

  static constexpr ExtendedReal neg_inf() {
    ExtendedReal r;
    r.value_ = -std::numeric_limits<double>::infinity();
    return r;
  }

  /// Accepts finite values and -inf. NaN and +inf are rejected.
  static ExtendedReal from_double(double v) {
    if (v == -std::numeric_limits<double>::infinity()) return neg_inf();
    return ExtendedReal(v);
  }

  constexpr bool is_finite() const { return value_ != -std::numeric_limits<double>::infinity(); }
  constexpr bool is_neg_inf() const { return !is_finite(); }

  /// The finite value. Throws on -inf.
  double value() const {
    if (!is_finite()) fail(ErrorKind::DomainViolation, "value() of -inf");
    return value_;
  }

  /// IEEE encoding (-inf for the infinite value).
  constexpr double raw() const { return value_; }

  friend constexpr auto operator<=>(ExtendedReal a, ExtendedReal b) { return a.value_ <=> b.value_; }
  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) { return a.value_ == b.value_; }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.is_neg_inf() || b.is_neg_inf()) return neg_inf();
    return checked(a.value_ + b.value_);
  }

  friend ExtendedReal operator-(ExtendedReal a, double b) {
    if (a.is_neg_inf()) return neg_inf();
    return checked(a.value_ - b);
  }

  ExtendedReal& operator+=(ExtendedReal other) { return *this = *this + other; }

  /// Product with a non-negative weight under the stipulation a*0 = 0*a = 0.
  ExtendedReal times(double weight) const {
    if (weight == 0.0) return ExtendedReal{};
    if (weight < 0.0) fail(ErrorKind::DomainViolation, "extended product with a negative weight");
    if (is_neg_inf()) return neg_inf();
    return checked(value_ * weight);
  }

  std::string to_string() const {
    if (is_neg_inf()) return "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value_);
    return buf;
  }

 private:
  static ExtendedReal checked(double v) {
    if (!std::isfinite(v)) fail(ErrorKind::Overflow, "finite arithmetic overflowed");
    return ExtendedReal(v);
  }

  double value_ = 0.0;
};

inline constexpr ExtendedReal kNegInf = ExtendedReal::neg_inf();

}  // namespace scoring
