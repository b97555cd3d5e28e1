#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace potkit {

// Extended real line with an explicit tag for -inf, +inf and the
// indeterminate outcome of (+inf) + (-inf).  Products use 0 * (+-inf) = 0.
class ExtReal {
 public:
  enum class Kind : std::uint8_t { Finite, NegInf, PosInf, Indeterminate };

  constexpr ExtReal() = default;
  // NOLINTNEXTLINE(google-explicit-constructor)
  ExtReal(double v) {
    if (std::isnan(v)) {
      kind_ = Kind::Indeterminate;
    } else if (std::isinf(v)) {
      kind_ = v > 0 ? Kind::PosInf : Kind::NegInf;
    } else {
      v_ = v;
    }
  }

  static ExtReal neg_inf() { return ExtReal(Kind::NegInf); }
  static ExtReal pos_inf() { return ExtReal(Kind::PosInf); }
  static ExtReal indeterminate() { return ExtReal(Kind::Indeterminate); }

  Kind kind() const { return kind_; }
  bool finite() const { return kind_ == Kind::Finite; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool indeterminate_value() const { return kind_ == Kind::Indeterminate; }

  // Finite value; throws for anything else.
  double value() const;
  // IEEE view: +-inf for the infinities, NaN for indeterminate.
  double to_double() const;

  ExtReal operator-() const;
  ExtReal& operator+=(const ExtReal& o);
  ExtReal& operator-=(const ExtReal& o) { return *this += -o; }
  ExtReal& operator*=(double s);

  friend ExtReal operator+(ExtReal a, const ExtReal& b) { return a += b; }
  friend ExtReal operator-(ExtReal a, const ExtReal& b) { return a -= b; }
  friend ExtReal operator*(ExtReal a, double s) { return a *= s; }
  friend ExtReal operator*(double s, ExtReal a) { return a *= s; }

  // Partial order; indeterminate compares unordered with everything.
  friend std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b);
  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    return (a <=> b) == std::partial_ordering::equivalent;
  }

  std::string str() const;

 private:
  explicit constexpr ExtReal(Kind k) : kind_(k) {}
  Kind kind_ = Kind::Finite;
  double v_ = 0.0;
};

std::ostream& operator<<(std::ostream& os, const ExtReal& x);

ExtReal max(const ExtReal& a, const ExtReal& b);
ExtReal min(const ExtReal& a, const ExtReal& b);

}  // namespace potkit
