#include "potkit/ext_real.hpp"

#include <limits>
#include <ostream>
#include <sstream>

#include "potkit/errors.hpp"

namespace potkit {

double ExtReal::value() const {
  if (kind_ != Kind::Finite) throw NumericError("ExtReal::value on non-finite " + str());
  return v_;
}

double ExtReal::to_double() const {
  switch (kind_) {
    case Kind::Finite: return v_;
    case Kind::NegInf: return -std::numeric_limits<double>::infinity();
    case Kind::PosInf: return std::numeric_limits<double>::infinity();
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

ExtReal ExtReal::operator-() const {
  switch (kind_) {
    case Kind::Finite: return ExtReal(-v_);
    case Kind::NegInf: return pos_inf();
    case Kind::PosInf: return neg_inf();
    default: return indeterminate();
  }
}

ExtReal& ExtReal::operator+=(const ExtReal& o) {
  if (kind_ == Kind::Indeterminate || o.kind_ == Kind::Indeterminate) {
    *this = indeterminate();
  } else if (kind_ == Kind::Finite && o.kind_ == Kind::Finite) {
    v_ += o.v_;
  } else if (kind_ == Kind::Finite) {
    *this = o;
  } else if (o.kind_ != Kind::Finite && o.kind_ != kind_) {
    *this = indeterminate();
  }
  return *this;
}

ExtReal& ExtReal::operator*=(double s) {
  if (kind_ == Kind::Finite) {
    v_ *= s;
  } else if (kind_ != Kind::Indeterminate) {
    if (s == 0.0) {
      *this = ExtReal(0.0);
    } else if (s < 0.0) {
      *this = -*this;
    }
  }
  return *this;
}

std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
  using K = ExtReal::Kind;
  if (a.kind_ == K::Indeterminate || b.kind_ == K::Indeterminate) {
    return std::partial_ordering::unordered;
  }
  auto rank = [](K k) { return k == K::NegInf ? 0 : (k == K::Finite ? 1 : 2); };
  if (a.kind_ == K::Finite && b.kind_ == K::Finite) return a.v_ <=> b.v_;
  return rank(a.kind_) <=> rank(b.kind_);
}

std::string ExtReal::str() const {
  switch (kind_) {
    case Kind::NegInf: return "-inf";
    case Kind::PosInf: return "+inf";
    case Kind::Indeterminate: return "indeterminate";
    default: {
      std::ostringstream os;
      os.precision(17);
      os << v_;
      return os.str();
    }
  }
}

std::ostream& operator<<(std::ostream& os, const ExtReal& x) { return os << x.str(); }

ExtReal max(const ExtReal& a, const ExtReal& b) {
  if (a.indeterminate_value() || b.indeterminate_value()) return ExtReal::indeterminate();
  return a < b ? b : a;
}

ExtReal min(const ExtReal& a, const ExtReal& b) {
  if (a.indeterminate_value() || b.indeterminate_value()) return ExtReal::indeterminate();
  return b < a ? b : a;
}

}  // namespace potkit
