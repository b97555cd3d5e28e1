#include "potkit/point.hpp"

#include <sstream>

#include "potkit/errors.hpp"

namespace potkit {

Point::Point(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw PreconditionError("point dimension out of range");
}

Point::Point(std::initializer_list<double> coords) : dim_(static_cast<int>(coords.size())) {
  if (dim_ < 1 || dim_ > kMaxDim) throw PreconditionError("point dimension out of range");
  int i = 0;
  for (double v : coords) c_[static_cast<std::size_t>(i++)] = v;
}

Point Point::unit(int dim, int axis, double scale) {
  Point p(dim);
  p[axis] = scale;
  return p;
}

double Point::norm2() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += c_[i] * c_[i];
  return s;
}

double Point::dot(const Point& o) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += c_[i] * o.c_[i];
  return s;
}

Point& Point::operator+=(const Point& o) {
  for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
  return *this;
}

Point& Point::operator*=(double s) {
  for (int i = 0; i < dim_; ++i) c_[i] *= s;
  return *this;
}

bool operator==(const Point& a, const Point& b) {
  if (a.dim_ != b.dim_) return false;
  for (int i = 0; i < a.dim_; ++i)
    if (a.c_[i] != b.c_[i]) return false;
  return true;
}

std::string Point::str() const {
  std::ostringstream os;
  os.precision(10);
  os << '(';
  for (int i = 0; i < dim_; ++i) os << (i ? ", " : "") << c_[i];
  os << ')';
  return os.str();
}

const Point& ExtPoint::point() const {
  if (inf_) throw DomainError("point at infinity has no coordinates");
  return p_;
}

}  // namespace potkit
