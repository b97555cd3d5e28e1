#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <string>

namespace potkit {

inline constexpr int kMaxDim = 8;

// Point of R^d with inline storage, 1 <= d <= kMaxDim.
class Point {
 public:
  Point() = default;
  explicit Point(int dim);
  Point(std::initializer_list<double> coords);

  static Point zero(int dim) { return Point(dim); }
  static Point unit(int dim, int axis, double scale = 1.0);

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  double norm2() const;
  double norm() const { return std::sqrt(norm2()); }
  double dot(const Point& o) const;

  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(double s);
  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend Point operator/(Point a, double s) { return a *= 1.0 / s; }
  friend bool operator==(const Point& a, const Point& b);

  std::string str() const;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

inline double distance(const Point& a, const Point& b) { return (a - b).norm(); }

// A point of the one-point compactification R^d u {infinity}.
class ExtPoint {
 public:
  // NOLINTNEXTLINE(google-explicit-constructor)
  ExtPoint(const Point& p) : p_(p) {}
  static ExtPoint infinity(int dim) {
    ExtPoint e{Point(dim)};
    e.inf_ = true;
    return e;
  }
  bool is_infinity() const { return inf_; }
  // Throws DomainError at infinity.
  const Point& point() const;
  int dim() const { return p_.dim(); }

 private:
  Point p_;
  bool inf_ = false;
};

}  // namespace potkit
