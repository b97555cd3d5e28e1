#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "potkit/point.hpp"

namespace potkit {

// Probability-weighted point set (weights sum to 1).
struct Rule {
  std::vector<Point> nodes;
  std::vector<double> weights;
};

// 1D rule on [a, b] with n Gauss-Legendre nodes (weights sum to b - a).
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};
Rule1D gauss_legendre(int n, double a, double b);
// Composite Gauss-Legendre on [a, b], geometrically graded towards a
// (`levels` halvings, `n` nodes per panel).  Integrates log-type endpoint
// singularities at a to near machine precision.
Rule1D graded_gauss(int n, int levels, double a, double b);

// Normalized surface measure on the unit sphere of R^d.
// d = 1: the two points; d = 2: n-point trapezoid; d = 3: product rule with
// n Gauss nodes in cos(theta) and 2n trapezoid nodes in phi.
const Rule& sphere_rule(int d, int n);

// Normalized surface rule concentrated towards the direction `focus` (unit vector):
// graded in the angle measured from `focus`.  Used for integrands with a near
// singularity at that direction.
Rule focused_sphere_rule(const Point& focus, int levels = 30, int n = 12, int azimuth = 64);

// Normalized Lebesgue measure on the unit ball of R^d (radial Gauss x sphere rule,
// radial panels graded `levels` times towards the centre).
const Rule& ball_rule(int d, int radial, int angular, int levels = 6);

// Deterministic 64-bit stream; the uniform map uses the top 53 bits so results
// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed ^ 0x9E3779B97F4A7C15ULL) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::uint64_t next() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace potkit
