#pragma once

#include "potkit/ext_real.hpp"
#include "potkit/point.hpp"

namespace potkit {

struct KernelConfig {
  int d = 2;
  int q() const { return d - 2; }
};

// k_q(t): ln t for q = 0, otherwise -sgn(q) t^{-q}.  Requires t > 0.
double k_eval(double q, double t);

// K_{d-2}(x, y) = k_{d-2}(|x - y|); on the diagonal -inf for d >= 2 and 0 for d = 1.
ExtReal riesz_kernel(const KernelConfig& cfg, const Point& x, const Point& y);

// k_{d-2} as an extended real on t >= 0 (t = 0 follows the diagonal convention).
ExtReal radial_kernel(int d, double t);

// Surface area s_{d-1} of the unit sphere in R^d.
double sphere_area(int d);

// c_d = 1 / (s_{d-1} max{1, d-2}).
double riesz_normalizer(int d);

// Volume b_p of the unit ball in R^p (b_0 = 1).
double unit_ball_volume(int p);

}  // namespace potkit
