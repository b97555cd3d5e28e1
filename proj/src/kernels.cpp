#include "potkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "potkit/errors.hpp"

namespace potkit {

double k_eval(double q, double t) {
  if (!(t > 0.0)) throw DomainError("k_eval requires t > 0");
  if (q == 0.0) return std::log(t);
  return (q > 0.0 ? -1.0 : 1.0) * std::pow(t, -q);
}

ExtReal radial_kernel(int d, double t) {
  if (t > 0.0) return k_eval(d - 2, t);
  if (t == 0.0) return d >= 2 ? ExtReal::neg_inf() : ExtReal(0.0);
  throw DomainError("radial_kernel requires t >= 0");
}

ExtReal riesz_kernel(const KernelConfig& cfg, const Point& x, const Point& y) {
  return radial_kernel(cfg.d, distance(x, y));
}

double sphere_area(int d) {
  if (d < 1) throw PreconditionError("sphere_area requires d >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double riesz_normalizer(int d) {
  if (d < 1) throw PreconditionError("riesz_normalizer requires d >= 1");
  return std::tgamma(0.5 * d) /
         (2.0 * std::pow(std::numbers::pi, 0.5 * d) * std::max(1, d - 2));
}

double unit_ball_volume(int p) {
  if (p < 0) throw PreconditionError("unit_ball_volume requires p >= 0");
  if (p == 0) return 1.0;
  if (p == 1) return 2.0;
  return sphere_area(p) / p;
}

}  // namespace potkit
