#pragma once

#include <variant>
#include <vector>

#include "potkit/domain.hpp"
#include "potkit/ext_real.hpp"
#include "potkit/measures.hpp"
#include "potkit/scalar_field.hpp"

namespace potkit {

// Green's function g_D(., o) of a ball D in R^2 or R^3, extended by 0 off clos D.
class GreenModel {
 public:
  GreenModel(Ball domain, Point pole);

  const Ball& domain() const { return D_; }
  const Point& pole() const { return o_; }
  int dim() const { return o_.dim(); }

  // g_D(x, o); +inf at the pole.
  ExtReal operator()(const Point& x) const { return two_point(D_, x, o_); }
  // g_D(x, y) for any two points (symmetric).
  static ExtReal two_point(const Ball& D, const Point& x, const Point& y);

  // Field view on R^d minus the pole.
  ScalarField field() const;

 private:
  Ball D_;
  Point o_;
};

GreenModel green_ball(const Point& x0, double R, const Point& o, int d);

// M_g = min of g_D(., o) over 720 boundary samples of S_o.
double mg_constant(const GreenModel& green, const Domain& S_o);

// omega_D(x, .) as a Poisson-density sphere layer.
Measure harmonic_measure(const Ball& D, const Point& x);
inline Measure harmonic_measure(const GreenModel& g, const Point& x) {
  return harmonic_measure(g.domain(), x);
}

struct JensenMixture {
  double a = 0.0;  // weight of delta_x
  double b = 1.0;  // weight of omega_D(x, .)
};
struct JensenMollified {
  double r = 0.1;
};
struct JensenSubBalls {
  std::vector<std::pair<Ball, double>> balls;  // omega_{B_k}(x, .) with weights
};
using JensenKind = std::variant<JensenMixture, JensenMollified, JensenSubBalls>;

Measure jensen_measure(const Ball& D, const Point& x, const JensenKind& kind);

}  // namespace potkit
