#pragma once

#include <vector>

#include "potkit/kernels.hpp"
#include "potkit/measures.hpp"
#include "potkit/scalar_field.hpp"

namespace potkit {

// pt_mu(y) = integral of K_{d-2}(x, y) dmu(x).  Signed charges are evaluated as
// pt_{mu+} - pt_{mu-}; a point where both parts are -inf is indeterminate
// (outside Dom).
class Potential {
 public:
  explicit Potential(Measure mu, QuadratureOptions q = {});
  // pt_mu - pt_theta without cancelling the two charges against each other.
  static Potential difference(const Measure& mu, const Measure& theta, QuadratureOptions q = {});

  const Measure& charge() const { return mu_; }
  KernelConfig cfg() const { return {mu_.dim()}; }
  int dim() const { return mu_.dim(); }

  ExtReal operator()(const Point& y) const;
  // Value at infinity of a zero-mass charge (0), otherwise mass * k(inf).
  ExtReal at_infinity() const;

  // Field view on R^d; carries a kernel form when the charge is purely atomic.
  ScalarField field() const;

 private:
  Measure mu_;
  Measure plus_, minus_;
  QuadratureOptions q_;
};

Potential potential(const Measure& mu, const QuadratureOptions& q = {});
// pt_{mu - theta} with the convention value(inf) = 0 when the masses agree.
Potential difference_potential(const Measure& mu, const Measure& theta, const QuadratureOptions& q = {});

struct AsymptoticReport {
  std::vector<double> radii;
  std::vector<double> e;  // max over 16 directions of |pt - mass k(R)| R^{d-1}
  bool bounded = true;    // e(R') <= 1.1 e(R) for consecutive radii R < R'
};

// Requires every radius >= 2 sup{|y| : y in supp mu}.
AsymptoticReport asymptotic_check(const Measure& mu, const std::vector<double>& radii);

struct LowerBoundReport {
  double bound = 0.0;  // right-hand side of the inequality
  double probed_inf = 0.0;
  Point witness;       // probe attaining probed_inf
  bool pass = true;
};

// inf over L of pt_mu >= mu(R^d) k(dist(L, supp mu)), probed on shells of L.
LowerBoundReport lower_bound_check(const Measure& mu, const Ball& L);
// inf over L of pt_{mu - delta_o} >= mu(R^d) k(dist(L, supp mu)) - k(sup_{x in L}|x - o|).
LowerBoundReport lower_bound_check(const Measure& mu, const Ball& L, const Point& o);

}  // namespace potkit
