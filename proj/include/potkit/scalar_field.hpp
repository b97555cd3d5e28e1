#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "potkit/domain.hpp"
#include "potkit/ext_real.hpp"

namespace potkit {

// f = sum_i coef_i * K_{d-2}(., y_i) + constant.  Fields carrying this form are
// integrated against measures through exact potentials instead of quadrature.
struct KernelExpansion {
  std::vector<std::pair<Point, double>> terms;
  double constant = 0.0;
};

class ScalarField {
 public:
  enum class Smoothness { Analytic, Grid };
  using Fn = std::function<ExtReal(const Point&)>;

  ScalarField(Domain domain, Fn fn, Smoothness s = Smoothness::Analytic);

  // Checked evaluation on the closure of the domain, away from the pole.
  ExtReal operator()(const Point& x) const;
  ExtReal eval_unchecked(const Point& x) const { return fn_(x); }

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  Smoothness smoothness() const { return smooth_; }

  // Excluded point (the field is defined on domain minus {pole}).
  const std::optional<Point>& pole() const { return pole_; }
  ScalarField& with_pole(const Point& p) {
    pole_ = p;
    return *this;
  }
  const std::optional<KernelExpansion>& kernel_form() const { return kernel_; }
  ScalarField& with_kernel_form(KernelExpansion k) {
    kernel_ = std::move(k);
    return *this;
  }
  const std::string& name() const { return name_; }
  ScalarField& named(std::string n) {
    name_ = std::move(n);
    return *this;
  }

  // Admissible radius for a sphere/ball centred at x (boundary and pole distance).
  double clearance(const Point& x) const;

  // Common closed forms.
  static ScalarField constant(const Domain& dom, double c);
  // coef * K_{d-2}(., y) + constant on the given domain.
  static ScalarField kernel(const Domain& dom, const Point& y, double coef = 1.0,
                            double constant = 0.0);
  static ScalarField from_expansion(const Domain& dom, KernelExpansion k);

  // Pointwise combinations (domain of the first operand).
  ScalarField scaled(double s) const;
  ScalarField plus(const ScalarField& o, double s = 1.0) const;

 private:
  Domain domain_;
  Fn fn_;
  Smoothness smooth_;
  std::optional<Point> pole_;
  std::optional<KernelExpansion> kernel_;
  std::string name_;
};

}  // namespace potkit
