#include "potkit/scalar_field.hpp"

#include <algorithm>

#include "potkit/errors.hpp"
#include "potkit/kernels.hpp"

namespace potkit {

ScalarField::ScalarField(Domain domain, Fn fn, Smoothness s)
    : domain_(std::move(domain)), fn_(std::move(fn)), smooth_(s) {}

ExtReal ScalarField::operator()(const Point& x) const {
  if (x.dim() != dim()) throw DomainError("field evaluated at a point of wrong dimension");
  if (!domain_.contains_closure(x, 1e-9))
    throw DomainError("field '" + name_ + "' evaluated outside its domain at " + x.str());
  if (pole_ && distance(x, *pole_) == 0.0)
    throw DomainError("field '" + name_ + "' evaluated at its pole " + x.str());
  return fn_(x);
}

double ScalarField::clearance(const Point& x) const {
  double r = domain_.boundary_distance(x);
  if (pole_) r = std::min(r, distance(x, *pole_));
  return r;
}

ScalarField ScalarField::constant(const Domain& dom, double c) {
  ScalarField f(dom, [c](const Point&) { return ExtReal(c); });
  f.kernel_ = KernelExpansion{{}, c};
  return f;
}

ScalarField ScalarField::from_expansion(const Domain& dom, KernelExpansion k) {
  const int d = dom.dim();
  ScalarField f(dom, [k, d](const Point& x) {
    ExtReal s(k.constant);
    for (const auto& [y, c] : k.terms) s += c * radial_kernel(d, distance(x, y));
    return s;
  });
  f.kernel_ = std::move(k);
  return f;
}

ScalarField ScalarField::kernel(const Domain& dom, const Point& y, double coef, double constant) {
  return from_expansion(dom, KernelExpansion{{{y, coef}}, constant});
}

ScalarField ScalarField::scaled(double s) const {
  auto fn = fn_;
  ScalarField f(domain_, [fn, s](const Point& x) { return s * fn(x); }, smooth_);
  f.pole_ = pole_;
  if (kernel_) {
    KernelExpansion k = *kernel_;
    for (auto& t : k.terms) t.second *= s;
    k.constant *= s;
    f.kernel_ = k;
  }
  f.name_ = name_;
  return f;
}

ScalarField ScalarField::plus(const ScalarField& o, double s) const {
  auto a = fn_;
  auto b = o.fn_;
  ScalarField f(domain_, [a, b, s](const Point& x) { return a(x) + s * b(x); }, smooth_);
  f.pole_ = pole_ ? pole_ : o.pole_;
  if (kernel_ && o.kernel_) {
    KernelExpansion k = *kernel_;
    for (auto t : o.kernel_->terms) {
      t.second *= s;
      k.terms.push_back(t);
    }
    k.constant += s * o.kernel_->constant;
    f.kernel_ = k;
  }
  return f;
}

}  // namespace potkit
