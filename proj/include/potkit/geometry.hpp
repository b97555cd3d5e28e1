#pragma once

#include "potkit/domain.hpp"
#include "potkit/point.hpp"
#include "potkit/scalar_field.hpp"

namespace potkit {

// x* = o + (x - o)/|x - o|^2; o goes to infinity.
ExtPoint inversion(const Point& x, const Point& o);
// Inversion on the compactified space (infinity <-> o).
ExtPoint inversion(const ExtPoint& x, const Point& o);

// Image of a domain under inversion about o (balls, concentric annuli, space).
// The returned flag is true when o itself lies in the image closure and must be
// excluded as a pole.
Domain invert_domain(const Domain& dom, const Point& o, bool& image_has_pole);

// v(y) = |y - o|^{2-d} u(o + (y - o)/|y - o|^2).
ScalarField kelvin_transform(const ScalarField& u, const Point& o, int d);

// Outer r-parallel set: union of open balls B(x, r), x in base.
Domain parallel_set(const Domain& base, double r);

// Inward-filled hull of the masked cells of K inside O (same frame): K plus the
// components of O \ K that do not reach the boundary of O or the window frame.
GridDomain inward_filled_hull(const GridDomain& K, const GridDomain& O);

}  // namespace potkit
