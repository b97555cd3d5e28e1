#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "potkit/balayage.hpp"
#include "potkit/domain.hpp"
#include "potkit/duality.hpp"
#include "potkit/ext_real.hpp"
#include "potkit/fields.hpp"
#include "potkit/measures.hpp"
#include "potkit/zeros.hpp"

namespace potkit {

using json = nlohmann::json;

// JSON has no infinities: finite values are numbers, the rest are the strings
// "+inf", "-inf" and "indeterminate".
json encode(const ExtReal& x);
json encode_number(double x);
ExtReal decode_ext_real(const json& j);

json encode(const Point& p);
Point decode_point(const json& j);

// {origin, spacing, shape, mask}; the mask is run-length encoded as alternating
// counts starting with a run of unmasked cells.
json encode(const GridDomain& g);
GridDomain decode_grid(const json& j);

// {"type": "ball" | "annulus" | "space" | "grid", ...}
json encode(const Domain& d);
Domain decode_domain(const json& j);

// {"dim", "components": [...]}; grid densities as {grid, values}.
json encode(const Measure& mu);
Measure decode_measure(const json& j);

// {grid, values} with extended-real values per frame cell.
json encode(const GridField& f);

// {relation, status, pass, C, worst_margin, witness, margins: [...]}.
json encode(const BalayageVerdict& v);
json encode(const PoissonJensenReport& r);

// [{re, im, multiplicity}, ...]
json encode(const std::vector<Zero>& zeros);
std::vector<Zero> decode_zeros(const json& j);

// x, y, value rows for the masked cells of a 2D grid field.
std::string field_csv(const GridField& f);

}  // namespace potkit
