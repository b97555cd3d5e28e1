#include "potkit/io.hpp"

#include <cmath>
#include <sstream>

#include "potkit/errors.hpp"

namespace potkit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw PreconditionError(std::string("missing key '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw PreconditionError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

}  // namespace

json encode_number(double x) { return encode(ExtReal(x)); }

json encode(const ExtReal& x) {
  switch (x.kind()) {
    case ExtReal::Kind::Finite: return x.value();
    case ExtReal::Kind::PosInf: return "+inf";
    case ExtReal::Kind::NegInf: return "-inf";
    case ExtReal::Kind::Indeterminate: return "indeterminate";
  }
  return nullptr;
}

ExtReal decode_ext_real(const json& j) {
  if (j.is_number()) return ExtReal(j.get<double>());
  if (j == "+inf" || j == "inf") return ExtReal::pos_inf();
  if (j == "-inf") return ExtReal::neg_inf();
  if (j == "indeterminate") return ExtReal::indeterminate();
  throw PreconditionError("not an extended real: " + j.dump());
}

json encode(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.dim(); ++i) a.push_back(p[i]);
  return a;
}

Point decode_point(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > static_cast<std::size_t>(kMaxDim))
    throw PreconditionError("a point is an array of 1.." + std::to_string(kMaxDim) + " numbers");
  Point p(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw PreconditionError("point coordinates must be numbers");
    p[static_cast<int>(i)] = j[i].get<double>();
  }
  return p;
}

json encode(const GridDomain& g) {
  json runs = json::array();
  std::uint8_t cur = 0;
  std::size_t n = 0;
  for (std::uint8_t m : g.mask()) {
    if ((m != 0) != (cur != 0)) {
      runs.push_back(n);
      cur = m != 0;
      n = 0;
    }
    ++n;
  }
  runs.push_back(n);
  return {{"origin", encode(g.origin())}, {"spacing", g.spacing()}, {"shape", g.shape()}, {"mask", runs}};
}

GridDomain decode_grid(const json& j) {
  Point origin = decode_point(field(j, "origin"));
  const double h = number(j, "spacing");
  std::vector<int> shape = field(j, "shape").get<std::vector<int>>();
  if (static_cast<int>(shape.size()) != origin.dim()) throw PreconditionError("grid shape and origin disagree");
  std::size_t total = 1;
  for (int s : shape) {
    if (s < 1) throw PreconditionError("grid shape entries must be positive");
    total *= static_cast<std::size_t>(s);
  }
  std::vector<std::uint8_t> mask;
  mask.reserve(total);
  std::uint8_t cur = 0;
  for (const auto& r : field(j, "mask")) {
    mask.insert(mask.end(), r.get<std::size_t>(), cur);
    cur = 1 - cur;
  }
  if (mask.size() != total) throw PreconditionError("mask runs do not cover the grid");
  return GridDomain(origin, h, shape, mask);
}

json encode(const Domain& d) {
  return std::visit(overloaded{
                        [](const Ball& b) -> json {
                          return {{"type", "ball"}, {"center", encode(b.center)}, {"radius", b.radius}};
                        },
                        [](const Annulus& a) -> json {
                          return {{"type", "annulus"},
                                  {"center", encode(a.center)},
                                  {"inner", a.inner},
                                  {"outer", encode_number(a.outer)}};
                        },
                        [](const GridDomain& g) -> json {
                          json j = encode(g);
                          j["type"] = "grid";
                          return j;
                        },
                        [](const Space& s) -> json { return {{"type", "space"}, {"dim", s.dim}}; },
                    },
                    d.shape());
}

Domain decode_domain(const json& j) {
  const std::string type = field(j, "type").get<std::string>();
  if (type == "ball") {
    const double r = number(j, "radius");
    if (!(r > 0)) throw PreconditionError("ball radius must be positive");
    return Ball{decode_point(field(j, "center")), r};
  }
  if (type == "annulus") {
    const double in = number(j, "inner");
    const double out = decode_ext_real(field(j, "outer")).to_double();
    if (!(in >= 0 && out > in)) throw PreconditionError("annulus needs 0 <= inner < outer");
    return Annulus{decode_point(field(j, "center")), in, out};
  }
  if (type == "space") return Space{static_cast<int>(number(j, "dim"))};
  if (type == "grid") return decode_grid(j);
  throw PreconditionError("unknown domain type '" + type + "'");
}

json encode(const Measure& mu) {
  json comps = json::array();
  for (const auto& c : mu.components()) {
    comps.push_back(std::visit(
        overloaded{
            [](const Atom& a) -> json { return {{"type", "atom"}, {"at", encode(a.at)}, {"weight", a.weight}}; },
            [](const SphereLayer& s) -> json {
              json j{{"type", "sphere"}, {"center", encode(s.center)}, {"radius", s.radius}, {"total", s.total}};
              if (s.poisson_pole) j["poisson_pole"] = encode(*s.poisson_pole);
              return j;
            },
            [](const BallUniform& b) -> json {
              return {{"type", "ball_uniform"}, {"center", encode(b.center)}, {"radius", b.radius}, {"total", b.total}};
            },
            [](const RadialBump& b) -> json {
              return {{"type", "bump"}, {"center", encode(b.center)}, {"radius", b.radius}, {"total", b.total}};
            },
            [](const GridDensity& g) -> json {
              return {{"type", "grid_density"}, {"grid", encode(g.grid)}, {"values", g.values}};
            },
        },
        c));
  }
  return {{"dim", mu.dim()}, {"components", comps}};
}

namespace {

Component decode_component(const json& c) {
  const std::string type = field(c, "type").get<std::string>();
  if (type == "atom") return Atom{decode_point(field(c, "at")), number_or(c, "weight", 1.0)};
  if (type == "sphere") {
    SphereLayer s{decode_point(field(c, "center")), number(c, "radius"), number_or(c, "total", 1.0), {}};
    if (c.contains("poisson_pole")) s.poisson_pole = decode_point(c.at("poisson_pole"));
    return s;
  }
  if (type == "ball_uniform")
    return BallUniform{decode_point(field(c, "center")), number(c, "radius"), number_or(c, "total", 1.0)};
  if (type == "bump")
    return RadialBump{decode_point(field(c, "center")), number(c, "radius"), number_or(c, "total", 1.0)};
  if (type == "grid_density")
    return GridDensity{decode_grid(field(c, "grid")), field(c, "values").get<std::vector<double>>()};
  throw PreconditionError("unknown measure component type '" + type + "'");
}

}  // namespace

Measure decode_measure(const json& j) {
  const int dim = static_cast<int>(number(j, "dim"));
  std::vector<Component> comps;
  for (const auto& c : field(j, "components")) comps.push_back(decode_component(c));
  return Measure(dim, std::move(comps));
}

json encode(const GridField& f) {
  json vals = json::array();
  for (const auto& v : f.values) vals.push_back(encode(v));
  return {{"grid", encode(f.grid)}, {"values", vals}};
}

json encode(const BalayageVerdict& v) {
  json margins = json::array();
  for (const auto& m : v.margins)
    margins.push_back({{"id", m.id},
                       {"lhs", encode(m.lhs)},
                       {"rhs", encode(m.rhs)},
                       {"margin", encode_number(m.margin)},
                       {"tol", m.tol},
                       {"ok", m.ok},
                       {"indeterminate", m.indeterminate}});
  json j{{"relation", to_string(v.relation)},
         {"status", to_string(v.status)},
         {"pass", v.pass},
         {"worst_margin", encode_number(v.worst_margin)},
         {"witness", v.witness_id},
         {"label", v.label},
         {"margins", margins}};
  if (v.relation == Relation::Affine) j["C"] = encode_number(v.C);
  return j;
}

json encode(const PoissonJensenReport& r) {
  json j{{"int_u_theta", encode(r.int_u_theta)},
         {"int_u_mu", encode(r.int_u_mu)},
         {"lhs", encode(r.lhs)},
         {"rhs", encode(r.rhs)},
         {"rel_error", encode_number(r.rel_error)},
         {"pass", r.pass}};
  if (r.rearranged_checked) j["rearranged_rel_error"] = encode_number(r.rearranged_rel_error);
  if (!r.diagnosis.empty()) j["diagnosis"] = r.diagnosis;
  return j;
}

json encode(const std::vector<Zero>& zeros) {
  json a = json::array();
  for (const auto& z : zeros) a.push_back({{"re", z.z.real()}, {"im", z.z.imag()}, {"multiplicity", z.multiplicity}});
  return a;
}

std::vector<Zero> decode_zeros(const json& j) {
  if (!j.is_array()) throw PreconditionError("a zero set is an array of {re, im, multiplicity}");
  std::vector<Zero> out;
  for (const auto& z : j) {
    Zero w{Complex(number(z, "re"), number_or(z, "im", 0.0)), static_cast<int>(number_or(z, "multiplicity", 1))};
    if (w.multiplicity < 1) throw PreconditionError("multiplicity must be >= 1");
    out.push_back(w);
  }
  return out;
}

std::string field_csv(const GridField& f) {
  if (f.grid.dim() != 2) throw PreconditionError("field CSV export is two-dimensional");
  std::ostringstream os;
  os.precision(12);
  os << "x,y,value\n";
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    if (!f.grid.masked(i)) continue;
    const Point c = f.grid.center(i);
    os << c[0] << ',' << c[1] << ',';
    if (f.values[i].finite())
      os << f.values[i].value() << '\n';
    else
      os << f.values[i].str() << '\n';
  }
  return os.str();
}

}  // namespace potkit
