#include "potkit/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <mutex>
#include <set>
#include <sstream>
#include <string_view>
#include <thread>

#include "potkit/balayage.hpp"
#include "potkit/duality.hpp"
#include "potkit/green.hpp"
#include "potkit/quadrature.hpp"
#include "potkit/zeros.hpp"

namespace potkit {

namespace fs = std::filesystem;

SchemaError::SchemaError(const std::string& src, int ln, const std::string& ptr, const std::string& msg)
    : Error(src + ":" + std::to_string(ln) + ": " + (ptr.empty() ? std::string("/") : ptr) + ": " + msg),
      source(src),
      line(ln),
      pointer(ptr),
      message(msg) {}

namespace {

std::string escape_key(const std::string& k) {
  std::string out;
  for (char c : k) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

// JSON pointer -> line of the key (object members) or of the value.  Runs on
// text that already parsed, so the scanner can be lax.
class LineMap {
 public:
  LineMap() = default;
  explicit LineMap(const std::string& text) : t_(&text) {
    std::size_t i = 0;
    value(i, "");
    t_ = nullptr;
  }

  int line_of(std::string ptr) const {
    for (;;) {
      auto it = lines_.find(ptr);
      if (it != lines_.end()) return it->second;
      if (ptr.empty()) return 1;
      ptr.erase(ptr.rfind('/'));
    }
  }

 private:
  void ws(std::size_t& i) {
    const std::string& t = *t_;
    while (i < t.size() && std::strchr(" \t\r\n", t[i]) != nullptr && t[i] != '\0') {
      if (t[i] == '\n') ++line_;
      ++i;
    }
  }

  std::string str(std::size_t& i) {
    const std::string& t = *t_;
    std::string s;
    ++i;
    while (i < t.size() && t[i] != '"') {
      if (t[i] == '\\' && i + 1 < t.size()) {
        ++i;
        s += t[i] == 'n' ? '\n' : t[i] == 't' ? '\t' : t[i];
      } else {
        s += t[i];
      }
      ++i;
    }
    ++i;
    return s;
  }

  void value(std::size_t& i, const std::string& ptr) {
    const std::string& t = *t_;
    ws(i);
    lines_.emplace(ptr, line_);
    if (i >= t.size()) return;
    const char c = t[i];
    if (c == '{') {
      ++i;
      ws(i);
      if (i < t.size() && t[i] == '}') {
        ++i;
        return;
      }
      while (i < t.size()) {
        ws(i);
        const int key_line = line_;
        const std::string child = ptr + "/" + escape_key(str(i));
        lines_.emplace(child, key_line);
        ws(i);
        ++i;  // ':'
        value(i, child);
        ws(i);
        if (i < t.size() && t[i] == ',') {
          ++i;
          continue;
        }
        ++i;  // '}'
        return;
      }
    } else if (c == '[') {
      ++i;
      ws(i);
      if (i < t.size() && t[i] == ']') {
        ++i;
        return;
      }
      for (int k = 0; i < t.size(); ++k) {
        value(i, ptr + "/" + std::to_string(k));
        ws(i);
        if (i < t.size() && t[i] == ',') {
          ++i;
          continue;
        }
        ++i;  // ']'
        return;
      }
    } else if (c == '"') {
      str(i);
    } else {
      while (i < t.size() && std::strchr(",]} \t\r\n", t[i]) == nullptr) ++i;
    }
  }

  const std::string* t_ = nullptr;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

struct Env {
  std::uint64_t seed = 0;
  int grid = 256;
  double tol_scale = 1.0;
};

struct NamedField {
  ScalarField field;
  std::optional<RieszFunction> riesz;
};

using FamilyRecipe = std::function<TestFamily()>;
using CheckFn = std::function<void(CheckOutcome&, const Env&)>;

struct PreparedCheck {
  std::string id, type;
  bool expect_pass = true;
  CheckFn run;
};

}  // namespace

struct Scenario::Impl {
  std::string source;
  json doc;
  LineMap lines;
  std::string name;
  int dim = 2;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<std::string> out;
  std::map<std::string, Measure> measures;
  std::set<std::string> building;
  std::map<std::string, NamedField> fields;
  std::map<std::string, HoloFunction> functions;
  std::map<std::string, FamilyRecipe> families;
  std::vector<PreparedCheck> checks;

  mutable std::mutex memo_mutex;
  mutable std::map<std::string, std::shared_future<HolFamilies>> hol_memo;

  const HolFamilies& hol(const Ball& D, const Ball& S_o, double r, double bm, double bp, int count) const {
    std::ostringstream key;
    key.precision(17);
    key << D.center.str() << D.radius << '|' << S_o.center.str() << S_o.radius << '|' << r << '|' << bm << '|'
        << bp << '|' << count;
    std::shared_future<HolFamilies> fut;
    {
      std::lock_guard<std::mutex> lock(memo_mutex);
      auto it = hol_memo.find(key.str());
      if (it == hol_memo.end()) {
        fut = std::async(std::launch::deferred, [=] { return hol_families(D, S_o, r, bm, bp, count); }).share();
        hol_memo.emplace(key.str(), fut);
      } else {
        fut = it->second;
      }
    }
    return fut.get();
  }
};

namespace {

using Impl = Scenario::Impl;

class Node {
 public:
  Node(const Impl& s, const json& j, std::string ptr) : s_(&s), j_(&j), ptr_(std::move(ptr)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw SchemaError(s_->source, s_->lines.line_of(ptr_), ptr_, msg);
  }

  const json& raw() const { return *j_; }
  const std::string& ptr() const { return ptr_; }
  bool has(const std::string& k) const { return j_->is_object() && j_->contains(k); }

  Node at(const std::string& k) const {
    if (!j_->is_object()) fail("expected an object");
    if (!j_->contains(k)) fail("missing key '" + k + "'");
    return Node(*s_, j_->at(k), ptr_ + "/" + escape_key(k));
  }

  std::vector<Node> items() const {
    if (!j_->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_->size(); ++i) out.emplace_back(*s_, (*j_)[i], ptr_ + "/" + std::to_string(i));
    return out;
  }

  std::vector<std::pair<std::string, Node>> members() const {
    if (!j_->is_object()) fail("expected an object");
    std::vector<std::pair<std::string, Node>> out;
    for (const auto& [k, v] : j_->items()) out.emplace_back(k, Node(*s_, v, ptr_ + "/" + escape_key(k)));
    return out;
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    if (!j_->is_object()) fail("expected an object");
    for (const auto& [k, v] : j_->items())
      if (std::find(keys.begin(), keys.end(), std::string_view(k)) == keys.end()) at(k).fail("unknown key '" + k + "'");
  }

  // A number, or {"log_of": x} for ln x.
  double as_num() const {
    if (j_->is_number()) return j_->get<double>();
    if (j_->is_object() && j_->size() == 1 && j_->contains("log_of")) {
      Node a = at("log_of");
      const double x = a.as_num();
      if (!(x > 0)) a.fail("log_of needs a positive number");
      return std::log(x);
    }
    fail("expected a number");
  }
  double num(const std::string& k) const { return at(k).as_num(); }
  double num_or(const std::string& k, double d) const { return has(k) ? num(k) : d; }
  double positive(const std::string& k) const {
    const double v = num(k);
    if (!(v > 0)) at(k).fail("must be positive");
    return v;
  }
  double positive_or(const std::string& k, double d) const { return has(k) ? positive(k) : d; }

  int as_int() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<int>();
  }
  int count(const std::string& k, int d) const {
    if (!has(k)) return d;
    const int v = at(k).as_int();
    if (v < 1) at(k).fail("must be at least 1");
    return v;
  }

  std::string as_str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  std::string str(const std::string& k) const { return at(k).as_str(); }
  std::string str_or(const std::string& k, const std::string& d) const { return has(k) ? str(k) : d; }
  std::string choice(const std::string& k, std::initializer_list<std::string_view> opts,
                     const std::string& d) const {
    if (!has(k)) return d;
    std::string v = str(k);
    if (std::find(opts.begin(), opts.end(), std::string_view(v)) == opts.end()) {
      std::string list;
      for (auto o : opts) list += (list.empty() ? "" : ", ") + std::string(o);
      at(k).fail("expected one of " + list);
    }
    return v;
  }

  bool boolean_or(const std::string& k, bool d) const {
    if (!has(k)) return d;
    if (!j_->at(k).is_boolean()) at(k).fail("expected true or false");
    return j_->at(k).get<bool>();
  }

  Point as_point() const {
    Point p;
    try {
      p = decode_point(*j_);
    } catch (const Error& e) {
      fail(e.what());
    }
    if (p.dim() != s_->dim)
      fail("point of dimension " + std::to_string(p.dim()) + " in a scenario of dimension " +
           std::to_string(s_->dim));
    return p;
  }
  Point point(const std::string& k) const { return at(k).as_point(); }

  Ball as_ball() const {
    allow({"type", "center", "radius"});
    if (has("type") && str("type") != "ball") at("type").fail("expected a ball");
    return Ball{point("center"), positive("radius")};
  }
  Ball ball(const std::string& k) const { return at(k).as_ball(); }

  Domain as_domain() const {
    if (!j_->is_object()) fail("expected a domain object");
    const std::string type = str("type");
    if (type == "ball") return as_ball();
    if (type == "annulus") {
      allow({"type", "center", "inner", "outer"});
      const double in = num("inner");
      const double out = has("outer") && raw().at("outer").is_string()
                             ? decode_ext_real(raw().at("outer")).to_double()
                             : num("outer");
      if (!(in >= 0 && out > in)) fail("annulus needs 0 <= inner < outer");
      return Annulus{point("center"), in, out};
    }
    if (type == "space") {
      allow({"type"});
      return Space{s_->dim};
    }
    at("type").fail("unknown domain type '" + type + "' (ball, annulus, space)");
  }
  Domain domain(const std::string& k) const { return at(k).as_domain(); }

 private:
  const Impl* s_;
  const json* j_;
  std::string ptr_;
};

// Library errors raised while assembling an object are reported at its node.
template <class F>
auto guarded(const Node& n, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    n.fail(e.what());
  }
}

// ---- assembly -------------------------------------------------------------

const Measure& measure_ref(Impl& s, const Node& ref);
const HoloFunction& function_ref(Impl& s, const Node& ref);

Component component(const Node& c) {
  const std::string type = c.str("type");
  if (type == "atom") {
    c.allow({"type", "at", "weight"});
    return Atom{c.point("at"), c.num_or("weight", 1.0)};
  }
  if (type == "sphere") {
    c.allow({"type", "center", "radius", "total", "poisson_pole"});
    SphereLayer l{c.point("center"), c.positive("radius"), c.num_or("total", 1.0), {}};
    if (c.has("poisson_pole")) l.poisson_pole = c.point("poisson_pole");
    return l;
  }
  if (type == "ball_uniform") {
    c.allow({"type", "center", "radius", "total"});
    return BallUniform{c.point("center"), c.positive("radius"), c.num_or("total", 1.0)};
  }
  if (type == "bump") {
    c.allow({"type", "center", "radius", "total"});
    return RadialBump{c.point("center"), c.positive("radius"), c.num_or("total", 1.0)};
  }
  c.at("type").fail("unknown component type '" + type + "' (atom, sphere, ball_uniform, bump)");
}

std::vector<Complex> expand(const std::vector<Zero>& zs) {
  std::vector<Complex> out;
  for (const auto& z : zs)
    for (int k = 0; k < z.multiplicity; ++k) out.push_back(z.z);
  return out;
}

// Explicit [{re, im, multiplicity}] or a generated sequence in the unit disk:
// {"generator": "geometric" (1 - 2^-k) | "harmonic" (1 - 1/k), "count": n}.
std::vector<Zero> zero_set(const Node& n) {
  if (n.raw().is_array()) {
    std::vector<Zero> out;
    for (const Node& z : n.items()) {
      z.allow({"re", "im", "multiplicity"});
      Zero w{Complex(z.num("re"), z.num_or("im", 0.0)), z.count("multiplicity", 1)};
      out.push_back(w);
    }
    return out;
  }
  n.allow({"generator", "count"});
  const std::string g = n.choice("generator", {"geometric", "harmonic"}, "");
  if (g.empty()) n.fail("missing key 'generator'");
  const int count = n.count("count", 0);
  if (count == 0) n.fail("missing key 'count'");
  std::vector<Zero> out;
  for (int k = 1; k <= count; ++k) {
    const double x = g == "geometric" ? 1.0 - std::ldexp(1.0, -k) : 1.0 - 1.0 / k;
    out.push_back({Complex(x, 0.0), 1});
  }
  return out;
}

Measure build_measure(Impl& s, const Node& n) {
  if (n.has("components")) {
    n.allow({"components"});
    Measure m(s.dim);
    for (const Node& c : n.at("components").items()) m.add(component(c));
    return m;
  }
  const std::string type = n.str("type");
  if (type == "dirac") {
    n.allow({"type", "at", "weight"});
    return Measure::dirac(n.point("at"), n.num_or("weight", 1.0));
  }
  if (type == "harmonic_measure") {
    n.allow({"type", "ball", "x"});
    const Ball b = n.ball("ball");
    const Point x = n.point("x");
    if (distance(x, b.center) >= b.radius) n.at("x").fail("x must lie in the ball");
    return harmonic_measure(b, x);
  }
  if (type == "jensen") {
    n.allow({"type", "ball", "x", "mixture", "mollified", "sub_balls"});
    const Ball b = n.ball("ball");
    const Point x = n.point("x");
    const int kinds = int(n.has("mixture")) + int(n.has("mollified")) + int(n.has("sub_balls"));
    if (kinds != 1) n.fail("a Jensen measure needs exactly one of mixture, mollified, sub_balls");
    JensenKind kind;
    if (n.has("mixture")) {
      Node m = n.at("mixture");
      m.allow({"a", "b"});
      kind = JensenMixture{m.num("a"), m.num("b")};
    } else if (n.has("mollified")) {
      kind = JensenMollified{n.positive("mollified")};
    } else {
      JensenSubBalls sb;
      for (const Node& e : n.at("sub_balls").items()) {
        e.allow({"ball", "weight"});
        sb.balls.emplace_back(e.ball("ball"), e.num("weight"));
      }
      kind = sb;
    }
    return guarded(n, [&] { return jensen_measure(b, x, kind); });
  }
  if (type == "lyons") {
    n.allow({"type", "part", "r0", "r", "ring", "count", "rj"});
    const std::string part = n.choice("part", {"theta", "mu", "mu_E"}, "mu_E");
    auto ex = guarded(n, [&] {
      return lyons_example(s.dim, n.positive("r0"), n.positive("r"), n.positive("ring"), n.count("count", 6),
                           n.positive("rj"));
    });
    return part == "theta" ? ex.theta : part == "mu" ? ex.mu : ex.mu_E;
  }
  if (type == "sum") {
    n.allow({"type", "terms"});
    Measure m(s.dim);
    for (const Node& t : n.at("terms").items()) {
      t.allow({"measure", "scale"});
      m = m + measure_ref(s, t.at("measure")).scaled(t.num_or("scale", 1.0));
    }
    return m;
  }
  if (type == "convolved") {
    n.allow({"type", "of", "mollifier_radius", "spacing", "domain"});
    const Measure& mu = measure_ref(s, n.at("of"));
    const Domain O = n.domain("domain");
    return guarded(n, [&] {
      return convolve_balayage(mu, Mollifier{n.positive("mollifier_radius")}, O, n.positive("spacing"));
    });
  }
  if (type == "counting") {
    n.allow({"type", "function", "region"});
    const HoloFunction& f = function_ref(s, n.at("function"));
    const Domain S = n.domain("region");
    return guarded(n, [&] { return counting_measure(f, S); });
  }
  n.at("type").fail("unknown measure type '" + type +
                    "' (components, dirac, harmonic_measure, jensen, lyons, sum, convolved, counting)");
}

const Measure& measure_ref(Impl& s, const Node& ref) {
  const std::string name = ref.as_str();
  if (auto it = s.measures.find(name); it != s.measures.end()) return it->second;
  if (!s.doc.contains("measures") || !s.doc["measures"].contains(name)) ref.fail("unknown measure '" + name + "'");
  if (s.building.count(name)) ref.fail("measure '" + name + "' refers to itself");
  s.building.insert(name);
  Node n(s, s.doc["measures"][name], "/measures/" + escape_key(name));
  Measure m = build_measure(s, n);
  s.building.erase(name);
  return s.measures.emplace(name, std::move(m)).first->second;
}

NamedField build_field(Impl& s, const Node& n) {
  const std::string type = n.str("type");
  if (type == "log_modulus") {
    n.allow({"type", "zeros", "harmonic"});
    std::vector<std::pair<Point, double>> zs;
    if (n.has("zeros"))
      for (const Node& z : n.at("zeros").items()) {
        z.allow({"at", "weight"});
        zs.emplace_back(z.point("at"), z.positive_or("weight", 1.0));
      }
    std::function<double(const Point&)> h;
    if (n.has("harmonic")) {
      // affine part c + <g, x>
      Node a = n.at("harmonic");
      a.allow({"constant", "gradient"});
      const double c = a.num_or("constant", 0.0);
      const Point g = a.has("gradient") ? a.point("gradient") : Point(s.dim);
      h = [c, g](const Point& x) { return c + g.dot(x); };
    }
    RieszFunction r = guarded(n, [&] { return log_modulus(zs, h); });
    return {r.u, r};
  }
  if (type == "kernel") {
    n.allow({"type", "domain", "pole", "coef", "constant"});
    const Domain dom = n.domain("domain");
    return {ScalarField::kernel(dom, n.point("pole"), n.num_or("coef", 1.0), n.num_or("constant", 0.0)), {}};
  }
  if (type == "constant") {
    n.allow({"type", "domain", "value"});
    return {ScalarField::constant(n.domain("domain"), n.num("value")), {}};
  }
  if (type == "green") {
    n.allow({"type", "ball", "pole"});
    const Ball b = n.ball("ball");
    const Point p = n.point("pole");
    return {guarded(n, [&] { return GreenModel(b, p).field(); }), {}};
  }
  n.at("type").fail("unknown field type '" + type + "' (log_modulus, kernel, constant, green)");
}

const NamedField& field_ref(Impl& s, const Node& ref) {
  const std::string name = ref.as_str();
  auto it = s.fields.find(name);
  if (it == s.fields.end()) ref.fail("unknown field '" + name + "'");
  return it->second;
}

Polynomial from_roots(const std::vector<Complex>& roots) {
  std::vector<Complex> a{1.0};
  for (Complex r : roots) {
    std::vector<Complex> b(a.size() + 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      b[i + 1] += a[i];
      b[i] -= r * a[i];
    }
    a = b;
  }
  return {a};
}

HoloFunction build_function(Impl& s, const Node& n) {
  if (s.dim != 2) n.fail("holomorphic functions need dimension 2");
  const std::string type = n.str("type");
  if (type == "polynomial") {
    n.allow({"type", "coeffs", "roots"});
    if (n.has("coeffs") == n.has("roots")) n.fail("a polynomial needs exactly one of coeffs, roots");
    Polynomial p;
    if (n.has("coeffs")) {
      for (const Node& c : n.at("coeffs").items()) {
        if (c.raw().is_array()) {
          if (c.raw().size() != 2) c.fail("a complex coefficient is [re, im]");
          p.coeffs.emplace_back(c.items()[0].as_num(), c.items()[1].as_num());
        } else {
          p.coeffs.emplace_back(c.as_num(), 0.0);
        }
      }
    } else {
      p = from_roots(expand(zero_set(n.at("roots"))));
    }
    return guarded(n, [&] { return HoloFunction(p); });
  }
  if (type == "blaschke") {
    n.allow({"type", "zeros", "length"});
    std::vector<Complex> zs = expand(zero_set(n.at("zeros")));
    const int len = n.count("length", static_cast<int>(zs.size()));
    return guarded(n, [&] { return HoloFunction(BlaschkeProduct{zs, static_cast<std::size_t>(len)}); });
  }
  n.at("type").fail("unknown function type '" + type + "' (polynomial, blaschke)");
}

const HoloFunction& function_ref(Impl& s, const Node& ref) {
  const std::string name = ref.as_str();
  if (auto it = s.functions.find(name); it != s.functions.end()) return it->second;
  if (!s.doc.contains("functions") || !s.doc["functions"].contains(name))
    ref.fail("unknown function '" + name + "'");
  Node n(s, s.doc["functions"][name], "/functions/" + escape_key(name));
  HoloFunction f = build_function(s, n);
  f.name = name;
  return s.functions.emplace(name, std::move(f)).first->second;
}

std::vector<Point> ring_points(const Node& n) {
  std::vector<Point> out;
  for (const Node& r : n.items()) {
    r.allow({"center", "radius", "count"});
    auto ring = probe_ring(r.point("center"), r.positive("radius"), r.count("count", 1));
    out.insert(out.end(), ring.begin(), ring.end());
  }
  return out;
}

std::vector<Point> centres(Impl& s, const Node& n) {
  std::vector<Point> ys;
  if (n.has("rings")) ys = ring_points(n.at("rings"));
  if (n.has("points"))
    for (const Node& p : n.at("points").items()) ys.push_back(p.as_point());
  if (n.has("atoms_of"))
    for (const auto& c : measure_ref(s, n.at("atoms_of")).components())
      if (const auto* a = std::get_if<Atom>(&c)) ys.push_back(a->at);
  return ys;
}

FamilyRecipe build_family(Impl& s, const Node& n) {
  const std::string type = n.str("type");
  const std::string consts = n.choice("constants", {"none", "plus", "both"}, "none");
  auto wrap = [consts](FamilyRecipe r) -> FamilyRecipe {
    if (consts == "none") return r;
    return [r, both = consts == "both"] { return with_constants(r(), both); };
  };
  if (type == "harmonic_kernels") {
    n.allow({"type", "constants", "exclude", "rings", "points", "atoms_of"});
    const Domain S = n.domain("exclude");
    const auto ys = centres(s, n);
    if (ys.empty()) n.fail("no kernel centres");
    guarded(n, [&] { return harmonic_kernel_family(S, ys); });
    return wrap([S, ys] { return harmonic_kernel_family(S, ys); });
  }
  if (type == "subharmonic_kernels") {
    n.allow({"type", "constants", "rings", "points", "atoms_of"});
    const auto ys = centres(s, n);
    if (ys.empty()) n.fail("no kernel centres");
    return wrap([ys] { return subharmonic_kernel_family(ys); });
  }
  if (type == "harmonic_polynomials") {
    n.allow({"type", "constants", "center", "degree"});
    const Point c = n.point("center");
    const int deg = n.count("degree", 1);
    return wrap([c, deg] { return harmonic_polynomial_family(c, deg); });
  }
  if (type == "class") {
    n.allow({"type", "constants", "class", "S_o", "r", "b_minus", "b_plus", "D", "count"});
    const std::string cls = n.choice("class", {"sbh00+", "sbh00", "sbh+0", "sbh+0-averaged"}, "sbh+0");
    const FamilyClass tag = cls == "sbh00+"   ? FamilyClass::Sbh00PlusLeq
                            : cls == "sbh00"  ? FamilyClass::Sbh00Bounded
                            : cls == "sbh+0"  ? FamilyClass::SbhPlus0Bounded
                                              : FamilyClass::SbhPlus0Averaged;
    const Ball So = n.ball("S_o"), D = n.ball("D");
    const double r = n.positive("r"), bm = n.num_or("b_minus", -1.0), bp = n.positive("b_plus");
    if (!(bm < 0)) n.at("b_minus").fail("b_minus must be negative");
    const int count = n.count("count", 32);
    return wrap([=] { return build_test_family(tag, So, r, bm, bp, D, count); });
  }
  n.at("type").fail("unknown family type '" + type +
                    "' (harmonic_kernels, subharmonic_kernels, harmonic_polynomials, class)");
}

const FamilyRecipe& family_ref(Impl& s, const Node& ref) {
  const std::string name = ref.as_str();
  auto it = s.families.find(name);
  if (it == s.families.end()) ref.fail("unknown family '" + name + "'");
  return it->second;
}

GrowthMajorant majorant(const Node& n, const Ball& D) {
  n.allow({"type", "value", "c", "a_plus", "a_minus"});
  const std::string type = n.choice("type", {"constant", "quadratic"}, "constant");
  if (type == "constant") return GrowthMajorant::constant(n.num("value"));
  return guarded(n, [&] {
    return GrowthMajorant::quadratic(n.num_or("c", 0.0), n.num("a_plus"), n.num_or("a_minus", 0.0), D);
  });
}

// ---- outcome helpers ------------------------------------------------------

json summary(const BalayageVerdict& v) {
  json j = encode(v);
  j.erase("margins");
  j["members"] = v.margins.size();
  return j;
}

void verdict_rows(CheckOutcome& o, const BalayageVerdict& v, const std::string& prefix) {
  for (const auto& m : v.margins) o.rows.push_back({prefix + m.id, m.lhs, m.rhs, m.margin, m.tol, m.ok});
}

void probe_rows(CheckOutcome& o, const ProbeReport& r, const std::string& prefix) {
  for (std::size_t i = 0; i < r.probes.size(); ++i) {
    const auto& p = r.probes[i];
    o.rows.push_back({prefix + "probe" + std::to_string(i), p.value, p.average, p.margin, p.tol, p.pass});
  }
}

json probe_summary(const ProbeReport& r) {
  return {{"probes", r.probes.size()}, {"violations", r.violations}, {"worst_margin", encode_number(r.worst_margin())}};
}

// n x n cell-centred samples of f over the bounding square of b.
GridField sample_square(const ScalarField& f, const Ball& b, int n) {
  const double h = 2.0 * b.radius / n;
  Point origin = b.center - Point{b.radius, b.radius} + Point{0.5 * h, 0.5 * h};
  GridDomain g(origin, h, {n, n}, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n, 1));
  GridField out{g, std::vector<ExtReal>(g.size(), ExtReal(0.0))};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.center(i);
    bool ok = f.domain().contains(p);
    if (ok) {
      try {
        out.values[i] = f.eval_unchecked(p);
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) out.grid.set(i, false);
  }
  return out;
}

// ---- checks ---------------------------------------------------------------

struct CheckCtx {
  Impl& s;
  const Node& n;
  bool plot = false;
};

#define COMMON "id", "type", "expect", "plot"

CheckFn check_balayage(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "theta", "mu", "family", "relation", "S_o"});
  const Measure theta = measure_ref(c.s, n.at("theta"));
  const Measure mu = measure_ref(c.s, n.at("mu"));
  const FamilyRecipe fam = family_ref(c.s, n.at("family"));
  const bool affine = n.choice("relation", {"linear", "affine"}, "linear") == "affine";
  std::optional<Domain> So;
  if (affine) So = n.domain("S_o");
  if (theta.dim() != mu.dim()) n.fail("theta and mu have different dimensions");
  return [=](CheckOutcome& o, const Env& env) {
    BalayageOptions bo;
    bo.tol_scale = env.tol_scale;
    const TestFamily f = fam();
    const BalayageVerdict v = affine ? check_affine(theta, mu, f, *So, bo) : check_linear(theta, mu, f, bo);
    o.result = v.pass;
    o.metrics = summary(v);
    verdict_rows(o, v, "");
  };
}

CheckFn check_mass(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "theta", "mu", "relation", "tol"});
  const double tm = measure_ref(c.s, n.at("theta")).total_mass();
  const double mm = measure_ref(c.s, n.at("mu")).total_mass();
  const bool eq = n.choice("relation", {"le", "eq"}, "le") == "eq";
  const double tol = n.positive_or("tol", 1e-9);
  return [=](CheckOutcome& o, const Env& env) {
    const double t = tol * env.tol_scale;
    const double margin = eq ? -std::fabs(mm - tm) : mm - tm;
    o.result = margin >= -t;
    o.metrics = {{"theta_mass", tm}, {"mu_mass", mm}, {"relation", eq ? "eq" : "le"}, {"margin", margin}};
    o.rows.push_back({"mass", tm, mm, margin, t, o.result});
  };
}

CheckFn check_convolution(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "theta", "mu", "family", "mollifier_radius", "spacing", "domain", "max_degradation"});
  const Measure theta = measure_ref(c.s, n.at("theta"));
  const Measure mu = measure_ref(c.s, n.at("mu"));
  const FamilyRecipe fam = family_ref(c.s, n.at("family"));
  const double rad = n.positive("mollifier_radius"), h = n.positive("spacing");
  const Domain O = n.domain("domain");
  const double allowed = n.positive_or("max_degradation", 1e-6);
  return [=](CheckOutcome& o, const Env& env) {
    BalayageOptions bo;
    bo.tol_scale = env.tol_scale;
    const TestFamily f = fam();
    const BalayageVerdict base = check_linear(theta, mu, f, bo);
    const Measure beta = convolve_balayage(mu, Mollifier{rad}, O, h);
    const BalayageVerdict conv = check_linear(theta, beta, f, bo);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double d = base.margins[i].margin - conv.margins[i].margin;
      worst = std::max(worst, d);
      o.rows.push_back({f.members[i].id, base.margins[i].margin, conv.margins[i].margin, -d, allowed * env.tol_scale,
                        d <= allowed * env.tol_scale});
    }
    const double dm = std::fabs(beta.total_mass() - mu.total_mass());
    o.result = base.pass && conv.pass && worst <= allowed * env.tol_scale && dm <= 1e-9 * env.tol_scale;
    o.metrics = {{"base", summary(base)},
                 {"convolved", summary(conv)},
                 {"worst_degradation", worst},
                 {"mass_change", dm}};
  };
}

CheckFn check_poisson_jensen(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "theta", "mu", "u", "tol", "expect_values"});
  const Measure theta = measure_ref(c.s, n.at("theta"));
  const Measure mu = measure_ref(c.s, n.at("mu"));
  const NamedField& u = field_ref(c.s, n.at("u"));
  if (!u.riesz) n.at("u").fail("u needs a known Riesz measure (log_modulus field)");
  const RieszFunction rf = *u.riesz;
  const double tol = n.positive_or("tol", 1e-6);
  std::map<std::string, double> expected;
  if (n.has("expect_values")) {
    Node e = n.at("expect_values");
    e.allow({"int_u_theta", "int_u_mu", "green_term"});
    for (const auto& [k, v] : e.members()) expected[k] = v.as_num();
  }
  return [=](CheckOutcome& o, const Env& env) {
    const PoissonJensenReport r = verify_poisson_jensen(theta, mu, rf, tol * env.tol_scale);
    o.result = r.pass;
    o.metrics = encode(r);
    o.rows.push_back({"identity", r.lhs, r.rhs, -r.rel_error, tol * env.tol_scale, r.pass});
    for (const auto& [k, want] : expected) {
      const ExtReal got = k == "int_u_theta" ? r.int_u_theta
                          : k == "int_u_mu"  ? r.int_u_mu
                                             : r.pt_mu_dRiesz - r.pt_theta_dRiesz;
      const double err = got.finite() ? std::fabs(got.value() - want) : INFINITY;
      const bool ok = err <= 1e-9 * env.tol_scale;
      o.rows.push_back({k, got, want, -err, 1e-9 * env.tol_scale, ok});
      o.result = o.result && ok;
    }
  };
}

CheckFn check_pj_suite(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "tol"});
  const double tol = n.positive_or("tol", 1e-6);
  return [=](CheckOutcome& o, const Env& env) {
    o.result = true;
    json inst = json::array();
    double worst = 0.0;
    for (const auto& i : standard_pj_instances()) {
      const PoissonJensenReport r = verify_poisson_jensen(i.theta, i.mu, i.u, tol * env.tol_scale);
      o.result = o.result && r.pass;
      worst = std::max(worst, r.rel_error);
      o.rows.push_back({i.name, r.lhs, r.rhs, -r.rel_error, tol * env.tol_scale, r.pass});
      json j = encode(r);
      j["name"] = i.name;
      inst.push_back(j);
    }
    o.metrics = {{"instances", inst}, {"worst_rel_error", worst}};
  };
}

CheckFn check_green_value(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "ball", "pole", "x", "expected", "tol"});
  const GreenModel g = guarded(n, [&] { return GreenModel(n.ball("ball"), n.point("pole")); });
  const Point x = n.point("x");
  const double want = n.num("expected"), tol = n.positive_or("tol", 1e-9);
  const bool plot = c.plot;
  return [=](CheckOutcome& o, const Env& env) {
    const ExtReal got = g(x);
    const double err = got.finite() ? std::fabs(got.value() - want) : INFINITY;
    o.result = err <= tol * env.tol_scale;
    o.metrics = {{"value", encode(got)}, {"expected", want}, {"error", err}};
    o.rows.push_back({"g", got, want, -err, tol * env.tol_scale, o.result});
    if (plot) o.fields.push_back({"green", sample_square(g.field(), g.domain(), env.grid)});
  };
}

// Six harmonic probes: 1, the coordinates, a quadratic and a kernel centred off D.
std::vector<std::pair<std::string, ScalarField>> harmonic_probes(const Ball& D) {
  const int d = D.center.dim();
  const Domain all = Space{d};
  std::vector<std::pair<std::string, ScalarField>> out;
  out.emplace_back("1", ScalarField::constant(all, 1.0));
  for (int a = 0; a < std::min(d, 2); ++a)
    out.emplace_back("x" + std::to_string(a), ScalarField(all, [a](const Point& p) { return ExtReal(p[a]); }));
  out.emplace_back("x0^2-x1^2",
                   ScalarField(all, [](const Point& p) { return ExtReal(p[0] * p[0] - p[1] * p[1]); }));
  out.emplace_back("x0*x1", ScalarField(all, [](const Point& p) { return ExtReal(p[0] * p[1]); }));
  Point y = D.center;
  y[0] += 1.6 * D.radius;
  y[1] += 0.4 * D.radius;
  out.emplace_back("kernel", ScalarField::kernel(all, y));
  return out;
}

CheckFn check_poisson_reproduction(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "ball", "x", "tol"});
  const Ball D = n.ball("ball");
  const Point x = n.point("x");
  if (distance(x, D.center) >= D.radius) n.at("x").fail("x must lie in the ball");
  const double tol = n.positive_or("tol", 1e-8);
  return [=](CheckOutcome& o, const Env& env) {
    const Measure w = harmonic_measure(D, x);
    o.result = true;
    double worst = 0.0;
    for (const auto& [name, h] : harmonic_probes(D)) {
      const ExtReal lhs = h(x), rhs = w.integrate(h);
      const double err = std::fabs((rhs - lhs).to_double());
      worst = std::max(worst, err);
      const bool ok = err <= tol * env.tol_scale;
      o.result = o.result && ok;
      o.rows.push_back({name, lhs, rhs, -err, tol * env.tol_scale, ok});
    }
    o.metrics = {{"probes", 6}, {"worst_error", worst}};
  };
}

CheckFn check_jensen_inequality(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "ball", "x", "count", "tol"});
  const Ball D = n.ball("ball");
  const Point x = n.point("x");
  if (distance(x, D.center) >= D.radius) n.at("x").fail("x must lie in the ball");
  const int count = n.count("count", 20);
  const double tol = n.positive_or("tol", 1e-8);
  return [=](CheckOutcome& o, const Env& env) {
    const int d = D.center.dim();
    const Domain all = Space{d};
    Rng rng(env.seed);
    std::vector<std::pair<std::string, ScalarField>> probes;
    probes.emplace_back("|x-c|^2", ScalarField(all, [ctr = D.center](const Point& p) {
                          return ExtReal((p - ctr).norm2());
                        }));
    probes.emplace_back("exp(x0)", ScalarField(all, [](const Point& p) { return ExtReal(std::exp(p[0])); }));
    // kernels k(|. - y|) with y inside 0.8 D or in the shell 1.25 R < |y - c| < 2 R
    while (static_cast<int>(probes.size()) < count) {
      Point y(d);
      for (int a = 0; a < d; ++a) y[a] = D.center[a] + rng.uniform(-2.0, 2.0) * D.radius;
      const double s = distance(y, D.center) / D.radius;
      if (s > 2.0 || (s > 0.8 && s < 1.25) || distance(y, x) < 0.05 * D.radius) continue;
      ScalarField k = ScalarField::kernel(all, y);
      k.with_pole(y);
      probes.emplace_back("k" + std::to_string(probes.size()), k);
    }
    const Measure w = harmonic_measure(D, x);
    o.result = true;
    double worst = INFINITY;
    for (const auto& [name, u] : probes) {
      const ExtReal ux = u.eval_unchecked(x), avg = w.integrate(u);
      const double m = (avg - ux).to_double();
      worst = std::min(worst, m);
      const bool ok = m >= -tol * env.tol_scale;
      o.result = o.result && ok;
      o.rows.push_back({name, ux, avg, m, tol * env.tol_scale, ok});
    }
    o.metrics = {{"probes", probes.size()}, {"worst_margin", encode_number(worst)}};
  };
}

CheckFn check_glue_max(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "O", "v", "O0", "v0", "window", "probes"});
  const Domain O = n.domain("O"), O0 = n.domain("O0");
  const ScalarField v = field_ref(c.s, n.at("v")).field, v0 = field_ref(c.s, n.at("v0")).field;
  const Ball window = n.ball("window");
  const int probes = n.count("probes", 500);
  const bool plot = c.plot;
  return [=](CheckOutcome& o, const Env& env) {
    const ScalarField V = glue_max(O, v, O0, v0);
    const ProbeReport r = check_subharmonic(V, random_probes(V, window, probes, env.seed, 0.005), 1e-6 * env.tol_scale);
    o.result = r.pass();
    o.metrics = probe_summary(r);
    probe_rows(o, r, "");
    if (plot) o.fields.push_back({"V", sample_square(V, window, env.grid)});
  };
}

CheckFn check_glue_quantitative(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "O", "v", "O0", "g", "m_v", "M_v", "m_g", "M_g", "window", "probes"});
  QuantitativeSpec q{n.domain("O"),      field_ref(c.s, n.at("v")).field, n.domain("O0"),
                     field_ref(c.s, n.at("g")).field, n.num("m_v"), n.num("M_v"), n.num("m_g"), n.num("M_g")};
  const Ball window = n.ball("window");
  const int probes = n.count("probes", 500);
  const bool plot = c.plot;
  return [=](CheckOutcome& o, const Env& env) {
    const ScalarField V = glue_quantitative(q);
    const ProbeReport r = check_subharmonic(V, random_probes(V, window, probes, env.seed, 0.005), 1e-6 * env.tol_scale);
    o.result = r.pass();
    o.metrics = probe_summary(r);
    probe_rows(o, r, "");
    if (plot) o.fields.push_back({"V", sample_square(V, window, env.grid)});
  };
}

CheckFn check_glue_with_green(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "v", "O", "D", "S_o", "S", "m_v", "M_v", "probes", "fit_tol"});
  const ScalarField v = field_ref(c.s, n.at("v")).field;
  const Ball O = n.ball("O"), Dg = n.ball("D"), So = n.ball("S_o"), S = n.ball("S");
  const double m_v = n.num("m_v"), M_v = n.num("M_v");
  const int probes = n.count("probes", 500);
  const double fit_tol = n.positive_or("fit_tol", 0.05);
  const bool plot = c.plot;
  return [=](CheckOutcome& o, const Env& env) {
    const GreenModel green(Dg, So.center);
    const GreenGlue gg = glue_with_green(v, O, green, So, S, m_v, M_v);
    const auto pr = random_probes(gg.V, O, probes, env.seed, 0.005);
    const ProbeReport r = check_subharmonic(gg.V, pr, 1e-6 * env.tol_scale);
    probe_rows(o, r, "");
    // the two-sided bounds on the layer S \ S_o and inside S_o, at the probe centres
    const double bt = 1e-9 * env.tol_scale;
    std::size_t bound_violations = 0, bounded = 0;
    for (std::size_t i = 0; i < pr.size(); ++i) {
      const Point& x = pr[i].x;
      const double s = distance(x, So.center);
      if (s >= S.radius || s == 0.0) continue;
      ++bounded;
      const double g = green(x).value(), val = gg.V(x).value();
      const double upper = (s > So.radius ? gg.M_v_plus : 0.0) + 2 * gg.coefficient * g;
      const double lower = s > So.radius ? v(x).value() : 0.0;
      const double m = std::min(upper - val, val - lower);
      const bool ok = m >= -bt;
      bound_violations += ok ? 0 : 1;
      o.rows.push_back({"bound" + std::to_string(i), val, upper, m, bt, ok});
    }
    const PoleFit fit = pole_coefficient_fit(gg.V, So.center);
    const double ratio = fit.coefficient / (2 * gg.coefficient);
    const bool fit_ok = std::fabs(ratio - 1.0) <= fit_tol * env.tol_scale;
    o.rows.push_back({"pole_fit", fit.coefficient, 2 * gg.coefficient, fit_tol * env.tol_scale - std::fabs(ratio - 1),
                      fit_tol * env.tol_scale, fit_ok});
    o.result = r.pass() && bound_violations == 0 && fit_ok;
    o.metrics = probe_summary(r);
    o.metrics["coefficient"] = gg.coefficient;
    o.metrics["M_g"] = gg.M_g;
    o.metrics["bounded_probes"] = bounded;
    o.metrics["bound_violations"] = bound_violations;
    o.metrics["pole_fit"] = fit.coefficient;
    o.metrics["pole_fit_ratio"] = ratio;
    if (plot) o.fields.push_back({"V", sample_square(gg.V, O, env.grid)});
  };
}

PotentialKind kind_of(const Node& n) {
  return n.choice("kind", {"arens-singer", "jensen"}, "arens-singer") == "jensen" ? PotentialKind::Jensen
                                                                                  : PotentialKind::ArensSinger;
}

// Ten positive smooth probes for comparing measures.
std::vector<std::function<double(const Point&)>> smooth_probes(int d) {
  std::vector<std::function<double(const Point&)>> out;
  out.push_back([](const Point&) { return 1.0; });
  for (int a = 0; a < 2; ++a) out.push_back([a](const Point& p) { return 2.0 + p[a]; });
  out.push_back([](const Point& p) { return 1.0 + p[0] * p[0]; });
  out.push_back([](const Point& p) { return 1.0 + p[0] * p[1]; });
  out.push_back([d](const Point& p) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += p[a] * p[a];
    return std::exp(-s);
  });
  for (double c : {0.3, -0.4}) out.push_back([c](const Point& p) { return std::exp(-4.0 * (p[0] - c) * (p[0] - c)); });
  out.push_back([](const Point& p) { return 1.5 + std::sin(2.0 * p[0] + p[1]); });
  out.push_back([](const Point& p) { return 1.0 / (1.0 + p[0] * p[0] + 2.0 * p[1] * p[1]); });
  return out;
}

ASPotential certified_potential(const Measure& mu, const Point& x, PotentialKind kind, double tol_scale) {
  BalayageOptions bo;
  bo.tol_scale = tol_scale;
  const Certificate cert = certify(mu, x, kind, bo);
  if (!cert.verdict.pass)
    throw RejectError("certificate failed at member " + cert.verdict.witness_id);
  return to_potential(mu, x, cert);
}

CheckFn check_duality_roundtrip(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "mu", "x", "kind", "spacings", "tol", "mass_tol"});
  const Measure mu = measure_ref(c.s, n.at("mu"));
  const Point x = n.point("x");
  const PotentialKind kind = kind_of(n);
  std::vector<double> hs{0.02, 0.01};
  if (n.has("spacings")) {
    hs.clear();
    for (const Node& h : n.at("spacings").items()) {
      hs.push_back(h.as_num());
      if (!(hs.back() > 0)) h.fail("spacings must be positive");
    }
    if (hs.empty()) n.at("spacings").fail("needs at least one spacing");
  }
  const double tol = n.positive_or("tol", 0.02), mass_tol = n.positive_or("mass_tol", 0.03);
  const bool plot = c.plot;
  return [=](CheckOutcome& o, const Env& env) {
    const ASPotential V = certified_potential(mu, x, kind, env.tol_scale);
    const auto probes = smooth_probes(mu.dim());
    std::vector<double> errs;
    json per = json::array();
    bool mass_ok = true;
    for (double h : hs) {
      const RecoveredMeasure rec = from_potential(V, h);
      double worst = 0.0;
      for (const auto& f : probes) {
        const double a = integrate(mu, f), b = integrate(rec.measure, f);
        worst = std::max(worst, std::fabs(a - b) / std::fabs(a));
      }
      errs.push_back(worst);
      const double dm = std::fabs(rec.measure.total_mass() - mu.total_mass()) / mu.total_mass();
      mass_ok = mass_ok && dm <= mass_tol * env.tol_scale;
      std::ostringstream id;
      id << "h=" << h;
      o.rows.push_back({id.str(), worst, tol * env.tol_scale, tol * env.tol_scale - worst, tol * env.tol_scale,
                        worst <= tol * env.tol_scale});
      per.push_back({{"h", h}, {"probe_error", worst}, {"mass_error", dm}, {"atom", rec.atom}});
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < errs.size(); ++i) decreasing = decreasing && errs[i] < errs[i - 1];
    o.result = errs.front() <= tol * env.tol_scale && decreasing && mass_ok;
    o.metrics = {{"kind", to_string(kind)},
                 {"pole_coefficient", V.pole_coefficient},
                 {"spacings", per},
                 {"decreasing", decreasing}};
    if (plot) o.fields.push_back({"V", sample_square(V.field, V.window, env.grid)});
  };
}

CheckFn check_phragmen_lindelof(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "mu", "x", "kind", "D", "S_o", "r", "probes"});
  const Measure mu = measure_ref(c.s, n.at("mu"));
  const Point x = n.point("x");
  const PotentialKind kind = kind_of(n);
  const Ball D = n.ball("D"), So = n.ball("S_o");
  const double r = n.positive("r");
  const int probes = n.count("probes", 500);
  const bool plot = c.plot;
  return [=](CheckOutcome& o, const Env& env) {
    const ASPotential V = certified_potential(mu, x, kind, env.tol_scale);
    const GreenModel g(D, x);
    const PhragmenLindelofReport rep = phragmen_lindelof_bound(V, g, So, r, probes, env.seed);
    o.result = rep.pass();
    o.metrics = {{"probes", rep.probes},
                 {"worst_upper_margin", encode_number(rep.worst_upper_margin)},
                 {"lower_checked", rep.lower_checked}};
    o.rows.push_back({"upper", 0.0, rep.worst_upper_margin, rep.worst_upper_margin, 1e-7, rep.upper_pass});
    if (rep.lower_checked) {
      o.metrics["lower_bound"] = rep.lower_bound;
      o.metrics["probed_inf"] = rep.probed_inf;
      o.rows.push_back({"lower", rep.probed_inf, rep.lower_bound, rep.probed_inf - rep.lower_bound, 0.0,
                        rep.lower_pass});
    }
    if (plot) o.fields.push_back({"V", sample_square(V.field, D, env.grid)});
  };
}

struct HolParams {
  Ball D, S_o;
  double r = 0.1, b_minus = -1.0, b_plus = 1.0;
  int count = 32;
};

HolParams hol_params(const Node& n, bool with_D) {
  HolParams p;
  p.D = with_D ? n.ball("D") : Ball{Point{0, 0}, 1.0};
  p.S_o = n.ball("S_o");
  p.r = n.positive("r");
  p.b_minus = n.num("b_minus");
  p.b_plus = n.positive("b_plus");
  if (!(p.b_minus < 0)) n.at("b_minus").fail("b_minus must be negative");
  p.count = n.count("count", 32);
  return p;
}

json stage_json(const HolStage& s) {
  return {{"C", encode_number(s.C)}, {"pass", s.pass}, {"status", to_string(s.verdict.status)},
          {"members", s.verdict.margins.size()}, {"witness", s.verdict.witness_id}};
}

CheckFn check_zeros_thm(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "function", "majorant", "D", "S_o", "r", "b_minus", "b_plus", "count", "subdivisor"});
  const HoloFunction f = function_ref(c.s, n.at("function"));
  const HolParams p = hol_params(n, true);
  const GrowthMajorant M = majorant(n.at("majorant"), p.D);
  std::optional<std::vector<Zero>> sub;
  if (n.has("subdivisor")) sub = zero_set(n.at("subdivisor"));
  const Impl* s = &c.s;
  const bool plot = c.plot;
  return [=](CheckOutcome& o, const Env& env) {
    BalayageOptions bo;
    bo.tol_scale = env.tol_scale;
    const HolFamilies& fam = s->hol(p.D, p.S_o, p.r, p.b_minus, p.b_plus, p.count);
    const ThmHolReport r = check_thm_hol(f, M, p.D, p.S_o, p.r, p.b_minus, p.b_plus, fam, sub, bo);
    o.result = r.pass();
    o.metrics = {{"ZI", stage_json(r.zI)},
                 {"ZII", stage_json(r.zII)},
                 {"ZIII", stage_json(r.zIII)},
                 {"layer_mass", r.layer_mass},
                 {"implication_bound", encode_number(r.implication_bound)},
                 {"implication_holds", r.implication_holds},
                 {"zeros", encode(f.zeros())}};
    verdict_rows(o, r.zI.verdict, "ZI:");
    verdict_rows(o, r.zII.verdict, "ZII:");
    verdict_rows(o, r.zIII.verdict, "ZIII:");
    o.rows.push_back({"implication", r.zII.C, r.implication_bound, r.implication_bound - r.zII.C, 1e-6,
                      r.implication_holds});
    if (plot) o.fields.push_back({"log_abs_f", sample_square(f.log_modulus(), p.D, env.grid)});
  };
}

CheckFn check_criterium(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "function", "zeros", "majorant", "D", "S_o", "r", "b_minus", "b_plus", "count"});
  const HoloFunction f = function_ref(c.s, n.at("function"));
  const HolParams p = hol_params(n, true);
  const GrowthMajorant M = majorant(n.at("majorant"), p.D);
  const std::vector<Zero> Z = n.has("zeros") ? zero_set(n.at("zeros")) : guarded(n, [&] { return f.zeros(); });
  const Impl* s = &c.s;
  return [=](CheckOutcome& o, const Env& env) {
    BalayageOptions bo;
    bo.tol_scale = env.tol_scale;
    const HolFamilies& fam = s->hol(p.D, p.S_o, p.r, p.b_minus, p.b_plus, p.count);
    const CriteriumReport r = check_criterium_forward(Z, f, M, p.D, p.S_o, p.r, p.b_minus, p.b_plus, fam, bo);
    o.result = r.pass();
    o.metrics = {{"z1", r.z1}, {"z2", stage_json(r.z2)}, {"z3", stage_json(r.z3)}, {"z4", stage_json(r.z4)}};
    verdict_rows(o, r.z2.verdict, "z2:");
    verdict_rows(o, r.z3.verdict, "z3:");
    verdict_rows(o, r.z4.verdict, "z4:");
  };
}

CheckFn check_growth_trend(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "zeros", "lengths", "majorant", "S_o", "r", "b_minus", "b_plus", "count"});
  if (c.s.dim != 2) n.fail("growth trends need dimension 2");
  const std::vector<Complex> Z = expand(zero_set(n.at("zeros")));
  std::vector<std::size_t> lengths;
  for (const Node& l : n.at("lengths").items()) {
    const int v = l.as_int();
    if (v < 1 || static_cast<std::size_t>(v) > Z.size()) l.fail("length outside 1.." + std::to_string(Z.size()));
    if (!lengths.empty() && static_cast<std::size_t>(v) <= lengths.back()) l.fail("lengths must increase");
    lengths.push_back(static_cast<std::size_t>(v));
  }
  if (lengths.size() < 2) n.at("lengths").fail("needs at least two lengths");
  const HolParams p = hol_params(n, false);
  const GrowthMajorant M = majorant(n.at("majorant"), p.D);
  const Impl* s = &c.s;
  return [=](CheckOutcome& o, const Env&) {
    const HolFamilies& fam = s->hol(p.D, p.S_o, p.r, p.b_minus, p.b_plus, p.count);
    const GrowthTrend t = zero_growth_trend(Z, M, p.S_o, lengths, fam);
    // passes when the constants settle; a flagged divergence fails the check
    o.result = !t.divergent;
    o.metrics = {{"lengths", t.lengths}, {"blaschke_sums", t.blaschke_sums}, {"divergent", t.divergent}};
    json cs = json::array();
    for (double v : t.C) cs.push_back(encode_number(v));
    o.metrics["C"] = cs;
    for (std::size_t i = 0; i < t.C.size(); ++i)
      o.rows.push_back({"n=" + std::to_string(t.lengths[i]), t.C[i], t.blaschke_sums[i],
                        i ? t.C[i] - t.C[i - 1] : 0.0, 0.0, !t.divergent});
  };
}

CheckFn check_poincare_lelong(CheckCtx& c) {
  const Node& n = c.n;
  n.allow({COMMON, "function", "region", "h", "trend"});
  const HoloFunction f = function_ref(c.s, n.at("function"));
  const Ball region = n.ball("region");
  const double h = n.positive_or("h", 0.01);
  const bool trend = n.boolean_or("trend", true);
  const bool plot = c.plot;
  return [=](CheckOutcome& o, const Env& env) {
    auto windows = [&](const PoincareLelongReport& r, const std::string& tag) {
      for (const auto& w : r.windows) {
        std::ostringstream id;
        id << tag << "(" << w.zero.z.real() << "," << w.zero.z.imag() << ")";
        o.rows.push_back({id.str(), w.mass, w.zero.multiplicity, -w.rel_error, 0.05 * env.tol_scale,
                          w.rel_error <= 0.05 * env.tol_scale});
      }
    };
    if (trend) {
      const PoincareLelongTrend t = poincare_lelong_trend(f, region, h);
      o.result = t.pass;
      windows(t.coarse, "h:");
      windows(t.fine, "h/2:");
      o.metrics = {{"coarse_worst", t.coarse.worst_rel_error},
                   {"fine_worst", t.fine.worst_rel_error},
                   {"ratios", t.ratios},
                   {"total_mass", t.coarse.total_mass}};
    } else {
      const PoincareLelongReport r = poincare_lelong_check(f, region, h);
      o.result = r.pass;
      windows(r, "h:");
      o.metrics = {{"worst", r.worst_rel_error}, {"total_mass", r.total_mass}};
    }
    if (plot) o.fields.push_back({"log_abs_f", sample_square(f.log_modulus(), region, env.grid)});
  };
}

#undef COMMON

using Preparer = CheckFn (*)(CheckCtx&);

const std::map<std::string, Preparer>& preparers() {
  static const std::map<std::string, Preparer> m = {
      {"balayage", check_balayage},
      {"mass", check_mass},
      {"convolution_closure", check_convolution},
      {"poisson_jensen", check_poisson_jensen},
      {"pj_suite", check_pj_suite},
      {"green_value", check_green_value},
      {"poisson_reproduction", check_poisson_reproduction},
      {"jensen_inequality", check_jensen_inequality},
      {"glue_max", check_glue_max},
      {"glue_quantitative", check_glue_quantitative},
      {"glue_with_green", check_glue_with_green},
      {"duality_roundtrip", check_duality_roundtrip},
      {"phragmen_lindelof", check_phragmen_lindelof},
      {"zeros_thm", check_zeros_thm},
      {"criterium", check_criterium},
      {"growth_trend", check_growth_trend},
      {"poincare_lelong", check_poincare_lelong},
  };
  return m;
}

void assemble(Impl& s) {
  Node root(s, s.doc, "");
  if (!s.doc.is_object()) root.fail("a scenario is a JSON object");
  root.allow({"schema", "name", "description", "dimension", "seed", "grid", "domain", "measures", "fields",
              "functions", "families", "checks", "outputs"});
  {
    Node v = root.at("schema");
    if (!v.raw().is_number_integer() || v.raw().get<int>() != 1) v.fail("unsupported schema version (expected 1)");
  }
  s.name = root.str("name");
  if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos) root.at("name").fail("bad scenario name");
  if (root.has("description")) root.str("description");
  s.dim = root.has("dimension") ? root.at("dimension").as_int() : 2;
  if (s.dim != 2 && s.dim != 3) root.at("dimension").fail("dimension must be 2 or 3");
  if (root.has("seed")) {
    Node v = root.at("seed");
    if (!v.raw().is_number_unsigned()) v.fail("seed must be a non-negative integer");
    s.seed = v.raw().get<std::uint64_t>();
  }
  if (root.has("grid")) {
    s.grid = root.at("grid").as_int();
    if (*s.grid < 2 || *s.grid > 4096) root.at("grid").fail("grid must lie in 2..4096");
  }
  if (root.has("domain")) root.domain("domain");
  if (root.has("outputs")) {
    Node out = root.at("outputs");
    out.allow({"dir"});
    if (out.has("dir")) s.out = out.str("dir");
  }

  if (root.has("functions"))
    for (const auto& [name, n] : root.at("functions").members()) function_ref(s, Node(s, json(name), n.ptr()));
  if (root.has("measures"))
    for (const auto& [name, n] : root.at("measures").members()) measure_ref(s, Node(s, json(name), n.ptr()));
  if (root.has("fields"))
    for (const auto& [name, n] : root.at("fields").members()) s.fields.emplace(name, build_field(s, n));
  if (root.has("families"))
    for (const auto& [name, n] : root.at("families").members()) s.families.emplace(name, build_family(s, n));

  const auto checks = root.at("checks").items();
  if (checks.empty()) root.at("checks").fail("at least one check is required");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const Node& n = checks[i];
    const std::string type = n.str("type");
    auto it = preparers().find(type);
    if (it == preparers().end()) n.at("type").fail("unknown check type '" + type + "'");
    PreparedCheck pc;
    pc.type = type;
    pc.id = n.str_or("id", type + "-" + std::to_string(i));
    if (pc.id.empty() || pc.id.find_first_of("/\\,\"") != std::string::npos) n.at("id").fail("bad check id");
    if (!ids.insert(pc.id).second) n.at("id").fail("duplicate check id '" + pc.id + "'");
    pc.expect_pass = n.choice("expect", {"pass", "fail"}, "pass") == "pass";
    CheckCtx ctx{s, n, n.boolean_or("plot", false)};
    if (ctx.plot && s.dim != 2) n.at("plot").fail("field plots need dimension 2");
    pc.run = it->second(ctx);
    s.checks.push_back(std::move(pc));
  }
}

}  // namespace

// ---- Scenario -------------------------------------------------------------

Scenario::Scenario(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Scenario::Scenario(Scenario&&) noexcept = default;
Scenario& Scenario::operator=(Scenario&&) noexcept = default;
Scenario::~Scenario() = default;

const std::string& Scenario::name() const { return impl_->name; }
const json& Scenario::document() const { return impl_->doc; }
std::optional<std::string> Scenario::output_dir() const { return impl_->out; }

Scenario parse_scenario(const std::string& text, const std::string& source) {
  auto impl = std::make_unique<Impl>();
  impl->source = source;
  try {
    impl->doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    std::string msg = e.what();
    if (auto p = msg.find("] "); p != std::string::npos) msg = msg.substr(p + 2);
    throw SchemaError(source, line, "", msg);
  }
  impl->lines = LineMap(text);
  assemble(*impl);
  return Scenario(std::move(impl));
}

Scenario load_scenario(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw SchemaError(file.string(), 0, "", "cannot read the file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), file.string());
}

ScenarioReport run_scenario(const Scenario& scenario, const RunOptions& opts) {
  const Impl& s = *scenario.impl_;
  ScenarioReport rep;
  rep.name = s.name;
  rep.seed = opts.seed.value_or(s.seed.value_or(0));
  rep.grid = opts.grid.value_or(s.grid.value_or(256));
  rep.tol_scale = opts.tol_scale;
  if (!(rep.tol_scale > 0)) throw PreconditionError("tol-scale must be positive");
  if (rep.grid < 2) throw PreconditionError("grid must be at least 2");

  const std::size_t n = s.checks.size();
  rep.checks.resize(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      const PreparedCheck& pc = s.checks[i];
      CheckOutcome& o = rep.checks[i];
      o.id = pc.id;
      o.type = pc.type;
      o.expect_pass = pc.expect_pass;
      try {
        pc.run(o, Env{rep.seed + i, rep.grid, rep.tol_scale});
      } catch (const std::exception& e) {
        o.result = false;
        o.error = e.what();
        o.rows.clear();
        o.fields.clear();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t jobs = std::min<std::size_t>(n, opts.jobs > 0 ? static_cast<std::size_t>(opts.jobs) : hw);
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rep;
}

// ---- reports --------------------------------------------------------------

bool ScenarioReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.pass(); });
}

json ScenarioReport::verdicts() const {
  json list = json::array();
  std::size_t passed = 0;
  for (const auto& c : checks) {
    json j{{"id", c.id},
           {"type", c.type},
           {"expect", c.expect_pass ? "pass" : "fail"},
           {"result", !c.error.empty() ? "error" : c.result ? "pass" : "fail"},
           {"pass", c.pass()},
           {"metrics", c.metrics}};
    if (!c.error.empty()) j["error"] = c.error;
    passed += c.pass() ? 1 : 0;
    list.push_back(j);
  }
  return {{"schema", 1},
          {"scenario", name},
          {"seed", seed},
          {"grid", grid},
          {"tol_scale", tol_scale},
          {"pass", pass()},
          {"passed", passed},
          {"total", checks.size()},
          {"checks", list}};
}

std::string ScenarioReport::margins_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "check,item,lhs,rhs,margin,tol,ok\n";
  for (const auto& c : checks)
    for (const auto& r : c.rows)
      os << c.id << ",\"" << r.item << "\"," << r.lhs.str() << ',' << r.rhs.str() << ',' << ExtReal(r.margin).str()
         << ',' << r.tol << ',' << (r.ok ? 1 : 0) << '\n';
  return os.str();
}

void write_artifacts(const ScenarioReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  auto put = [](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
  };
  put(dir / "verdicts.json", r.verdicts().dump(2) + "\n");
  put(dir / "margins.csv", r.margins_csv());
  bool any = false;
  for (const auto& c : r.checks) any = any || !c.fields.empty();
  if (!any) return;
  fs::create_directories(dir / "fields");
  for (const auto& c : r.checks)
    for (const auto& f : c.fields) put(dir / "fields" / (c.id + "-" + f.name + ".csv"), field_csv(f.values));
}

}  // namespace potkit
