#include "potkit/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "potkit/errors.hpp"

namespace potkit {

namespace {

double cube_distance(const Point& p, const Point& c, double half) {
  double s = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    double e = std::max(0.0, std::fabs(p[i] - c[i]) - half);
    s += e * e;
  }
  return std::sqrt(s);
}

}  // namespace

GridDomain::GridDomain(Point origin, double spacing, std::vector<int> shape)
    : origin_(origin), h_(spacing), shape_(std::move(shape)) {
  if (!(h_ > 0.0)) throw PreconditionError("grid spacing must be positive");
  if (static_cast<int>(shape_.size()) != origin_.dim())
    throw PreconditionError("grid shape does not match origin dimension");
  std::size_t n = 1;
  for (int s : shape_) {
    if (s < 1) throw PreconditionError("grid shape entries must be positive");
    n *= static_cast<std::size_t>(s);
  }
  mask_.assign(n, 0);
}

GridDomain::GridDomain(Point origin, double spacing, std::vector<int> shape,
                       std::vector<std::uint8_t> mask)
    : GridDomain(origin, spacing, std::move(shape)) {
  if (mask.size() != mask_.size()) throw PreconditionError("grid mask size mismatch");
  mask_ = std::move(mask);
}

GridDomain GridDomain::covering(const Point& lo, const Point& hi, double spacing, double offset) {
  std::vector<int> shape(static_cast<std::size_t>(lo.dim()));
  Point origin = lo;
  for (int i = 0; i < lo.dim(); ++i) {
    shape[static_cast<std::size_t>(i)] =
        std::max(1, static_cast<int>(std::ceil((hi[i] - lo[i]) / spacing - 1e-9)));
    origin[i] = lo[i] + offset * spacing;
  }
  return GridDomain(origin, spacing, shape);
}

double GridDomain::cell_volume() const { return std::pow(h_, dim()); }

std::size_t GridDomain::count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

std::size_t GridDomain::index(const std::array<int, kMaxDim>& ijk) const {
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (int a = 0; a < dim(); ++a) {
    idx += static_cast<std::size_t>(ijk[a]) * stride;
    stride *= static_cast<std::size_t>(shape_[a]);
  }
  return idx;
}

std::array<int, kMaxDim> GridDomain::multi_index(std::size_t idx) const {
  std::array<int, kMaxDim> ijk{};
  for (int a = 0; a < dim(); ++a) {
    ijk[a] = static_cast<int>(idx % static_cast<std::size_t>(shape_[a]));
    idx /= static_cast<std::size_t>(shape_[a]);
  }
  return ijk;
}

Point GridDomain::center(std::size_t idx) const {
  auto ijk = multi_index(idx);
  Point p = origin_;
  for (int a = 0; a < dim(); ++a) p[a] += ijk[a] * h_;
  return p;
}

bool GridDomain::locate(const Point& p, std::size_t& idx) const {
  std::array<int, kMaxDim> ijk{};
  for (int a = 0; a < dim(); ++a) {
    double t = (p[a] - origin_[a]) / h_ + 0.5;
    int i = static_cast<int>(std::floor(t));
    if (i == shape_[a] && t - i < 1e-12) i -= 1;  // far face of the last cell
    if (i < 0 || i >= shape_[a]) return false;
    ijk[a] = i;
  }
  idx = index(ijk);
  return true;
}

std::vector<std::size_t> GridDomain::neighbours(std::size_t idx) const {
  std::vector<std::size_t> out;
  auto ijk = multi_index(idx);
  for (int a = 0; a < dim(); ++a) {
    for (int s : {-1, 1}) {
      auto n = ijk;
      n[a] += s;
      if (n[a] < 0 || n[a] >= shape_[a]) continue;
      out.push_back(index(n));
    }
  }
  return out;
}

bool GridDomain::on_frame_edge(std::size_t idx) const {
  auto ijk = multi_index(idx);
  for (int a = 0; a < dim(); ++a)
    if (ijk[a] == 0 || ijk[a] == shape_[a] - 1) return true;
  return false;
}

bool GridDomain::is_boundary_cell(std::size_t idx) const {
  if (!masked(idx)) return false;
  if (on_frame_edge(idx)) return true;
  for (auto n : neighbours(idx))
    if (!masked(n)) return true;
  return false;
}

bool GridDomain::same_frame(const GridDomain& o) const {
  return origin_ == o.origin_ && h_ == o.h_ && shape_ == o.shape_;
}

Domain::Domain(Ball b) : shape_(b) {
  if (!(b.radius > 0.0)) throw PreconditionError("ball radius must be positive");
}

Domain::Domain(Annulus a) : shape_(a) {
  if (!(a.inner > 0.0) || !(a.inner < a.outer))
    throw PreconditionError("annulus radii must satisfy 0 < inner < outer");
}

Domain::Domain(GridDomain g) : shape_(std::move(g)) {
  if (std::get<GridDomain>(shape_).count() == 0) throw PreconditionError("grid mask is empty");
}

Domain::Domain(Space s) : shape_(s) {}

int Domain::dim() const {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Space>) {
          return s.dim;
        } else if constexpr (std::is_same_v<T, GridDomain>) {
          return s.dim();
        } else {
          return s.center.dim();
        }
      },
      shape_);
}

bool Domain::contains(const Point& p) const {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return distance(p, s.center) < s.radius;
        } else if constexpr (std::is_same_v<T, Annulus>) {
          double r = distance(p, s.center);
          return r > s.inner && r < s.outer;
        } else if constexpr (std::is_same_v<T, GridDomain>) {
          std::size_t idx = 0;
          return s.locate(p, idx) && s.masked(idx);
        } else {
          return true;
        }
      },
      shape_);
}

bool Domain::contains_closure(const Point& p, double slack) const {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return distance(p, s.center) <= s.radius * (1.0 + slack) + slack;
        } else if constexpr (std::is_same_v<T, Annulus>) {
          double r = distance(p, s.center);
          return r >= s.inner * (1.0 - slack) - slack && r <= s.outer * (1.0 + slack) + slack;
        } else if constexpr (std::is_same_v<T, GridDomain>) {
          std::size_t idx = 0;
          return s.locate(p, idx) && s.masked(idx);
        } else {
          return true;
        }
      },
      shape_);
}

double Domain::boundary_distance(const Point& p) const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return std::fabs(s.radius - distance(p, s.center));
        } else if constexpr (std::is_same_v<T, Annulus>) {
          double r = distance(p, s.center);
          return std::min(std::fabs(r - s.inner), std::fabs(s.outer - r));
        } else if constexpr (std::is_same_v<T, GridDomain>) {
          const double half = 0.5 * s.spacing();
          double best = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < s.size(); ++i) {
            if (!s.masked(i)) {
              bool touches = false;
              for (auto n : s.neighbours(i)) touches = touches || s.masked(n);
              if (touches) best = std::min(best, cube_distance(p, s.center(i), half));
            } else if (s.on_frame_edge(i)) {
              // distance to the outer face of the frame
              auto ijk = s.multi_index(i);
              for (int a = 0; a < s.dim(); ++a) {
                if (ijk[a] == 0) best = std::min(best, p[a] - (s.center(i)[a] - half));
                if (ijk[a] == s.shape()[a] - 1)
                  best = std::min(best, s.center(i)[a] + half - p[a]);
              }
            }
          }
          return std::max(best, 0.0);
        } else {
          return std::numeric_limits<double>::infinity();
        }
      },
      shape_);
}

Ball Domain::bounding_ball() const {
  return std::visit(
      [&](const auto& s) -> Ball {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return s;
        } else if constexpr (std::is_same_v<T, Annulus>) {
          return Ball{s.center, s.outer};
        } else if constexpr (std::is_same_v<T, GridDomain>) {
          Point lo = s.origin();
          Point hi = s.origin();
          for (int a = 0; a < s.dim(); ++a) hi[a] += (s.shape()[a] - 1) * s.spacing();
          Point c = 0.5 * (lo + hi);
          double r = 0.5 * distance(lo, hi) + std::sqrt(s.dim()) * 0.5 * s.spacing();
          return Ball{c, r};
        } else {
          return Ball{Point(s.dim), std::numeric_limits<double>::infinity()};
        }
      },
      shape_);
}

std::vector<Point> sphere_directions(int d, int n) {
  std::vector<Point> out;
  if (d == 1) {
    out.push_back(Point{-1.0});
    out.push_back(Point{1.0});
    return out;
  }
  out.reserve(static_cast<std::size_t>(n));
  if (d == 2) {
    for (int k = 0; k < n; ++k) {
      double t = 2.0 * std::numbers::pi * k / n;
      out.push_back(Point{std::cos(t), std::sin(t)});
    }
    return out;
  }
  if (d != 3) throw PreconditionError("sphere_directions supports d <= 3");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    double z = 1.0 - (2.0 * k + 1.0) / n;
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * k;
    out.push_back(Point{rho * std::cos(phi), rho * std::sin(phi), z});
  }
  return out;
}

std::vector<Point> Domain::boundary_samples(int n) const {
  std::vector<Point> out;
  const int d = dim();
  if (const auto* b = ball()) {
    for (const auto& u : sphere_directions(d, n)) out.push_back(b->center + b->radius * u);
  } else if (const auto* a = annulus()) {
    for (const auto& u : sphere_directions(d, n)) out.push_back(a->center + a->inner * u);
    if (std::isfinite(a->outer))
      for (const auto& u : sphere_directions(d, n)) out.push_back(a->center + a->outer * u);
  } else if (const auto* g = grid()) {
    for (std::size_t i = 0; i < g->size(); ++i)
      if (g->is_boundary_cell(i)) out.push_back(g->center(i));
  }
  return out;
}

}  // namespace potkit
