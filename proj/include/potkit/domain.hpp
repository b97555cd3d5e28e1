#pragma once

#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "potkit/point.hpp"

namespace potkit {

struct Ball {
  Point center;
  double radius = 1.0;
};

// center-concentric shell r_in < |x - c| < r_out; r_out may be +inf (ball exterior).
struct Annulus {
  Point center;
  double inner = 0.5;
  double outer = 1.0;
};

// The whole space R^d.
struct Space {
  int dim = 2;
};

// Union of closed cubes of side `spacing` centred at origin + i*spacing for
// masked multi-indices i.  Index is row-major with axis 0 fastest.
class GridDomain {
 public:
  GridDomain() = default;
  GridDomain(Point origin, double spacing, std::vector<int> shape);
  GridDomain(Point origin, double spacing, std::vector<int> shape, std::vector<std::uint8_t> mask);

  // Frame covering the box [lo, hi] with the given spacing, cells centred on the lattice
  // lo + (i + offset) * spacing.  Mask is empty.
  static GridDomain covering(const Point& lo, const Point& hi, double spacing, double offset = 0.5);

  int dim() const { return origin_.dim(); }
  const Point& origin() const { return origin_; }
  double spacing() const { return h_; }
  const std::vector<int>& shape() const { return shape_; }
  std::size_t size() const { return mask_.size(); }
  double cell_volume() const;

  bool masked(std::size_t idx) const { return mask_[idx] != 0; }
  void set(std::size_t idx, bool on) { mask_[idx] = on ? 1 : 0; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  std::size_t count() const;

  std::size_t index(const std::array<int, kMaxDim>& ijk) const;
  std::array<int, kMaxDim> multi_index(std::size_t idx) const;
  Point center(std::size_t idx) const;
  // Cell whose closed cube contains p (ties broken downward); false outside the frame.
  bool locate(const Point& p, std::size_t& idx) const;
  // Face neighbours (4 in 2D, 6 in 3D) inside the frame.
  std::vector<std::size_t> neighbours(std::size_t idx) const;
  bool on_frame_edge(std::size_t idx) const;
  // Masked cells with an unmasked (or out-of-frame) face neighbour.
  bool is_boundary_cell(std::size_t idx) const;
  bool same_frame(const GridDomain& o) const;

 private:
  Point origin_;
  double h_ = 1.0;
  std::vector<int> shape_;
  std::vector<std::uint8_t> mask_;
};

class Domain {
 public:
  using Shape = std::variant<Ball, Annulus, GridDomain, Space>;

  // NOLINTBEGIN(google-explicit-constructor)
  Domain(Ball b);
  Domain(Annulus a);
  Domain(GridDomain g);
  Domain(Space s);
  // NOLINTEND(google-explicit-constructor)

  const Shape& shape() const { return shape_; }
  int dim() const;

  bool contains(const Point& p) const;
  // Membership in the closure, with an absolute slack.
  bool contains_closure(const Point& p, double slack = 1e-12) const;
  // Distance from p to the boundary (infinite for Space).
  double boundary_distance(const Point& p) const;
  // Smallest known ball containing the domain (radius inf when unbounded).
  Ball bounding_ball() const;
  // n deterministic points on the boundary (spheres: equispaced / Fibonacci, grids: boundary cells).
  std::vector<Point> boundary_samples(int n) const;

  const Ball* ball() const { return std::get_if<Ball>(&shape_); }
  const Annulus* annulus() const { return std::get_if<Annulus>(&shape_); }
  const GridDomain* grid() const { return std::get_if<GridDomain>(&shape_); }

 private:
  Shape shape_;
};

// Deterministic, well spread points on the unit sphere S^{d-1} (d = 1, 2, 3).
std::vector<Point> sphere_directions(int d, int n);

}  // namespace potkit
