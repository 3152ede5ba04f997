#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "grl/errors.hpp"

namespace grl {

inline constexpr int kDim = 4;

using Coord = std::array<int, kDim>;    // integer site coordinates
using Point = std::array<double, kDim>; // continuum point, length units

enum class Geometry { Torus, Box };

// Flat 4-torus (default) or clipped box, spacing h, cells centered at
// integer multiples of h. Cell measure is h^4.
struct Lattice {
  Coord dims{4, 4, 4, 4};
  double spacing = 1.0;
  Geometry geometry = Geometry::Torus;

  Lattice() = default;
  Lattice(Coord d, double h, Geometry g = Geometry::Torus);

  std::int64_t volume() const {
    std::int64_t v = 1;
    for (int n : dims) v *= n;
    return v;
  }
  double cell_measure() const {
    double m = 1.0;
    for (int i = 0; i < kDim; ++i) m *= spacing;
    return m;
  }
  double side_length(int axis) const { return dims[axis] * spacing; }
  double min_side() const;
  // Largest admissible metric-ball radius (geodesic ball embeds).
  double max_ball_radius() const;

  std::int64_t site_index(const Coord& c) const;
  Coord site_coord(std::int64_t idx) const;
  Point site_point(const Coord& c) const;
  Point site_point(std::int64_t idx) const;

  // Wraps per-axis (torus) or returns false if outside (box).
  bool wrap(Coord& c) const;
  std::int64_t neighbor(std::int64_t idx, int axis, int step) const;

  // Displacement b - a reduced to the representative with |d_i| <= L_i/2.
  Point displacement(const Point& a, const Point& b) const;
  double distance(const Point& a, const Point& b) const;
  double distance2(const Point& a, const Point& b) const;

  bool same_shape(const Lattice& o) const {
    return dims == o.dims && spacing == o.spacing && geometry == o.geometry;
  }
};

struct Ball {
  Point center;
  double radius = 0.0;
};

// Metric balls are the default; cube (l-infinity) balls are offered as a
// faster equivalent up to dimensional constants.
enum class BallShape { Round, Cube };

struct ScalarField {
  Lattice lattice;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Lattice& lat, double fill = 0.0)
      : lattice(lat), values(static_cast<size_t>(lat.volume()), fill) {}

  double& operator[](std::int64_t i) { return values[static_cast<size_t>(i)]; }
  double operator[](std::int64_t i) const { return values[static_cast<size_t>(i)]; }
  double integral() const;
};

// Integer offsets sorted by (squared norm, lex order). On the torus each
// cell appears exactly once: components range over (-N/2, N/2]. Shared per
// lattice shape so ball sums always run in the same order.
class OffsetTable {
 public:
  struct Entry {
    Coord off;
    std::int64_t norm2;  // squared norm in cell units
  };

  explicit OffsetTable(const Lattice& lat);

  const std::vector<Entry>& entries() const { return entries_; }
  // Number of leading entries with |off|^2 * h^2 <= r^2.
  size_t count_within(double radius) const;
  // Index of first entry with norm2 > n2 (prefix length for threshold n2).
  size_t count_within_norm2(std::int64_t n2) const;
  std::int64_t max_norm2() const {
    return entries_.empty() ? 0 : entries_.back().norm2;
  }
  // Distinct squared norms in ascending order, and the prefix length of
  // entries up to and including each.
  const std::vector<std::int64_t>& shell_norms() const { return shell_norms_; }
  const std::vector<size_t>& shell_ends() const { return shell_ends_; }

  double spacing() const { return spacing_; }

 private:
  std::vector<Entry> entries_;
  std::vector<std::int64_t> shell_norms_;
  std::vector<size_t> shell_ends_;
  double spacing_ = 1.0;
};

// Cached per lattice shape; building the table is O(V log V).
std::shared_ptr<const OffsetTable> offset_table(const Lattice& lat);

// Converts a ball radius to the inclusive squared-norm threshold in cell
// units. Radii on the h/2 grid map exactly (k/2)^2 -> k^2/4.
std::int64_t radius_to_norm2_threshold(double radius, double spacing);

// Sum of value * h^4 over cells whose centers lie in the ball.
// Throws BallTooLarge past the torus injectivity bound.
double ball_mass(const ScalarField& f, const Ball& b, BallShape shape = BallShape::Round);

// sup over cell centers y with d(x,y) <= r (plus x itself) of
// ball_mass(f, B_r(y)). Monotone nondecreasing in r for f >= 0.
double sup_ball_mass(const ScalarField& f, const Point& x, double r,
                     BallShape shape = BallShape::Round);

// Enumerate cell indices inside a ball, in offset-table order when the
// center is a site, bounding-box scan otherwise.
std::vector<std::int64_t> cells_in_ball(const Lattice& lat, const Ball& b);

// Greedy largest-first Vitali selection: full balls cover every input
// site, fifth-radius balls are pairwise disjoint.
std::vector<Ball> vitali_cover(const Lattice& lat,
                               const std::vector<Point>& sites,
                               const std::function<double(const Point&)>& radius_fn);

}  // namespace grl
