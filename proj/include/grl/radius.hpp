#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "grl/lattice.hpp"

namespace grl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-cell radius s(x) in (0, inf]; reciprocal view treats 1/inf = 0.
struct RadiusField {
  Lattice lattice;
  std::vector<double> values;

  RadiusField() = default;
  explicit RadiusField(const Lattice& lat, double fill = kInf)
      : lattice(lat), values(static_cast<size_t>(lat.volume()), fill) {}

  double& operator[](std::int64_t i) { return values[static_cast<size_t>(i)]; }
  double operator[](std::int64_t i) const { return values[static_cast<size_t>(i)]; }

  ScalarField reciprocal() const;
  // max over adjacent cell pairs (both finite) of |s(x)-s(y)| - d(x,y)
  double lipschitz_defect() const;
};

// Radius search grid: multiples of h/2 up to the torus bound.
int radius_grid_max(const Lattice& lat);
inline double radius_grid_value(const Lattice& lat, int k) { return 0.5 * k * lat.spacing; }

// Per-site ball masses at every grid radius, accumulated shell by shell in
// offset-table order so each entry equals ball_mass bit for bit.
class BallMassTable {
 public:
  BallMassTable(const ScalarField& f, int kmax);
  // mass of B_{k h/2}(site), including the h^4 cell measure
  double mass(int k, std::int64_t site) const {
    return cols_[static_cast<size_t>(k)][static_cast<size_t>(site)] * measure_;
  }
  int kmax() const { return static_cast<int>(cols_.size()) - 1; }

 private:
  std::vector<std::vector<double>> cols_;  // raw sums per grid radius
  double measure_ = 1.0;
};

// Largest grid radius with sup_{y in B_r(x)} ball_mass(u^4, B_r(y)) <= threshold.
// +inf when the whole-domain mass is <= threshold; never below h/2 (a
// positive radius always exists on the grid). Cube balls give an
// equivalent quasi-norm up to dimensional constants.
double integrability_radius(const ScalarField& u, const Point& x, double threshold = 1.0,
                            BallShape shape = BallShape::Round);

// integrability_radius at every cell (fast path, bit-identical to the
// per-site evaluation).
RadiusField radius_field(const ScalarField& u, double threshold = 1.0);

// Generic sup-radius field: largest grid radius r (optionally capped per
// site) with sup_{y in B_r(x)} mass_r(y) OP threshold(r). Used by the
// curvature/regularity scale fields.
struct SupRadiusSpec {
  bool strict = false;                       // OP is '<' instead of '<='
  double threshold = 1.0;                    // constant threshold
  bool scale_r_minus2 = false;               // compare r^{-2} * mass instead
  const RadiusField* cap = nullptr;          // per-site radius cap
  bool inf_when_total_small = true;          // +inf if total mass OP threshold
};
RadiusField sup_radius_field(const ScalarField& density, const SupRadiusSpec& spec);

// sup_alpha alpha * mu{|f| > alpha}^{1/p}, computed by descending sort.
double lorentz_weak_norm(const ScalarField& f, double p);

double l4_norm(const ScalarField& u);

// Weak-L4 norm of the reciprocal integrability-radius field.
double curly_norm(const ScalarField& u);

struct NormReport {
  double l4 = 0;
  double lorentz_weak = 0;
  double curly = 0;
  double interpolation_ratio = 0;  // at the eps passed to norm_report
  double curly_over_l4 = 0;
  double lipschitz_defect = 0;
};
NormReport norm_report(const ScalarField& u, double eps = 0.5);

struct InterpolationAudit {
  double lhs = 0;        // integral |u|^{4-eps}
  double rhs_bound = 0;  // curly_norm^4
  double ratio = 0;
  double curly_over_l4 = 0;
};
InterpolationAudit interpolation_audit(const ScalarField& u, double eps);

// Max excess of s(x)/s(y) beyond [1/4 - slack, 4 + slack] over cell pairs
// with intersecting s-balls; slack = 2h / min(s). Pairs are sampled above
// sample_limit sites.
double comparability_audit(const ScalarField& u, std::int64_t sample_limit = 4096,
                           std::uint64_t sample_seed = 1);

}  // namespace grl
