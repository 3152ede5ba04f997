#pragma once

#include <cstdint>
#include <vector>

#include "grl/coulomb.hpp"
#include "grl/radius.hpp"

namespace grl {

struct ScaleConfig {
  double eps0 = 0.1;    // curvature smallness
  double eta = 0.1;     // energy smallness
  double theta1 = 0.01; // scaled-energy factor
  double s_min = -1.0;  // singular cutoff; < 0 means 2h
  double resolved_s_min(const Lattice& lat) const {
    return s_min > 0.0 ? s_min : 2.0 * lat.spacing;
  }
};

// r(x) = sup{r : sup_{y in B_r(x)} mass_e(B_r(y)) < eps0}; +inf when the
// total mass is below eps0.
RadiusField curvature_radius_field(const ScalarField& e, double eps0);

// Capped by the curvature radius; predicate uses r^{-2}-scaled L^2 ball
// masses of |A|.
RadiusField regularity_radius_field(const ConnectionField& A, const ScalarField& e,
                                    const ScaleConfig& cfg);

// L^4 mass <= 1, capped by the curvature radius.
RadiusField a0_radius_field(const ConnectionField& A, const ScalarField& e, double eps0);

// Sites where a0_radius_field <= s_min, ascending site order.
std::vector<std::int64_t> singular_set(const ConnectionField& A, const ScalarField& e,
                                       const ScaleConfig& cfg);

struct RadiusLowerBound {
  bool applicable = false;
  double min_radius = 0.0;
  double ratio = 0.0;  // min over B_rho of regularity radius, divided by rho
};
// Inapplicable when B_{2rho}(y) carries curvature mass >= eps0 or meets the
// singular set.
RadiusLowerBound radius_lower_bound_audit(const ConnectionField& A, const ScalarField& e,
                                          const ScaleConfig& cfg, const Point& y, double rho);

// Oriented triangulated boundary of the cube {x : |x - c|_inf <= k h},
// homeomorphic to S^3. Tetrahedra are stored positively oriented.
struct SphereShell {
  Point center{};
  int k = 0;  // half-width in lattice steps
  std::vector<std::int64_t> vertex_sites;
  std::vector<std::array<int, 4>> tets;
};

SphereShell cube_shell(const Lattice& lat, const Coord& center, int k);

// Simplicial degree of the frame restricted to the shell: signed count of
// preimage tetrahedra of a generic target on S^3. Retries a few seeded
// targets before reporting DegenerateShell.
int sphere_degree(const FrameField& theta, const SphereShell& shell, std::uint64_t seed = 1);

}  // namespace grl
