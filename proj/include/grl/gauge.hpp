#pragma once

#include <cstdint>
#include <vector>

#include "grl/lattice.hpp"
#include "grl/su2.hpp"

namespace grl {

// SU(2) link variables on directed edges; U(x, mu) connects x to x + mu^.
struct GaugeField {
  Lattice lattice;
  std::vector<Su2> links;  // site-major, then direction

  GaugeField() = default;
  explicit GaugeField(const Lattice& lat)
      : lattice(lat), links(static_cast<size_t>(lat.volume()) * kDim, Su2::identity()) {}

  Su2& link(std::int64_t site, int mu) { return links[static_cast<size_t>(site) * kDim + mu]; }
  const Su2& link(std::int64_t site, int mu) const {
    return links[static_cast<size_t>(site) * kDim + mu];
  }
};

// One SU(2) element per site (a discrete frame / gauge transform).
struct FrameField {
  Lattice lattice;
  std::vector<Su2> values;

  FrameField() = default;
  explicit FrameField(const Lattice& lat)
      : lattice(lat), values(static_cast<size_t>(lat.volume()), Su2::identity()) {}

  Su2& operator[](std::int64_t i) { return values[static_cast<size_t>(i)]; }
  const Su2& operator[](std::int64_t i) const { return values[static_cast<size_t>(i)]; }
};

// U_mu(x) U_nu(x+mu^) U_mu(x+nu^)^-1 U_nu(x)^-1.
Su2 plaquette(const GaugeField& U, std::int64_t site, int mu, int nu);

// e(x) = sum_{mu<nu} (4/h^4) (1 - w(P_munu(x))). Gauge invariant per cell.
// total_curvature(e) = integral(e) plays the role of the L^2 bound Lambda.
ScalarField curvature_density(const GaugeField& U);

// Link rule U_mu(x) -> g(x) U_mu(x) g(x+mu^)^-1; output links renormalized.
GaugeField gauge_transform(const GaugeField& U, const FrameField& g);

// ---- configuration generators (deterministic given seed) ----

// Links exp(beta * n) with n a seeded Gaussian 3-vector; beta = 0 gives
// the identity configuration.
GaugeField random_links(const Lattice& lat, std::uint64_t seed, double beta);

// Abelian-embedded plane waves: all links share the e3 axis, so the field
// strength is the exact lattice curl of the angles. amplitude[mu] scales
// the wave on direction mu; the wave varies along axis (mu+1) % 4.
GaugeField abelian_wave(const Lattice& lat, const std::array<double, kDim>& amplitude);

// Frame q(x) = (x - center)/|x - center| as a unit quaternion. The center
// must avoid cell centers.
FrameField hedgehog_frame(const Lattice& lat, const Point& center);

FrameField random_frame(const Lattice& lat, std::uint64_t seed);

}  // namespace grl
