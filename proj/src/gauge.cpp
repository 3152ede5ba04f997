#include "grl/gauge.hpp"

#include <cmath>

#include "grl/rng.hpp"

namespace grl {

Su2 plaquette(const GaugeField& U, std::int64_t site, int mu, int nu) {
  if (mu == nu) throw Error(ErrorCode::PreconditionFailed, "plaquette needs mu != nu");
  const Lattice& lat = U.lattice;
  std::int64_t xmu = lat.neighbor(site, mu, +1);
  std::int64_t xnu = lat.neighbor(site, nu, +1);
  return U.link(site, mu) * U.link(xmu, nu) * U.link(xnu, mu).conj() * U.link(site, nu).conj();
}

ScalarField curvature_density(const GaugeField& U) {
  const Lattice& lat = U.lattice;
  ScalarField e(lat);
  double h4 = lat.cell_measure();
  for (std::int64_t s = 0; s < lat.volume(); ++s) {
    double acc = 0.0;
    for (int mu = 0; mu < kDim; ++mu)
      for (int nu = mu + 1; nu < kDim; ++nu)
        acc += 1.0 - plaquette(U, s, mu, nu).w;
    e[s] = 4.0 * acc / h4;
  }
  return e;
}

GaugeField gauge_transform(const GaugeField& U, const FrameField& g) {
  if (!U.lattice.same_shape(g.lattice))
    throw Error(ErrorCode::ShapeError, "gauge_transform lattice mismatch");
  const Lattice& lat = U.lattice;
  GaugeField V(lat);
  for (std::int64_t s = 0; s < lat.volume(); ++s)
    for (int mu = 0; mu < kDim; ++mu) {
      std::int64_t smu = lat.neighbor(s, mu, +1);
      V.link(s, mu) = (g[s] * U.link(s, mu) * g[smu].conj()).normalized();
    }
  return V;
}

GaugeField random_links(const Lattice& lat, std::uint64_t seed, double beta) {
  GaugeField U(lat);
  Rng rng(seed);
  for (std::int64_t s = 0; s < lat.volume(); ++s)
    for (int mu = 0; mu < kDim; ++mu) {
      Vec3 a{beta * rng.gaussian(), beta * rng.gaussian(), beta * rng.gaussian()};
      U.link(s, mu) = exp_su2(a);
    }
  return U;
}

GaugeField abelian_wave(const Lattice& lat, const std::array<double, kDim>& amplitude) {
  GaugeField U(lat);
  const double two_pi = 6.283185307179586476925286766559;
  for (std::int64_t s = 0; s < lat.volume(); ++s) {
    Coord c = lat.site_coord(s);
    for (int mu = 0; mu < kDim; ++mu) {
      int axis = (mu + 1) % kDim;
      double phase = two_pi * c[axis] / lat.dims[axis];
      double theta = lat.spacing * amplitude[mu] * std::cos(phase);
      U.link(s, mu) = exp_su2(Vec3{0.0, 0.0, theta});
    }
  }
  return U;
}

FrameField hedgehog_frame(const Lattice& lat, const Point& center) {
  FrameField g(lat);
  for (std::int64_t s = 0; s < lat.volume(); ++s) {
    Point d = lat.displacement(center, lat.site_point(s));
    double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]);
    if (n < 1e-9 * lat.spacing)
      throw Error(ErrorCode::SingularCenter, "hedgehog center on a cell center");
    g[s] = Su2{d[0] / n, d[1] / n, d[2] / n, d[3] / n};
  }
  return g;
}

FrameField random_frame(const Lattice& lat, std::uint64_t seed) {
  FrameField g(lat);
  Rng rng(seed);
  for (std::int64_t s = 0; s < lat.volume(); ++s) {
    // uniform on S^3 via normalized Gaussian 4-vector
    Su2 q{rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()};
    g[s] = q.normalized();
  }
  return g;
}

}  // namespace grl
