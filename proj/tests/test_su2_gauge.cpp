#include <doctest.h>

#include <cmath>

#include "grl/corpus.hpp"
#include "grl/gauge.hpp"
#include "grl/rng.hpp"

using namespace grl;

namespace {
Lattice torus(int n, double h = 1.0) { return Lattice({n, n, n, n}, h, Geometry::Torus); }

Su2 random_su2(Rng& rng) {
  Su2 q{rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()};
  return q.normalized();
}
}  // namespace

TEST_CASE("quaternion algebra: associativity and unit-norm closure") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Su2 a = random_su2(rng), b = random_su2(rng), c = random_su2(rng);
    Su2 ab_c = (a * b) * c;
    Su2 a_bc = a * (b * c);
    CHECK(std::abs(ab_c.w - a_bc.w) < 1e-12);
    CHECK(std::abs(ab_c.x - a_bc.x) < 1e-12);
    CHECK(std::abs(ab_c.y - a_bc.y) < 1e-12);
    CHECK(std::abs(ab_c.z - a_bc.z) < 1e-12);
    CHECK(std::abs((a * b).norm2() - 1.0) < 1e-12);
    Su2 inv = a * a.conj();
    CHECK(std::abs(inv.w - 1.0) < 1e-12);
    CHECK(std::abs(inv.x) + std::abs(inv.y) + std::abs(inv.z) < 1e-12);
  }
}

TEST_CASE("bracket is antisymmetric and orthogonal to its arguments") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    Vec3 a{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    Vec3 b{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    Vec3 ab = bracket(a, b);
    Vec3 ba = bracket(b, a);
    for (int j = 0; j < 3; ++j) CHECK(ab[j] == doctest::Approx(-ba[j]));
    CHECK(std::abs(dot(ab, a)) < 1e-12);
    CHECK(std::abs(dot(ab, b)) < 1e-12);
  }
}

TEST_CASE("exp/log roundtrip below the branch cut") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    double t = rng.uniform() * 3.0;  // < pi
    Vec3 n{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    double nn = norm(n);
    if (nn < 1e-6) continue;
    Vec3 a = (t / nn) * n;
    Vec3 back = log_su2(exp_su2(a));
    for (int j = 0; j < 3; ++j) CHECK(std::abs(back[j] - a[j]) < 1e-10);
  }
}

TEST_CASE("plaquette of identity links is the identity") {
  GaugeField U(torus(4));
  Su2 p = plaquette(U, 0, 0, 1);
  CHECK(p.w == doctest::Approx(1.0));
}

TEST_CASE("constant abelian links commute around the plaquette") {
  Lattice lat = torus(4);
  GaugeField U(lat);
  for (std::int64_t s = 0; s < lat.volume(); ++s)
    for (int mu = 0; mu < kDim; ++mu) U.link(s, mu) = exp_su2(Vec3{0, 0, 0.3 * (mu + 1)});
  Su2 p = plaquette(U, 5, 0, 2);
  CHECK(p.w == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant non-commuting links: plaquette scalar part is 1/2") {
  // U0 = (c, (s,0,0)), U1 = (c, (0,s,0)) with c = s = sqrt(1/2) gives
  // w = c^4 + 2 c^2 s^2 - s^4 = 1/2
  Lattice lat = torus(4);
  GaugeField U(lat);
  double c = std::sqrt(0.5);
  for (std::int64_t s = 0; s < lat.volume(); ++s) {
    U.link(s, 0) = Su2{c, c, 0, 0};
    U.link(s, 1) = Su2{c, 0, c, 0};
  }
  CHECK(plaquette(U, 3, 0, 1).w == doctest::Approx(0.5));
}

TEST_CASE("curvature density: zero for flat, exact for one excited plaquette") {
  Lattice lat = torus(4);
  GaugeField U(lat);
  ScalarField e0 = curvature_density(U);
  for (double v : e0.values) CHECK(v == 0.0);

  double theta = 0.8;
  U.link(lat.site_index(Coord{1, 1, 1, 1}), 0) = exp_su2(Vec3{0, 0, theta});
  ScalarField e = curvature_density(U);
  // the modified link enters plaquettes in planes (0,nu) at the site and at
  // the nu-neighbors behind it; the density at the site itself is
  // (4/h^4)(1 - cos theta) per touched plane
  double per_plane = 4.0 * (1.0 - std::cos(theta));
  CHECK(e[lat.site_index(Coord{1, 1, 1, 1})] == doctest::Approx(3.0 * per_plane));
}

TEST_CASE("curvature density is gauge invariant") {
  Lattice lat = torus(4);
  GaugeField U = random_links(lat, 17, 0.4);
  ScalarField e = curvature_density(U);
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    FrameField g = random_frame(lat, rng.raw());
    ScalarField e2 = curvature_density(gauge_transform(U, g));
    double worst = 0.0;
    for (std::int64_t i = 0; i < lat.volume(); ++i)
      worst = std::max(worst, std::abs(e[i] - e2[i]));
    CHECK(worst < 1e-12 * (1.0 + 4.0 / lat.cell_measure()));
  }
}

TEST_CASE("gauge transform: identity, constant, inverse") {
  Lattice lat = torus(4);
  GaugeField U = random_links(lat, 31, 0.5);
  SUBCASE("identity frame leaves links unchanged") {
    FrameField id(lat);
    GaugeField V = gauge_transform(U, id);
    for (size_t i = 0; i < U.links.size(); ++i)
      CHECK(std::abs(V.links[i].w - U.links[i].w) < 1e-14);
  }
  SUBCASE("transform then inverse recovers the links") {
    FrameField g = random_frame(lat, 37);
    FrameField ginv(lat);
    for (std::int64_t s = 0; s < lat.volume(); ++s) ginv[s] = g[s].conj();
    GaugeField W = gauge_transform(gauge_transform(U, g), ginv);
    for (size_t i = 0; i < U.links.size(); ++i) {
      CHECK(std::abs(W.links[i].w - U.links[i].w) < 1e-12);
      CHECK(std::abs(W.links[i].x - U.links[i].x) < 1e-12);
    }
  }
  SUBCASE("lattice mismatch throws") {
    FrameField g(torus(8));
    CHECK_THROWS_AS(gauge_transform(U, g), Error);
  }
}

TEST_CASE("generators: determinism and flat limit") {
  Lattice lat = torus(4);
  GaugeField a = random_links(lat, 99, 0.3);
  GaugeField b = random_links(lat, 99, 0.3);
  for (size_t i = 0; i < a.links.size(); ++i) CHECK(a.links[i].w == b.links[i].w);
  GaugeField flat = random_links(lat, 99, 0.0);
  for (const Su2& u : flat.links) CHECK(u.w == 1.0);
}

TEST_CASE("hedgehog frame: unit norm, odd symmetry, singular center rejected") {
  Lattice lat = torus(8);
  Point c = hedgehog_center(lat);
  FrameField g = hedgehog_frame(lat, c);
  for (const Su2& q : g.values) CHECK(std::abs(q.norm2() - 1.0) < 1e-12);
  // odd map: q at c + d and c - d are opposite
  Point pa{}, pb{};
  for (int i = 0; i < kDim; ++i) {
    pa[i] = c[i] + 1.5 * lat.spacing * (i == 0 ? 1 : 0) + 0.5 * lat.spacing * (i != 0 ? 1 : 0);
  }
  // use exact lattice sites symmetric about the dual center
  Coord ca{5, 5, 5, 5}, cb{4, 4, 4, 4};
  Su2 qa = g[lat.site_index(ca)], qb = g[lat.site_index(cb)];
  CHECK(qa.w == doctest::Approx(-qb.w));
  CHECK(qa.x == doctest::Approx(-qb.x));
  CHECK_THROWS_AS(hedgehog_frame(lat, lat.site_point(Coord{2, 2, 2, 2})), Error);
}

TEST_CASE("abelian wave curvature matches the analytic lattice curl") {
  // exact check: flux through an (mu, axis) plaquette is the forward
  // difference of the link angles, with all links on one algebra axis
  Lattice lat = torus(8, 0.5);
  std::array<double, kDim> amp{0.3, 0.2, 0.0, 0.0};
  GaugeField U = abelian_wave(lat, amp);
  ScalarField e = curvature_density(U);
  const double two_pi = 6.283185307179586476925286766559;
  double h = lat.spacing, h4 = lat.cell_measure();
  double worst = 0.0;
  for (std::int64_t s = 0; s < lat.volume(); ++s) {
    Coord c = lat.site_coord(s);
    double expected = 0.0;
    for (int mu = 0; mu < kDim; ++mu)
      for (int nu = mu + 1; nu < kDim; ++nu) {
        auto angle = [&](int dir, const Coord& at) {
          int axis = (dir + 1) % kDim;
          return h * amp[dir] * std::cos(two_pi * at[axis] / lat.dims[axis]);
        };
        Coord cmu = c, cnu = c;
        cmu[mu]++;
        lat.wrap(cmu);
        cnu[nu]++;
        lat.wrap(cnu);
        double flux = angle(mu, c) + angle(nu, cmu) - angle(mu, cnu) - angle(nu, c);
        expected += 4.0 / h4 * (1.0 - std::cos(flux));
      }
    worst = std::max(worst, std::abs(e[s] - expected));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("abelian wave total curvature converges at order h^2") {
  // continuum value under the plaquette normalization: for each direction
  // mu with amplitude A and wave along one axis, 2 * integral f^2 =
  // A^2 (2 pi / L)^2 L^4
  std::array<double, kDim> amp{0.3, 0.2, 0.0, 0.0};
  const double two_pi = 6.283185307179586476925286766559;
  double L = 4.0;
  auto total = [&](int n) {
    Lattice lat({n, n, n, n}, L / n, Geometry::Torus);
    return curvature_density(abelian_wave(lat, amp)).integral();
  };
  double cont = (amp[0] * amp[0] + amp[1] * amp[1]) * (two_pi / L) * (two_pi / L) * L * L * L * L;
  double e8 = std::abs(total(8) - cont);
  double e16 = std::abs(total(16) - cont);
  CHECK(e16 < e8 / 3.0);  // order h^2 halves the error by ~4
}
