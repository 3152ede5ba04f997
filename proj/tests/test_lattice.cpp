#include <doctest.h>

#include <cmath>

#include "grl/lattice.hpp"
#include "grl/radius.hpp"
#include "grl/rng.hpp"

using namespace grl;

namespace {

Lattice torus(int n, double h = 1.0) { return Lattice({n, n, n, n}, h, Geometry::Torus); }

constexpr double kOmega4 = 4.934802200544679;  // pi^2 / 2, unit 4-ball volume

// brute-force cell count inside a metric ball
std::int64_t count_cells(const Lattice& lat, const Ball& b) {
  std::int64_t n = 0;
  for (std::int64_t s = 0; s < lat.volume(); ++s)
    if (lat.distance2(lat.site_point(s), b.center) <= b.radius * b.radius * (1 + 1e-12)) ++n;
  return n;
}

}  // namespace

TEST_CASE("ball_mass zero field") {
  Lattice lat = torus(6);
  ScalarField f(lat, 0.0);
  CHECK(ball_mass(f, Ball{lat.site_point(Coord{3, 3, 3, 3}), 2.0}) == 0.0);
}

TEST_CASE("ball_mass of the unit field matches the cell count and omega4") {
  Lattice lat = torus(12, 0.25);
  ScalarField f(lat, 1.0);
  Point c = lat.site_point(Coord{6, 6, 6, 6});
  double r = 1.25;
  double m = ball_mass(f, Ball{c, r});
  double cells = static_cast<double>(count_cells(lat, Ball{c, r}));
  CHECK(m == doctest::Approx(cells * lat.cell_measure()));
  // analytic volume within the discretization error of the same ball
  double analytic = kOmega4 * r * r * r * r;
  CHECK(std::abs(m - analytic) / analytic < 0.15);
}

TEST_CASE("ball_mass covers the whole clipped box at large radius") {
  Lattice lat({4, 4, 4, 4}, 0.5, Geometry::Box);
  ScalarField f(lat, 1.0);
  double total = 4 * 4 * 4 * 4 * lat.cell_measure();
  Point c = lat.site_point(Coord{2, 2, 2, 2});
  CHECK(ball_mass(f, Ball{c, 10.0}) == doctest::Approx(total));
}

TEST_CASE("ball_mass rejects radii beyond the torus bound") {
  Lattice lat = torus(6);
  ScalarField f(lat, 1.0);
  CHECK_THROWS_AS(ball_mass(f, Ball{lat.site_point(Coord{0, 0, 0, 0}), 3.5}),
                  Error);
}

TEST_CASE("sup_ball_mass equals ball_mass for constant fields on the torus") {
  Lattice lat = torus(8);
  ScalarField f(lat, 0.7);
  Point x = lat.site_point(Coord{1, 2, 3, 4});
  for (double r : {1.0, 2.0, 3.0})
    CHECK(sup_ball_mass(f, x, r) == doctest::Approx(ball_mass(f, Ball{x, r})));
}

TEST_CASE("sup_ball_mass captures a nearby spike") {
  Lattice lat = torus(8);
  ScalarField f(lat, 0.0);
  Coord z{4, 4, 4, 4};
  f[lat.site_index(z)] = 5.0;
  Point x = lat.site_point(Coord{4, 4, 4, 2});  // distance 2h
  CHECK(sup_ball_mass(f, x, 3.0) >= 5.0 * lat.cell_measure());
}

TEST_CASE("sup_ball_mass matches brute force on random fields") {
  Lattice lat = torus(6);
  ScalarField f(lat);
  Rng rng(11);
  for (auto& v : f.values) v = rng.uniform();
  Point x = lat.site_point(Coord{2, 5, 0, 3});
  double r = 3.0;
  double brute = ball_mass(f, Ball{x, r});
  for (std::int64_t s = 0; s < lat.volume(); ++s) {
    Point y = lat.site_point(s);
    if (lat.distance(x, y) <= r) brute = std::max(brute, ball_mass(f, Ball{y, r}));
  }
  CHECK(sup_ball_mass(f, x, r) == brute);
}

TEST_CASE("ball queries are monotone in the radius") {
  Lattice lat = torus(6);
  ScalarField f(lat);
  Rng rng(5);
  for (auto& v : f.values) v = rng.uniform();
  Point x = lat.site_point(Coord{1, 1, 4, 2});
  double prev_m = -1, prev_s = -1;
  for (int k = 0; k <= radius_grid_max(lat); ++k) {
    double r = 0.5 * k;
    double m = ball_mass(f, Ball{x, r});
    double s = sup_ball_mass(f, x, r);
    CHECK(m >= prev_m);
    CHECK(s >= prev_s);
    CHECK(s >= m);
    prev_m = m;
    prev_s = s;
  }
}

TEST_CASE("ball_mass is additive over field sums") {
  Lattice lat = torus(6);
  ScalarField f(lat), g(lat), sum(lat);
  Rng rng(7);
  for (std::int64_t i = 0; i < lat.volume(); ++i) {
    f[i] = rng.uniform();
    g[i] = rng.uniform();
    sum[i] = f[i] + g[i];
  }
  Ball b{lat.site_point(Coord{3, 3, 3, 3}), 2.5};
  CHECK(ball_mass(sum, b) == doctest::Approx(ball_mass(f, b) + ball_mass(g, b)).epsilon(1e-13));
}

TEST_CASE("torus translation invariance is exact") {
  Lattice lat = torus(6);
  ScalarField f(lat);
  Rng rng(13);
  for (auto& v : f.values) v = rng.uniform();
  Coord shift{2, 5, 1, 3};
  ScalarField g(lat);
  for (std::int64_t s = 0; s < lat.volume(); ++s) {
    Coord c = lat.site_coord(s);
    for (int i = 0; i < kDim; ++i) c[i] += shift[i];
    lat.wrap(c);
    g[lat.site_index(c)] = f[s];
  }
  Point x = lat.site_point(Coord{1, 2, 3, 0});
  Coord xc{1 + shift[0], 2 + shift[1], 3 + shift[2], 0 + shift[3]};
  lat.wrap(xc);
  Point xs = lat.site_point(xc);
  for (double r : {1.0, 2.0, 2.5}) {
    CHECK(ball_mass(f, Ball{x, r}) == ball_mass(g, Ball{xs, r}));
    CHECK(sup_ball_mass(f, x, r) == sup_ball_mass(g, xs, r));
  }
}

TEST_CASE("vitali cover basics") {
  Lattice lat = torus(8);
  SUBCASE("empty input") {
    CHECK(vitali_cover(lat, {}, [](const Point&) { return 1.0; }).empty());
  }
  SUBCASE("single site") {
    std::vector<Point> sites{lat.site_point(Coord{1, 1, 1, 1})};
    auto cover = vitali_cover(lat, sites, [](const Point&) { return 1.5; });
    REQUIRE(cover.size() == 1);
    CHECK(cover[0].radius == 1.5);
  }
  SUBCASE("two distant sites both retained") {
    std::vector<Point> sites{lat.site_point(Coord{0, 0, 0, 0}),
                             lat.site_point(Coord{4, 4, 0, 0})};
    auto cover = vitali_cover(lat, sites, [](const Point&) { return 1.0; });
    CHECK(cover.size() == 2);
  }
}

TEST_CASE("vitali cover: disjoint fifth-balls and covered sites") {
  Lattice lat = torus(8);
  Rng rng(21);
  std::vector<Point> sites;
  for (int i = 0; i < 100; ++i) {
    Coord c{static_cast<int>(rng.raw() % 8), static_cast<int>(rng.raw() % 8),
            static_cast<int>(rng.raw() % 8), static_cast<int>(rng.raw() % 8)};
    sites.push_back(lat.site_point(c));
  }
  auto cover = vitali_cover(lat, sites, [](const Point&) { return 1.25; });
  for (size_t i = 0; i < cover.size(); ++i)
    for (size_t j = i + 1; j < cover.size(); ++j)
      CHECK(lat.distance(cover[i].center, cover[j].center) >
            (cover[i].radius + cover[j].radius) / 5.0);
  for (const Point& s : sites) {
    bool covered = false;
    for (const Ball& b : cover)
      if (lat.distance(s, b.center) <= b.radius * (1 + 1e-12)) {
        covered = true;
        break;
      }
    CHECK(covered);
  }
}
