#include "grl/corpus.hpp"

#include <algorithm>
#include <cmath>

namespace grl {

std::vector<std::string> fixture_names() {
  return {"flat",     "pure_gauge", "abelian_wave",     "random",
          "hedgehog", "two_spike",  "dyadic_multiscale"};
}

bool is_scalar_fixture(const std::string& name) {
  return name == "two_spike" || name == "dyadic_multiscale";
}

bool is_frame_fixture(const std::string& name) { return name == "hedgehog"; }

Point hedgehog_center(const Lattice& lat) {
  Point c{};
  for (int i = 0; i < kDim; ++i)
    c[i] = (lat.dims[i] / 2 + 0.5) * lat.spacing;
  return c;
}

void add_bump(ScalarField& f, const Point& center, double sigma, double mass) {
  const Lattice& lat = f.lattice;
  std::vector<std::int64_t> cells = cells_in_ball(lat, Ball{center, sigma});
  double raw = 0.0;
  for (std::int64_t idx : cells) {
    double d2 = lat.distance2(lat.site_point(idx), center);
    double t = 1.0 - d2 / (sigma * sigma);
    raw += t * t;
  }
  if (raw <= 0.0) throw Error(ErrorCode::PreconditionFailed, "bump support is empty");
  double scale = mass / (raw * lat.cell_measure());
  for (std::int64_t idx : cells) {
    double d2 = lat.distance2(lat.site_point(idx), center);
    double t = 1.0 - d2 / (sigma * sigma);
    f[idx] += scale * t * t;
  }
}

GaugeField make_gauge_fixture(const std::string& name, const Lattice& lat, std::uint64_t seed) {
  if (name == "flat") return GaugeField(lat);
  if (name == "pure_gauge") {
    GaugeField flat(lat);
    return gauge_transform(flat, random_frame(lat, seed == 0 ? 1 : seed));
  }
  if (name == "abelian_wave") return abelian_wave(lat, {0.3, 0.2, 0.0, 0.0});
  if (name == "random") return random_links(lat, seed == 0 ? 1 : seed, 0.25);
  throw Error(ErrorCode::PreconditionFailed, "unknown gauge fixture " + name);
}

FrameField make_frame_fixture(const std::string& name, const Lattice& lat, std::uint64_t seed) {
  if (name == "hedgehog") return hedgehog_frame(lat, hedgehog_center(lat));
  if (name == "random_frame") return random_frame(lat, seed == 0 ? 1 : seed);
  throw Error(ErrorCode::PreconditionFailed, "unknown frame fixture " + name);
}

ScalarField make_scalar_fixture(const std::string& name, const Lattice& lat, std::uint64_t) {
  ScalarField f(lat);
  Point c{};
  for (int i = 0; i < kDim; ++i) c[i] = (lat.dims[i] / 2) * lat.spacing;
  double L = lat.min_side();
  if (name == "two_spike") {
    // two separated bumps; every cell stays below eps0/2 for the default
    // eps0 = 0.1 so each covering cell certifies as a light bubble
    Point a = c, b = c;
    a[0] += 0.75 * L / 4.0;
    b[0] -= 0.75 * L / 4.0;
    add_bump(f, a, 2.6 * lat.spacing, 1.0);
    add_bump(f, b, 2.6 * lat.spacing, 1.0);
    return f;
  }
  if (name == "dyadic_multiscale") {
    // broad mass at the target scale plus a tighter bump one scale below;
    // peak cells stay light for the default eps0
    Point a = c;
    a[1] += L / 8.0;
    add_bump(f, c, 3.0 * lat.spacing, 0.9);
    add_bump(f, a, 2.2 * lat.spacing, 0.6);
    return f;
  }
  throw Error(ErrorCode::PreconditionFailed, "unknown scalar fixture " + name);
}

}  // namespace grl
