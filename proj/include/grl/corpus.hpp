#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grl/gauge.hpp"
#include "grl/lattice.hpp"

namespace grl {

// Named deterministic fixtures. Gauge fixtures return links or a frame;
// scalar fixtures return energy-density fields for the decomposition.
//   flat              identity links
//   pure_gauge        identity links transformed by a random frame
//   abelian_wave      commuting plane-wave links
//   random            rough links, exp of Gaussian algebra elements
//   hedgehog          frame (x - c)/|x - c|, c at a dual cell corner
//   two_spike         scalar: two separated compact bumps
//   dyadic_multiscale scalar: nested bumps at two scales
// Regeneration from (name, seed, lattice) is bit-identical.

bool is_scalar_fixture(const std::string& name);
bool is_frame_fixture(const std::string& name);

GaugeField make_gauge_fixture(const std::string& name, const Lattice& lat, std::uint64_t seed);
FrameField make_frame_fixture(const std::string& name, const Lattice& lat, std::uint64_t seed);
ScalarField make_scalar_fixture(const std::string& name, const Lattice& lat, std::uint64_t seed);

// Center used by the hedgehog fixture: site N/2 shifted by h/2 on every axis.
Point hedgehog_center(const Lattice& lat);

std::vector<std::string> fixture_names();

// Compact quartic bump (1 - (d/sigma)^2)^2 scaled to the requested total
// mass; shared by the scalar fixtures and tests.
void add_bump(ScalarField& f, const Point& center, double sigma, double mass);

}  // namespace grl
