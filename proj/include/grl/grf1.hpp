#pragma once

#include <string>

#include "grl/coulomb.hpp"
#include "grl/gauge.hpp"
#include "grl/lattice.hpp"

namespace grl {

// "GRF1": one UTF-8 JSON header line {format, kind, dims, spacing, geometry},
// newline, then little-endian IEEE f64 payload in row-major site order.
// kind "links": per site, 4 directions of (w, x, y, z). kind "frame": per
// site (w, x, y, z). kind "scalar": one value per cell.

void write_scalar(const std::string& path, const ScalarField& f);
void write_links(const std::string& path, const GaugeField& U);
void write_frame(const std::string& path, const FrameField& g);

std::string peek_kind(const std::string& path);
ScalarField read_scalar(const std::string& path);
GaugeField read_links(const std::string& path);
FrameField read_frame(const std::string& path);

}  // namespace grl
