#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "grl/gauge.hpp"
#include "grl/lattice.hpp"
#include "grl/su2.hpp"

namespace grl {

enum class ExtractionConvention { SinProjection, LogMap };

// su(2)-valued lattice 1-form: A_mu(x) per site and direction, units 1/length.
struct ConnectionField {
  Lattice lattice;
  ExtractionConvention convention = ExtractionConvention::SinProjection;
  std::vector<Vec3> comps;  // site-major, then direction

  ConnectionField() = default;
  explicit ConnectionField(const Lattice& lat,
                           ExtractionConvention conv = ExtractionConvention::SinProjection)
      : lattice(lat),
        convention(conv),
        comps(static_cast<size_t>(lat.volume()) * kDim, Vec3{0, 0, 0}) {}

  Vec3& at(std::int64_t site, int mu) { return comps[static_cast<size_t>(site) * kDim + mu]; }
  const Vec3& at(std::int64_t site, int mu) const {
    return comps[static_cast<size_t>(site) * kDim + mu];
  }

  // |A|(x) = sqrt(sum_mu |A_mu(x)|^2) as a scalar field.
  ScalarField magnitude() const;
};

// Gauge-fixing functional F[g] = sum_{x,mu} 2 (1 - w(U^g_mu(x))) h^2.
double functional(const GaugeField& U, const FrameField& g);

// Density e(x) = sum_mu 2 (1 - w(U^g_mu(x))) / h^2, so integral = functional.
ScalarField functional_density(const GaugeField& U, const FrameField& g);

// SinProjection: vector part of the link / h. LogMap: angle * axis / h
// (throws BranchCut on an exactly antipodal link).
ConnectionField connection_form(const GaugeField& U, ExtractionConvention conv);

struct DivergenceReport {
  double theta = 0.0;           // (1/V) sum |div(x)|^2
  std::vector<Vec3> divergence;  // per site, units 1/length^2
};
// div(x) = sum_mu (A_mu(x) - A_mu(x - mu^)) / h. With SinProjection, theta
// equals |grad F|^2 / (4 h^6 V) exactly.
DivergenceReport coulomb_residual(const ConnectionField& A);

struct FixConfig {
  double omega = 1.7;      // overrelaxation in [1, 2)
  double tol = 1e-12;      // stop when theta <= tol
  int max_sweeps = 10000;
  std::uint64_t seed = 0;  // nonzero: random start frame
};

struct FixReport {
  std::vector<double> functional_trace;  // value after each sweep (index 0 = start)
  double theta = 0.0;
  int sweeps = 0;
  double omega = 0.0;
  bool converged = false;
  double worst_increase = 0.0;  // max per-sweep functional increase observed
};

// Checkerboard relaxation with overrelaxation; deterministic given seed
// and the fixed even/odd sweep order.
std::pair<FrameField, FixReport> coulomb_fix(const GaugeField& U, const FixConfig& cfg);

struct FirstVariation {
  double fd_derivative = 0.0;  // Richardson-extrapolated centered difference
  double pairing = 0.0;        // 2 sum <(d xi)_mu, A_mu> h^4
};
FirstVariation first_variation(const GaugeField& U, const FrameField& g,
                               const std::vector<Vec3>& xi, double t = 1e-4);

// Centered second difference of F(exp(t xi) g) at t = 0.
double second_variation(const GaugeField& U, const FrameField& g,
                        const std::vector<Vec3>& xi, double t = 1e-4);

struct EnergyProfile {
  std::vector<double> radii;
  std::vector<double> zeta;     // rho^{-2} * energy mass in B_rho
  double eps_hat = 0.0;         // sup of curvature ball masses over probed radii
  double worst_violation = 0.0; // max defect of sqrt-monotonicity across pairs
};
EnergyProfile scaled_energy_profile(const GaugeField& U, const FrameField& g,
                                    const Point& x0, const std::vector<double>& radii);

// Discrete stationarity defect: stress tensor paired with the centered
// gradient of X plus the curvature pairing, normalized by ||X||_2. A
// diagnostic, not an exact identity at finite h.
double stationarity_residual(const GaugeField& U, const FrameField& g,
                             const std::vector<std::array<double, kDim>>& X);

}  // namespace grl
