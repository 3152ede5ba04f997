#include "grl/radius.hpp"

#include <algorithm>
#include <cmath>

#include "grl/parallel.hpp"
#include "grl/rng.hpp"

namespace grl {

ScalarField RadiusField::reciprocal() const {
  ScalarField r(lattice);
  for (size_t i = 0; i < values.size(); ++i)
    r.values[i] = std::isinf(values[i]) ? 0.0 : 1.0 / values[i];
  return r;
}

double RadiusField::lipschitz_defect() const {
  double worst = 0.0;
  for (std::int64_t s = 0; s < lattice.volume(); ++s) {
    double a = values[static_cast<size_t>(s)];
    if (std::isinf(a)) continue;
    for (int mu = 0; mu < kDim; ++mu) {
      std::int64_t n = lattice.neighbor(s, mu, +1);
      if (n < 0) continue;
      double b = values[static_cast<size_t>(n)];
      if (std::isinf(b)) continue;
      worst = std::max(worst, std::abs(a - b) - lattice.spacing);
    }
  }
  return worst;
}

int radius_grid_max(const Lattice& lat) {
  return static_cast<int>(std::floor(lat.max_ball_radius() / (0.5 * lat.spacing) + 1e-9));
}

BallMassTable::BallMassTable(const ScalarField& f, int kmax) {
  const Lattice& lat = f.lattice;
  measure_ = lat.cell_measure();
  auto tab = offset_table(lat);
  const auto& ents = tab->entries();
  std::int64_t V = lat.volume();
  cols_.assign(static_cast<size_t>(kmax) + 1,
               std::vector<double>(static_cast<size_t>(V), 0.0));

  // Entry ranges per grid radius; shells appended in offset-table order so
  // partial sums match ball_mass exactly.
  std::vector<size_t> ends(static_cast<size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k)
    ends[static_cast<size_t>(k)] = tab->count_within(radius_grid_value(lat, k));

  parallel_for(V, [&](std::int64_t s) {
    Coord c = lat.site_coord(s);
    double acc = 0.0;
    size_t e = 0;
    for (int k = 0; k <= kmax; ++k) {
      for (; e < ends[static_cast<size_t>(k)]; ++e) {
        Coord y = c;
        for (int i = 0; i < kDim; ++i) y[i] += ents[e].off[i];
        if (!lat.wrap(y)) continue;
        acc += f[lat.site_index(y)];
      }
      cols_[static_cast<size_t>(k)][static_cast<size_t>(s)] = acc;
    }
  });
}

namespace {

ScalarField fourth_power(const ScalarField& u) {
  ScalarField f(u.lattice);
  for (size_t i = 0; i < u.values.size(); ++i) {
    double v = u.values[i] * u.values[i];
    f.values[i] = v * v;
  }
  return f;
}

// Largest k in [0, kmax] with pred(k), assuming pred is monotone
// nonincreasing; -1 when pred(0) fails.
template <typename Pred>
int last_true(int kmax, Pred pred) {
  if (!pred(0)) return -1;
  int lo = 0, hi = kmax;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (pred(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

}  // namespace

double integrability_radius(const ScalarField& u, const Point& x, double threshold,
                            BallShape shape) {
  if (!(threshold > 0.0))
    throw Error(ErrorCode::PreconditionFailed, "threshold must be positive");
  ScalarField f = fourth_power(u);
  if (f.integral() <= threshold) return kInf;
  const Lattice& lat = u.lattice;
  int kmax = radius_grid_max(lat);
  int k = last_true(kmax, [&](int kk) {
    return sup_ball_mass(f, x, radius_grid_value(lat, kk), shape) <= threshold;
  });
  if (k < 1) k = 1;  // positive radius floor on the grid
  return radius_grid_value(lat, k);
}

RadiusField radius_field(const ScalarField& u, double threshold) {
  if (!(threshold > 0.0))
    throw Error(ErrorCode::PreconditionFailed, "threshold must be positive");
  const Lattice& lat = u.lattice;
  ScalarField f = fourth_power(u);
  RadiusField s(lat, kInf);
  if (f.integral() <= threshold) return s;

  int kmax = radius_grid_max(lat);
  BallMassTable table(f, kmax);

  // rho(y): largest grid index with single-center ball mass <= threshold.
  std::vector<int> rho(static_cast<size_t>(lat.volume()));
  parallel_for(lat.volume(), [&](std::int64_t y) {
    int k = last_true(kmax, [&](int kk) { return table.mass(kk, y) <= threshold; });
    rho[static_cast<size_t>(y)] = k;  // -1 when even the own cell exceeds
  });

  // sup_{y in B_r(x)} mass_r(y) <= thr  <=>  rho(y) >= k for all y in the ball.
  auto tab = offset_table(lat);
  const auto& ents = tab->entries();
  parallel_for(lat.volume(), [&](std::int64_t x) {
    Coord c = lat.site_coord(x);
    auto pred = [&](int k) {
      size_t n = tab->count_within(radius_grid_value(lat, k));
      for (size_t e = 0; e < n; ++e) {
        Coord y = c;
        for (int i = 0; i < kDim; ++i) y[i] += ents[e].off[i];
        if (!lat.wrap(y)) continue;
        if (rho[static_cast<size_t>(lat.site_index(y))] < k) return false;
      }
      return true;
    };
    int k = last_true(kmax, pred);
    if (k < 1) k = 1;
    s[x] = radius_grid_value(lat, k);
  });
  return s;
}

RadiusField sup_radius_field(const ScalarField& density, const SupRadiusSpec& spec) {
  const Lattice& lat = density.lattice;
  int kmax = radius_grid_max(lat);
  RadiusField out(lat, 0.0);

  bool total_small = spec.strict ? (density.integral() < spec.threshold)
                                 : (density.integral() <= spec.threshold);

  BallMassTable table(density, kmax);
  auto tab = offset_table(lat);
  const auto& ents = tab->entries();

  auto admissible = [&](std::int64_t x, int k) {
    double r = radius_grid_value(lat, k);
    double bound = spec.scale_r_minus2 && k > 0 ? spec.threshold * r * r : spec.threshold;
    if (spec.scale_r_minus2 && k == 0) return true;  // r = 0 is vacuous
    Coord c = lat.site_coord(x);
    size_t n = tab->count_within(r);
    for (size_t e = 0; e < n; ++e) {
      Coord y = c;
      for (int i = 0; i < kDim; ++i) y[i] += ents[e].off[i];
      if (!lat.wrap(y)) continue;
      double m = table.mass(k, lat.site_index(y));
      if (spec.strict ? !(m < bound) : !(m <= bound)) return false;
    }
    return true;
  };

  parallel_for(lat.volume(), [&](std::int64_t x) {
    int cap = kmax;
    bool cap_inf = true;
    if (spec.cap) {
      double cr = (*spec.cap)[x];
      cap_inf = std::isinf(cr);
      if (!cap_inf)
        cap = std::min(cap, static_cast<int>(std::floor(cr / (0.5 * lat.spacing) + 1e-9)));
    }
    if (spec.inf_when_total_small && total_small && cap_inf) {
      out[x] = kInf;
      return;
    }
    // The scaled predicate need not be monotone; scan from the cap down.
    for (int k = cap; k >= 0; --k) {
      if (admissible(x, k)) {
        out[x] = radius_grid_value(lat, k);
        return;
      }
    }
    out[x] = 0.0;
  });
  return out;
}

double lorentz_weak_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::PreconditionFailed, "lorentz norm needs p >= 1");
  std::vector<double> v;
  v.reserve(f.values.size());
  for (double x : f.values) v.push_back(std::abs(x));
  std::sort(v.begin(), v.end(), std::greater<double>());
  double h4 = f.lattice.cell_measure();
  double best = 0.0;
  for (size_t k = 0; k < v.size(); ++k) {
    if (v[k] == 0.0) break;
    best = std::max(best, v[k] * std::pow((k + 1) * h4, 1.0 / p));
  }
  return best;
}

double l4_norm(const ScalarField& u) {
  double s = 0.0;
  for (double v : u.values) {
    double q = v * v;
    s += q * q;
  }
  return std::pow(s * u.lattice.cell_measure(), 0.25);
}

double curly_norm(const ScalarField& u) {
  return lorentz_weak_norm(radius_field(u).reciprocal(), 4.0);
}

InterpolationAudit interpolation_audit(const ScalarField& u, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw Error(ErrorCode::PreconditionFailed, "interpolation audit needs 0 < eps < 1");
  double cn = curly_norm(u);
  if (cn <= 0.0)
    throw Error(ErrorCode::AuditUndefined, "curly norm vanishes; ratio undefined");
  InterpolationAudit a;
  double s = 0.0;
  for (double v : u.values) s += std::pow(std::abs(v), 4.0 - eps);
  a.lhs = s * u.lattice.cell_measure();
  a.rhs_bound = cn * cn * cn * cn;
  a.ratio = a.lhs / a.rhs_bound;
  a.curly_over_l4 = cn / l4_norm(u);
  return a;
}

NormReport norm_report(const ScalarField& u, double eps) {
  NormReport r;
  r.l4 = l4_norm(u);
  r.lorentz_weak = lorentz_weak_norm(u, 4.0);
  RadiusField s = radius_field(u);
  r.curly = lorentz_weak_norm(s.reciprocal(), 4.0);
  r.lipschitz_defect = s.lipschitz_defect();
  if (r.curly > 0.0) {
    InterpolationAudit a = interpolation_audit(u, eps);
    r.interpolation_ratio = a.ratio;
    r.curly_over_l4 = a.curly_over_l4;
  }
  return r;
}

double comparability_audit(const ScalarField& u, std::int64_t sample_limit,
                           std::uint64_t sample_seed) {
  const Lattice& lat = u.lattice;
  RadiusField s = radius_field(u);
  double smin = kInf;
  std::vector<std::int64_t> finite;
  for (std::int64_t i = 0; i < lat.volume(); ++i)
    if (!std::isinf(s[i])) {
      finite.push_back(i);
      smin = std::min(smin, s[i]);
    }
  if (finite.empty() || smin <= 0.0)
    throw Error(ErrorCode::PreconditionFailed, "comparability audit needs finite radii");
  double slack = 2.0 * lat.spacing / smin;
  double lo = 0.25 - slack, hi = 4.0 + slack;

  auto violation = [&](std::int64_t a, std::int64_t b) {
    double ra = s[a], rb = s[b];
    double d = lat.distance(lat.site_point(a), lat.site_point(b));
    if (d > ra + rb) return 0.0;  // balls disjoint
    double ratio = ra / rb;
    if (ratio < lo) return lo - ratio;
    if (ratio > hi) return ratio - hi;
    return 0.0;
  };

  double worst = 0.0;
  std::int64_t n = static_cast<std::int64_t>(finite.size());
  if (n <= sample_limit) {
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = i + 1; j < n; ++j)
        worst = std::max(worst, violation(finite[i], finite[j]));
  } else {
    Rng rng(sample_seed);
    std::int64_t pairs = sample_limit * 512;
    for (std::int64_t k = 0; k < pairs; ++k) {
      std::int64_t i = static_cast<std::int64_t>(rng.raw() % static_cast<std::uint64_t>(n));
      std::int64_t j = static_cast<std::int64_t>(rng.raw() % static_cast<std::uint64_t>(n));
      if (i == j) continue;
      worst = std::max(worst, violation(finite[i], finite[j]));
    }
  }
  return worst;
}

}  // namespace grl
