#include "grl/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "grl/rng.hpp"

namespace grl {

RadiusField curvature_radius_field(const ScalarField& e, double eps0) {
  SupRadiusSpec spec;
  spec.strict = true;
  spec.threshold = eps0;
  return sup_radius_field(e, spec);
}

namespace {

ScalarField power_field(const ScalarField& m, int p) {
  ScalarField f(m.lattice);
  for (size_t i = 0; i < m.values.size(); ++i) {
    double v = m.values[i];
    double a = v;
    for (int q = 1; q < p; ++q) a *= v;
    f.values[i] = a;
  }
  return f;
}

}  // namespace

RadiusField regularity_radius_field(const ConnectionField& A, const ScalarField& e,
                                    const ScaleConfig& cfg) {
  if (!A.lattice.same_shape(e.lattice))
    throw Error(ErrorCode::ShapeError, "regularity_radius_field lattice mismatch");
  RadiusField cap = curvature_radius_field(e, cfg.eps0);
  SupRadiusSpec spec;
  spec.threshold = cfg.theta1 * cfg.eta;
  spec.scale_r_minus2 = true;
  spec.cap = &cap;
  spec.inf_when_total_small = false;
  // r^{-2}-scaled masses admit no global smallness shortcut; the field is
  // finite, capped by the radius grid even where the curvature radius is inf.
  ScalarField mag2 = power_field(A.magnitude(), 2);
  return sup_radius_field(mag2, spec);
}

RadiusField a0_radius_field(const ConnectionField& A, const ScalarField& e, double eps0) {
  if (!A.lattice.same_shape(e.lattice))
    throw Error(ErrorCode::ShapeError, "a0_radius_field lattice mismatch");
  RadiusField cap = curvature_radius_field(e, eps0);
  SupRadiusSpec spec;
  spec.threshold = 1.0;
  spec.cap = &cap;
  ScalarField mag4 = power_field(A.magnitude(), 4);
  return sup_radius_field(mag4, spec);
}

std::vector<std::int64_t> singular_set(const ConnectionField& A, const ScalarField& e,
                                       const ScaleConfig& cfg) {
  RadiusField s = a0_radius_field(A, e, cfg.eps0);
  double cut = cfg.resolved_s_min(A.lattice);
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < A.lattice.volume(); ++i)
    if (!std::isinf(s[i]) && s[i] <= cut) out.push_back(i);
  return out;  // ascending site index = lexicographic coordinates
}

RadiusLowerBound radius_lower_bound_audit(const ConnectionField& A, const ScalarField& e,
                                          const ScaleConfig& cfg, const Point& y, double rho) {
  RadiusLowerBound out;
  if (ball_mass(e, Ball{y, 2.0 * rho}) >= cfg.eps0) return out;
  std::vector<std::int64_t> sing = singular_set(A, e, cfg);
  const Lattice& lat = A.lattice;
  for (std::int64_t s : sing)
    if (lat.distance(lat.site_point(s), y) <= 2.0 * rho) return out;

  RadiusField r = regularity_radius_field(A, e, cfg);
  double mn = kInf;
  for (std::int64_t idx : cells_in_ball(lat, Ball{y, rho}))
    mn = std::min(mn, r[idx]);
  out.applicable = true;
  out.min_radius = mn;
  out.ratio = mn / rho;
  return out;
}

// ---- sphere degree ----

namespace {

double det4(const std::array<std::array<double, 4>, 4>& m) {
  // cofactor expansion along the first row
  auto det3 = [](double a, double b, double c, double d, double e, double f, double g,
                 double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  };
  double s = 0.0;
  for (int j = 0; j < 4; ++j) {
    std::array<double, 9> sub{};
    int q = 0;
    for (int r = 1; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        if (c == j) continue;
        sub[static_cast<size_t>(q++)] = m[static_cast<size_t>(r)][static_cast<size_t>(c)];
      }
    double d3 = det3(sub[0], sub[1], sub[2], sub[3], sub[4], sub[5], sub[6], sub[7], sub[8]);
    s += ((j % 2 == 0) ? 1.0 : -1.0) * m[0][static_cast<size_t>(j)] * d3;
  }
  return s;
}

// Solve M lambda = q by Gaussian elimination; returns false on near-zero pivot.
bool solve4(std::array<std::array<double, 4>, 4> m, std::array<double, 4> q,
            std::array<double, 4>& lambda) {
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(m[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
          std::abs(m[static_cast<size_t>(piv)][static_cast<size_t>(col)]))
        piv = r;
    if (std::abs(m[static_cast<size_t>(piv)][static_cast<size_t>(col)]) < 1e-13) return false;
    std::swap(m[static_cast<size_t>(col)], m[static_cast<size_t>(piv)]);
    std::swap(q[static_cast<size_t>(col)], q[static_cast<size_t>(piv)]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      double f = m[static_cast<size_t>(r)][static_cast<size_t>(col)] /
                 m[static_cast<size_t>(col)][static_cast<size_t>(col)];
      for (int c = col; c < 4; ++c)
        m[static_cast<size_t>(r)][static_cast<size_t>(c)] -=
            f * m[static_cast<size_t>(col)][static_cast<size_t>(c)];
      q[static_cast<size_t>(r)] -= f * q[static_cast<size_t>(col)];
    }
  }
  for (int i = 0; i < 4; ++i)
    lambda[static_cast<size_t>(i)] =
        q[static_cast<size_t>(i)] / m[static_cast<size_t>(i)][static_cast<size_t>(i)];
  return true;
}

}  // namespace

SphereShell cube_shell(const Lattice& lat, const Coord& center, int k) {
  if (k < 1) throw Error(ErrorCode::DegenerateShell, "shell half-width must be >= 1");
  for (int i = 0; i < kDim; ++i)
    if (2 * k + 1 > lat.dims[i])
      throw Error(ErrorCode::DegenerateShell, "shell does not embed in the torus");

  SphereShell shell;
  shell.center = lat.site_point(center);
  shell.k = k;

  // vertex ids for surface offsets, keyed by the offset in [-k, k]^4
  std::map<Coord, int> vid;
  auto vertex = [&](const Coord& off) {
    auto it = vid.find(off);
    if (it != vid.end()) return it->second;
    Coord c = center;
    for (int i = 0; i < kDim; ++i) c[i] += off[i];
    if (!lat.wrap(c)) throw Error(ErrorCode::DegenerateShell, "shell leaves the box domain");
    int id = static_cast<int>(shell.vertex_sites.size());
    vid.emplace(off, id);
    shell.vertex_sites.push_back(lat.site_index(c));
    return id;
  };

  // Kuhn tetrahedra per unit 3-cube of each facet, oriented outward.
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int d = 0; d < kDim; ++d) {
    int axes[3];
    int q = 0;
    for (int i = 0; i < kDim; ++i)
      if (i != d) axes[q++] = i;
    for (int sigma = -1; sigma <= 1; sigma += 2) {
      Coord base{};
      base[d] = sigma * k;
      for (int a0 = -k; a0 < k; ++a0)
        for (int a1 = -k; a1 < k; ++a1)
          for (int a2 = -k; a2 < k; ++a2) {
            Coord corner = base;
            corner[axes[0]] = a0;
            corner[axes[1]] = a1;
            corner[axes[2]] = a2;
            for (const auto& perm : perms) {
              std::array<Coord, 4> pts;
              pts[0] = corner;
              for (int step = 0; step < 3; ++step) {
                pts[static_cast<size_t>(step + 1)] = pts[static_cast<size_t>(step)];
                pts[static_cast<size_t>(step + 1)][axes[perm[step]]] += 1;
              }
              // boundary orientation: det[outward, p1-p0, p2-p0, p3-p0]
              std::array<std::array<double, 4>, 4> m{};
              for (int row = 0; row < 4; ++row)
                m[static_cast<size_t>(row)][0] = (row == d) ? sigma : 0.0;
              for (int col = 0; col < 3; ++col)
                for (int row = 0; row < 4; ++row)
                  m[static_cast<size_t>(row)][static_cast<size_t>(col + 1)] =
                      pts[static_cast<size_t>(col + 1)][row] - pts[0][row];
              double ori = det4(m);
              std::array<int, 4> tet{vertex(pts[0]), vertex(pts[1]), vertex(pts[2]),
                                     vertex(pts[3])};
              if (ori < 0) std::swap(tet[2], tet[3]);
              shell.tets.push_back(tet);
            }
          }
    }
  }
  return shell;
}

int sphere_degree(const FrameField& theta, const SphereShell& shell, std::uint64_t seed) {
  std::vector<Su2> vals;
  vals.reserve(shell.vertex_sites.size());
  for (std::int64_t s : shell.vertex_sites) {
    Su2 v = theta[s];
    double n = std::sqrt(v.norm2());
    if (n < 1e-12)
      throw Error(ErrorCode::DegenerateShell, "frame vanishes on a shell vertex");
    vals.push_back(v.normalized());
  }

  Rng rng(seed);
  for (int attempt = 0; attempt < 32; ++attempt) {
    Su2 q{rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()};
    double qn = std::sqrt(q.norm2());
    if (qn < 1e-6) continue;
    std::array<double, 4> target{q.w / qn, q.x / qn, q.y / qn, q.z / qn};

    int deg = 0;
    bool degenerate = false;
    for (const auto& tet : shell.tets) {
      std::array<std::array<double, 4>, 4> m{};
      for (int col = 0; col < 4; ++col) {
        const Su2& v = vals[static_cast<size_t>(tet[static_cast<size_t>(col)])];
        m[0][static_cast<size_t>(col)] = v.w;
        m[1][static_cast<size_t>(col)] = v.x;
        m[2][static_cast<size_t>(col)] = v.y;
        m[3][static_cast<size_t>(col)] = v.z;
      }
      std::array<double, 4> lambda{};
      if (!solve4(m, target, lambda)) continue;  // flat simplex never covers a generic point
      double mn = *std::min_element(lambda.begin(), lambda.end());
      if (mn > 1e-9) {
        deg += det4(m) > 0 ? 1 : -1;
      } else if (mn > -1e-9) {
        degenerate = true;  // target on a face; retry
        break;
      }
    }
    if (!degenerate) return deg;
  }
  throw Error(ErrorCode::DegenerateShell, "no generic target found");
}

}  // namespace grl
