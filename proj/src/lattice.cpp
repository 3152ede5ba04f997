#include "grl/lattice.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace grl {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::BallTooLarge: return "BallTooLarge";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::SingularCenter: return "SingularCenter";
    case ErrorCode::BranchCut: return "BranchCut";
    case ErrorCode::DegenerateShell: return "DegenerateShell";
    case ErrorCode::Inapplicable: return "Inapplicable";
    case ErrorCode::InsufficientResolution: return "InsufficientResolution";
    case ErrorCode::LedgerExhausted: return "LedgerExhausted";
    case ErrorCode::RefinementBreaksCover: return "RefinementBreaksCover";
    case ErrorCode::AuditUndefined: return "AuditUndefined";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

Lattice::Lattice(Coord d, double h, Geometry g) : dims(d), spacing(h), geometry(g) {
  for (int n : dims)
    if (n < 4) throw Error(ErrorCode::ShapeError, "lattice dims must be >= 4");
  if (!(h > 0.0)) throw Error(ErrorCode::ShapeError, "spacing must be positive");
}

double Lattice::min_side() const {
  double m = side_length(0);
  for (int i = 1; i < kDim; ++i) m = std::min(m, side_length(i));
  return m;
}

double Lattice::max_ball_radius() const {
  if (geometry == Geometry::Torus) return 0.5 * min_side();
  // On the box any radius is legal; balls are clipped to the domain.
  double diag2 = 0.0;
  for (int i = 0; i < kDim; ++i) diag2 += side_length(i) * side_length(i);
  return std::sqrt(diag2);
}

std::int64_t Lattice::site_index(const Coord& c) const {
  std::int64_t idx = 0;
  for (int i = 0; i < kDim; ++i) idx = idx * dims[i] + c[i];
  return idx;
}

Coord Lattice::site_coord(std::int64_t idx) const {
  Coord c{};
  for (int i = kDim - 1; i >= 0; --i) {
    c[i] = static_cast<int>(idx % dims[i]);
    idx /= dims[i];
  }
  return c;
}

Point Lattice::site_point(const Coord& c) const {
  Point p{};
  for (int i = 0; i < kDim; ++i) p[i] = c[i] * spacing;
  return p;
}

Point Lattice::site_point(std::int64_t idx) const { return site_point(site_coord(idx)); }

bool Lattice::wrap(Coord& c) const {
  for (int i = 0; i < kDim; ++i) {
    if (geometry == Geometry::Torus) {
      c[i] %= dims[i];
      if (c[i] < 0) c[i] += dims[i];
    } else if (c[i] < 0 || c[i] >= dims[i]) {
      return false;
    }
  }
  return true;
}

std::int64_t Lattice::neighbor(std::int64_t idx, int axis, int step) const {
  Coord c = site_coord(idx);
  c[axis] += step;
  if (!wrap(c)) return -1;
  return site_index(c);
}

Point Lattice::displacement(const Point& a, const Point& b) const {
  Point d{};
  for (int i = 0; i < kDim; ++i) {
    double di = b[i] - a[i];
    if (geometry == Geometry::Torus) {
      double L = side_length(i);
      di -= L * std::floor(di / L + 0.5);
    }
    d[i] = di;
  }
  return d;
}

double Lattice::distance2(const Point& a, const Point& b) const {
  Point d = displacement(a, b);
  double s = 0.0;
  for (int i = 0; i < kDim; ++i) s += d[i] * d[i];
  return s;
}

double Lattice::distance(const Point& a, const Point& b) const {
  return std::sqrt(distance2(a, b));
}

double ScalarField::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * lattice.cell_measure();
}

OffsetTable::OffsetTable(const Lattice& lat) : spacing_(lat.spacing) {
  std::array<int, kDim> lo{}, hi{};
  for (int i = 0; i < kDim; ++i) {
    if (lat.geometry == Geometry::Torus) {
      // (-N/2, N/2]: each cell appears exactly once.
      lo[i] = -(lat.dims[i] - 1) / 2;
      hi[i] = lat.dims[i] / 2;
    } else {
      lo[i] = -(lat.dims[i] - 1);
      hi[i] = lat.dims[i] - 1;
    }
  }
  Coord o{};
  entries_.reserve(static_cast<size_t>(lat.volume()));
  for (o[0] = lo[0]; o[0] <= hi[0]; ++o[0])
    for (o[1] = lo[1]; o[1] <= hi[1]; ++o[1])
      for (o[2] = lo[2]; o[2] <= hi[2]; ++o[2])
        for (o[3] = lo[3]; o[3] <= hi[3]; ++o[3]) {
          std::int64_t n2 = 0;
          for (int i = 0; i < kDim; ++i)
            n2 += static_cast<std::int64_t>(o[i]) * o[i];
          entries_.push_back({o, n2});
        }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    if (a.norm2 != b.norm2) return a.norm2 < b.norm2;
    return a.off < b.off;
  });
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (shell_norms_.empty() || shell_norms_.back() != entries_[i].norm2) {
      shell_norms_.push_back(entries_[i].norm2);
      shell_ends_.push_back(i + 1);
    } else {
      shell_ends_.back() = i + 1;
    }
  }
}

size_t OffsetTable::count_within_norm2(std::int64_t n2) const {
  auto it = std::upper_bound(shell_norms_.begin(), shell_norms_.end(), n2);
  if (it == shell_norms_.begin()) return 0;
  return shell_ends_[static_cast<size_t>(it - shell_norms_.begin()) - 1];
}

size_t OffsetTable::count_within(double radius) const {
  return count_within_norm2(radius_to_norm2_threshold(radius, spacing_));
}

std::int64_t radius_to_norm2_threshold(double radius, double spacing) {
  if (radius < 0.0) return -1;
  double t2 = (radius / spacing) * (radius / spacing);
  // Radii on the h/2 grid have t2 = k^2/4 exactly; snap against roundoff
  // so boundary cells are classified deterministically.
  double q = std::round(t2 * 4.0);
  if (std::abs(t2 * 4.0 - q) < 1e-9 * std::max(1.0, q)) t2 = q / 4.0;
  return static_cast<std::int64_t>(std::floor(t2 + 1e-12));
}

namespace {
std::mutex g_offset_mutex;
std::map<std::tuple<Coord, double, int>, std::shared_ptr<const OffsetTable>> g_offset_cache;
}  // namespace

std::shared_ptr<const OffsetTable> offset_table(const Lattice& lat) {
  std::lock_guard<std::mutex> lock(g_offset_mutex);
  auto key = std::make_tuple(lat.dims, lat.spacing, static_cast<int>(lat.geometry));
  auto it = g_offset_cache.find(key);
  if (it != g_offset_cache.end()) return it->second;
  auto tab = std::make_shared<const OffsetTable>(lat);
  g_offset_cache[key] = tab;
  return tab;
}

namespace {

void check_ball(const Lattice& lat, const Ball& b) {
  if (b.radius < 0.0) throw Error(ErrorCode::BallTooLarge, "negative radius");
  if (lat.geometry == Geometry::Torus &&
      b.radius > lat.max_ball_radius() * (1.0 + 1e-12)) {
    throw Error(ErrorCode::BallTooLarge, "radius exceeds torus injectivity bound");
  }
}

// True when the center coincides with a cell center.
bool center_site(const Lattice& lat, const Point& x, Coord* c_out) {
  Coord c{};
  for (int i = 0; i < kDim; ++i) {
    double q = x[i] / lat.spacing;
    double r = std::round(q);
    if (std::abs(q - r) > 1e-9) return false;
    c[i] = static_cast<int>(r);
  }
  if (!lat.wrap(c)) return false;
  *c_out = c;
  return true;
}

}  // namespace

std::vector<std::int64_t> cells_in_ball(const Lattice& lat, const Ball& b) {
  check_ball(lat, b);
  std::vector<std::int64_t> out;
  Coord c{};
  if (center_site(lat, b.center, &c)) {
    auto tab = offset_table(lat);
    size_t n = tab->count_within(b.radius);
    const auto& ents = tab->entries();
    out.reserve(n);
    for (size_t k = 0; k < n; ++k) {
      Coord y = c;
      for (int i = 0; i < kDim; ++i) y[i] += ents[k].off[i];
      if (!lat.wrap(y)) continue;  // box: offset leaves the domain
      out.push_back(lat.site_index(y));
    }
    return out;
  }
  // Continuum center: bounding-box scan in lex order.
  double r2 = b.radius * b.radius * (1.0 + 1e-12);
  std::array<int, kDim> lo{}, hi{};
  for (int i = 0; i < kDim; ++i) {
    lo[i] = static_cast<int>(std::ceil((b.center[i] - b.radius) / lat.spacing - 1e-9));
    hi[i] = static_cast<int>(std::floor((b.center[i] + b.radius) / lat.spacing + 1e-9));
  }
  Coord y{};
  for (y[0] = lo[0]; y[0] <= hi[0]; ++y[0])
    for (y[1] = lo[1]; y[1] <= hi[1]; ++y[1])
      for (y[2] = lo[2]; y[2] <= hi[2]; ++y[2])
        for (y[3] = lo[3]; y[3] <= hi[3]; ++y[3]) {
          Coord w = y;
          if (!lat.wrap(w)) continue;
          if (lat.distance2(lat.site_point(w), b.center) <= r2)
            out.push_back(lat.site_index(w));
        }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// cube membership against the same snapped threshold rule as round balls
bool cube_contains(const OffsetTable::Entry& e, std::int64_t n2) {
  for (int i = 0; i < kDim; ++i)
    if (static_cast<std::int64_t>(e.off[i]) * e.off[i] > n2) return false;
  return true;
}

}  // namespace

double ball_mass(const ScalarField& f, const Ball& b, BallShape shape) {
  const Lattice& lat = f.lattice;
  check_ball(lat, b);
  double sum = 0.0;
  Coord c{};
  if (center_site(lat, b.center, &c)) {
    auto tab = offset_table(lat);
    const auto& ents = tab->entries();
    std::int64_t n2 = radius_to_norm2_threshold(b.radius, lat.spacing);
    size_t n = shape == BallShape::Round ? tab->count_within_norm2(n2) : ents.size();
    for (size_t k = 0; k < n; ++k) {
      if (shape == BallShape::Cube && !cube_contains(ents[k], n2)) continue;
      Coord y = c;
      for (int i = 0; i < kDim; ++i) y[i] += ents[k].off[i];
      if (!lat.wrap(y)) continue;
      sum += f[lat.site_index(y)];
    }
  } else {
    if (shape == BallShape::Cube)
      throw Error(ErrorCode::PreconditionFailed, "cube balls need site centers");
    for (std::int64_t idx : cells_in_ball(lat, b)) sum += f[idx];
  }
  return sum * lat.cell_measure();
}

double sup_ball_mass(const ScalarField& f, const Point& x, double r, BallShape shape) {
  const Lattice& lat = f.lattice;
  check_ball(lat, Ball{x, r});
  double best = ball_mass(f, Ball{x, r}, shape);
  Coord c{};
  if (center_site(lat, x, &c)) {
    auto tab = offset_table(lat);
    const auto& ents = tab->entries();
    std::int64_t n2 = radius_to_norm2_threshold(r, lat.spacing);
    size_t n = shape == BallShape::Round ? tab->count_within_norm2(n2) : ents.size();
    for (size_t k = 1; k < n; ++k) {  // k = 0 is x itself
      if (shape == BallShape::Cube && !cube_contains(ents[k], n2)) continue;
      Coord y = c;
      for (int i = 0; i < kDim; ++i) y[i] += ents[k].off[i];
      if (!lat.wrap(y)) continue;
      best = std::max(best, ball_mass(f, Ball{lat.site_point(y), r}, shape));
    }
  } else {
    for (std::int64_t idx : cells_in_ball(lat, Ball{x, r}))
      best = std::max(best, ball_mass(f, Ball{lat.site_point(idx), r}, shape));
  }
  return best;
}

std::vector<Ball> vitali_cover(const Lattice& lat, const std::vector<Point>& sites,
                               const std::function<double(const Point&)>& radius_fn) {
  struct Cand {
    Point p;
    double r;
    size_t order;
  };
  std::vector<Cand> cands;
  cands.reserve(sites.size());
  for (size_t i = 0; i < sites.size(); ++i) {
    double r = radius_fn(sites[i]);
    if (!(r > 0.0))
      throw Error(ErrorCode::PreconditionFailed, "vitali radius must be positive");
    cands.push_back({sites[i], r, i});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.r != b.r) return a.r > b.r;
    if (a.p != b.p) return a.p < b.p;
    return a.order < b.order;
  });
  std::vector<Ball> chosen;
  for (const Cand& c : cands) {
    bool ok = true;
    for (const Ball& ch : chosen) {
      if (lat.distance(c.p, ch.center) <= (c.r + ch.radius) / 5.0) {
        ok = false;
        break;
      }
    }
    if (ok) chosen.push_back(Ball{c.p, c.r});
  }
  return chosen;
}

}  // namespace grl
