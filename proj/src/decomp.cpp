#include "grl/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "grl/parallel.hpp"
#include "grl/radius.hpp"

namespace grl {

double DecompConfig::gamma_k0() const { return std::pow(gamma, k0); }

double DecompConfig::min_scale(const Lattice& lat) const {
  return test_mode ? 0.5 * lat.spacing : 4.0 * lat.spacing;
}

double DecompConfig::n_bound(double lam) const {
  if (n_override > 0.0) return n_override;
  return std::ceil(10.0 * lam / eps0);
}

double DecompConfig::c_value(double lam) const {
  if (c_override > 0.0) return c_override;
  // the closed form degenerates to 1 when 2 gamma^k0 >= 1; test mode
  // substitutes a small fixed fraction so conditions (2) and (4) stay usable
  if (test_mode) return std::pow(gamma, k0 + 10);
  double expo = 10.0 + std::ceil(lam * std::pow(gamma, -k0 - 1));
  return std::pow(2.0 * gamma_k0(), expo);
}

double DecompConfig::ladder_base() const { return test_mode ? gamma : 2.0 * gamma_k0(); }

int DecompConfig::ladder_offset() const { return test_mode ? 1 : 10; }

double DecompConfig::resolve_lambda(const ScalarField& e) const {
  return lambda >= 0.0 ? lambda : e.integral();
}

double zeta(const ScalarField& e, const Point& x, double r) { return ball_mass(e, Ball{x, r}); }

double zbar(const ScalarField& e, const Point& x, double r) { return sup_ball_mass(e, x, r); }

namespace {

// Radii snapped down to the h/2 grid, floored at h/2. All scale ladders go
// through here so constructor and certifier evaluate identical balls.
double snap_radius(const Lattice& lat, double r) {
  double step = 0.5 * lat.spacing;
  double k = std::floor(r / step + 1e-9);
  return std::max(step, k * step);
}

void check_scale(const Lattice& lat, const DecompConfig& cfg, double r, const char* what) {
  if (!cfg.test_mode && r < cfg.min_scale(lat) * (1.0 - 1e-12))
    throw Error(ErrorCode::InsufficientResolution, std::string(what) + " below 4h");
}

// Cached per-radius columns of single-center ball masses, extended shell by
// shell in offset order so entries match ball_mass bit for bit.
class ZetaCache {
 public:
  explicit ZetaCache(const ScalarField& e)
      : e_(e), tab_(offset_table(e.lattice)), frontier_(e.lattice.volume(), 0.0) {}

  double mass(std::int64_t site, double r) {
    const auto& col = column(r);
    return col[static_cast<size_t>(site)] * e_.lattice.cell_measure();
  }

  double mass_at_point(const Point& x, double r) {
    Coord c{};
    if (site_of(x, &c)) return mass(e_.lattice.site_index(c), r);
    return ball_mass(e_, Ball{x, r});
  }

  double zbar(const Point& x, double r) {
    const Lattice& lat = e_.lattice;
    if (lat.geometry == Geometry::Torus && r > lat.max_ball_radius() * (1.0 + 1e-12))
      throw Error(ErrorCode::BallTooLarge, "zbar radius exceeds torus bound");
    const auto& col = column(r);
    double best = 0.0;
    bool any = false;
    for (std::int64_t idx : cells_in_ball(lat, Ball{x, r})) {
      double v = col[static_cast<size_t>(idx)];
      if (!any || v > best) best = v, any = true;
    }
    double at_x = 0.0;
    Coord c{};
    if (site_of(x, &c)) {
      at_x = best * lat.cell_measure();  // x is one of the enumerated cells
      if (!any) at_x = mass(lat.site_index(c), r);
      return any ? best * lat.cell_measure() : at_x;
    }
    at_x = ball_mass(e_, Ball{x, r});
    return any ? std::max(best * lat.cell_measure(), at_x) : at_x;
  }

  bool site_of(const Point& x, Coord* c_out) const {
    const Lattice& lat = e_.lattice;
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

 private:
  const std::vector<double>& column(double r) {
    std::int64_t thr = radius_to_norm2_threshold(r, e_.lattice.spacing);
    auto it = cols_.find(thr);
    if (it != cols_.end()) return it->second;
    size_t end = tab_->count_within_norm2(thr);
    if (end < frontier_end_) {
      // smaller than the frontier: rebuild from the largest cached column
      // below thr, or from scratch
      std::int64_t base_thr = -1;
      for (const auto& kv : cols_)
        if (kv.first <= thr && kv.first > base_thr) base_thr = kv.first;
      std::vector<double> col;
      size_t start = 0;
      if (base_thr >= 0) {
        col = cols_[base_thr];
        start = tab_->count_within_norm2(base_thr);
      } else {
        col.assign(static_cast<size_t>(e_.lattice.volume()), 0.0);
      }
      accumulate(col, start, end);
      return cols_.emplace(thr, std::move(col)).first->second;
    }
    accumulate(frontier_, frontier_end_, end);
    frontier_end_ = end;
    return cols_.emplace(thr, frontier_).first->second;
  }

  void accumulate(std::vector<double>& col, size_t start, size_t end) {
    const Lattice& lat = e_.lattice;
    const auto& ents = tab_->entries();
    parallel_for(lat.volume(), [&](std::int64_t s) {
      Coord c = lat.site_coord(s);
      double acc = col[static_cast<size_t>(s)];
      for (size_t k = start; k < end; ++k) {
        Coord y = c;
        for (int i = 0; i < kDim; ++i) y[i] += ents[k].off[i];
        if (!lat.wrap(y)) continue;
        acc += e_[lat.site_index(y)];
      }
      col[static_cast<size_t>(s)] = acc;
    });
  }

  const ScalarField& e_;
  std::shared_ptr<const OffsetTable> tab_;
  std::map<std::int64_t, std::vector<double>> cols_;
  std::vector<double> frontier_;
  size_t frontier_end_ = 0;
};

bool weakly_flat_impl(const ScalarField& e, ZetaCache* cache, const Point& p, double r,
                      const DecompConfig& cfg) {
  const Lattice& lat = e.lattice;
  double gk = cfg.gamma_k0();
  check_scale(lat, cfg, gk * r, "weakly-flat inner scale");
  double lo = snap_radius(lat, gk * r);
  double hi = 2.0 * r;
  double a = cache ? cache->zbar(p, hi) : zbar(e, p, hi);
  double b = cache ? cache->zbar(p, lo) : zbar(e, p, lo);
  return std::abs(a - b) < gk;
}

bool annular_impl(const ScalarField& e, ZetaCache* cache, const Point& p, double s, double r,
                  const DecompConfig& cfg) {
  const Lattice& lat = e.lattice;
  double gk = cfg.gamma_k0();
  if (s > 5.0 * gk * r * (1.0 + 1e-12))
    throw Error(ErrorCode::PreconditionFailed, "annular needs s <= 5 gamma^k0 r");
  check_scale(lat, cfg, s, "annular inner scale");
  auto zb = [&](const Point& x, double rr) { return cache ? cache->zbar(x, rr) : zbar(e, x, rr); };
  // (1)
  if (!(std::abs(zb(p, 2.0 * r) - zb(p, snap_radius(lat, s))) < gk)) return false;
  // (2) over cells of B_{gamma^k0 r}(p), plus p itself
  double rs = snap_radius(lat, s / cfg.gamma);
  std::vector<Point> probes{p};
  for (std::int64_t idx : cells_in_ball(lat, Ball{p, gk * r}))
    probes.push_back(lat.site_point(idx));
  for (const Point& x : probes)
    if (!(std::abs(zb(x, 2.0 * r) - zb(x, rs)) >= gk)) return false;
  return true;
}

BubbleCheck bubble_impl(const ScalarField& e, ZetaCache* cache, const Region& reg,
                        const DecompConfig& cfg, double lam) {
  const Lattice& lat = e.lattice;
  double gk = cfg.gamma_k0();
  BubbleCheck chk;
  for (const Ball& b : reg.excised)
    if (lat.distance(reg.center, b.center) + b.radius > reg.radius * (1.0 + 1e-9))
      throw Error(ErrorCode::PreconditionFailed, "excised ball outside the bubble ball");

  auto zb = [&](const Point& x, double rr) { return cache ? cache->zbar(x, rr) : zbar(e, x, rr); };

  chk.cond[0] = static_cast<double>(reg.excised.size()) <= cfg.n_bound(lam);
  double cmin = cfg.c_value(lam) * reg.radius;
  chk.cond[1] = true;
  for (const Ball& b : reg.excised)
    if (b.radius < cmin * (1.0 - 1e-12)) chk.cond[1] = false;
  chk.cond[2] = true;
  double zp = zb(reg.center, reg.radius);
  for (const Ball& b : reg.excised)
    if (!(zb(b.center, snap_radius(lat, b.radius)) < zp - gk)) chk.cond[2] = false;
  // (4): mass is monotone in the radius, so the smallest admissible r_x is
  // the only one worth checking.
  double rx = std::max(snap_radius(lat, cmin), 0.5 * lat.spacing);
  if (cmin > rx) rx = std::ceil(cmin / (0.5 * lat.spacing)) * 0.5 * lat.spacing;
  rx = std::min(rx, lat.max_ball_radius());
  chk.cond[3] = true;
  for (std::int64_t idx : cells_in_ball(lat, Ball{reg.center, reg.radius})) {
    Point x = lat.site_point(idx);
    bool inside_excised = false;
    for (const Ball& b : reg.excised)
      if (lat.distance(x, b.center) < b.radius * (1.0 - 1e-12)) {
        inside_excised = true;
        break;
      }
    if (inside_excised) continue;
    double m = cache ? cache->mass(idx, rx) : ball_mass(e, Ball{x, rx});
    if (!(m < cfg.eps0 / 2.0)) {
      chk.cond[3] = false;
      break;
    }
  }
  chk.ok = chk.cond[0] && chk.cond[1] && chk.cond[2] && chk.cond[3];
  return chk;
}

int k_index_impl(const ScalarField& e, ZetaCache* cache, const Point& x, const DecompConfig& cfg,
                 double top_radius, bool* capped) {
  const Lattice& lat = e.lattice;
  double floor_scale = cfg.min_scale(lat);
  int kmax = 0;
  while (std::pow(cfg.gamma, kmax + 1) * top_radius >= floor_scale * (1.0 - 1e-12)) ++kmax;
  if (kmax < 1) {
    if (!cfg.test_mode)
      throw Error(ErrorCode::InsufficientResolution, "k_index scale ladder below guard");
    kmax = 1;  // clamped evaluation at the grid floor
  }
  double gk = cfg.gamma_k0();
  auto zb = [&](const Point& p, double rr) { return cache ? cache->zbar(p, rr) : zbar(e, p, rr); };
  double top = zb(x, top_radius);
  int best = 0;
  for (int K = kmax; K >= 1; --K) {
    double rr = snap_radius(lat, std::pow(cfg.gamma, K) * top_radius);
    if (std::abs(top - zb(x, rr)) < gk) {
      best = K;
      break;
    }
  }
  if (capped) *capped = (best == kmax);
  return best;
}

}  // namespace

bool is_weakly_flat(const ScalarField& e, const Point& p, double r, const DecompConfig& cfg) {
  return weakly_flat_impl(e, nullptr, p, r, cfg);
}

bool is_annular(const ScalarField& e, const Point& p, double s, double r,
                const DecompConfig& cfg) {
  return annular_impl(e, nullptr, p, s, r, cfg);
}

BubbleCheck is_bubble(const ScalarField& e, const Region& reg, const DecompConfig& cfg) {
  return bubble_impl(e, nullptr, reg, cfg, cfg.resolve_lambda(e));
}

int k_index(const ScalarField& e, const Point& x, const DecompConfig& cfg, double top_radius,
            bool* capped) {
  return k_index_impl(e, nullptr, x, cfg, top_radius, capped);
}

namespace {

struct Builder {
  const ScalarField& e;
  DecompConfig cfg;
  double lam;
  ZetaCache cache;
  Decomposition out;
  int next_tree = 0;

  Builder(const ScalarField& ee, const DecompConfig& cc)
      : e(ee), cfg(cc), lam(cc.resolve_lambda(ee)), cache(ee) {
    out.config = cfg;
    out.config.lambda = lam;
    out.lambda = lam;
  }

  void note_stage(int stage) { out.max_stage = std::max(out.max_stage, stage); }

  void emit(Region reg) {
    switch (reg.tag) {
      case Region::Tag::Annular: out.count_annular++; break;
      case Region::Tag::Bubble: out.count_bubble++; break;
      case Region::Tag::WeaklyFlat: out.count_weakly_flat++; break;
    }
    note_stage(reg.stage);
    out.regions.push_back(std::move(reg));
  }

  // Recursive weakly-flat decomposition; returns false only by throwing.
  void weakly_flat(const Point& p, double r, int stage, int tree, bool keep_wf_regions) {
    const Lattice& lat = e.lattice;
    int max_stage = static_cast<int>(std::floor(lam / cfg.gamma_k0())) + 1;
    if (stage > max_stage)
      throw Error(ErrorCode::LedgerExhausted, "weakly-flat recursion exceeded ledger depth");

    double mass = cache.mass_at_point(p, r);
    if (mass < cfg.eps0 / 2.0) {
      Region b;
      b.tag = Region::Tag::Bubble;
      b.center = p;
      b.radius = r;
      b.stage = stage;
      b.constructed_ok = bubble_impl(e, &cache, b, cfg, lam).ok;
      emit(std::move(b));
      return;
    }

    // argmax of K_x over the ball, ties broken by ball order (distance,
    // then lexicographic). Candidates are kept close enough to p that the
    // annular outer scale stays inside the torus bound.
    double bound = lat.max_ball_radius();
    double dmax = std::min(r, bound / 2.0 - r);
    int bestK = -1;
    Point x0 = p;
    {
      std::vector<Point> cands{p};
      if (dmax > 0.0)
        for (std::int64_t idx : cells_in_ball(lat, Ball{p, dmax}))
          cands.push_back(lat.site_point(idx));
      for (const Point& x : cands) {
        int K = k_index_impl(e, &cache, x, cfg, r, nullptr);
        if (K > bestK) {
          bestK = K;
          x0 = x;
        }
      }
    }
    if (bestK < 1)
      throw Error(ErrorCode::InsufficientResolution, "no admissible concentration scale");

    double r_ann = r + lat.distance(p, x0);
    double s = snap_radius(lat, 5.0 * std::pow(cfg.gamma, bestK) * r);
    bool annular_ok = false;
    if (s < r_ann && s <= 5.0 * cfg.gamma_k0() * r_ann * (1.0 + 1e-12) &&
        2.0 * r_ann <= bound * (1.0 + 1e-12)) {
      try {
        annular_ok = annular_impl(e, &cache, x0, s, r_ann, cfg);
      } catch (const Error&) {
        annular_ok = false;
      }
      if (annular_ok) {
        Region a;
        a.tag = Region::Tag::Annular;
        a.center = x0;
        a.inner = s;
        a.radius = r_ann;
        a.stage = stage;
        a.constructed_ok = true;
        emit(std::move(a));
      }
    }

    double rho = snap_radius(lat, 10.0 * std::pow(cfg.gamma, bestK) * r);
    if (!annular_ok) {
      // without the annulus the bubble ball alone must cover B_r(p)
      double need = std::ceil(r_ann / (0.5 * lat.spacing) - 1e-9) * 0.5 * lat.spacing;
      rho = std::max(rho, need);
    }
    rho = std::min(rho, bound);

    // pigeonhole ladder radii and the Vitali cover of the bubble ball
    double base = cfg.ladder_base();
    int off = cfg.ladder_offset();
    int jmax = static_cast<int>(std::ceil(lam * std::pow(cfg.gamma, -cfg.k0 - 1)));
    if (cfg.test_mode) {
      int j = 1;
      while (j < 64 && std::pow(base, off + j + 1) * rho >= 0.25 * lat.spacing) ++j;
      jmax = std::max(1, j);
    } else {
      check_scale(lat, cfg, std::pow(base, off + jmax + 1) * rho, "pigeonhole ladder");
    }

    std::vector<std::int64_t> sites_idx = cells_in_ball(lat, Ball{x0, rho});
    std::vector<Point> sites;
    sites.reserve(sites_idx.size());
    for (std::int64_t idx : sites_idx) sites.push_back(lat.site_point(idx));

    auto ladder = [&](int j) { return snap_radius(lat, std::pow(base, off + j) * rho); };
    auto radius_fn = [&](const Point& y) {
      for (int j = 1; j <= jmax; ++j) {
        double hi2 = ladder(j);
        double lo2 = ladder(j + 1);
        if (std::abs(cache.zbar(y, hi2) - cache.zbar(y, lo2)) < cfg.gamma_k0())
          return std::max(0.5 * lat.spacing, hi2 / 2.0);
      }
      throw Error(ErrorCode::InsufficientResolution, "pigeonhole scale not found");
    };

    std::vector<Ball> cover = vitali_cover(lat, sites, radius_fn);
    std::vector<Ball> heavy;
    for (const Ball& b : cover)
      if (cache.mass_at_point(b.center, b.radius) >= cfg.eps0 / 2.0) heavy.push_back(b);

    Region bub;
    bub.tag = Region::Tag::Bubble;
    bub.center = x0;
    bub.radius = std::max(rho, r_ann);
    bub.stage = stage;
    for (const Ball& b : heavy) {
      // keep excised balls inside the bubble ball
      double d = lat.distance(x0, b.center);
      if (d + b.radius <= bub.radius * (1.0 + 1e-9)) bub.excised.push_back(b);
    }
    bub.constructed_ok = bubble_impl(e, &cache, bub, cfg, lam).ok;
    std::vector<Ball> children = bub.excised;
    emit(std::move(bub));

    for (const Ball& b : children) {
      double rc = 2.0 * b.radius;
      Region wf;
      wf.tag = Region::Tag::WeaklyFlat;
      wf.center = b.center;
      wf.radius = rc;
      wf.stage = stage + 1;
      wf.constructed_ok = weakly_flat_impl(e, &cache, b.center, rc, cfg);
      LedgerEntry le;
      le.kind = LedgerEntry::Kind::WeaklyFlatStage;
      le.tree = tree;
      le.stage = stage + 1;
      le.center = b.center;
      le.radius = std::min(2.0 * rc, lat.max_ball_radius());
      le.zbar = cache.zbar(b.center, le.radius);
      out.ledger.push_back(le);
      if (keep_wf_regions) emit(wf);
      weakly_flat(b.center, rc, stage + 1, tree, keep_wf_regions);
    }
  }

  void ball(const Point& p, double r, int stage, int tree, bool keep_wf_regions) {
    const Lattice& lat = e.lattice;
    int max_stage = static_cast<int>(std::floor(10.0 * lam / cfg.gamma_k0())) + 1;
    if (stage > max_stage)
      throw Error(ErrorCode::LedgerExhausted, "ball recursion exceeded ledger depth");
    note_stage(stage);

    if (cache.mass_at_point(p, r) < cfg.eps0 / 2.0) {
      Region b;
      b.tag = Region::Tag::Bubble;
      b.center = p;
      b.radius = r;
      b.stage = stage;
      b.constructed_ok = bubble_impl(e, &cache, b, cfg, lam).ok;
      emit(std::move(b));
      return;
    }
    if (weakly_flat_impl(e, &cache, p, r, cfg)) {
      int sub_tree = ++next_tree;
      LedgerEntry root;
      root.kind = LedgerEntry::Kind::WeaklyFlatStage;
      root.tree = sub_tree;
      root.stage = stage;
      root.center = p;
      root.radius = std::min(2.0 * r, lat.max_ball_radius());
      root.zbar = cache.zbar(p, root.radius);
      out.ledger.push_back(root);
      weakly_flat(p, r, stage, sub_tree, keep_wf_regions);
      return;
    }
    double rc = snap_radius(lat, cfg.gamma_k0() * r);
    if (rc >= r * (1.0 - 1e-12))
      throw Error(ErrorCode::InsufficientResolution, "ball recursion cannot shrink further");
    std::vector<std::int64_t> idxs = cells_in_ball(lat, Ball{p, r});
    std::vector<Point> sites;
    sites.reserve(idxs.size());
    for (std::int64_t idx : idxs) sites.push_back(lat.site_point(idx));
    std::vector<Ball> cover = vitali_cover(lat, sites, [&](const Point&) { return rc; });
    for (const Ball& b : cover) {
      LedgerEntry le;
      le.kind = LedgerEntry::Kind::BallStage;
      le.tree = tree;
      le.stage = stage + 1;
      le.center = b.center;
      le.radius = std::min(2.0 * b.radius, lat.max_ball_radius());
      le.zbar = cache.zbar(b.center, le.radius);
      out.ledger.push_back(le);
      ball(b.center, b.radius, stage + 1, tree, keep_wf_regions);
    }
  }
};

}  // namespace

Decomposition decompose_weakly_flat(const ScalarField& e, const Point& p, double r,
                                    const DecompConfig& cfg) {
  if (2.0 * r > e.lattice.max_ball_radius() * (1.0 + 1e-12))
    throw Error(ErrorCode::BallTooLarge, "weakly-flat scale exceeds torus bound");
  if (!is_weakly_flat(e, p, r, cfg))
    throw Error(ErrorCode::PreconditionFailed, "ball is not weakly flat");
  Builder b(e, cfg);
  b.out.target_center = p;
  b.out.target_radius = r;
  LedgerEntry root;
  root.kind = LedgerEntry::Kind::WeaklyFlatStage;
  root.tree = 0;
  root.stage = 1;
  root.center = p;
  root.radius = std::min(2.0 * r, e.lattice.max_ball_radius());
  root.zbar = b.cache.zbar(p, root.radius);
  b.out.ledger.push_back(root);
  b.weakly_flat(p, r, 1, 0, /*keep_wf_regions=*/true);
  return std::move(b.out);
}

Decomposition decompose_ball(const ScalarField& e, const Point& p, double r,
                             const DecompConfig& cfg) {
  double lam = cfg.resolve_lambda(e);
  if (e.integral() > lam * (1.0 + 1e-12))
    throw Error(ErrorCode::PreconditionFailed, "total mass exceeds the budget");
  if (2.0 * r > e.lattice.max_ball_radius() * (1.0 + 1e-12))
    throw Error(ErrorCode::BallTooLarge, "decomposition scale exceeds torus bound");
  Builder b(e, cfg);
  b.out.target_center = p;
  b.out.target_radius = r;
  LedgerEntry root;
  root.kind = LedgerEntry::Kind::BallStage;
  root.tree = 0;
  root.stage = 1;
  root.center = p;
  root.radius = std::min(2.0 * r, e.lattice.max_ball_radius());
  root.zbar = b.cache.zbar(p, root.radius);
  b.out.ledger.push_back(root);
  b.ball(p, r, 1, 0, /*keep_wf_regions=*/false);
  return std::move(b.out);
}

namespace {

bool covers_cell(const Lattice& lat, const Region& reg, const Point& x) {
  double d = lat.distance(reg.center, x);
  switch (reg.tag) {
    case Region::Tag::Annular:
      return d >= reg.inner * (1.0 - 1e-12) && d <= reg.radius * (1.0 + 1e-12);
    case Region::Tag::Bubble: {
      if (d > reg.radius * (1.0 + 1e-12)) return false;
      for (const Ball& b : reg.excised)
        if (lat.distance(b.center, x) < b.radius * (1.0 - 1e-12)) return false;
      return true;
    }
    case Region::Tag::WeaklyFlat:
      return false;  // internal node; leaves carry the coverage
  }
  return false;
}

std::int64_t count_uncovered(const ScalarField& e, const Decomposition& d, double target_r) {
  const Lattice& lat = e.lattice;
  std::int64_t miss = 0;
  for (std::int64_t idx : cells_in_ball(lat, Ball{d.target_center, target_r})) {
    Point x = lat.site_point(idx);
    bool cov = false;
    for (const Region& reg : d.regions)
      if (covers_cell(lat, reg, x)) {
        cov = true;
        break;
      }
    if (!cov) ++miss;
  }
  return miss;
}

}  // namespace

Decomposition refine_cover(const ScalarField& e, const Decomposition& d) {
  if (count_uncovered(e, d, d.target_radius) != 0)
    throw Error(ErrorCode::PreconditionFailed, "input decomposition does not cover its target");
  Decomposition r = d;
  r.target_radius = 0.75 * d.target_radius;
  for (Region& reg : r.regions) {
    switch (reg.tag) {
      case Region::Tag::Annular:
        reg.inner *= 2.0;
        reg.radius *= 0.75;
        break;
      case Region::Tag::Bubble:
        reg.radius *= 0.75;
        for (Ball& b : reg.excised) b.radius *= 2.0;
        break;
      case Region::Tag::WeaklyFlat:
        break;
    }
  }
  if (count_uncovered(e, r, r.target_radius) != 0)
    throw Error(ErrorCode::RefinementBreaksCover, "refined regions no longer cover the target");
  return r;
}

CertifyReport certify(const ScalarField& e, const Decomposition& d) {
  const Lattice& lat = e.lattice;
  const DecompConfig& cfg = d.config;
  double lam = d.lambda > 0.0 ? d.lambda : cfg.resolve_lambda(e);
  CertifyReport rep;
  std::ostringstream detail;

  // (a) every region re-verified through the plain ball primitives
  rep.predicates = true;
  for (size_t i = 0; i < d.regions.size(); ++i) {
    const Region& reg = d.regions[i];
    bool ok = false;
    try {
      switch (reg.tag) {
        case Region::Tag::WeaklyFlat:
          ok = is_weakly_flat(e, reg.center, reg.radius, cfg);
          break;
        case Region::Tag::Annular:
          ok = is_annular(e, reg.center, reg.inner, reg.radius, cfg);
          break;
        case Region::Tag::Bubble:
          ok = is_bubble(e, reg, cfg).ok;
          break;
      }
    } catch (const Error& err) {
      ok = false;
      detail << "region " << i << ": " << err.what() << "; ";
    }
    if (!ok) {
      rep.predicates = false;
      rep.failed_regions++;
      detail << "region " << i << " failed its predicate; ";
    }
  }

  // (b) rasterized coverage of the target ball by annular/bubble leaves
  rep.uncovered_cells = count_uncovered(e, d, d.target_radius);
  rep.coverage = rep.uncovered_cells == 0;

  // (c) region count against the ledger recurrence
  double gk = cfg.gamma_k0();
  double n1 = std::pow(1.0 + 5.0 / gk, 4.0);
  double p_bound = 1.0 + cfg.n_bound(lam) + n1;
  for (int l = 1; l < std::max(1, d.max_stage); ++l)
    p_bound = 2.0 * p_bound * (1.0 + cfg.n_bound(lam) + n1);
  rep.count_bound = p_bound;
  rep.counts = static_cast<double>(d.regions.size()) <= p_bound;

  // (d) ledger: recorded values reproducible and per-tree stage maxima
  // strictly decreasing by the required drop
  rep.ledger = true;
  for (const LedgerEntry& le : d.ledger) {
    double z = zbar(e, le.center, le.radius);
    if (std::abs(z - le.zbar) > 1e-12 * std::max(1.0, std::abs(z))) {
      rep.ledger = false;
      detail << "ledger entry zbar mismatch; ";
      break;
    }
  }
  if (rep.ledger) {
    std::map<int, std::map<int, double>> stage_max;  // tree -> stage -> max zbar
    std::map<int, LedgerEntry::Kind> tree_kind;
    for (const LedgerEntry& le : d.ledger) {
      auto& sm = stage_max[le.tree][le.stage];
      sm = std::max(sm, le.zbar);
      tree_kind[le.tree] = le.kind;
    }
    for (const auto& [tree, stages] : stage_max) {
      double drop = tree_kind[tree] == LedgerEntry::Kind::WeaklyFlatStage ? gk : gk / 10.0;
      double prev = kInf;
      for (const auto& [stage, mx] : stages) {
        if (!std::isinf(prev) && !(mx <= prev - drop * (1.0 - 1e-9))) {
          rep.ledger = false;
          detail << "ledger drop violated in tree " << tree << " stage " << stage << "; ";
        }
        prev = mx;
      }
    }
  }

  rep.pass = rep.predicates && rep.coverage && rep.counts && rep.ledger;
  rep.detail = detail.str();
  return rep;
}

}  // namespace grl
