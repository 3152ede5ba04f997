#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "grl/lattice.hpp"

namespace grl {

struct DecompConfig {
  double gamma = 0.5;  // in (0, 1/2]
  int k0 = 3;          // >= 1
  double eps0 = 0.1;
  double lambda = -1.0;  // total curvature budget; < 0 resolves to integral(e)

  // Scale ladder (2 gamma^k0)^(10+j); test mode runs gamma^(1+j) and floors
  // every scale at the h/2 grid instead of failing the 4h resolution guard.
  bool test_mode = false;
  double n_override = -1.0;  // heavy-ball count bound
  double c_override = -1.0;  // minimal excised-radius fraction

  double gamma_k0() const;
  double min_scale(const Lattice& lat) const;  // 4h, or h/2 in test mode
  double n_bound(double lam) const;            // ceil(10 lam / eps0) unless overridden
  double c_value(double lam) const;  // (2 gamma^k0)^(10+ceil(lam gamma^{-k0-1})) unless overridden
  double ladder_base() const;        // 2 gamma^k0, or gamma in test mode
  int ladder_offset() const;         // 10, or 1 in test mode
  double resolve_lambda(const ScalarField& e) const;
};

struct Region {
  enum class Tag { WeaklyFlat, Annular, Bubble };
  Tag tag = Tag::Bubble;
  Point center{};
  double radius = 0.0;  // WeaklyFlat: scale r (region = B_2r); others: outer radius
  double inner = 0.0;   // Annular only
  std::vector<Ball> excised;  // Bubble only
  int stage = 1;
  bool constructed_ok = true;  // constructor's own predicate check
};

struct LedgerEntry {
  enum class Kind { BallStage, WeaklyFlatStage };
  Kind kind = Kind::BallStage;
  int tree = 0;  // entries with equal tree share one monotone trace
  int stage = 1;
  Point center{};
  double radius = 0.0;  // radius at which zbar is recorded
  double zbar = 0.0;
};

struct Decomposition {
  Point target_center{};
  double target_radius = 0.0;
  std::vector<Region> regions;
  std::vector<LedgerEntry> ledger;
  DecompConfig config;
  double lambda = 0.0;  // resolved budget
  int max_stage = 0;
  int count_annular = 0, count_bubble = 0, count_weakly_flat = 0;
};

// zeta_x(r) = mass of e over B_r(x); zbar_x(r) = sup over z in B_r(x) of
// the mass over B_r(z). Thin wrappers over the ball primitives.
double zeta(const ScalarField& e, const Point& x, double r);
double zbar(const ScalarField& e, const Point& x, double r);

// |zbar_p(2r) - zbar_p(gamma^k0 r)| < gamma^k0.
bool is_weakly_flat(const ScalarField& e, const Point& p, double r, const DecompConfig& cfg);

// s <= 5 gamma^k0 r, |zbar_p(2r) - zbar_p(s)| < gamma^k0, and
// |zbar_x(2r) - zbar_x(gamma^{-1} s)| >= gamma^k0 for all cells x of
// B_{gamma^k0 r}(p).
bool is_annular(const ScalarField& e, const Point& p, double s, double r,
                const DecompConfig& cfg);

struct BubbleCheck {
  bool ok = false;
  bool cond[4] = {false, false, false, false};
};
BubbleCheck is_bubble(const ScalarField& e, const Region& reg, const DecompConfig& cfg);

// Largest K in [1, K_max] with |zbar_x(top_r) - zbar_x(gamma^K top_r)| <
// gamma^k0; K_max caps at the resolution guard.
int k_index(const ScalarField& e, const Point& x, const DecompConfig& cfg, double top_radius,
            bool* capped = nullptr);

Decomposition decompose_weakly_flat(const ScalarField& e, const Point& p, double r,
                                    const DecompConfig& cfg);

Decomposition decompose_ball(const ScalarField& e, const Point& p, double r,
                             const DecompConfig& cfg);

// Annular inner radii doubled, outer radii shrunk to 3/4; bubble excised
// balls doubled. The refined cover must still cover B_{3r/4}(p).
Decomposition refine_cover(const ScalarField& e, const Decomposition& d);

struct CertifyReport {
  bool predicates = false;
  bool coverage = false;
  bool counts = false;
  bool ledger = false;
  bool pass = false;
  std::int64_t uncovered_cells = 0;
  std::int64_t failed_regions = 0;
  double count_bound = 0.0;
  std::string detail;
};

// Independent re-verification through the plain ball primitives: region
// predicates, rasterized coverage, count bound, ledger monotonicity.
CertifyReport certify(const ScalarField& e, const Decomposition& d);

}  // namespace grl
