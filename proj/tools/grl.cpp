// gauge-radius-lab command line: generation, gauge fixing, norms, scale
// radii, frame degrees, curvature decomposition, and the audit sweep.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "grl/corpus.hpp"
#include "grl/coulomb.hpp"
#include "grl/decomp.hpp"
#include "grl/grf1.hpp"
#include "grl/parallel.hpp"
#include "grl/radius.hpp"
#include "grl/regularity.hpp"
#include "grl/rng.hpp"

using json = nlohmann::ordered_json;
using namespace grl;

namespace {

constexpr const char* kReportVersion = "grl-report-1";

struct CommonOpts {
  std::vector<int> grid{8};
  double spacing = 1.0;
  std::string geometry = "torus";
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string report;
  std::string format = "json";
};

Lattice make_lattice(const CommonOpts& o) {
  Coord d{};
  if (o.grid.size() == 1)
    d = {o.grid[0], o.grid[0], o.grid[0], o.grid[0]};
  else if (o.grid.size() == kDim)
    d = {o.grid[0], o.grid[1], o.grid[2], o.grid[3]};
  else
    throw Error(ErrorCode::PreconditionFailed, "--grid takes 1 or 4 values");
  return Lattice(d, o.spacing, o.geometry == "box" ? Geometry::Box : Geometry::Torus);
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_lattice = true) {
  if (with_lattice) {
    cmd->add_option("--grid", o.grid, "grid sites per axis (1 or 4 values)");
    cmd->add_option("--spacing", o.spacing, "lattice spacing h");
    cmd->add_option("--geometry", o.geometry, "torus|box")
        ->check(CLI::IsMember({"torus", "box"}));
  }
  cmd->add_option("--seed", o.seed, "64-bit seed");
  cmd->add_option("--threads", o.threads, "worker threads (default: cores)");
  cmd->add_option("--report", o.report, "report output path");
  cmd->add_option("--format", o.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
}

void emit_report(const CommonOpts& o, const json& body) {
  std::string text = body.dump(2) + "\n";
  if (o.report.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.report, std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write report " + o.report);
    f << text;
  }
}

json lattice_json(const Lattice& lat) {
  return json{{"dims", lat.dims},
              {"spacing", lat.spacing},
              {"geometry", lat.geometry == Geometry::Torus ? "torus" : "box"}};
}

int cmd_gen(const CommonOpts& o, const std::string& fixture) {
  Lattice lat = make_lattice(o);
  if (o.out.empty()) throw Error(ErrorCode::PreconditionFailed, "gen requires --out");
  if (is_scalar_fixture(fixture)) {
    write_scalar(o.out, make_scalar_fixture(fixture, lat, o.seed));
  } else if (is_frame_fixture(fixture)) {
    write_frame(o.out, make_frame_fixture(fixture, lat, o.seed));
  } else {
    write_links(o.out, make_gauge_fixture(fixture, lat, o.seed));
  }
  return 0;
}

int cmd_fix(const CommonOpts& o, const std::string& in, const FixConfig& fc,
            const std::string& frame_out) {
  GaugeField U = read_links(in);
  auto [g, rep] = coulomb_fix(U, fc);
  if (!frame_out.empty()) write_frame(frame_out, g);
  json r;
  r["version"] = kReportVersion;
  r["lattice"] = lattice_json(U.lattice);
  r["config"] = {{"omega", fc.omega},
                 {"tol", fc.tol},
                 {"max_sweeps", fc.max_sweeps},
                 {"seed", fc.seed},
                 {"threads", thread_count()}};
  r["converged"] = rep.converged;
  r["sweeps"] = rep.sweeps;
  r["theta"] = rep.theta;
  r["worst_increase"] = rep.worst_increase;
  r["functional_trace"] = rep.functional_trace;
  emit_report(o, r);
  return rep.converged ? 0 : 1;
}

ScalarField load_density(const std::string& path) {
  std::string kind = peek_kind(path);
  if (kind == "scalar") return read_scalar(path);
  if (kind == "links") return curvature_density(read_links(path));
  throw Error(ErrorCode::ParseError, "norms/decompose expect a scalar or links file");
}

int cmd_norms(const CommonOpts& o, const std::string& in, double eps) {
  ScalarField u = load_density(in);
  NormReport n = norm_report(u, eps);
  if (o.format == "csv") {
    std::string text = "field_id,l4,lorentz,curly,ratio_eps,lipschitz_defect\n";
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", in.c_str(), n.l4,
                  n.lorentz_weak, n.curly, n.interpolation_ratio, n.lipschitz_defect);
    text += buf;
    if (o.report.empty())
      std::cout << text;
    else {
      std::ofstream f(o.report, std::ios::trunc);
      f << text;
    }
    return 0;
  }
  json r;
  r["version"] = kReportVersion;
  r["field"] = in;
  r["lattice"] = lattice_json(u.lattice);
  r["config"] = {{"eps", eps}, {"threads", thread_count()}};
  r["l4"] = n.l4;
  r["lorentz_weak"] = n.lorentz_weak;
  r["curly"] = n.curly;
  r["interpolation_ratio"] = n.interpolation_ratio;
  r["curly_over_l4"] = n.curly_over_l4;
  r["lipschitz_defect"] = n.lipschitz_defect;
  emit_report(o, r);
  return 0;
}

int cmd_radii(const CommonOpts& o, const std::string& links_path,
              const std::string& frame_path, const ScaleConfig& sc) {
  GaugeField U = read_links(links_path);
  GaugeField V = frame_path.empty() ? U : gauge_transform(U, read_frame(frame_path));
  ScalarField e = curvature_density(V);
  ConnectionField A = connection_form(V, ExtractionConvention::LogMap);
  RadiusField rf = curvature_radius_field(e, sc.eps0);
  RadiusField rt = regularity_radius_field(A, e, sc);
  RadiusField ra = a0_radius_field(A, e, sc.eps0);
  auto sing = singular_set(A, e, sc);
  if (!o.out.empty()) {
    ScalarField s(rf.lattice);
    s.values = ra.values;
    write_scalar(o.out, s);
  }
  json r;
  r["version"] = kReportVersion;
  r["lattice"] = lattice_json(U.lattice);
  r["config"] = {{"eps0", sc.eps0},
                 {"eta", sc.eta},
                 {"theta1", sc.theta1},
                 {"s_min", sc.resolved_s_min(U.lattice)},
                 {"threads", thread_count()}};
  auto field_stats = [](const RadiusField& f) {
    double mn = kInf;
    int inf_count = 0;
    for (double v : f.values) {
      if (std::isinf(v))
        inf_count++;
      else
        mn = std::min(mn, v);
    }
    return json{{"min", std::isinf(mn) ? -1.0 : mn}, {"inf_cells", inf_count}};
  };
  r["curvature_radius"] = field_stats(rf);
  r["regularity_radius"] = field_stats(rt);
  r["a0_radius"] = field_stats(ra);
  r["singular_sites"] = sing;
  emit_report(o, r);
  return 0;
}

int cmd_degree(const CommonOpts& o, const std::string& frame_path, std::vector<int> center,
               int k) {
  FrameField g = read_frame(frame_path);
  Coord c{};
  if (center.empty())
    for (int i = 0; i < kDim; ++i) c[i] = g.lattice.dims[i] / 2;
  else if (center.size() == kDim)
    c = {center[0], center[1], center[2], center[3]};
  else
    throw Error(ErrorCode::PreconditionFailed, "--center takes 4 values");
  SphereShell shell = cube_shell(g.lattice, c, k);
  int deg = sphere_degree(g, shell, o.seed);
  json r;
  r["version"] = kReportVersion;
  r["center"] = c;
  r["radius"] = k;
  r["degree"] = deg;
  r["target_count"] = 1;
  emit_report(o, r);
  return 0;
}

json region_json(const Region& reg) {
  json j;
  j["tag"] = reg.tag == Region::Tag::Annular
                 ? "annular"
                 : (reg.tag == Region::Tag::Bubble ? "bubble" : "weakly_flat");
  j["center"] = reg.center;
  j["radius"] = reg.radius;
  if (reg.tag == Region::Tag::Annular) j["inner"] = reg.inner;
  if (reg.tag == Region::Tag::Bubble) {
    json ex = json::array();
    for (const Ball& b : reg.excised) ex.push_back({{"center", b.center}, {"radius", b.radius}});
    j["excised"] = ex;
  }
  j["stage"] = reg.stage;
  j["constructed_ok"] = reg.constructed_ok;
  return j;
}

int cmd_decompose(const CommonOpts& o, const std::string& in, DecompConfig cfg, double radius,
                  bool refine, const std::string& csv_path) {
  ScalarField e = load_density(in);
  const Lattice& lat = e.lattice;
  Point p{};
  for (int i = 0; i < kDim; ++i) p[i] = (lat.dims[i] / 2) * lat.spacing;
  double r = radius > 0 ? radius : lat.min_side() / 4.0;
  Decomposition d = decompose_ball(e, p, r, cfg);
  CertifyReport cert = certify(e, d);
  json r_json;
  r_json["version"] = kReportVersion;
  r_json["lattice"] = lattice_json(lat);
  r_json["config"] = {{"gamma", cfg.gamma},
                      {"k0", cfg.k0},
                      {"eps0", cfg.eps0},
                      {"lambda", d.lambda},
                      {"test_mode", cfg.test_mode},
                      {"n_bound", d.config.n_bound(d.lambda)},
                      {"c_value", d.config.c_value(d.lambda)},
                      {"threads", thread_count()}};
  r_json["target"] = {{"center", p}, {"radius", r}};
  json regions = json::array();
  for (const Region& reg : d.regions) regions.push_back(region_json(reg));
  r_json["regions"] = regions;
  json ledger = json::array();
  for (const LedgerEntry& le : d.ledger)
    ledger.push_back({{"kind", le.kind == LedgerEntry::Kind::BallStage ? "ball" : "weakly_flat"},
                      {"tree", le.tree},
                      {"stage", le.stage},
                      {"zbar", le.zbar}});
  r_json["ledger"] = ledger;
  r_json["certify"] = {{"predicates", cert.predicates},
                       {"coverage", cert.coverage},
                       {"counts", cert.counts},
                       {"ledger", cert.ledger},
                       {"pass", cert.pass},
                       {"detail", cert.detail}};
  if (refine) {
    Decomposition ref = refine_cover(e, d);
    CertifyReport cert2 = certify(e, ref);
    r_json["refined"] = {{"target_radius", ref.target_radius},
                         {"certify_pass", cert2.pass},
                         {"coverage", cert2.coverage}};
  }
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::trunc);
    csv << "tag,stage,radius,zbar\n";
    for (const Region& reg : d.regions) {
      double z = zbar(e, reg.center, std::min(reg.radius, lat.max_ball_radius()));
      csv << (reg.tag == Region::Tag::Annular
                  ? "annular"
                  : (reg.tag == Region::Tag::Bubble ? "bubble" : "weakly_flat"))
          << ',' << reg.stage << ',' << reg.radius << ',' << z << "\n";
    }
  }
  emit_report(o, r_json);
  return cert.pass ? 0 : 1;
}

int cmd_audit(const CommonOpts& o, int grid, int seeds);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gauge-radius-lab: lattice Coulomb gauges, integrability radii, "
               "and curvature-scale decompositions"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string fixture = "flat", in_path, frame_path, frame_out;
  FixConfig fc;
  ScaleConfig sc;
  DecompConfig dc;
  dc.test_mode = true;
  double norms_eps = 0.5;
  double decomp_radius = -1.0;
  bool do_refine = false;
  std::string csv_path;
  std::vector<int> center;
  int shell_k = 2;
  int audit_grid = 8, audit_seeds = 3;

  auto* gen = app.add_subcommand("gen", "generate a fixture file");
  gen->add_option("--fixture", fixture, "fixture name")->check(CLI::IsMember(fixture_names()));
  gen->add_option("--out", o.out, "output GRF1 path")->required();
  add_common(gen, o);

  auto* fix = app.add_subcommand("fix", "relax to a Coulomb frame");
  fix->add_option("--in", in_path, "links GRF1 input")->required();
  fix->add_option("--omega", fc.omega, "overrelaxation parameter");
  fix->add_option("--tol", fc.tol, "residual tolerance");
  fix->add_option("--max-sweeps", fc.max_sweeps, "sweep budget");
  fix->add_option("--out", frame_out, "frame GRF1 output");
  add_common(fix, o, false);

  auto* norms = app.add_subcommand("norms", "radius quasi-norm report");
  norms->add_option("--in", in_path, "scalar or links GRF1 input")->required();
  norms->add_option("--eps", norms_eps, "interpolation exponent defect");
  add_common(norms, o, false);

  auto* radii = app.add_subcommand("radii", "curvature / regularity radius fields");
  radii->add_option("--in", in_path, "links GRF1 input")->required();
  radii->add_option("--frame", frame_path, "optional frame GRF1");
  radii->add_option("--eps0", sc.eps0, "curvature smallness");
  radii->add_option("--eta", sc.eta, "energy smallness");
  radii->add_option("--theta1", sc.theta1, "scaled-energy factor");
  radii->add_option("--out", o.out, "a0 radius field output (scalar GRF1)");
  add_common(radii, o, false);

  auto* degree = app.add_subcommand("degree", "frame degree on a cube shell");
  degree->add_option("--frame", frame_path, "frame GRF1 input")->required();
  degree->add_option("--center", center, "shell center site (4 values)");
  degree->add_option("--radius", shell_k, "shell half-width in lattice steps");
  add_common(degree, o, false);

  auto* dec = app.add_subcommand("decompose", "annular-bubble decomposition");
  dec->add_option("--in", in_path, "scalar or links GRF1 input")->required();
  dec->add_option("--gamma", dc.gamma, "scale ratio");
  dec->add_option("--k0", dc.k0, "scale exponent");
  dec->add_option("--eps0", dc.eps0, "curvature smallness");
  dec->add_option("--lambda", dc.lambda, "curvature budget (default: field total)");
  dec->add_option("--radius", decomp_radius, "target ball radius (default: L/4)");
  dec->add_flag("--strict", [&dc](std::int64_t) { dc.test_mode = false; },
                "enforce the 4h resolution guard");
  dec->add_flag("--refine", do_refine, "also emit the shrunk cover");
  dec->add_option("--csv", csv_path, "per-region zbar CSV");
  add_common(dec, o, false);

  auto* audit = app.add_subcommand("audit", "corpus-wide invariant audit");
  audit->add_option("--grid", audit_grid, "grid per axis");
  audit->add_option("--seeds", audit_seeds, "number of random seeds");
  add_common(audit, o, false);

  CLI11_PARSE(app, argc, argv);
  if (o.threads > 0) set_thread_count(o.threads);

  try {
    if (gen->parsed()) return cmd_gen(o, fixture);
    if (fix->parsed()) {
      if (fix->count("--seed")) fc.seed = o.seed;
      return cmd_fix(o, in_path, fc, frame_out);
    }
    if (norms->parsed()) return cmd_norms(o, in_path, norms_eps);
    if (radii->parsed()) return cmd_radii(o, in_path, frame_path, sc);
    if (degree->parsed()) return cmd_degree(o, frame_path, center, shell_k);
    if (dec->parsed()) return cmd_decompose(o, in_path, dc, decomp_radius, do_refine, csv_path);
    if (audit->parsed()) return cmd_audit(o, audit_grid, audit_seeds);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return (err.code() == ErrorCode::IoError || err.code() == ErrorCode::ParseError) ? 2 : 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}

namespace {

int cmd_audit(const CommonOpts& o, int grid, int seeds) {
  Lattice lat({grid, grid, grid, grid}, 1.0, Geometry::Torus);
  json rows = json::array();
  bool all_pass = true;
  auto row = [&](const std::string& fixture_name, const std::string& audit_name, bool pass,
                 double measured) {
    rows.push_back({{"fixture", fixture_name},
                    {"audit", audit_name},
                    {"pass", pass},
                    {"measured", measured}});
    all_pass = all_pass && pass;
  };

  std::vector<std::pair<std::string, GaugeField>> corpus;
  corpus.emplace_back("flat", make_gauge_fixture("flat", lat, 1));
  corpus.emplace_back("pure_gauge", make_gauge_fixture("pure_gauge", lat, 2));
  corpus.emplace_back("abelian_wave", make_gauge_fixture("abelian_wave", lat, 1));
  for (int s = 0; s < seeds; ++s)
    corpus.emplace_back("random_" + std::to_string(s),
                        make_gauge_fixture("random", lat, 100 + static_cast<std::uint64_t>(s)));

  for (auto& [name, U] : corpus) {
    FixConfig fc;
    fc.tol = 1e-15;
    auto [g, rep] = coulomb_fix(U, fc);
    row(name, "coulomb_converged", rep.converged, rep.theta);
    row(name, "functional_monotone", rep.worst_increase <= 1e-12, rep.worst_increase);

    GaugeField V = gauge_transform(U, g);
    Rng rng(7);
    double worst_fv = 0.0, worst_sv = 0.0;
    for (int t = 0; t < 10; ++t) {
      std::vector<Vec3> xi(static_cast<size_t>(lat.volume()));
      double n2 = 0;
      for (auto& v : xi) {
        v = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
        n2 += dot(v, v);
      }
      double scale = 1.0 / std::sqrt(n2 * lat.cell_measure());
      for (auto& v : xi) v = scale * v;
      worst_fv = std::max(worst_fv, std::abs(first_variation(U, g, xi).fd_derivative));
      worst_sv = std::min(worst_sv, second_variation(U, g, xi));
    }
    row(name, "first_variation_zero", worst_fv <= 1e-6, worst_fv);
    row(name, "second_variation_nonneg", worst_sv >= -1e-8, worst_sv);

    ScalarField e = curvature_density(U);
    ConnectionField A = connection_form(V, ExtractionConvention::LogMap);
    ScalarField mag = A.magnitude();
    NormReport nr = norm_report(mag, 0.5);
    if (nr.curly > 0) row(name, "curly_over_l4", nr.curly_over_l4 <= 6.5, nr.curly_over_l4);
    row(name, "lipschitz_defect", nr.lipschitz_defect <= 2.0 * lat.spacing + 1e-12,
        nr.lipschitz_defect);

    Point p{};
    for (int i = 0; i < kDim; ++i) p[i] = (lat.dims[i] / 2) * lat.spacing;
    std::vector<double> radii;
    for (int k = 4; k <= grid; k += 2) radii.push_back(k * lat.spacing / 2.0);
    EnergyProfile prof = scaled_energy_profile(U, g, p, radii);
    double slack = 10.0 * lat.spacing / radii.front();
    row(name, "monotonicity_audit", prof.worst_violation <= slack, prof.worst_violation);

    ScaleConfig scfg;
    RadiusLowerBound rb =
        radius_lower_bound_audit(A, e, scfg, p, lat.min_side() / 8.0);
    if (rb.applicable) row(name, "radius_lower_bound", rb.ratio > 0.0, rb.ratio);
  }

  json r;
  r["version"] = kReportVersion;
  r["lattice"] = lattice_json(lat);
  r["config"] = {{"grid", grid}, {"seeds", seeds}, {"threads", thread_count()}};
  r["rows"] = rows;
  r["all_pass"] = all_pass;
  emit_report(o, r);
  return all_pass ? 0 : 1;
}

}  // namespace
