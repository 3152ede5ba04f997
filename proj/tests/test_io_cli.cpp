#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "grl/corpus.hpp"
#include "grl/grf1.hpp"
#include "grl/rng.hpp"

using namespace grl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("grl_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("GRF1 scalar round-trip is the identity") {
  TempDir tmp;
  Lattice lat({4, 6, 4, 8}, 0.25, Geometry::Torus);
  ScalarField f(lat);
  Rng rng(3);
  for (auto& v : f.values) v = rng.gaussian();
  std::string p = tmp.file("f.grf1");
  write_scalar(p, f);
  ScalarField g = read_scalar(p);
  CHECK(g.lattice.same_shape(lat));
  for (size_t i = 0; i < f.values.size(); ++i) CHECK(f.values[i] == g.values[i]);
  CHECK(peek_kind(p) == "scalar");
}

TEST_CASE("GRF1 links and frame round-trips preserve every component") {
  TempDir tmp;
  Lattice lat({4, 4, 4, 4}, 1.0, Geometry::Torus);
  GaugeField U = random_links(lat, 11, 0.6);
  std::string p = tmp.file("u.grf1");
  write_links(p, U);
  GaugeField V = read_links(p);
  for (size_t i = 0; i < U.links.size(); ++i) {
    CHECK(U.links[i].w == V.links[i].w);
    CHECK(U.links[i].x == V.links[i].x);
    CHECK(U.links[i].y == V.links[i].y);
    CHECK(U.links[i].z == V.links[i].z);
  }
  FrameField g = random_frame(lat, 13);
  std::string pf = tmp.file("g.grf1");
  write_frame(pf, g);
  FrameField h = read_frame(pf);
  for (size_t i = 0; i < g.values.size(); ++i) CHECK(g.values[i].w == h.values[i].w);
}

TEST_CASE("GRF1 write is byte-deterministic") {
  TempDir tmp;
  Lattice lat({4, 4, 4, 4}, 0.5, Geometry::Torus);
  GaugeField U = make_gauge_fixture("random", lat, 7);
  std::string a = tmp.file("a.grf1"), b = tmp.file("b.grf1");
  write_links(a, U);
  write_links(b, make_gauge_fixture("random", lat, 7));
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("GRF1 rejects malformed inputs with parse errors") {
  TempDir tmp;
  SUBCASE("missing header") {
    std::string p = tmp.file("empty.grf1");
    std::ofstream(p).close();
    CHECK_THROWS_AS(read_scalar(p), Error);
  }
  SUBCASE("bad json") {
    std::string p = tmp.file("bad.grf1");
    std::ofstream(p) << "not json\n";
    CHECK_THROWS_AS(read_scalar(p), Error);
  }
  SUBCASE("kind mismatch") {
    std::string p = tmp.file("kind.grf1");
    Lattice lat({4, 4, 4, 4}, 1.0, Geometry::Torus);
    write_scalar(p, ScalarField(lat, 1.0));
    CHECK_THROWS_AS(read_links(p), Error);
  }
  SUBCASE("truncated payload") {
    std::string p = tmp.file("trunc.grf1");
    Lattice lat({4, 4, 4, 4}, 1.0, Geometry::Torus);
    write_scalar(p, ScalarField(lat, 1.0));
    auto bytes = slurp(p);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 16));
    out.close();
    CHECK_THROWS_AS(read_scalar(p), Error);
  }
}

TEST_CASE("fixtures regenerate bit-identically and cover the advertised names") {
  Lattice lat({8, 8, 8, 8}, 1.0, Geometry::Torus);
  for (const std::string& name : fixture_names()) {
    if (is_scalar_fixture(name)) {
      ScalarField a = make_scalar_fixture(name, lat, 5);
      ScalarField b = make_scalar_fixture(name, lat, 5);
      CHECK(a.values == b.values);
    } else if (is_frame_fixture(name)) {
      FrameField a = make_frame_fixture(name, lat, 5);
      FrameField b = make_frame_fixture(name, lat, 5);
      for (size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i].w == b.values[i].w);
    } else {
      GaugeField a = make_gauge_fixture(name, lat, 5);
      GaugeField b = make_gauge_fixture(name, lat, 5);
      for (size_t i = 0; i < a.links.size(); ++i) CHECK(a.links[i].w == b.links[i].w);
    }
  }
}

TEST_CASE("corrupted frame norms are detectable") {
  // file payloads are raw doubles; a scaled frame row breaks unit norm
  TempDir tmp;
  Lattice lat({4, 4, 4, 4}, 1.0, Geometry::Torus);
  FrameField g = random_frame(lat, 17);
  g[3] = Su2{2.0, 0.0, 0.0, 0.0};  // invalid
  std::string p = tmp.file("bad_frame.grf1");
  write_frame(p, g);
  FrameField h = read_frame(p);
  bool all_unit = true;
  for (const Su2& q : h.values)
    if (std::abs(q.norm2() - 1.0) > 1e-9) all_unit = false;
  CHECK(!all_unit);
}
