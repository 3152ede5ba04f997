#include "grl/grf1.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace grl {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "GRF1 writer assumes a little-endian host");

std::string header_line(const std::string& kind, const Lattice& lat) {
  json h;
  h["dims"] = lat.dims;
  h["format"] = "GRF1";
  h["geometry"] = lat.geometry == Geometry::Torus ? "torus" : "box";
  h["kind"] = kind;
  h["spacing"] = lat.spacing;
  return h.dump();
}

void write_payload(const std::string& path, const std::string& header,
                   const double* data, size_t count) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << header << '\n';
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path);
}

struct Header {
  std::string kind;
  Lattice lattice;
};

Header read_header(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::ParseError, "missing GRF1 header in " + path);
  json h;
  try {
    h = json::parse(line);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::ParseError, "malformed GRF1 header in " + path + ": " + ex.what());
  }
  if (!h.contains("format") || h["format"] != "GRF1")
    throw Error(ErrorCode::ParseError, "not a GRF1 file: " + path);
  for (const char* key : {"kind", "dims", "spacing", "geometry"})
    if (!h.contains(key))
      throw Error(ErrorCode::ParseError, std::string("GRF1 header missing ") + key);
  Header out;
  out.kind = h["kind"].get<std::string>();
  auto dims = h["dims"].get<std::vector<int>>();
  if (dims.size() != kDim)
    throw Error(ErrorCode::ParseError, "GRF1 dims must have 4 axes");
  Coord d{dims[0], dims[1], dims[2], dims[3]};
  std::string geo = h["geometry"].get<std::string>();
  if (geo != "torus" && geo != "box")
    throw Error(ErrorCode::ParseError, "GRF1 geometry must be torus or box");
  out.lattice = Lattice(d, h["spacing"].get<double>(),
                        geo == "torus" ? Geometry::Torus : Geometry::Box);
  return out;
}

std::vector<double> read_payload(std::istream& in, size_t count, const std::string& path) {
  std::vector<double> data(count);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<size_t>(in.gcount()) != count * sizeof(double))
    throw Error(ErrorCode::ParseError, "GRF1 payload truncated in " + path);
  char extra;
  if (in.read(&extra, 1))
    throw Error(ErrorCode::ParseError, "GRF1 payload has trailing bytes in " + path);
  return data;
}

}  // namespace

void write_scalar(const std::string& path, const ScalarField& f) {
  write_payload(path, header_line("scalar", f.lattice), f.values.data(), f.values.size());
}

void write_links(const std::string& path, const GaugeField& U) {
  std::vector<double> data;
  data.reserve(U.links.size() * 4);
  for (const Su2& u : U.links) {
    data.push_back(u.w);
    data.push_back(u.x);
    data.push_back(u.y);
    data.push_back(u.z);
  }
  write_payload(path, header_line("links", U.lattice), data.data(), data.size());
}

void write_frame(const std::string& path, const FrameField& g) {
  std::vector<double> data;
  data.reserve(g.values.size() * 4);
  for (const Su2& u : g.values) {
    data.push_back(u.w);
    data.push_back(u.x);
    data.push_back(u.y);
    data.push_back(u.z);
  }
  write_payload(path, header_line("frame", g.lattice), data.data(), data.size());
}

std::string peek_kind(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_header(in, path).kind;
}

ScalarField read_scalar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  Header h = read_header(in, path);
  if (h.kind != "scalar")
    throw Error(ErrorCode::ParseError, "expected kind scalar in " + path);
  ScalarField f(h.lattice);
  f.values = read_payload(in, static_cast<size_t>(h.lattice.volume()), path);
  return f;
}

GaugeField read_links(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  Header h = read_header(in, path);
  if (h.kind != "links")
    throw Error(ErrorCode::ParseError, "expected kind links in " + path);
  GaugeField U(h.lattice);
  auto data = read_payload(in, static_cast<size_t>(h.lattice.volume()) * kDim * 4, path);
  for (size_t i = 0; i < U.links.size(); ++i)
    U.links[i] = Su2{data[4 * i], data[4 * i + 1], data[4 * i + 2], data[4 * i + 3]};
  return U;
}

FrameField read_frame(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  Header h = read_header(in, path);
  if (h.kind != "frame")
    throw Error(ErrorCode::ParseError, "expected kind frame in " + path);
  FrameField g(h.lattice);
  auto data = read_payload(in, static_cast<size_t>(h.lattice.volume()) * 4, path);
  for (size_t i = 0; i < g.values.size(); ++i)
    g.values[i] = Su2{data[4 * i], data[4 * i + 1], data[4 * i + 2], data[4 * i + 3]};
  return g;
}

}  // namespace grl
