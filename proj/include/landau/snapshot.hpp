#pragma once

// ".lfs" snapshots: one JSON header line, then raw little-endian doubles.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "landau/errors.hpp"
#include "landau/grid.hpp"

namespace landau {

struct SnapshotHeader {
  int dim = 2;
  double L = 1.0;
  int N = 8;
  int Nx = 0;  // 0 with X = 0 marks a homogeneous field
  double X = 0.0;
  double gamma = -1.0;
  double t = 0.0;
  int planes = 1;
  std::string quantity = "f";

  std::size_t value_count() const {
    std::size_t n = static_cast<std::size_t>(planes) * static_cast<std::size_t>(Nx > 0 ? Nx : 1);
    for (int k = 0; k < dim; ++k) n *= static_cast<std::size_t>(N);
    return n;
  }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"dim", dim}, {"L", L}, {"N", N},         {"Nx", Nx},
                        {"X", X},     {"gamma", gamma}, {"t", t}, {"layout", "row-major-x-then-v"}};
    if (planes != 1 || quantity != "f") {
      j["planes"] = planes;
      j["quantity"] = quantity;
    }
    return j;
  }

  static SnapshotHeader from_json(const nlohmann::json& j) {
    SnapshotHeader h;
    h.dim = j.at("dim").get<int>();
    h.L = j.at("L").get<double>();
    h.N = j.at("N").get<int>();
    h.Nx = j.value("Nx", 0);
    h.X = j.value("X", 0.0);
    h.gamma = j.at("gamma").get<double>();
    h.t = j.at("t").get<double>();
    h.planes = j.value("planes", 1);
    h.quantity = j.value("quantity", std::string("f"));
    if (j.value("layout", std::string("row-major-x-then-v")) != "row-major-x-then-v")
      throw InputError("unsupported snapshot layout");
    return h;
  }
};

struct Snapshot {
  SnapshotHeader header;
  std::vector<double> values;
};

namespace detail {
inline std::uint64_t to_little(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((x >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return x;
}
}  // namespace detail

inline void write_lfs(const std::string& path, const SnapshotHeader& h, const std::vector<double>& values) {
  if (values.size() != h.value_count()) throw PreconditionError("snapshot value count does not match header");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << h.to_json().dump() << '\n';
  std::vector<std::uint64_t> raw(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) raw[i] = detail::to_little(std::bit_cast<std::uint64_t>(values[i]));
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
  if (!out) throw InputError("write failed for " + path);
}

inline Snapshot read_lfs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": missing header line");
  Snapshot s;
  try {
    s.header = SnapshotHeader::from_json(nlohmann::json::parse(line));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": bad header: " + e.what());
  }
  const std::size_t n = s.header.value_count();
  std::vector<std::uint64_t> raw(n);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 8));
  if (static_cast<std::size_t>(in.gcount()) != n * 8) throw InputError(path + ": truncated payload");
  s.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.values[i] = std::bit_cast<double>(detail::to_little(raw[i]));
  return s;
}

template <int D>
SnapshotHeader header_for(const DistributionField<D>& f, double gamma) {
  SnapshotHeader h;
  h.dim = D;
  h.L = f.grid.vgrid.half_width();
  h.N = f.grid.vgrid.points_per_axis();
  h.Nx = f.grid.x ? f.grid.x->points : 0;
  h.X = f.grid.x ? f.grid.x->period : 0.0;
  h.gamma = gamma;
  h.t = f.time;
  return h;
}

template <int D>
void write_field(const std::string& path, const DistributionField<D>& f, double gamma) {
  write_lfs(path, header_for(f, gamma), f.values);
}

template <int D>
DistributionField<D> field_from_snapshot(const Snapshot& s) {
  const auto& h = s.header;
  if (h.dim != D) throw PreconditionError("snapshot dimension mismatch");
  if (h.planes != 1) throw PreconditionError("snapshot holds " + std::to_string(h.planes) + " planes, not a field");
  std::optional<SpatialLattice> xl;
  if (h.Nx > 0) xl = SpatialLattice{h.X, h.Nx};
  DistributionField<D> f(PhaseGrid<D>(VelocityGrid<D>(h.L, h.N), xl), h.t);
  f.values = s.values;
  return f;
}

}  // namespace landau
