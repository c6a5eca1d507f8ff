// landau_cli: coefficients, solves, certificates and reports over .lfs files.
//
// Exit status: 0 ok, 1 internal failure, 2 precondition failure, 3 a verify
// verdict came out false, 64 usage error, 66 unreadable input.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "landau/landau.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace landau;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct VerdictFailed {};

std::string num(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << x;
  return os.str();
}

json default_config() {
  return {
      {"d", 2},
      {"gamma", -1.0},
      {"L", 8.0},
      {"N", 64},
      {"Nx", 0},
      {"X", 1.0},
      {"bounds", {{"m0", 0.1}, {"M0", 10.0}, {"E0", 20.0}, {"H0", 10.0}}},
      {"initial",
       {{"kind", "bimodal"},
        {"mass", 1.0},
        {"temperature", 1.0},
        {"offset", 2.0},
        {"amplitude", 0.1},
        {"c0", 1.0},
        {"p", 5.0},
        {"alpha", 0.05}}},
      {"solver",
       {{"form", "flux"},
        {"t_end", 1.0},
        {"dt", nullptr},
        {"cfl_safety", 0.8},
        {"snapshot_stride", 10},
        {"freeze_coefficients", false}}},
      {"alpha", 0.05},
      {"C0", 1.0},
  };
}

json config_schema() {
  return {
      {"d", "velocity (and space) dimension, 2 or 3"},
      {"gamma", "potential exponent in (-2, 0]"},
      {"L", "velocity box half-width"},
      {"N", "velocity points per axis (even, >= 8)"},
      {"Nx", "spatial points along x_1; 0 selects the homogeneous problem"},
      {"X", "spatial period"},
      {"bounds", {{"m0", "mass floor"}, {"M0", "mass ceiling"}, {"E0", "energy ceiling"}, {"H0", "entropy ceiling"}}},
      {"initial",
       {{"kind", "maxwellian | bimodal | polynomial_tail | gaussian_envelope | modulated"},
        {"mass", "total mass (maxwellian, bimodal)"},
        {"temperature", "temperature (maxwellian, bimodal, modulated)"},
        {"offset", "bimodal half separation"},
        {"amplitude", "density modulation amplitude"},
        {"c0", "prefactor for polynomial_tail and gaussian_envelope"},
        {"p", "polynomial_tail exponent"},
        {"alpha", "gaussian_envelope rate"}}},
      {"solver",
       {{"form", "flux | nondivergence"},
        {"t_end", "final time"},
        {"dt", "fixed step, or null for automatic"},
        {"cfl_safety", "fraction of the stability limit used by the automatic step"},
        {"snapshot_stride", "steps between stored snapshots"},
        {"freeze_coefficients", "keep the initial coefficients for the whole run"}}},
      {"alpha", "Gaussian rate used by verify-bounds and holder"},
      {"C0", "Gaussian prefactor"},
  };
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

struct Common {
  std::string config_path;
  std::string out;
  bool force = false;
  std::uint64_t seed = 0;
  json overrides = json::object();
};

json resolve_config(const Common& c) {
  json cfg = default_config();
  if (!c.config_path.empty()) cfg.merge_patch(load_json(c.config_path));
  cfg.merge_patch(c.overrides);
  return cfg;
}

PotentialParams params_from(const json& cfg, int d) {
  auto p = PotentialParams::defaults(d, cfg.at("gamma").get<double>());
  if (cfg.contains("potential")) {
    const auto& q = cfg["potential"];
    p.a_const = q.value("a", p.a_const);
    p.b_const = q.value("b", p.b_const);
    p.c_const = q.value("c", p.c_const);
  }
  return p;
}

HydroBounds bounds_from(const json& cfg) {
  const auto& b = cfg.at("bounds");
  return {b.at("m0").get<double>(), b.at("M0").get<double>(), b.at("E0").get<double>(), b.at("H0").get<double>()};
}

template <int D>
PhaseGrid<D> grid_from(const json& cfg) {
  std::optional<SpatialLattice> x;
  const int nx = cfg.at("Nx").get<int>();
  if (nx > 0) x = SpatialLattice{cfg.at("X").get<double>(), nx};
  return PhaseGrid<D>(VelocityGrid<D>(cfg.at("L").get<double>(), cfg.at("N").get<int>()), x);
}

template <int D>
DistributionField<D> initial_from(const json& cfg) {
  const auto grid = grid_from<D>(cfg);
  const auto& in = cfg.at("initial");
  const std::string kind = in.at("kind");
  if (kind == "maxwellian") return maxwellian<D>(grid, in.at("mass"), in.at("temperature"));
  if (kind == "bimodal") return bimodal<D>(grid, in.at("mass"), in.at("temperature"), in.at("offset"));
  if (kind == "polynomial_tail") return polynomial_tail<D>(grid, in.at("c0"), in.at("p"));
  if (kind == "gaussian_envelope") return gaussian_envelope<D>(grid, in.at("c0"), in.at("alpha"));
  if (kind == "modulated") return modulated_maxwellian<D>(grid, in.at("amplitude"), in.at("temperature"));
  throw PreconditionError("unknown initial kind '" + kind + "'");
}

SolverConfig solver_from(const json& cfg) {
  const auto& s = cfg.at("solver");
  SolverConfig c;
  const std::string form = s.at("form");
  if (form == "flux")
    c.form = Form::DivergenceFlux;
  else if (form == "nondivergence")
    c.form = Form::NonDivergence;
  else
    throw PreconditionError("unknown solver form '" + form + "'");
  if (!s.at("dt").is_null()) c.dt = s.at("dt").get<double>();
  c.cfl_safety = s.at("cfl_safety");
  c.t_end = s.at("t_end");
  c.snapshot_stride = s.at("snapshot_stride");
  c.freeze_coefficients = s.at("freeze_coefficients");
  return c;
}

template <typename F>
auto with_dim(int d, F&& f) {
  if (d == 2) return f(std::integral_constant<int, 2>{});
  if (d == 3) return f(std::integral_constant<int, 3>{});
  throw PreconditionError("dimension must be 2 or 3, got " + std::to_string(d));
}

/// Output directory holding exactly one manifest per invocation.
class OutputDir {
 public:
  OutputDir(const std::string& path, bool force) : dir_(path) {
    if (path.empty()) throw PreconditionError("--out is required");
    if (fs::exists(dir_ / "manifest.json") && !force)
      throw PreconditionError(dir_.string() + " already holds a manifest; pass --force to overwrite");
    fs::create_directories(dir_);
  }
  std::string file(const std::string& name) {
    outputs_.push_back(name);
    return (dir_ / name).string();
  }
  void write_manifest(const std::string& command, const json& cfg, const std::vector<std::string>& inputs,
                      std::optional<std::uint64_t> seed) {
    json m = {{"command", command},
              {"config_digest", hex(fnv1a(cfg.dump()))},
              {"tool_version", kToolVersion},
              {"inputs", inputs},
              {"outputs", outputs_},
              {"resolved_config", cfg}};
    if (seed) m["seed"] = *seed;
    std::ofstream(dir_ / "manifest.json") << m.dump(2) << '\n';
  }

 private:
  fs::path dir_;
  std::vector<std::string> outputs_;
};

json point_json(const KineticPoint<2>& z) { return {{"t", z.t}, {"x", {z.x[0], z.x[1]}}, {"v", {z.v[0], z.v[1]}}}; }
json point_json(const KineticPoint<3>& z) {
  return {{"t", z.t}, {"x", {z.x[0], z.x[1], z.x[2]}}, {"v", {z.v[0], z.v[1], z.v[2]}}};
}
template <int D>
json vec_json(const Vec<D>& v) {
  json a = json::array();
  for (int k = 0; k < D; ++k) a.push_back(v[k]);
  return a;
}

void write_verdicts(const std::string& path, const json& verdicts) { std::ofstream(path) << verdicts.dump(2) << '\n'; }

bool all_hold(const json& verdicts) {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const json& v) { return v.at("holds").get<bool>(); });
}

Snapshot read_input(const std::string& path, std::optional<double> gamma_flag) {
  auto s = read_lfs(path);
  if (gamma_flag && *gamma_flag != s.header.gamma)
    throw PreconditionError("gamma mismatch: --gamma " + num(*gamma_flag) + " but " + path + " was written with gamma " +
                            num(s.header.gamma));
  return s;
}

template <int D>
void write_run(OutputDir& out, const RunRecord<D>& rec) {
  for (std::size_t i = 0; i < rec.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%04zu.lfs", i);
    write_field(out.file(name), rec.snapshots[i], rec.params.gamma);
  }
  std::ofstream tr(out.file("trace.csv"));
  tr << "t,mass,energy,entropy,min_f,max_f,clamps\n";
  for (const auto& r : rec.trace)
    tr << num(r.t) << ',' << num(r.hydro.mass) << ',' << num(r.hydro.energy) << ',' << num(r.hydro.entropy) << ','
       << num(r.min_f) << ',' << num(r.max_f) << ',' << r.clamps << '\n';
}

/// Snapshots of a previous solve, in order, plus that run's resolved config.
struct StoredRun {
  json config;
  std::vector<Snapshot> snaps;
};

StoredRun read_run(const std::string& dir) {
  StoredRun r;
  const fs::path p(dir);
  const auto manifest = p / "manifest.json";
  if (!fs::exists(manifest)) throw InputError(dir + " has no manifest.json");
  const auto m = load_json(manifest.string());
  r.config = m.at("resolved_config");
  for (const auto& name : m.at("outputs"))
    if (name.get<std::string>().rfind("snap_", 0) == 0) r.snaps.push_back(read_lfs((p / name.get<std::string>()).string()));
  if (r.snaps.empty()) throw InputError(dir + " holds no snapshots");
  return r;
}

template <int D>
RunRecord<D> record_from(const StoredRun& s) {
  RunRecord<D> rec;
  rec.params = params_from(s.config, D);
  rec.config = solver_from(s.config);
  for (const auto& snap : s.snaps) rec.snapshots.push_back(field_from_snapshot<D>(snap));
  return rec;
}

// --- subcommands -----------------------------------------------------------

int cmd_coeffs(const Common& c, const std::string& input, std::optional<double> gamma) {
  const auto snap = read_input(input, gamma);
  json cfg = resolve_config(c);
  cfg["gamma"] = snap.header.gamma;
  cfg["d"] = snap.header.dim;
  OutputDir out(c.out, c.force);
  with_dim(snap.header.dim, [&](auto dim) {
    constexpr int D = decltype(dim)::value;
    const auto f = field_from_snapshot<D>(snap);
    const auto pack = precompute_kernels(f.grid.vgrid, params_from(cfg, D));
    const auto coeffs = compute_coefficients(f, *pack);
    auto h = header_for(f, snap.header.gamma);
    h.planes = kPacked<D>;
    h.quantity = "coefficients";
    std::vector<double> values;
    values.reserve(h.value_count());
    for (const auto& cf : coeffs)
      for (const auto& plane : cf.planes) values.insert(values.end(), plane.begin(), plane.end());
    write_lfs(out.file("coeffs.lfs"), h, values);
    double rho = 0.0;
    for (const auto& cf : coeffs) rho = std::max(rho, cf.max_spectral_radius());
    std::cout << "slices=" << coeffs.size() << "\nmax_spectral_radius=" << num(rho) << '\n';
    return 0;
  });
  out.write_manifest("coeffs", cfg, {input}, std::nullopt);
  return 0;
}

int cmd_hydro(const std::string& input) {
  const auto snap = read_lfs(input);
  return with_dim(snap.header.dim, [&](auto dim) {
    constexpr int D = decltype(dim)::value;
    const auto f = field_from_snapshot<D>(snap);
    std::cout << "slice,mass,energy,entropy\n";
    const auto hs = hydro_state(f);
    for (std::size_t i = 0; i < hs.size(); ++i)
      std::cout << i << ',' << num(hs[i].mass) << ',' << num(hs[i].energy) << ',' << num(hs[i].entropy) << '\n';
    return 0;
  });
}

int cmd_solve(const Common& c, bool inhomogeneous) {
  json cfg = resolve_config(c);
  if (inhomogeneous && cfg.at("Nx").get<int>() <= 0) throw PreconditionError("solve-inhom needs Nx > 0");
  if (!inhomogeneous) cfg["Nx"] = 0;
  OutputDir out(c.out, c.force);
  with_dim(cfg.at("d").get<int>(), [&](auto dim) {
    constexpr int D = decltype(dim)::value;
    const auto rec = run<D>(initial_from<D>(cfg), bounds_from(cfg), solver_from(cfg), params_from(cfg, D));
    write_run(out, rec);
    const auto& last = rec.trace.back();
    std::cout << "steps=" << rec.trace.size() - 1 << "\ndt=" << num(rec.dt) << "\nmass=" << num(last.hydro.mass)
              << "\nentropy=" << num(last.hydro.entropy) << "\nclamps=" << rec.total_clamps << '\n';
    return 0;
  });
  out.write_manifest(inhomogeneous ? "solve-inhom" : "solve-hom", cfg, {}, std::nullopt);
  return 0;
}

int cmd_verify_bounds(const Common& c, const std::string& input, std::optional<double> gamma,
                      std::optional<double> alpha) {
  json cfg = resolve_config(c);
  std::optional<Snapshot> snap;
  if (!input.empty()) {
    snap = read_input(input, gamma);
    cfg["gamma"] = snap->header.gamma;
    cfg["d"] = snap->header.dim;
  }
  OutputDir out(c.out, c.force);
  json verdicts = json::array();
  with_dim(cfg.at("d").get<int>(), [&](auto dim) {
    constexpr int D = decltype(dim)::value;
    const auto f = snap ? field_from_snapshot<D>(*snap) : initial_from<D>(cfg);
    const auto p = params_from(cfg, D);
    const auto pack = precompute_kernels(f.grid.vgrid, p);
    const auto coeffs = compute_coefficients(f, *pack);
    const json params = {{"d", D}, {"gamma", p.gamma}, {"L", f.grid.vgrid.half_width()},
                         {"N", f.grid.vgrid.points_per_axis()}};
    auto push = [&](const BoundCertificate<D>& b, int ix) {
      json v = {{"inequality_id", b.inequality_id},
                {"holds", b.holds},
                {"constant", b.constant},
                {"worst_point", vec_json<D>(b.worst_point)},
                {"parameters", params}};
      v["parameters"]["slice"] = ix;
      verdicts.push_back(v);
    };
    for (std::size_t ix = 0; ix < coeffs.size(); ++ix) {
      const int i = static_cast<int>(ix);
      for (const auto& b : verify_divergence_identities(coeffs[ix]).second) push(b, i);
      for (const auto& b : certify_a_bounds(coeffs[ix], p.gamma)) push(b, i);
      for (const auto& b : certify_bc_bounds(coeffs[ix], f.slice(i), p.gamma)) push(b, i);
    }
    if (alpha) {
      std::vector<const CoefficientField<D>*> all;
      for (const auto& cf : coeffs) all.push_back(&cf);
      const auto s = certify_gaussian_supersolution<D>(all, *alpha, p.gamma);
      json v = {{"inequality_id", "gaussian_supersolution"},
                {"holds", s.success},
                {"constant", s.margin},
                {"worst_point", vec_json<D>(s.worst_point)},
                {"parameters", params}};
      v["parameters"]["alpha"] = *alpha;
      v["parameters"]["R0"] = s.R0;
      v["parameters"]["growth"] = s.growth;
      verdicts.push_back(v);
    }
    return 0;
  });
  write_verdicts(out.file("verdicts.json"), verdicts);
  out.write_manifest("verify-bounds", cfg, input.empty() ? std::vector<std::string>{} : std::vector{input},
                     std::nullopt);
  for (const auto& v : verdicts)
    std::cout << v.at("inequality_id").get<std::string>() << " holds=" << (v.at("holds").get<bool>() ? "true" : "false")
              << " constant=" << num(v.at("constant").get<double>()) << '\n';
  if (!all_hold(verdicts)) throw VerdictFailed{};
  return 0;
}

int cmd_decay_report(const Common& c, const std::string& run_dir, std::optional<double> K0) {
  const auto stored = read_run(run_dir);
  OutputDir out(c.out, c.force);
  json verdict;
  with_dim(stored.config.at("d").get<int>(), [&](auto dim) {
    constexpr int D = decltype(dim)::value;
    const auto rec = record_from<D>(stored);
    const auto rep = verify_decay_envelope(rec, K0);
    std::ofstream csv(out.file("decay.csv"));
    csv << "t,small_time_product\n";
    for (std::size_t i = 0; i < rep.times.size(); ++i)
      csv << num(rep.times[i]) << ',' << num(rep.small_time_product[i]) << '\n';
    verdict = {{"inequality_id", "decay_envelope"},
               {"holds", rep.verdict.holds},
               {"constant", rep.verdict.measured_constant},
               {"worst_point", point_json(rep.verdict.worst_point)},
               {"parameters", {{"K0", K0 ? json(*K0) : json(nullptr)}, {"gamma", rec.params.gamma}}}};
    return 0;
  });
  write_verdicts(out.file("verdict.json"), verdict);
  out.write_manifest("decay-report", stored.config, {run_dir}, std::nullopt);
  std::cout << "K0_measured=" << num(verdict.at("constant").get<double>())
            << "\nholds=" << (verdict.at("holds").get<bool>() ? "true" : "false") << '\n';
  if (!verdict.at("holds").get<bool>()) throw VerdictFailed{};
  return 0;
}

int cmd_bootstrap(int d, double gamma, double C) {
  const auto r = bootstrap_exponents(d, gamma, C);
  std::cout << "alpha_sequence=";
  for (std::size_t i = 0; i < r.alpha_sequence.size(); ++i) std::cout << (i ? "," : "") << num(r.alpha_sequence[i]);
  std::cout << "\nP_values=";
  for (std::size_t i = 0; i < r.P_values.size(); ++i) std::cout << (i ? "," : "") << num(r.P_values[i]);
  std::cout << "\nsteps=" << r.steps << "\nmin_gain=" << num(r.min_gain) << "\nK_star=" << num(r.K_star)
            << "\nC_used=" << num(r.C_used) << '\n';
  return 0;
}

int cmd_holder(const Common& c, const std::string& run_dir, int pairs, std::optional<double> alpha) {
  const auto stored = read_run(run_dir);
  json result;
  with_dim(stored.config.at("d").get<int>(), [&](auto dim) {
    constexpr int D = decltype(dim)::value;
    HolderOptions opt;
    opt.seed = c.seed;
    opt.pairs = pairs;
    opt.alpha = alpha;
    const auto r = holder_quotient(record_from<D>(stored), opt);
    result = {{"beta_fit", r.beta_fit},
              {"constant", r.constant},
              {"mode", r.polynomial_weight_mode ? "polynomial-weight" : "gaussian-weight"},
              {"pairs_used", r.pairs_used},
              {"excluded", r.excluded},
              {"worst_pair", {point_json(r.worst_pair.first), point_json(r.worst_pair.second)}}};
    return 0;
  });
  if (!c.out.empty()) {
    OutputDir out(c.out, c.force);
    write_verdicts(out.file("holder.json"), result);
    out.write_manifest("holder", stored.config, {run_dir}, c.seed);
  }
  std::cout << "beta_fit=" << num(result.at("beta_fit").get<double>())
            << "\nconstant=" << num(result.at("constant").get<double>())
            << "\nmode=" << result.at("mode").get<std::string>() << '\n';
  return 0;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double x = 0.0;
    const auto r = std::from_chars(item.data(), item.data() + item.size(), x);
    if (r.ec != std::errc() || r.ptr != item.data() + item.size())
      throw PreconditionError("bad number '" + item + "' in point list");
    out.push_back(x);
  }
  return out;
}

template <int D>
KineticPoint<D> unpack_point(const std::vector<double>& a) {
  KineticPoint<D> z;
  z.t = a[0];
  for (int k = 0; k < D; ++k) {
    z.x[k] = a[1 + k];
    z.v[k] = a[1 + D + k];
  }
  return z;
}

int cmd_metric(const std::string& z1s, const std::string& z2s, bool use_dL, double gamma) {
  const auto a = parse_list(z1s), b = parse_list(z2s);
  if (a.size() != b.size() || (a.size() != 5 && a.size() != 7))
    throw PreconditionError("points are packed as t,x,v: 5 numbers for d = 2, 7 for d = 3");
  return with_dim(static_cast<int>(a.size() - 1) / 2, [&](auto dim) {
    constexpr int D = decltype(dim)::value;
    const auto z1 = unpack_point<D>(a), z2 = unpack_point<D>(b);
    std::cout << num(use_dL ? metric_dL(z1, z2, gamma) : metric_dP(z1, z2)) << '\n';
    return 0;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landau collision operator: coefficients, solves, certificates and reports"};
  app.require_subcommand(0, 1);
  Common common;
  int threads = 0;
  bool print_schema = false;
  app.add_option("--threads", threads, "worker threads (default: all cores)");
  app.add_flag("--print-config-schema", print_schema, "print the documented config keys and exit");

  std::string input, run_dir;
  std::optional<double> gamma, alpha, K0, L;
  std::optional<int> d_opt, N;
  std::optional<double> t_end;
  double C = 1.0;
  int pairs = 12000;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", common.config_path, "JSON config file");
    s->add_option("--out", common.out, "output directory");
    s->add_flag("--force", common.force, "overwrite an existing manifest");
  };
  auto add_grid = [&](CLI::App* s) {
    s->add_option("--gamma", gamma, "potential exponent");
    s->add_option("--d", d_opt, "dimension");
    s->add_option("--L", L, "velocity half-width");
    s->add_option("--N", N, "points per axis");
  };

  auto* coeffs = app.add_subcommand("coeffs", "coefficients of a snapshot");
  add_common(coeffs);
  coeffs->add_option("--input", input, "input .lfs")->required();
  coeffs->add_option("--gamma", gamma, "expected potential exponent");

  auto* hydro = app.add_subcommand("hydro", "per-slice mass, energy and entropy of a snapshot");
  hydro->add_option("--input", input, "input .lfs")->required();

  auto* solve_hom = app.add_subcommand("solve-hom", "homogeneous solve");
  auto* solve_inhom = app.add_subcommand("solve-inhom", "x-periodic solve with Strang splitting");
  for (auto* s : {solve_hom, solve_inhom}) {
    add_common(s);
    add_grid(s);
    s->add_option("--t-end", t_end, "final time");
  }

  auto* verify = app.add_subcommand("verify-bounds", "coefficient certificates; exit 3 if any fails");
  add_common(verify);
  add_grid(verify);
  verify->add_option("--input", input, "input .lfs (default: the config's initial data)");
  verify->add_option("--alpha", alpha, "also certify the Gaussian supersolution at this rate");

  auto* decay = app.add_subcommand("decay-report", "decay envelope of a stored run; exit 3 if it fails");
  add_common(decay);
  decay->add_option("--run", run_dir, "directory of a previous solve")->required();
  decay->add_option("--K0", K0, "constant to check (default: measure only)");

  auto* boot = app.add_subcommand("bootstrap-exponents", "decay exponent bootstrap");
  int boot_d = 3;
  double boot_gamma = -1.0;
  boot->add_option("--d", boot_d, "dimension")->required();
  boot->add_option("--gamma", boot_gamma, "potential exponent")->required();
  boot->add_option("--C", C, "constant in the fixed-point map");

  auto* holder = app.add_subcommand("holder", "empirical Hölder quotient of a stored run");
  add_common(holder);
  holder->add_option("--run", run_dir, "directory of a previous solve")->required();
  holder->add_option("--seed", common.seed, "sampling seed");
  holder->add_option("--pairs", pairs, "number of sampled pairs");
  holder->add_option("--alpha", alpha, "Gaussian weight rate");

  auto* metric = app.add_subcommand("metric", "distance between two kinetic points");
  std::string z1, z2;
  bool dP = false, dL = false;
  double metric_gamma = -1.0;
  metric->add_option("--z1", z1, "t,x,v packed")->required();
  metric->add_option("--z2", z2, "t,x,v packed")->required();
  metric->add_flag("--dP", dP, "plain kinetic distance");
  metric->add_flag("--dL", dL, "anisotropic distance");
  metric->add_option("--gamma", metric_gamma, "potential exponent for --dL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  if (print_schema) {
    std::cout << config_schema().dump(2) << '\n';
    return 0;
  }
  if (threads > 0) omp_set_num_threads(threads);
  if (gamma) common.overrides["gamma"] = *gamma;
  if (d_opt) common.overrides["d"] = *d_opt;
  if (L) common.overrides["L"] = *L;
  if (N) common.overrides["N"] = *N;
  if (t_end) common.overrides["solver"]["t_end"] = *t_end;

  try {
    if (*coeffs) return cmd_coeffs(common, input, gamma);
    if (*hydro) return cmd_hydro(input);
    if (*solve_hom) return cmd_solve(common, false);
    if (*solve_inhom) return cmd_solve(common, true);
    if (*verify) return cmd_verify_bounds(common, input, gamma, alpha);
    if (*decay) return cmd_decay_report(common, run_dir, K0);
    if (*boot) return cmd_bootstrap(boot_d, boot_gamma, C);
    if (*holder) return cmd_holder(common, run_dir, pairs, alpha);
    if (*metric) {
      if (dP == dL) throw PreconditionError("choose exactly one of --dP and --dL");
      return cmd_metric(z1, z2, dL, metric_gamma);
    }
    std::cout << app.help();
    return 64;
  } catch (const VerdictFailed&) {
    return 3;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 66;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return 2;
  } catch (const CflViolation& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
