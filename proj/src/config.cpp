#include "vwlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vwlab/error.hpp"

namespace vwlab {

const char* to_string(RunMode m) noexcept {
  switch (m) {
    case RunMode::Memory: return "memory";
    case RunMode::DirectWave: return "direct-wave";
    case RunMode::NParticle: return "nparticle";
    case RunMode::Picard: return "picard";
    case RunMode::Sweep: return "sweep";
    case RunMode::Kernels: return "kernels";
    case RunMode::VpKernel: return "vpkernel";
    case RunMode::Validate: return "validate";
  }
  return "unknown";
}

const std::map<std::string, std::string>& config_defaults() {
  static const std::map<std::string, std::string> d = {
      {"run.mode", "memory"},
      {"run.seed", "0"},
      {"run.snapshot_stride", "0"},
      {"dims.d", "1"},
      {"dims.n", "3"},
      {"transport.T", "1"},
      {"transport.dt", "0.02"},
      {"transport.c", "1"},
      {"transport.eps", "1"},
      {"transport.coupling", "memory"},
      {"transport.wave_energy", "true"},
      {"transport.compare_direct", "false"},
      {"transport.dr_scale", "1"},
      {"transport.du_max", "0.01"},
      {"transport.mass_abort", "1e-3"},
      {"transport.field_pad", "-1"},
      {"grid.x_min", "auto"},
      {"grid.x_max", "auto"},
      {"grid.v_min", "auto"},
      {"grid.v_max", "auto"},
      {"grid.nx", "256"},
      {"grid.nv", "256"},
      {"grid.override", "false"},
      {"external.V", "harmonic 1"},
      {"sigma1", "bump 0.5 1"},
      {"sigma2", "bump 1 1"},
      {"f0.bumps", "-0.4 0.3 2 1"},
      {"wave.psi0", "0.5 1 1 1 1"},
      {"wave.psi1", "-0.5 1 0.5 1 1"},
      {"diagnostics.w1_reference", "none"},
      {"picard.tol", "1e-8"},
      {"picard.max_iterations", "30"},
      {"picard.directions", "64"},
      {"sweep.eps_list", "1 0.25 0.0625 0.015625"},
      {"sweep.T_star", "1"},
      {"sweep.window_start", "0.5"},
      {"sweep.directions", "64"},
      {"kernels.t_max", "200"},
      {"kernels.dt", "0.01"},
      {"kernels.T_list", "50 100 200"},
      {"vpkernel.eps_list", "1 0.25 0.0625 0.015625"},
      {"vpkernel.q_exp", "2"},
      {"nparticle.N", "256"},
      {"validate.criteria", "1 2 3 4 5 6 7 8 9 10 11"},
  };
  return d;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string SimulationConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : resolved) out += k + " = " + v + "\n";
  return out;
}

std::string SimulationConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

void read_pairs(std::string_view text, std::map<std::string, std::string>& into,
                std::vector<std::string>& unknown, const char* origin) {
  const auto& known = config_defaults();
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    require(eq != std::string::npos, ErrorKind::Config,
            std::string(origin) + " line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string val = trim(std::string_view(t).substr(eq + 1));
    if (!known.count(key)) {
      unknown.push_back(key);
      continue;
    }
    require(!val.empty(), ErrorKind::Config, "key '" + key + "' has an empty value");
    into[key] = val;
  }
}

double to_double(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  double x;
  std::string rest;
  require(static_cast<bool>(is >> x) && !(is >> rest) && std::isfinite(x), ErrorKind::Config,
          "key '" + key + "' expects a finite number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  require(x == std::floor(x) && std::abs(x) < 9e15, ErrorKind::Config,
          "key '" + key + "' expects an integer, got '" + v + "'");
  return static_cast<long long>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorKind::Config, "key '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double(key, tok));
  require(!out.empty(), ErrorKind::Config, "key '" + key + "' expects a list of numbers");
  return out;
}

std::vector<std::vector<double>> to_records(const std::string& key, const std::string& v,
                                            std::size_t width) {
  std::vector<std::vector<double>> out;
  if (v == "none") return out;
  std::istringstream is(v);
  std::string rec;
  while (std::getline(is, rec, ';')) {
    if (trim(rec).empty()) continue;
    auto r = to_list(key, rec);
    require(r.size() == width, ErrorKind::Config,
            "key '" + key + "' expects records of " + std::to_string(width) + " numbers separated by ';'");
    out.push_back(std::move(r));
  }
  return out;
}

FormFactor to_formfactor(const std::string& key, const std::string& v, int dim) {
  std::istringstream is(v);
  std::string kind;
  is >> kind;
  if (kind == "zero") return FormFactor::bump(dim, 1.0, 0.0);
  if (kind == "bump") {
    double R, m;
    require(static_cast<bool>(is >> R >> m), ErrorKind::Config, "key '" + key + "': bump RADIUS MASS");
    require(R > 0.0, ErrorKind::Config, "key '" + key + "': radius must be > 0");
    require(m >= 0.0, ErrorKind::Hypothesis, "(H1) " + key + " must be nonnegative");
    return FormFactor::bump(dim, R, m);
  }
  if (kind == "table") {
    double R;
    require(static_cast<bool>(is >> R) && R > 0.0, ErrorKind::Config, "key '" + key + "': table RADIUS v0 v1 ...");
    std::vector<double> vals;
    double x;
    while (is >> x) vals.push_back(x);
    require(vals.size() >= 3, ErrorKind::Config, "key '" + key + "': table needs >= 3 samples");
    for (double a : vals) require(a >= 0.0, ErrorKind::Hypothesis, "(H1) " + key + " must be nonnegative");
    const double h = R / static_cast<double>(vals.size() - 1);
    auto slopes = derivative_table(vals, h, +1);
    return FormFactor::tabulated(dim, RadialTable(R, std::move(vals), std::move(slopes)));
  }
  if (kind == "file") {
    std::string path;
    is >> path;
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Config, "key '" + key + "': cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    FormFactor f = FormFactor::parse(buf.str());
    require(f.dim() == dim, ErrorKind::Config, "key '" + key + "': file dimension differs");
    return f;
  }
  fail(ErrorKind::Config, "key '" + key + "' expects 'bump R M', 'zero', 'table R v...' or 'file PATH'");
}

ExternalPotential to_potential(const std::string& v) {
  std::istringstream is(v);
  std::string kind;
  is >> kind;
  if (kind == "zero") return ExternalPotential::zero();
  double a;
  if (kind == "harmonic" || kind == "linear") {
    require(static_cast<bool>(is >> a), ErrorKind::Config, "external.V: '" + kind + " VALUE'");
    return kind == "harmonic" ? ExternalPotential::harmonic(a) : ExternalPotential::linear(a);
  }
  if (kind == "table") {
    double lo, hi;
    require(static_cast<bool>(is >> lo >> hi) && hi > lo, ErrorKind::Config, "external.V: 'table LO HI v0 v1 ...'");
    std::vector<double> vals;
    while (is >> a) vals.push_back(a);
    require(vals.size() >= 3, ErrorKind::Config, "external.V: table needs >= 3 samples");
    return ExternalPotential::table(lo, hi, std::move(vals));
  }
  fail(ErrorKind::Config, "external.V expects zero, harmonic K, linear F or table LO HI v...");
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

SimulationConfig parse_config_text(std::string_view text, std::string_view overrides) {
  std::map<std::string, std::string> kv = config_defaults();
  std::vector<std::string> unknown;
  read_pairs(text, kv, unknown, "config");
  read_pairs(overrides, kv, unknown, "override");
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
    fail(ErrorKind::Config, "unknown configuration keys: " + list);
  }

  SimulationConfig c;
  const std::string mode = kv["run.mode"];
  static const std::map<std::string, RunMode> modes = {
      {"memory", RunMode::Memory},   {"direct-wave", RunMode::DirectWave},
      {"nparticle", RunMode::NParticle}, {"picard", RunMode::Picard},
      {"sweep", RunMode::Sweep},     {"kernels", RunMode::Kernels},
      {"vpkernel", RunMode::VpKernel}, {"validate", RunMode::Validate}};
  require(modes.count(mode), ErrorKind::Config, "run.mode '" + mode + "' is not a known mode");
  c.mode = modes.at(mode);
  c.seed = static_cast<std::uint64_t>(to_int("run.seed", kv["run.seed"]));
  c.d = static_cast<int>(to_int("dims.d", kv["dims.d"]));
  c.n = static_cast<int>(to_int("dims.n", kv["dims.n"]));
  require(c.d >= 1 && c.n >= 1, ErrorKind::Config, "dims.d and dims.n must be >= 1");
  const bool gridded = c.mode != RunMode::NParticle && c.mode != RunMode::Kernels &&
                       c.mode != RunMode::VpKernel && c.mode != RunMode::Validate;
  require(!gridded || c.d == 1, ErrorKind::UnsupportedDimension,
          "gridded transport is implemented for d = 1; use nparticle for d > 1");

  auto& s = c.transport;
  s.T = to_double("transport.T", kv["transport.T"]);
  s.dt = to_double("transport.dt", kv["transport.dt"]);
  require(s.T > 0.0 && s.dt > 0.0, ErrorKind::Config, "transport.T and transport.dt must be > 0");
  s.c = to_double("transport.c", kv["transport.c"]);
  require(s.c > 0.0, ErrorKind::Config, "transport.c must be > 0");
  s.eps = to_double("transport.eps", kv["transport.eps"]);
  require(s.eps > 0.0 && s.eps <= 1.0, ErrorKind::Config, "transport.eps must lie in (0, 1]");
  static const std::map<std::string, Coupling> couplings = {
      {"none", Coupling::None},         {"memory", Coupling::Memory}, {"direct-wave", Coupling::DirectWave},
      {"rescaled", Coupling::Rescaled}, {"limit", Coupling::Limit}};
  require(couplings.count(kv["transport.coupling"]), ErrorKind::Config,
          "transport.coupling must be none, memory, direct-wave, rescaled or limit");
  s.coupling = c.mode == RunMode::DirectWave ? Coupling::DirectWave : couplings.at(kv["transport.coupling"]);
  s.wave_energy = to_bool("transport.wave_energy", kv["transport.wave_energy"]);
  s.compare_direct = to_bool("transport.compare_direct", kv["transport.compare_direct"]);
  s.dr_scale = to_double("transport.dr_scale", kv["transport.dr_scale"]);
  s.du_max = to_double("transport.du_max", kv["transport.du_max"]);
  s.mass_abort = to_double("transport.mass_abort", kv["transport.mass_abort"]);
  s.field_pad = static_cast<int>(to_int("transport.field_pad", kv["transport.field_pad"]));
  s.snapshot_stride = static_cast<int>(to_int("run.snapshot_stride", kv["run.snapshot_stride"]));
  require(s.dr_scale > 0.0 && s.du_max > 0.0 && s.mass_abort > 0.0 && s.snapshot_stride >= 0,
          ErrorKind::Config, "dr_scale, du_max, mass_abort must be > 0 and snapshot_stride >= 0");

  s.V = to_potential(kv["external.V"]);
  s.sigma1 = to_formfactor("sigma1", kv["sigma1"], c.d);
  s.sigma2 = to_formfactor("sigma2", kv["sigma2"], c.n);
  std::vector<PhaseBump> bumps;
  for (const auto& r : to_records("f0.bumps", kv["f0.bumps"], 4)) bumps.push_back({r[0], r[1], r[2], r[3]});
  require(!bumps.empty(), ErrorKind::Config, "f0.bumps must list at least one bump");
  s.f0 = InitialProfile(std::move(bumps));
  s.wave = WaveInitialData{};
  s.wave.n = c.n;
  auto terms = [&](const char* key, std::vector<WaveTerm>& dst) {
    for (const auto& r : to_records(key, kv[key], 5)) {
      require(r[1] > 0.0 && r[3] > 0.0, ErrorKind::Config, std::string(key) + ": radii must be > 0");
      dst.push_back({r[0], FormFactor::bump(1, r[1], r[2]), FormFactor::bump(c.n, r[3], r[4])});
    }
  };
  terms("wave.psi0", s.wave.psi0);
  terms("wave.psi1", s.wave.psi1);
  c.w1_reference = kv["diagnostics.w1_reference"];
  require(c.w1_reference == "none" || c.w1_reference == "initial", ErrorKind::Config,
          "diagnostics.w1_reference must be none or initial");

  c.picard.tol = to_double("picard.tol", kv["picard.tol"]);
  c.picard.max_iterations = static_cast<int>(to_int("picard.max_iterations", kv["picard.max_iterations"]));
  c.picard.directions = static_cast<int>(to_int("picard.directions", kv["picard.directions"]));
  c.sweep_eps = to_list("sweep.eps_list", kv["sweep.eps_list"]);
  c.sweep_T_star = to_double("sweep.T_star", kv["sweep.T_star"]);
  c.sweep_window = to_double("sweep.window_start", kv["sweep.window_start"]);
  c.sweep_directions = static_cast<int>(to_int("sweep.directions", kv["sweep.directions"]));
  c.kernels_t_max = to_double("kernels.t_max", kv["kernels.t_max"]);
  c.kernels_dt = to_double("kernels.dt", kv["kernels.dt"]);
  c.kernels_T_list = to_list("kernels.T_list", kv["kernels.T_list"]);
  c.vp_eps = to_list("vpkernel.eps_list", kv["vpkernel.eps_list"]);
  c.vp_q_exp = to_double("vpkernel.q_exp", kv["vpkernel.q_exp"]);
  c.particles = static_cast<int>(to_int("nparticle.N", kv["nparticle.N"]));
  require(c.particles >= 1, ErrorKind::Config, "nparticle.N must be >= 1");
  for (double x : to_list("validate.criteria", kv["validate.criteria"])) {
    require(x >= 1 && x <= 11 && x == std::floor(x), ErrorKind::Config, "validate.criteria lists integers 1..11");
    c.validate_criteria.push_back(static_cast<int>(x));
  }

  // Hypothesis checks, each reported.
  c.hypotheses.push_back("(H1) sigma1, sigma2 nonnegative radial compactly supported: ok");
  const double C = s.V.lower_bound_constant();
  require(std::isfinite(C), ErrorKind::Hypothesis, "(H2) V admits no finite lower-bound constant C");
  c.hypotheses.push_back("(H2) lower-bound constant C = " + fmt(C));
  const double sup = s.f0.sup();
  require(std::isfinite(sup), ErrorKind::Hypothesis, "(H9) f0 must be bounded");
  c.hypotheses.push_back("(H4, H9) f0 >= 0, mass = " + fmt(s.f0.mass()) + ", sup = " + fmt(sup));
  if (c.mode != RunMode::Kernels && c.mode != RunMode::VpKernel) s.wave.validate(c.n);
  const double Ew = s.wave.vibrational_energy(s.c, 1.0);
  require(std::isfinite(Ew), ErrorKind::Hypothesis, "(H8) initial wave energy must be finite");
  c.hypotheses.push_back("(H3, H8) initial wave energy = " + fmt(Ew));
  if (c.mode == RunMode::Sweep) {
    require(s.V.nonnegative(), ErrorKind::Hypothesis,
            "(H7) the sweep requires an external potential that is non negative");
    c.hypotheses.push_back("(H7) V >= 0: ok");
  }

  c.grid_override = to_bool("grid.override", kv["grid.override"]);
  const int nx = static_cast<int>(to_int("grid.nx", kv["grid.nx"]));
  const int nv = static_cast<int>(to_int("grid.nv", kv["grid.nv"]));
  require(nx >= 8 && nv >= 8, ErrorKind::Config, "grid.nx and grid.nv must be >= 8");
  if (gridded) {
    TransportSetup probe = s;
    if (c.mode == RunMode::Sweep) probe.T = c.sweep_T_star;
    c.apriori_radius = definition_check(probe, false).max_radius;
    const double R = c.apriori_radius;
    auto bound = [&](const char* key, double dflt) {
      return kv[key] == "auto" ? dflt : to_double(key, kv[key]);
    };
    const double Ra = std::ceil(R * 2.0) / 2.0;
    s.x = Grid1D{bound("grid.x_min", -Ra), bound("grid.x_max", Ra), nx};
    s.v = Grid1D{bound("grid.v_min", -Ra), bound("grid.v_max", Ra), nv};
    require(s.x.hi > s.x.lo && s.v.hi > s.v.lo, ErrorKind::Config, "grid bounds must be increasing");
    const bool covers = s.x.lo <= -R && s.x.hi >= R && s.v.lo <= -R && s.v.hi >= R;
    require(covers || c.grid_override, ErrorKind::Config,
            "grid box is smaller than the a-priori radius R = " + fmt(R) +
                "; enlarge it or set grid.override = true");
    kv["grid.x_min"] = fmt(s.x.lo);
    kv["grid.x_max"] = fmt(s.x.hi);
    kv["grid.v_min"] = fmt(s.v.lo);
    kv["grid.v_max"] = fmt(s.v.hi);
    c.hypotheses.push_back("a-priori radius R = " + fmt(R) + (covers ? " (box covers it)" : " (override)"));
  } else {
    s.x = Grid1D{-4.0, 4.0, nx};
    s.v = Grid1D{-4.0, 4.0, nv};
  }
  c.resolved = kv;
  c.hash = fnv1a64(c.canonical_text());
  return c;
}

SimulationConfig parse_config_file(const std::string& path, std::string_view overrides) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Config, "cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

}  // namespace vwlab
