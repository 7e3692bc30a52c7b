#include "vwlab/runner.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vwlab/asymptotics.hpp"
#include "vwlab/io.hpp"
#include "vwlab/validation.hpp"

namespace vwlab {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidParameter:
    case ErrorKind::InvalidInput:
    case ErrorKind::UnsupportedDimension:
      return ExitConfig;
    case ErrorKind::Hypothesis:
    case ErrorKind::DivergentConstant:
      return ExitHypothesis;
    case ErrorKind::OutOfDomain:
    case ErrorKind::MissingHistory:
    case ErrorKind::TableTooShort:
    case ErrorKind::UndefinedDistance:
    case ErrorKind::SolverAbort:
      return ExitSolver;
    case ErrorKind::Io:
      return ExitIo;
  }
  return ExitSolver;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// "key = value" text with the hash line first.
class KeyValueText {
 public:
  explicit KeyValueText(const std::string& hash) { os_ << "# config_hash=" << hash << '\n'; }
  KeyValueText& put(const std::string& key, double v) { return put(key, format_double(v)); }
  KeyValueText& put(const std::string& key, const std::string& v) {
    os_ << key << " = " << v << '\n';
    return *this;
  }
  KeyValueText& put(const std::string& key, const char* v) { return put(key, std::string(v)); }
  KeyValueText& put_int(const std::string& key, long long v) { return put(key, std::to_string(v)); }
  KeyValueText& put_bool(const std::string& key, bool v) { return put(key, v ? "true" : "false"); }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

struct Context {
  const SimulationConfig& cfg;
  fs::path dir;
  std::string hash;
  KeyValueText summary, timing;
  Context(const SimulationConfig& c, fs::path d)
      : cfg(c), dir(std::move(d)), hash(c.hash_hex()), summary(hash), timing(hash) {}
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

nlohmann::ordered_json fit_json(const RateFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual},
          {"log_eps", f.abscissae}, {"log_metric", f.ordinates}};
}

void run_kernels(Context& ctx) {
  const auto& s = ctx.cfg.transport;
  const auto t0 = Clock::now();
  const KernelSpectrum spec(s.sigma2);
  const KernelTable table(spec, s.c, ctx.cfg.kernels_dt, ctx.cfg.kernels_t_max);
  {
    std::ofstream os(ctx.path("kernel.csv"), std::ios::binary);
    require(static_cast<bool>(os), ErrorKind::Io, "cannot write kernel.csv");
    table.write_csv(os, "# config_hash=" + ctx.hash + "\n# sigma2=" + ctx.cfg.resolved.at("sigma2") + "\n");
  }
  auto& sum = ctx.summary;
  sum.put_int("n", spec.n()).put("c", s.c).put("dt", table.dt()).put("t_max", table.t_max());
  sum.put("r_cut", table.r_cut()).put_int("quadrature_nodes", static_cast<long long>(table.quadrature_nodes()));
  if (table.has_kappa()) {
    sum.put("kappa", table.kappa()).put("K", table.tail_K());
  } else {
    sum.put("kappa", "divergent (n <= 2)");
  }
  for (double T : ctx.cfg.kernels_T_list) {
    if (T > table.t_max()) continue;
    const std::string tag = format_double(T);
    const double I = table.partial_integral(T);
    sum.put("partial_integral[" + tag + "]", I);
    if (table.has_kappa()) {
      sum.put("tail_error[" + tag + "]", std::abs(I - table.kappa()));
      sum.put("tail_bound[" + tag + "]", table.tail_K() / T);
    }
  }
  ctx.timing.put("kernel_table_seconds", since(t0));
}

void run_transport(Context& ctx) {
  const auto& cfg = ctx.cfg;
  TransportSetup s = cfg.transport;
  const int stride = s.snapshot_stride;
  s.snapshot_stride = 0;  // written here, straight from the callback
  if (stride > 0) fs::create_directories(ctx.dir / "snapshots");

  const bool w1_ref = cfg.w1_reference == "initial";
  const PhaseSpaceState f0 = s.f0.sample(s.x, s.v);
  std::optional<SlicedWasserstein> w1;
  if (w1_ref) w1.emplace(s.x, s.v, 64);
  std::vector<double> w1_values;
  std::size_t snapshots = 0;

  SimulateOptions opt;
  opt.on_field = [&](std::size_t k, const PhaseSpaceState& f, const PotentialField& phi) {
    w1_values.push_back(w1 ? (*w1)(f, f0) : std::numeric_limits<double>::quiet_NaN());
    if (stride > 0 && k % static_cast<std::size_t>(stride) == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshots/state_%06zu.bin", k);
      write_snapshot(ctx.path(name), to_snapshot(f, cfg.hash, cfg.d, cfg.n));
      std::snprintf(name, sizeof name, "snapshots/potential_%06zu.bin", k);
      write_snapshot(ctx.path(name), to_snapshot(phi, f.t, cfg.hash, cfg.d, cfg.n));
      ++snapshots;
    }
  };
  const auto t0 = Clock::now();
  const RunRecord rec = self_consistent_simulate(s, opt);
  ctx.timing.put("simulate_seconds", since(t0));

  CsvWriter diag(ctx.path("diagnostics.csv"), ctx.hash,
                 {"t", "mass", "clipped_mass", "l1", "l2", "linf", "kinetic", "external", "coupling",
                  "wave_kinetic", "wave_elastic", "total", "m2", "w1_reference"});
  CsvWriter pot(ctx.path("potential.csv"), ctx.hash, {"t", "source", "phi_sup", "grad_phi_sup", "direct_gap"});
  const std::string tag = to_string(s.coupling);
  double e_drift = 0.0, m_drift = 0.0, clipped = 0.0, gap = 0.0;
  const double m0 = rec.steps.front().diag.mass, e0 = rec.steps.front().diag.total();
  for (std::size_t k = 0; k < rec.steps.size(); ++k) {
    const StepRecord& st = rec.steps[k];
    const DiagnosticsRecord& d = st.diag;
    diag << d.t << d.mass << st.clipped_mass << d.l1 << d.l2 << d.linf << d.kinetic << d.external
         << d.coupling << d.wave_kinetic << d.wave_elastic << d.total() << d.m2 << w1_values[k];
    diag.end_row();
    if (s.coupling != Coupling::Limit && s.coupling != Coupling::None) {
      pot << d.t << std::string("phi0") << st.phi0_sup << st.phi0_grad_sup
          << std::numeric_limits<double>::quiet_NaN();
      pot.end_row();
    }
    pot << d.t << tag << st.phi_sup << st.grad_sup << st.direct_gap;
    pot.end_row();
    m_drift = std::max(m_drift, std::abs(d.mass - m0) / m0);
    if (e0 != 0.0) e_drift = std::max(e_drift, std::abs(d.total() - e0) / std::abs(e0));
    clipped = std::max(clipped, st.clipped_mass);
    if (!std::isnan(st.direct_gap)) gap = std::max(gap, st.direct_gap);
  }
  const bool wave_terms = rec.steps.front().diag.wave_terms;
  auto& sum = ctx.summary;
  sum.put("coupling", tag).put_int("steps", static_cast<long long>(rec.steps.size()));
  sum.put("final_t", rec.steps.back().diag.t).put("mass0", m0).put("max_mass_drift", m_drift);
  sum.put("max_clipped_mass", clipped);
  sum.put("max_energy_drift", e_drift).put_bool("energy_includes_wave", wave_terms);
  if (s.compare_direct) sum.put("max_direct_gap", gap);
  sum.put_bool("support_breach", rec.support_breach);
  sum.put("field_grid_lo", rec.field_grid.lo).put("field_grid_hi", rec.field_grid.hi);
  sum.put_int("field_grid_n", rec.field_grid.n);
  sum.put("apriori_radius", cfg.apriori_radius);
  sum.put_int("snapshots", static_cast<long long>(snapshots));
  write_snapshot(ctx.path("final_state.bin"), to_snapshot(rec.final_state, cfg.hash, cfg.d, cfg.n));
}

void run_picard(Context& ctx) {
  const auto& cfg = ctx.cfg;
  TransportSetup s = cfg.transport;
  if (s.coupling != Coupling::None) s.coupling = Coupling::Memory;
  const auto t0 = Clock::now();
  const PicardResult pr = picard_solve(s, cfg.picard);
  ctx.timing.put("picard_seconds", since(t0));
  CsvWriter csv(ctx.path("picard.csv"), ctx.hash, {"iteration", "gap", "ratio"});
  for (std::size_t l = 0; l < pr.gaps.size(); ++l) {
    csv << static_cast<double>(l) << pr.gaps[l]
        << (l > 0 ? pr.gaps[l] / pr.gaps[l - 1] : std::numeric_limits<double>::quiet_NaN());
    csv.end_row();
  }
  auto& sum = ctx.summary;
  sum.put_int("iterations", static_cast<long long>(pr.gaps.size()));
  sum.put_bool("converged", pr.converged).put_bool("diverging", pr.diverging);
  sum.put("tolerance", cfg.picard.tol);
  if (!pr.gaps.empty()) sum.put("final_gap", pr.gaps.back());
  if (!pr.fixed_point.empty())
    write_snapshot(ctx.path("final_state.bin"), to_snapshot(pr.fixed_point.back(), cfg.hash, cfg.d, cfg.n));
  require(!pr.diverging, ErrorKind::SolverAbort, "Picard gaps stopped decreasing");
}

void run_sweep(Context& ctx) {
  const auto& cfg = ctx.cfg;
  EpsilonSweepPlan plan;
  plan.base = cfg.transport;
  plan.eps_list = cfg.sweep_eps;
  plan.T_star = cfg.sweep_T_star;
  plan.directions = cfg.sweep_directions;
  plan.window_start = cfg.sweep_window;
  validate_plan(plan);
  const SweepResult res = run_epsilon_sweep(plan);

  CsvWriter csv(ctx.path("sweep.csv"), ctx.hash,
                {"eps", "w1", "rho_l1", "phi0_probe", "phi0_bound", "final_mass", "final_energy"});
  std::vector<double> eps, w1;
  for (const auto& m : res.members) {
    csv << m.eps << m.w1 << m.rho_l1 << m.phi0_probe << m.phi0_bound << m.final_diag.mass
        << m.final_diag.total();
    csv.end_row();
    eps.push_back(m.eps);
    w1.push_back(m.w1);
    ctx.timing.put("member_seconds[" + format_double(m.eps) + "]", m.runtime);
  }
  ctx.timing.put("limit_seconds", res.limit_runtime);

  const PhaseSpaceState f0 = plan.base.f0.sample(plan.base.x, plan.base.v);
  const auto rows = frozen_rho_check(plan.base.sigma1, plan.base.sigma2, f0.density(), plan.eps_list,
                                     {0.1 * plan.T_star, 0.5 * plan.T_star, plan.T_star}, plan.base.dt);
  CsvWriter fr(ctx.path("frozen.csv"), ctx.hash, {"eps", "t", "error", "bound", "satisfied"});
  int bad = 0;
  for (const auto& r : rows) {
    fr << r.eps << r.t << r.error << r.bound << std::string(r.satisfied ? "true" : "false");
    fr.end_row();
    bad += r.satisfied ? 0 : 1;
  }
  nlohmann::ordered_json j;
  j["config_hash"] = ctx.hash;
  j["metric"] = "sliced_w1";
  j["fit"] = eps.size() >= 2 ? fit_json(fit_rate(eps, w1)) : nlohmann::ordered_json();
  write_text_file(ctx.path("rate.json"), j.dump(2) + "\n");

  auto& sum = ctx.summary;
  sum.put("kappa", res.kappa).put_bool("strictly_decreasing", res.strictly_decreasing);
  if (!w1.empty()) sum.put("final_over_first", w1.back() / w1.front());
  sum.put_int("frozen_violations", bad);
  sum.put("limit_final_mass", res.limit_diag.mass);
}

void run_vpkernel(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto t0 = Clock::now();
  const VpKernelStudy st = vp_kernel_rate_study(cfg.vp_eps, cfg.vp_q_exp);
  const double c3 = coulomb_constant(3);
  ctx.timing.put("study_seconds", since(t0));
  CsvWriter csv(ctx.path("vpkernel.csv"), ctx.hash, {"eps", "gap_norm", "inner_factor_p2"});
  for (std::size_t i = 0; i < st.eps.size(); ++i) {
    csv << st.eps[i] << st.gaps[i] << st.inner[i];
    csv.end_row();
  }
  nlohmann::ordered_json j;
  j["config_hash"] = ctx.hash;
  j["q_exp"] = cfg.vp_q_exp;
  j["gap_fit"] = fit_json(st.gap_fit);
  j["inner_fit"] = fit_json(st.inner_fit);
  write_text_file(ctx.path("rate.json"), j.dump(2) + "\n");
  auto& sum = ctx.summary;
  sum.put_bool("gaps_decreasing", st.gaps_decreasing).put("inner_slope", st.inner_fit.slope);
  sum.put("gap_slope", st.gap_fit.slope).put("control_gap", st.control_gap);
  sum.put("C3", c3).put("C3_reference", 1.0 / (2.0 * pi * pi));
}

void run_nparticle(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& s = cfg.transport;
  ParticleSetup ps;
  ps.d = cfg.d;
  switch (s.V.kind()) {
    case ExternalPotential::Kind::Zero: break;
    case ExternalPotential::Kind::Harmonic: ps.harmonic_k = s.V.parameter(); break;
    case ExternalPotential::Kind::Linear: ps.drift = s.V.parameter(); break;
    case ExternalPotential::Kind::Table:
      fail(ErrorKind::Config, "nparticle mode supports external.V = zero, harmonic K or linear F");
  }
  // Components are drawn independently from f0, so d > 1 samples the product measure.
  const int N = cfg.particles;
  ps.x.assign(N, std::vector<double>(cfg.d));
  ps.v.assign(N, std::vector<double>(cfg.d));
  for (int k = 0; k < cfg.d; ++k) {
    std::vector<std::vector<double>> xs, vs;
    sample_particles(s.f0, N, cfg.seed + static_cast<std::uint64_t>(k), xs, vs);
    for (int p = 0; p < N; ++p) {
      ps.x[p][k] = xs[p][0];
      ps.v[p][k] = vs[p][0];
    }
  }
  ps.weights.assign(N, s.f0.mass() / N);
  ps.sigma1 = s.sigma1;
  ps.sigma2 = s.sigma2;
  ps.wave = s.wave;
  ps.c = s.c;
  ps.dt = s.dt;
  ps.T = s.T;
  const auto t0 = Clock::now();
  const ParticleRecord rec = nparticle_simulate(ps);
  ctx.timing.put("nparticle_seconds", since(t0));

  std::vector<std::string> cols{"step", "t", "particle"};
  for (int k = 0; k < cfg.d; ++k) cols.push_back("x" + std::to_string(k + 1));
  for (int k = 0; k < cfg.d; ++k) cols.push_back("v" + std::to_string(k + 1));
  CsvWriter csv(ctx.path("particles.csv"), ctx.hash, cols);
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    for (int p = 0; p < N; ++p) {
      csv << static_cast<double>(k) << rec.times[k] << static_cast<double>(p);
      for (double x : rec.x[k][p]) csv << x;
      for (double v : rec.v[k][p]) csv << v;
      csv.end_row();
    }
  }
  ctx.summary.put_int("particles", N).put_int("steps", static_cast<long long>(rec.times.size()));
  ctx.summary.put_int("d", cfg.d).put("final_t", rec.times.back());
}

bool run_validate(Context& ctx) {
  CsvWriter csv(ctx.path("validation.csv"), ctx.hash, {"id", "name", "pass", "detail"});
  int failed = 0;
  for (int id : ctx.cfg.validate_criteria) {
    const CriterionResult r = run_criterion(id);
    csv << static_cast<double>(r.id) << r.name << std::string(r.pass ? "PASS" : "FAIL") << r.detail;
    csv.end_row();
    ctx.timing.put("criterion_seconds[" + std::to_string(id) + "]", r.seconds);
    ctx.timing.put("criterion_limit[" + std::to_string(id) + "]", r.limit_seconds);
    failed += r.pass ? 0 : 1;
  }
  ctx.summary.put_int("criteria", static_cast<long long>(ctx.cfg.validate_criteria.size()));
  ctx.summary.put_int("failed", failed);
  return failed == 0;
}

void write_failure(const fs::path& dir, const std::string& hash, int code, const std::string& kind,
                   const std::string& message) {
  KeyValueText f(hash);
  f.put_int("status", code).put("kind", kind).put("message", message);
  std::ofstream os(dir / "failure.txt", std::ios::binary);
  os << f.str();
}

}  // namespace

int run_config(const SimulationConfig& cfg, const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return ExitIo;
  Context ctx(cfg, dir);
  const auto t0 = Clock::now();
  int code = ExitOk;
  try {
    std::string echo = "# config_hash=" + ctx.hash + "\n";
    for (const auto& h : cfg.hypotheses) echo += "# " + h + "\n";
    write_text_file(ctx.path("config.txt"), echo + cfg.canonical_text());
    ctx.summary.put("mode", to_string(cfg.mode));
    bool ok = true;
    switch (cfg.mode) {
      case RunMode::Kernels: run_kernels(ctx); break;
      case RunMode::Memory:
      case RunMode::DirectWave: run_transport(ctx); break;
      case RunMode::Picard: run_picard(ctx); break;
      case RunMode::Sweep: run_sweep(ctx); break;
      case RunMode::VpKernel: run_vpkernel(ctx); break;
      case RunMode::NParticle: run_nparticle(ctx); break;
      case RunMode::Validate: ok = run_validate(ctx); break;
    }
    if (!ok) {
      code = ExitSolver;
      write_failure(dir, ctx.hash, code, "validation", "one or more criteria failed; see validation.csv");
    }
  } catch (const Error& e) {
    code = exit_code_for(e.kind());
    write_failure(dir, ctx.hash, code, to_string(e.kind()), e.what());
  } catch (const fs::filesystem_error& e) {
    code = ExitIo;
    write_failure(dir, ctx.hash, code, "io", e.what());
  } catch (const std::exception& e) {
    code = ExitSolver;
    write_failure(dir, ctx.hash, code, "internal", e.what());
  }
  ctx.summary.put_int("exit_code", code);
  ctx.timing.put("total_seconds", since(t0));
  try {
    write_text_file(ctx.path("summary.txt"), ctx.summary.str());
    write_text_file(ctx.path("timing.txt"), ctx.timing.str());
  } catch (const Error&) {
    return code == ExitOk ? ExitIo : code;
  }
  return code;
}

}  // namespace vwlab
