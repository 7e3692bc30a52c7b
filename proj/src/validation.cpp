#include "vwlab/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "vwlab/asymptotics.hpp"
#include "vwlab/error.hpp"

namespace vwlab {

namespace {

class Detail {
 public:
  template <class T>
  Detail& kv(const char* key, T value) {
    if (!first_) os_ << ' ';
    first_ = false;
    os_ << key << '=' << value;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_ = [] {
    std::ostringstream o;
    o.precision(4);
    return o;
  }();
  bool first_ = true;
};

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

void say(const ProgressFn& log, const std::string& msg) {
  if (log) log(msg);
}

// ---- 1 ------------------------------------------------------------------------------------

bool kernel_limit(Detail& d) {
  const KernelSpectrum spec(FormFactor::bump(3, 1.0, 1.0));
  const KernelTable table(spec, 1.0, 0.01, 200.0);
  const double kap = table.kappa(), K = table.tail_K();
  d.kv("kappa", kap).kv("K", K);
  bool ok = true;
  for (double T : {50.0, 100.0, 200.0}) {
    const double err = std::abs(table.partial_integral(T) - kap);
    const double bound = K / T + 1e-4 * kap;
    d.kv(("err_T" + std::to_string(static_cast<int>(T))).c_str(), err);
    ok = ok && err <= bound;
  }
  return ok;
}

// ---- 2 ------------------------------------------------------------------------------------

bool n2_divergence(Detail& d) {
  const KernelSpectrum spec(FormFactor::bump(2, 1.0, 1.0));
  const KernelTable table(spec, 1.0, 0.02, 1000.0);
  std::vector<double> lx, y;
  for (double T : {10.0, 100.0, 1000.0}) {
    lx.push_back(std::log(T));
    y.push_back(table.partial_integral(T));
  }
  const LinearFit fit = linear_fit(lx, y);
  const double spread = max_of(y) - *std::min_element(y.begin(), y.end());
  const double rel = spread > 0 ? fit.residual / spread : std::numeric_limits<double>::infinity();
  d.kv("I10", y[0]).kv("I100", y[1]).kv("I1000", y[2]).kv("slope", fit.slope).kv("rel_residual", rel);
  return fit.slope > 0 && rel < 0.05;
}

// ---- 3 ------------------------------------------------------------------------------------

bool speed_scaling(Detail& d) {
  const KernelSpectrum spec(FormFactor::bump(3, 1.0, 1.0));
  const int n = spec.n();
  const double pref = spectral_prefactor(n);
  const auto& sh = spec.sigma_hat();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(0.0, 50.0), uc(0.1, 10.0);
  std::vector<double> g(sh.size());
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double t = ut(rng), c = uc(rng);
    // p from its own definition: int sin(c r t)/(c r) r^{n-1} |sigma2_hat|^2.
    for (std::size_t j = 0; j < sh.size(); ++j) {
      const double r = spec.dr() * static_cast<double>(j);
      g[j] = pref * std::pow(r, n - 2) * sh[j] * sh[j] / c;
    }
    const double direct = filon(g, spec.dr(), c * t, Trig::Sin);
    worst = std::max(worst, std::abs(direct - spec.q(c * t) / c));
  }
  d.kv("max_dev", worst);
  return worst <= 1e-10;
}

// ---- 4 ------------------------------------------------------------------------------------

double max_direct_gap(TransportSetup s) {
  s.coupling = Coupling::Memory;
  s.compare_direct = true;
  s.wave_energy = false;
  const RunRecord rec = self_consistent_simulate(s);
  double g = 0.0;
  for (const auto& st : rec.steps)
    if (!std::isnan(st.direct_gap)) g = std::max(g, st.direct_gap);
  return g;
}

bool reduction(Detail& d, const ProgressFn& log) {
  TransportSetup s = reference_setup();
  s.T = 1.0;
  s.dt = 0.02;
  s.dr_scale = 1.0;
  say(log, "reduction: dt = 0.02");
  const double g1 = max_direct_gap(s);
  s.dt = 0.01;
  s.dr_scale = 0.5;
  say(log, "reduction: dt = 0.01");
  const double g2 = max_direct_gap(s);
  const double order = std::log2(g1 / g2);
  d.kv("gap_coarse", g1).kv("gap_fine", g2).kv("order", order);
  return g1 <= 1e-3 && g2 < g1 && order >= 1.0;
}

// ---- 5 ------------------------------------------------------------------------------------

struct Drifts {
  double mass = 0.0, energy = 0.0, clipped = 0.0;
};

Drifts drifts(TransportSetup s) {
  s.coupling = Coupling::Memory;
  s.wave_energy = true;
  const RunRecord rec = self_consistent_simulate(s);
  Drifts out;
  const double m0 = rec.steps.front().diag.mass, e0 = rec.steps.front().diag.total();
  for (const auto& st : rec.steps) {
    out.mass = std::max(out.mass, std::abs(st.diag.mass - m0) / m0);
    out.energy = std::max(out.energy, std::abs(st.diag.total() - e0) / std::abs(e0));
    out.clipped = std::max(out.clipped, st.clipped_mass / m0);
  }
  return out;
}

bool conservation(Detail& d, const ProgressFn& log) {
  TransportSetup s = reference_setup();
  s.T = 2.0;
  s.dt = 0.02;
  say(log, "conservation: dt = 0.02");
  const Drifts a = drifts(s);
  s.dt = 0.01;
  say(log, "conservation: dt = 0.01");
  const Drifts b = drifts(s);
  const double ratio = b.energy / a.energy;
  const double mass_rate = std::max(a.mass, b.mass) / s.T;
  d.kv("mass_drift_per_time", mass_rate)
      .kv("clipped", std::max(a.clipped, b.clipped))
      .kv("energy_drift", a.energy)
      .kv("energy_drift_half", b.energy)
      .kv("ratio", ratio);
  return mass_rate <= 1e-6 && a.energy <= 1e-2 && ratio >= 0.35 && ratio <= 0.65;
}

// ---- 6 ------------------------------------------------------------------------------------

bool picard(Detail& d, const ProgressFn& log) {
  TransportSetup s = reference_setup();
  s.sigma1 = FormFactor::bump(1, 0.5, 2.0);
  s.sigma2 = FormFactor::bump(3, 1.0, 2.0);
  s.T = 1.0;
  s.dt = 0.02;
  s.coupling = Coupling::Memory;
  s.wave_energy = false;
  PicardOptions opt;
  opt.tol = 1e-10;
  opt.max_iterations = 30;
  say(log, "picard: iterating");
  const PicardResult pr = picard_solve(s, opt);
  say(log, "picard: marching reference");
  SimulateOptions so;
  so.keep_states = true;
  const RunRecord rec = self_consistent_simulate(s, so);
  const SlicedWasserstein w1(s.x, s.v, opt.directions);
  double dist = 0.0;
  const std::size_t nk = std::min(rec.states.size(), pr.fixed_point.size());
  for (std::size_t k = 0; k < nk; ++k) dist = std::max(dist, w1(rec.states[k], pr.fixed_point[k]));

  const auto& g = pr.gaps;
  bool decreasing = g.size() >= 4;
  for (std::size_t l = 2; l + 1 < g.size(); ++l) decreasing = decreasing && g[l + 1] < g[l];
  bool ratios = g.size() >= 4;
  for (std::size_t l = 1; l + 2 < g.size(); ++l)
    ratios = ratios && g[l + 2] / g[l + 1] < g[l + 1] / g[l] && g[l + 1] / g[l] < 1.0;
  std::ostringstream seq;
  seq.precision(3);
  for (std::size_t l = 0; l < g.size(); ++l) seq << (l ? "," : "") << g[l];
  d.kv("gaps", seq.str()).kv("converged", pr.converged).kv("dist_marching", dist).kv("tol", opt.tol);
  return pr.converged && decreasing && ratios && nk == rec.states.size() && dist <= 5 * opt.tol;
}

// ---- 7 ------------------------------------------------------------------------------------

bool sweep(Detail& d, const ProgressFn& log) {
  EpsilonSweepPlan plan;
  plan.base = reference_setup();
  plan.base.dt = 0.02;
  say(log, "sweep: running limit and rescaled members");
  const SweepResult res = run_epsilon_sweep(plan);
  const auto& m = res.members;
  std::ostringstream seq;
  seq.precision(3);
  for (std::size_t i = 0; i < m.size(); ++i) seq << (i ? "," : "") << m[i].w1;
  const bool halved = !m.empty() && m.back().w1 <= 0.5 * m.front().w1;

  const PhaseSpaceState f0 = plan.base.f0.sample(plan.base.x, plan.base.v);
  const auto rows = frozen_rho_check(plan.base.sigma1, plan.base.sigma2, f0.density(), plan.eps_list,
                                     {0.1, 0.5, 1.0});
  int bad = 0;
  double worst = 0.0;
  for (const auto& r : rows) {
    bad += r.satisfied ? 0 : 1;
    worst = std::max(worst, r.error / r.bound);
  }
  d.kv("w1", seq.str()).kv("frozen_violations", bad).kv("frozen_worst_ratio", worst);
  return res.strictly_decreasing && halved && bad == 0;
}

// ---- 8 ------------------------------------------------------------------------------------

bool vp_kernel(Detail& d) {
  const std::vector<double> eps{1.0, 0.25, 1.0 / 16.0, 1.0 / 64.0};
  const VpKernelStudy st = vp_kernel_rate_study(eps, 2.0);
  const double c3 = coulomb_constant(3);
  const double c3_err = std::abs(c3 - 1.0 / (2.0 * pi * pi));
  d.kv("gaps_decreasing", st.gaps_decreasing)
      .kv("inner_slope", st.inner_fit.slope)
      .kv("control_gap", st.control_gap)
      .kv("C3_err", c3_err);
  return st.gaps_decreasing && std::abs(st.inner_fit.slope - 0.75) <= 0.15 && st.control_gap <= 1e-6 &&
         c3_err <= 1e-6;
}

// ---- 9 ------------------------------------------------------------------------------------

bool interpolation(Detail& d) {
  const Grid1D x{-4.0, 4.0, 128}, v{-4.0, 4.0, 128};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> um(0.5, 3.0);
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const InitialProfile prof = random_profile(rng, x, v);
    const double m = um(rng);
    const InterpolationResult r = interpolation_check(prof.sample(x, v), m);
    bad += r.satisfied ? 0 : 1;
    worst = std::max(worst, r.lhs / r.rhs);
  }
  d.kv("violations", bad).kv("worst_ratio", worst);
  return bad == 0;
}

// ---- 10 -----------------------------------------------------------------------------------

// Relative max error after harmonic rotation by angle t; whole periods land back on nodes, so
// only generic angles expose the interpolation error.
double rotation_error(int cells, double t, int steps) {
  const Grid1D g{-4.0, 4.0, cells};
  const InitialProfile prof({PhaseBump{-0.4, 0.3, 2.0, 1.0}});
  const PhaseSpaceState f0 = prof.sample(g, g);
  const PushforwardResult r = liouville_pushforward(f0, ExternalPotential::harmonic(1.0), t, steps);
  const double c = std::cos(t), s = std::sin(t);
  double err = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double x = g.node(i), v = g.node(j);
      err = std::max(err, std::abs(r.state.at(i, j) - prof(x * c - v * s, x * s + v * c)));
    }
  return err / f0.sup();
}

bool transport_oracles(Detail& d) {
  const ExternalPotential zero = ExternalPotential::zero();
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double ch = 0.0, rot = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const FlowPoint p{u(rng), u(rng)};
    // RK4 is exact on straight lines, so a coarse step isolates rounding.
    const FlowPoint q = trace_flow(p, 0.0, 3.0, zero, 0.1);
    ch = std::max({ch, std::abs(q.X - (p.X + 3.0 * p.Xi)), std::abs(q.Xi - p.Xi)});
    const FlowPoint r = trace_flow(p, 0.0, pi / 2, ExternalPotential::harmonic(1.0));
    rot = std::max({rot, std::abs(r.X - p.Xi), std::abs(r.Xi + p.X)});
  }

  const Grid1D g{-4.0, 4.0, 256};
  const InitialProfile prof({PhaseBump{-0.4, 0.3, 2.0, 1.0}});
  const PhaseSpaceState f0 = prof.sample(g, g);
  const double t = 0.5;
  const PushforwardResult fr = liouville_pushforward(f0, zero, t, 5);
  double grid_err = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      grid_err = std::max(grid_err, std::abs(fr.state.at(i, j) - prof(g.node(i) - t * g.node(j), g.node(j))));
  grid_err /= f0.sup();

  const double period = rotation_error(256, 2 * pi, 400);
  const double e64 = rotation_error(64, 1.0, 100), e128 = rotation_error(128, 1.0, 100),
               e256 = rotation_error(256, 1.0, 100);
  const double order = std::log2(e128 / e256);
  d.kv("free_char", ch)
      .kv("rotation_char", rot)
      .kv("free_grid", grid_err)
      .kv("period_return", period)
      .kv("rot1_64", e64)
      .kv("rot1_128", e128)
      .kv("rot1_256", e256)
      .kv("order", order);
  return ch <= 1e-12 && rot <= 1e-8 && grid_err <= 1e-4 && period <= 1e-4 && e256 <= 1e-4 && order >= 2.0;
}

// ---- 11 -----------------------------------------------------------------------------------

bool w1_oracle(Detail& d) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-3.0, 3.0), uw(0.05, 1.0);
  const int m = 16;
  double cdf_err = 0.0, sliced_err = 0.0;
  auto weights = [&] {
    std::vector<double> w(m);
    double s = 0.0;
    for (auto& x : w) s += (x = uw(rng));
    for (auto& x : w) x /= s;
    return w;
  };
  const Grid1D gx{0.0, 2.0, 2}, gv{-2.0, 2.0, m};  // mass only in the first x cell
  const SlicedWasserstein sliced(gx, gv, 1);  // one direction: the v axis
  std::vector<double> nodes(m);
  for (int j = 0; j < m; ++j) nodes[j] = gv.node(j);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> x(m), y(m);
    for (auto& p : x) p = ux(rng);
    for (auto& p : y) p = ux(rng);
    const auto wx = weights(), wy = weights();
    const double lp = transport_lp(x, wx, y, wy);
    const double cdf = wasserstein1_1d(Distribution1D::from_atoms(x, wx), Distribution1D::from_atoms(y, wy));
    cdf_err = std::max(cdf_err, std::abs(lp - cdf));

    const auto a = weights(), b = weights();
    PhaseSpaceState fa(gx, gv), fb(gx, gv);
    for (int j = 0; j < m; ++j) {
      fa.at(0, j) = a[j] / fa.cell_volume();
      fb.at(0, j) = b[j] / fb.cell_volume();
    }
    sliced_err = std::max(sliced_err, std::abs(sliced(fa, fb) - transport_lp(nodes, a, nodes, b)));
  }
  d.kv("cdf_vs_lp", cdf_err).kv("sliced_vs_lp", sliced_err);
  return cdf_err <= 1e-8 && sliced_err <= 1e-8;
}

struct Spec {
  int id;
  const char* name;
  double limit;
};

constexpr Spec kSpecs[] = {
    {1, "kernel limit", 10},          {2, "n=2 divergence", 30},
    {3, "speed scaling", 1},          {4, "reduction equivalence", 300},
    {5, "conservation", 300},         {6, "picard contraction", 600},
    {7, "epsilon sweep", 1200},       {8, "vp kernel core", 120},
    {9, "interpolation inequality", 10}, {10, "exact transport oracles", 120},
    {11, "w1 oracle", 30},
};

}  // namespace

TransportSetup reference_setup(int cells) {
  TransportSetup s;
  s.x = Grid1D{-4.0, 4.0, cells};
  s.v = Grid1D{-4.0, 4.0, cells};
  s.f0 = InitialProfile({PhaseBump{-0.4, 0.3, 2.0, 1.0}});
  s.V = ExternalPotential::harmonic(1.0);
  s.sigma1 = FormFactor::bump(1, 0.5, 1.0);
  s.sigma2 = FormFactor::bump(3, 1.0, 1.0);
  s.wave.n = 3;
  s.wave.psi0 = {WaveTerm{0.5, FormFactor::bump(1, 1.0, 1.0), FormFactor::bump(3, 1.0, 1.0)}};
  s.wave.psi1 = {WaveTerm{-0.5, FormFactor::bump(1, 1.0, 0.5), FormFactor::bump(3, 1.0, 1.0)}};
  s.dt = 0.02;
  s.T = 1.0;
  return s;
}

std::vector<int> all_criteria() {
  std::vector<int> ids;
  for (const auto& s : kSpecs) ids.push_back(s.id);
  return ids;
}

CriterionResult run_criterion(int id, const ProgressFn& log) {
  const auto it = std::find_if(std::begin(kSpecs), std::end(kSpecs), [&](const Spec& s) { return s.id == id; });
  require(it != std::end(kSpecs), ErrorKind::InvalidParameter, "unknown criterion " + std::to_string(id));
  CriterionResult out;
  out.id = id;
  out.name = it->name;
  out.limit_seconds = it->limit;
  Detail d;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    switch (id) {
      case 1: ok = kernel_limit(d); break;
      case 2: ok = n2_divergence(d); break;
      case 3: ok = speed_scaling(d); break;
      case 4: ok = reduction(d, log); break;
      case 5: ok = conservation(d, log); break;
      case 6: ok = picard(d, log); break;
      case 7: ok = sweep(d, log); break;
      case 8: ok = vp_kernel(d); break;
      case 9: ok = interpolation(d); break;
      case 10: ok = transport_oracles(d); break;
      case 11: ok = w1_oracle(d); break;
    }
  } catch (const Error& e) {
    d.kv("error", std::string(to_string(e.kind())) + ": " + e.what());
    ok = false;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.pass = ok && out.seconds < out.limit_seconds;
  out.detail = d.str();
  return out;
}

double transport_lp(std::span<const double> x, std::span<const double> wx, std::span<const double> y,
                    std::span<const double> wy) {
  require(x.size() == wx.size() && y.size() == wy.size(), ErrorKind::InvalidInput, "size mismatch");
  // Successive shortest paths on source -> x_i -> y_j -> sink; Bellman-Ford handles the
  // negative reverse costs.
  const int nx = static_cast<int>(x.size()), ny = static_cast<int>(y.size());
  const int S = 0, T = nx + ny + 1, N = nx + ny + 2;
  struct Edge {
    int to;
    double cap, cost;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj(N);
  auto add = [&](int a, int b, double cap, double cost) {
    adj[a].push_back(static_cast<int>(edges.size()));
    edges.push_back({b, cap, cost});
    adj[b].push_back(static_cast<int>(edges.size()));
    edges.push_back({a, 0.0, -cost});
  };
  double total = 0.0;
  for (int i = 0; i < nx; ++i) {
    add(S, 1 + i, wx[i], 0.0);
    total += wx[i];
  }
  for (int j = 0; j < ny; ++j) add(1 + nx + j, T, wy[j], 0.0);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) add(1 + i, 1 + nx + j, std::numeric_limits<double>::infinity(), std::abs(x[i] - y[j]));

  const double floor = 1e-15 * std::max(total, 1e-300);
  double sent = 0.0, cost = 0.0;
  for (int guard = 0; guard < 100 * N * N && total - sent > floor; ++guard) {
    std::vector<double> dist(N, std::numeric_limits<double>::infinity());
    std::vector<int> via(N, -1);
    dist[S] = 0.0;
    for (int round = 0; round < N; ++round) {
      bool changed = false;
      for (int a = 0; a < N; ++a) {
        if (!std::isfinite(dist[a])) continue;
        for (int e : adj[a]) {
          if (edges[e].cap <= floor) continue;
          const double nd = dist[a] + edges[e].cost;
          if (nd < dist[edges[e].to] - 1e-15) {
            dist[edges[e].to] = nd;
            via[edges[e].to] = e;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (via[T] < 0) break;
    double push = total - sent;
    for (int v = T; v != S; v = edges[via[v] ^ 1].to) push = std::min(push, edges[via[v]].cap);
    for (int v = T; v != S; v = edges[via[v] ^ 1].to) {
      edges[via[v]].cap -= push;
      edges[via[v] ^ 1].cap += push;
    }
    sent += push;
    cost += push * dist[T];
  }
  return cost;
}

}  // namespace vwlab
