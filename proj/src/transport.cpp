#include "vwlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "vwlab/error.hpp"

namespace vwlab {

const char* to_string(Coupling c) noexcept {
  switch (c) {
    case Coupling::None: return "none";
    case Coupling::Memory: return "memory";
    case Coupling::DirectWave: return "direct-wave";
    case Coupling::Rescaled: return "rescaled";
    case Coupling::Limit: return "limit";
  }
  return "unknown";
}

FieldHistory::FieldHistory(double dt) : dt_(dt) {
  require(dt > 0.0, ErrorKind::InvalidParameter, "field history step must be > 0");
}

void FieldHistory::push(PotentialField field) {
  const auto& v = field.values;
  const auto& g = field.gradient;
  const int n = field.grid.n;
  const double h = field.grid.step();
  const double scale = std::max(1.0, std::max(field.sup_norm(), field.gradient_sup_norm()));
  double edge = 0.0;
  for (int i : {0, 1, n - 2, n - 1}) {
    if (i >= 0 && i < n) edge = std::max({edge, std::abs(v[i]), std::abs(g[i])});
  }
  SlopeTable t{field.grid.lo, 1.0 / h, n, edge > 1e-14 * scale, {}};
  t.coef.resize(n + 1);
  for (int c = 0; c <= n; ++c) {
    const int i = c - 1;
    const double y0 = i >= 0 ? v[i] : 0.0, m0 = i >= 0 ? g[i] : 0.0;
    const double y1 = i + 1 < n ? v[i + 1] : 0.0, m1 = i + 1 < n ? g[i + 1] : 0.0;
    const double D = (y0 - y1) / h;
    t.coef[c] = {m0, -6.0 * D - 4.0 * m0 - 2.0 * m1, 6.0 * D + 3.0 * m0 + 3.0 * m1};
  }
  slopes_.push_back(std::move(t));
  fields_.push_back(std::move(field));
}

void FieldHistory::truncate(std::size_t count) {
  if (count < fields_.size()) {
    fields_.resize(count);
    slopes_.resize(count);
  }
}

double FieldHistory::gradient(std::size_t k, double x) const {
  const auto& t = slopes_[k];
  const double u = (x - t.lo) * t.inv_h - 0.5;
  if (!(u > -1.0 && u < t.n)) [[unlikely]] {
    if (t.open_edge) {
      std::ostringstream os;
      os << "characteristic reached x = " << x << " outside the potential box ["
         << fields_[k].grid.lo << ", " << fields_[k].grid.hi
         << "] where the field is nonzero; enlarge the grid to the a-priori radius";
      fail(ErrorKind::OutOfDomain, os.str());
    }
    return 0.0;
  }
  const double w = u + 1.0;
  const int c = static_cast<int>(w);
  const double s = w - c;
  const auto& q = t.coef[c];
  return q[0] + s * (q[1] + s * q[2]);
}

namespace {

template <class Accel>
inline void rk4_step(double& X, double& Xi, double h, Accel&& acc) {
  const double k1x = Xi, k1v = acc(X);
  const double k2x = Xi + 0.5 * h * k1v, k2v = acc(X + 0.5 * h * k1x);
  const double k3x = Xi + 0.5 * h * k2v, k3v = acc(X + 0.5 * h * k2x);
  const double k4x = Xi + h * k3v, k4v = acc(X + h * k3x);
  X += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  Xi += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

}  // namespace

FlowPoint trace_flow(FlowPoint p, double t0, double t1, const FieldHistory& phi,
                     const ExternalPotential& V, double max_step) {
  require(max_step > 0.0, ErrorKind::InvalidParameter, "max_step must be > 0");
  const double dt = phi.dt();
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  double t = t0;
  while (dir * (t1 - t) > 1e-14 * std::max(1.0, std::abs(t1))) {
    const double u = t / dt;
    long k;
    double edge;
    if (dir > 0) {
      k = static_cast<long>(std::floor(u + 1e-9));
      edge = std::min(t1, (k + 1) * dt);
    } else {
      k = static_cast<long>(std::ceil(u - 1e-9)) - 1;
      edge = std::max(t1, k * dt);
    }
    require(k >= 0 && static_cast<std::size_t>(k) < phi.size(), ErrorKind::MissingHistory,
            "potential history does not cover t = " + std::to_string(t));
    const double L = edge - t;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(L) / max_step - 1e-9)));
    const double h = L / steps;
    const std::size_t kk = static_cast<std::size_t>(k);
    auto acc = [&](double x) { return -V.gradient(x) - phi.gradient(kk, x); };
    for (int s = 0; s < steps; ++s) rk4_step(p.X, p.Xi, h, acc);
    t = edge;
  }
  return p;
}

FlowPoint trace_flow(FlowPoint p, double t0, double t1, const ExternalPotential& V,
                     double max_step) {
  require(max_step > 0.0, ErrorKind::InvalidParameter, "max_step must be > 0");
  const double L = t1 - t0;
  if (L == 0.0) return p;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(L) / max_step - 1e-9)));
  const double h = L / steps;
  auto acc = [&](double x) { return -V.gradient(x); };
  for (int s = 0; s < steps; ++s) rk4_step(p.X, p.Xi, h, acc);
  return p;
}

double apriori_radius(double norm, double t, FlowPoint start, const ExternalPotential& V) {
  require(t >= 0.0 && norm >= 0.0, ErrorKind::InvalidParameter, "apriori_radius needs t, norm >= 0");
  const double C = V.lower_bound_constant();
  const double x2 = start.X * start.X;
  const double alpha = 2.0 * std::abs(V.value(start.X)) + 4.0 * norm + start.Xi * start.Xi + 2.0 * C;
  const double beta = 2.0 * norm;
  const double lam = 1.0 + 2.0 * C;
  const double e = std::exp(lam * t);
  const double X2 = x2 * e + alpha * (e - 1.0) / lam + beta * (e - 1.0 - lam * t) / (lam * lam);
  const double a_t = alpha + beta * t;
  const double Xi2 = 2.0 * C * X2 + a_t;
  return std::sqrt(X2 + Xi2);
}

namespace {

double bicubic(const PhaseSpaceState& f, double x, double v) {
  const double ux = (x - f.x.lo) / f.x.step() - 0.5;
  const double uv = (v - f.v.lo) / f.v.step() - 0.5;
  if (!(ux > -2.0 && ux < f.x.n + 1.0 && uv > -2.0 && uv < f.v.n + 1.0)) return 0.0;
  const int i = static_cast<int>(std::floor(ux)), j = static_cast<int>(std::floor(uv));
  const auto wx = lagrange4(ux - i), wv = lagrange4(uv - j);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    const int ii = i - 1 + a;
    if (ii < 0 || ii >= f.x.n) continue;
    const double* row = &f.f[static_cast<std::size_t>(ii) * f.v.n];
    double r = 0.0;
    for (int b = 0; b < 4; ++b) {
      const int jj = j - 1 + b;
      if (jj < 0 || jj >= f.v.n) continue;
      r += wv[b] * row[jj];
    }
    acc += wx[a] * r;
  }
  return acc;
}

void finish_pushforward(PushforwardResult& res) {
  auto& s = res.state;
  double clipped = 0.0, peak = 0.0;
  for (int i = 0; i < s.x.n; ++i) {
    double row = 0.0;
    for (int j = 0; j < s.v.n; ++j) {
      double& a = s.at(i, j);
      if (a < 0.0) {
        row -= a;
        a = 0.0;
      }
      peak = std::max(peak, a);
    }
    clipped += row;
  }
  res.clipped_mass = clipped * s.cell_volume();
  double ring = 0.0;
  for (int i = 0; i < s.x.n; ++i) ring = std::max({ring, s.at(i, 0), s.at(i, s.v.n - 1)});
  for (int j = 0; j < s.v.n; ++j) ring = std::max({ring, s.at(0, j), s.at(s.x.n - 1, j)});
  res.support_breach = peak > 0.0 && ring > 1e-12 * peak;
}

}  // namespace

PushforwardResult liouville_pushforward(const PhaseSpaceState& f0, const FieldHistory& phi,
                                        const ExternalPotential& V, std::size_t k) {
  require(phi.size() >= k, ErrorKind::MissingHistory,
          "pushforward to step " + std::to_string(k) + " needs " + std::to_string(k) + " fields");
  PushforwardResult res;
  res.state = PhaseSpaceState(f0.x, f0.v);
  res.state.t = k * phi.dt();
  if (k == 0) {
    res.state.f = f0.f;
    return res;
  }
  const double h = -phi.dt();
  const int nx = f0.x.n, nv = f0.v.n;
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nv; ++j) {
      double X = f0.x.node(i), Xi = f0.v.node(j);
      for (std::size_t m = k; m-- > 0;) {
        auto acc = [&](double x) { return -V.gradient(x) - phi.gradient(m, x); };
        rk4_step(X, Xi, h, acc);
      }
      res.state.at(i, j) = bicubic(f0, X, Xi);
    }
  }
  finish_pushforward(res);
  return res;
}

PushforwardResult liouville_pushforward(const PhaseSpaceState& f0, const ExternalPotential& V,
                                        double t, int steps) {
  require(steps >= 1, ErrorKind::InvalidParameter, "pushforward needs >= 1 step");
  PushforwardResult res;
  res.state = PhaseSpaceState(f0.x, f0.v);
  res.state.t = f0.t + t;
  if (t == 0.0) {
    res.state.f = f0.f;
    return res;
  }
  const double h = -t / steps;
  const int nx = f0.x.n, nv = f0.v.n;
  auto acc = [&](double x) { return -V.gradient(x); };
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nv; ++j) {
      double X = f0.x.node(i), Xi = f0.v.node(j);
      for (int s = 0; s < steps; ++s) rk4_step(X, Xi, h, acc);
      res.state.at(i, j) = bicubic(f0, X, Xi);
    }
  }
  finish_pushforward(res);
  return res;
}

Grid1D field_grid_for(const TransportSetup& s) {
  const double h = s.x.step();
  if (s.field_pad >= 0) return s.x.padded(s.field_pad);
  const double R1 = s.sigma1.support_radius();
  const double ext = s.wave.empty() ? 0.0 : s.wave.x_extent();
  const double lo_need = std::min(s.x.lo, -ext) - 2.0 * R1;
  const double hi_need = std::max(s.x.hi, ext) + 2.0 * R1;
  const double need = std::max(s.x.lo - lo_need, hi_need - s.x.hi);
  return s.x.padded(static_cast<int>(std::ceil(need / h)) + 2);
}

namespace {

std::size_t step_count(double T, double dt) {
  require(T > 0.0 && dt > 0.0, ErrorKind::InvalidParameter, "T and dt must be > 0");
  const double r = T / dt;
  const auto N = static_cast<std::size_t>(std::llround(r));
  require(std::abs(r - static_cast<double>(N)) < 1e-6 && N >= 1, ErrorKind::InvalidParameter,
          "T must be an integer multiple of dt");
  return N;
}

// Everything a coupled run derives from its setup once.
struct CouplingContext {
  Grid1D fg;
  ConvolvedProfile Sigma;
  GridConvolution conv;
  std::optional<KernelTable> table;
  std::optional<InitialPotential> phi0;
  double kappa = 0.0;
  double c_eff = 1.0, lambda = 1.0;
  RescaledStep rstep{1, 0.0};

  CouplingContext(const TransportSetup& s, std::size_t N) {
    fg = field_grid_for(s);
    require(s.sigma1.dim() == 1, ErrorKind::UnsupportedDimension,
            "gridded transport is one-dimensional; sigma1 must be 1D");
    Sigma = self_convolve(s.sigma1);
    conv = sigma_convolution(Sigma, s.x, fg);
    c_eff = s.c;
    if (s.coupling == Coupling::Rescaled) {
      require(s.eps > 0.0 && s.eps <= 1.0, ErrorKind::InvalidParameter, "eps must lie in (0, 1]");
      c_eff = 1.0 / std::sqrt(s.eps);
      lambda = 1.0 / s.eps;
    }
    if (s.coupling == Coupling::None) return;
    const KernelSpectrum spec(s.sigma2);
    switch (s.coupling) {
      case Coupling::Memory:
        table.emplace(spec, s.c, s.dt, N * s.dt);
        break;
      case Coupling::Rescaled:
        rstep = rescaled_step(s.dt, s.eps, s.du_max);
        table.emplace(spec, 1.0, rstep.du, N * rstep.substeps * rstep.du);
        break;
      case Coupling::Limit:
        kappa = spec.kappa();
        break;
      default:
        break;
    }
    if (s.coupling != Coupling::Limit) phi0.emplace(s.wave, s.sigma1, s.sigma2, c_eff, fg);
  }

  void push_density(const MacroDensity& rho, MemoryHistory& hist) const {
    std::vector<double> S(fg.n), dS(fg.n);
    conv.apply(rho.rho, S);
    conv.apply_derivative(rho.rho, dS);
    hist.push(std::move(S), std::move(dS));
  }

  PotentialField field(const TransportSetup& s, const MemoryHistory& hist, std::size_t k,
                       const DirectWaveSolver* wave) const {
    const double t = k * s.dt;
    switch (s.coupling) {
      case Coupling::None:
        return PotentialField::zeros(fg, SourceTag::Combined);
      case Coupling::Memory: {
        auto f = phi0->at(t);
        f.add(memory_potential(hist, *table, k, fg), -1.0);
        return f;
      }
      case Coupling::DirectWave:
        return wave->potential();
      case Coupling::Rescaled: {
        auto f = phi0->at(t);
        f.add(rescaled_memory_potential(hist, *table, k, s.eps, fg, s.du_max), -1.0);
        return f;
      }
      case Coupling::Limit:
        return limit_potential(hist, k, kappa, fg);
    }
    return PotentialField::zeros(fg, SourceTag::Combined);
  }
};

void check_cfl(const TransportSetup& s, const PhaseSpaceState& f0) {
  double vmax = 0.0;
  for (int i = 0; i < f0.x.n; ++i) {
    for (int j = 0; j < f0.v.n; ++j) {
      if (f0.at(i, j) > 0.0) vmax = std::max(vmax, std::abs(f0.v.node(j)));
    }
  }
  const double cells = vmax * s.dt / s.x.step();
  if (cells > 2.0) {
    std::ostringstream os;
    os << "characteristics cross " << cells << " cells per step (> 2); accuracy may suffer";
    warn(os.str());
  }
}

}  // namespace

RunRecord self_consistent_simulate(const TransportSetup& s, const SimulateOptions& opt) {
  const std::size_t N = step_count(s.T, s.dt);
  const CouplingContext ctx(s, N);
  RunRecord rec;
  rec.field_grid = ctx.fg;
  const PhaseSpaceState f0 = s.f0.sample(s.x, s.v);
  rec.mass0 = f0.mass();
  require(rec.mass0 > 0.0, ErrorKind::Hypothesis, "(H4) initial density must have positive mass");
  check_cfl(s, f0);

  const bool use_wave = s.coupling == Coupling::DirectWave ||
                        (s.coupling == Coupling::Memory && (s.wave_energy || s.compare_direct));
  std::optional<DirectWaveSolver> wave;
  if (use_wave) {
    wave.emplace(s.wave, s.sigma1, s.sigma2, ctx.c_eff, ctx.lambda, s.x, ctx.fg, s.T, s.dr_scale);
  }
  MemoryHistory hist(s.dt);
  FieldHistory fields(s.dt);

  for (std::size_t k = 0; k <= N; ++k) {
    PushforwardResult pf;
    if (k == 0) {
      pf.state = f0;
    } else {
      pf = liouville_pushforward(f0, fields, s.V, k);
    }
    if (pf.support_breach && !rec.support_breach) {
      warn("support of f reached the phase-space box boundary at t = " +
           std::to_string(k * s.dt) + "; enlarge the grid toward the a-priori radius");
      rec.support_breach = true;
    }
    const MacroDensity rho = pf.state.density();
    ctx.push_density(rho, hist);
    if (wave) {
      if (k == 0) {
        wave->start(rho);
      } else {
        wave->advance(rho, s.dt);
      }
    }
    PotentialField phi = ctx.field(s, hist, k, wave ? &*wave : nullptr);

    StepRecord st;
    st.clipped_mass = pf.clipped_mass;
    st.phi_sup = phi.sup_norm();
    st.grad_sup = phi.gradient_sup_norm();
    if (ctx.phi0) {
      const PotentialField p0 = ctx.phi0->at(k * s.dt);
      st.phi0_sup = p0.sup_norm();
      st.phi0_grad_sup = p0.gradient_sup_norm();
    }
    if (s.compare_direct && wave && s.coupling == Coupling::Memory) {
      const auto direct = wave->potential();
      double gap = 0.0;
      for (int i = 0; i < ctx.fg.n; ++i) gap = std::max(gap, std::abs(direct.values[i] - phi.values[i]));
      st.direct_gap = st.phi_sup > 0.0 ? gap / st.phi_sup : gap;
    }
    WaveEnergy we;
    const bool wave_terms = wave && (s.coupling == Coupling::Memory || s.coupling == Coupling::DirectWave);
    if (wave_terms) we = wave->energy();
    st.diag = total_energy(pf.state, phi, s.V, wave_terms ? &we : nullptr);
    if (opt.on_field) opt.on_field(k, pf.state, phi);
    fields.push(std::move(phi));

    const double drift = std::abs(st.diag.mass - rec.mass0) / rec.mass0;
    if (drift > s.mass_abort) {
      std::ostringstream os;
      os << "mass drift " << drift << " exceeds " << s.mass_abort << " at t = " << k * s.dt;
      fail(ErrorKind::SolverAbort, os.str());
    }
    if (opt.on_step) opt.on_step(st);
    rec.steps.push_back(st);
    if (s.snapshot_stride > 0 && k % static_cast<std::size_t>(s.snapshot_stride) == 0) {
      rec.snapshots.push_back(pf.state);
    }
    if (opt.keep_states) rec.states.push_back(pf.state);
    if (k == N) rec.final_state = std::move(pf.state);
  }
  return rec;
}

PicardResult picard_solve(const TransportSetup& s, const PicardOptions& opt) {
  require(s.coupling == Coupling::Memory || s.coupling == Coupling::None, ErrorKind::InvalidParameter,
          "Picard iteration runs on the memory formulation");
  require(opt.tol > 0.0 && opt.max_iterations >= 1, ErrorKind::InvalidParameter,
          "Picard needs tol > 0 and >= 1 iteration");
  const std::size_t N = step_count(s.T, s.dt);
  const CouplingContext ctx(s, N);
  const PhaseSpaceState f0 = s.f0.sample(s.x, s.v);
  require(f0.mass() > 0.0, ErrorKind::Hypothesis, "(H4) initial density must have positive mass");
  const SlicedWasserstein w1(s.x, s.v, opt.directions);

  std::vector<PotentialField> phi0(N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    phi0[k] = ctx.phi0 ? ctx.phi0->at(k * s.dt) : PotentialField::zeros(ctx.fg, SourceTag::Phi0);
  }
  auto transport = [&](const FieldHistory& fields) {
    std::vector<PhaseSpaceState> out(N + 1);
    for (std::size_t k = 0; k <= N; ++k) out[k] = liouville_pushforward(f0, fields, s.V, k).state;
    return out;
  };
  auto self_fields = [&](const std::vector<PhaseSpaceState>* states) {
    FieldHistory fields(s.dt);
    MemoryHistory hist(s.dt);
    for (std::size_t k = 0; k <= N; ++k) {
      PotentialField f = phi0[k];
      if (states && s.coupling == Coupling::Memory) {
        ctx.push_density((*states)[k].density(), hist);
        f.add(memory_potential(hist, *ctx.table, k, ctx.fg), -1.0);
      }
      fields.push(std::move(f));
    }
    return fields;
  };

  PicardResult res;
  std::vector<PhaseSpaceState> cur = transport(self_fields(nullptr));
  for (int l = 0; l < opt.max_iterations; ++l) {
    std::vector<PhaseSpaceState> next = transport(self_fields(&cur));
    double gap = 0.0;
    for (std::size_t k = 1; k <= N; ++k) gap = std::max(gap, w1(next[k], cur[k]));
    res.gaps.push_back(gap);
    cur = std::move(next);
    const std::size_t m = res.gaps.size();
    if (m >= 4 && res.gaps[m - 1] >= res.gaps[m - 2] && gap >= opt.tol) {
      res.diverging = true;
      warn("Picard gaps stopped decreasing after iteration 3; refine the discretization");
    }
    if (gap < opt.tol) {
      res.converged = true;
      break;
    }
  }
  res.fixed_point = std::move(cur);
  return res;
}

UniquenessCheck definition_check(const TransportSetup& s, bool sample_constant) {
  require(s.T > 0.0, ErrorKind::InvalidParameter, "T must be > 0");
  UniquenessCheck out;
  const double mass = s.f0.mass();
  double phi0_c1 = 0.0, phi0_c2 = 0.0;
  if (!s.wave.empty() && !s.sigma1.is_zero() && !s.sigma2.is_zero()) {
    // Own grid: the bound must not depend on the transport box it is used to size.
    const double W = s.wave.x_extent() + 2.0 * s.sigma1.support_radius() + 0.1;
    const Grid1D fg{-W, W, static_cast<int>(std::ceil(2.0 * W / 0.01))};
    const InitialPotential p0(s.wave, s.sigma1, s.sigma2, s.c, fg);
    phi0_c1 = p0.c1_bound(s.T, 32);
    const double h = fg.step();
    for (int m = 0; m <= 32; ++m) {
      const auto f = p0.at(s.T * m / 32.0);
      for (int i = 0; i + 1 < fg.n; ++i) phi0_c2 = std::max(phi0_c2, std::abs(f.gradient[i + 1] - f.gradient[i]) / h);
    }
  }
  const double s1w = s.sigma1.l2_norm_squared() + s.sigma1.gradient_l2_norm_squared();
  const double s2 = s.sigma2.l2_norm_squared();
  const ConvolvedProfile Sigma = self_convolve(s.sigma1);
  const double sigma_c2 = Sigma.max_abs_second();
  auto growth = [](double t) { return std::max(0.5 * t * t, t); };
  auto norm_at = [&](double t) { return phi0_c1 + s1w * s2 * growth(t) * mass; };
  out.norm_bound = norm_at(s.T);

  for (const auto& b : s.f0.bumps()) {
    for (int a = 0; a <= 64; ++a) {
      const double th = 2.0 * pi * a / 64.0;
      const double r = a == 64 ? 0.0 : b.radius;
      const FlowPoint z{b.x + r * std::cos(th), b.v + r * std::sin(th)};
      out.max_radius = std::max(out.max_radius, apriori_radius(out.norm_bound, s.T, z, s.V));
    }
  }

  if (!sample_constant) return out;
  const PhaseSpaceState f0 = s.f0.sample(s.x, s.v);
  const int nt = 32;
  double acc = 0.0;
  for (int i = 0; i < f0.x.n; ++i) {
    for (int j = 0; j < f0.v.n; ++j) {
      const double a = f0.at(i, j);
      if (a <= 0.0) continue;
      const FlowPoint z{f0.x.node(i), f0.v.node(j)};
      double integral = 0.0;
      for (int m = 0; m <= nt; ++m) {
        const double t = s.T * m / nt;
        const double r = apriori_radius(norm_at(t), t, z, s.V);
        const double hb = s.V.hessian_bound(r) + phi0_c2 + sigma_c2 * s2 * growth(t) * mass;
        integral += ((m == 0 || m == nt) ? 0.5 : 1.0) * hb;
      }
      acc += a * std::exp(integral * s.T / nt);
    }
  }
  out.constant = acc * f0.cell_volume();
  out.finite = std::isfinite(out.constant);
  return out;
}

void sample_particles(const InitialProfile& f0, int N, std::uint64_t seed,
                      std::vector<std::vector<double>>& x, std::vector<std::vector<double>>& v) {
  require(N >= 1 && !f0.bumps().empty(), ErrorKind::InvalidParameter,
          "particle sampling needs N >= 1 and a nonempty profile");
  double xlo = 1e300, xhi = -1e300, vlo = 1e300, vhi = -1e300, bound = 0.0;
  for (const auto& b : f0.bumps()) {
    xlo = std::min(xlo, b.x - b.radius);
    xhi = std::max(xhi, b.x + b.radius);
    vlo = std::min(vlo, b.v - b.radius);
    vhi = std::max(vhi, b.v + b.radius);
  }
  for (const auto& b : f0.bumps()) bound += f0(b.x, b.v);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(xlo, xhi), uv(vlo, vhi), uf(0.0, bound);
  x.assign(N, std::vector<double>(1));
  v.assign(N, std::vector<double>(1));
  for (int p = 0; p < N;) {
    const double a = ux(rng), b = uv(rng);
    if (uf(rng) < f0(a, b)) {
      x[p][0] = a;
      v[p][0] = b;
      ++p;
    }
  }
}

ParticleRecord nparticle_simulate(const ParticleSetup& s) {
  const std::size_t N = step_count(s.T, s.dt);
  const std::size_t P = s.x.size();
  const int d = s.d;
  require(P >= 1 && s.v.size() == P && s.weights.size() == P, ErrorKind::InvalidParameter,
          "N-particle mode needs N >= 1 with matching positions, velocities and weights");
  for (std::size_t p = 0; p < P; ++p) {
    require(static_cast<int>(s.x[p].size()) == d && static_cast<int>(s.v[p].size()) == d,
            ErrorKind::InvalidParameter, "particle coordinates must have dimension d");
  }
  require(s.sigma1.dim() == d, ErrorKind::InvalidInput, "sigma1 dimension must equal d");
  require(s.wave.empty() || d == 1, ErrorKind::UnsupportedDimension,
          "wave initial data in N-particle mode is supported for d = 1 only");
  const bool coupled = !s.sigma1.is_zero() && !s.sigma2.is_zero();
  const ConvolvedProfile Sigma = coupled ? self_convolve(s.sigma1) : ConvolvedProfile();
  std::optional<KernelTable> table;
  if (coupled) table.emplace(KernelSpectrum(s.sigma2), s.c, s.dt, N * s.dt);
  std::optional<InitialPotential> phi0;
  Grid1D pg;
  if (coupled && !s.wave.empty()) {
    const double W = s.wave.x_extent() + s.sigma1.support_radius() + 1.0;
    pg = Grid1D{-W, W, static_cast<int>(std::ceil(2 * W / 0.01))};
    phi0.emplace(s.wave, s.sigma1, s.sigma2, s.c, pg);
  }
  const double Rs = coupled ? Sigma.support_radius() : 0.0;

  ParticleRecord rec;
  rec.x.push_back(s.x);
  rec.v.push_back(s.v);
  rec.times.push_back(0.0);

  auto accel = [&](std::size_t k, const std::vector<std::vector<double>>& X) {
    std::vector<std::vector<double>> a(P, std::vector<double>(d, 0.0));
    std::optional<PotentialField> p0;
    if (phi0) p0 = phi0->at(k * s.dt);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < P; ++i) {
      auto& ai = a[i];
      for (int c = 0; c < d; ++c) ai[c] = -s.harmonic_k * X[i][c];
      ai[0] -= s.drift;
      if (p0) ai[0] -= p0->eval(X[i][0]).slope;
      if (!coupled) continue;
      // +grad L = sum_j w_j p(t_k - t_j) sum_l w_l Sigma'(|x - X_l(t_j)|) e
      for (std::size_t j = 0; j < k; ++j) {
        const double w = (j == 0 ? 0.5 : 1.0) * (*table)[k - j] * s.dt;
        if (w == 0.0) continue;
        const auto& Xj = rec.x[j];
        for (std::size_t l = 0; l < P; ++l) {
          double r2 = 0.0;
          for (int c = 0; c < d; ++c) {
            const double z = X[i][c] - Xj[l][c];
            r2 += z * z;
          }
          if (r2 == 0.0 || r2 >= Rs * Rs) continue;
          const double r = std::sqrt(r2);
          const double g = w * s.weights[l] * Sigma.slope(r) / r;
          for (int c = 0; c < d; ++c) ai[c] += g * (X[i][c] - Xj[l][c]);
        }
      }
    }
    return a;
  };

  auto X = s.x, V = s.v;
  auto A = accel(0, X);
  for (std::size_t k = 1; k <= N; ++k) {
    for (std::size_t i = 0; i < P; ++i) {
      for (int c = 0; c < d; ++c) X[i][c] += s.dt * V[i][c] + 0.5 * s.dt * s.dt * A[i][c];
    }
    auto An = accel(k, X);
    for (std::size_t i = 0; i < P; ++i) {
      for (int c = 0; c < d; ++c) V[i][c] += 0.5 * s.dt * (A[i][c] + An[i][c]);
    }
    A = std::move(An);
    rec.x.push_back(X);
    rec.v.push_back(V);
    rec.times.push_back(k * s.dt);
  }
  return rec;
}

}  // namespace vwlab
