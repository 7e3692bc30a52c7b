#include "vwlab/asymptotics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "vwlab/error.hpp"

namespace vwlab {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double wave_l2(const std::vector<WaveTerm>& terms) {
  double acc = 0.0;
  for (const auto& w : terms) {
    acc += std::sqrt(w.x_profile.l2_norm_squared() * w.y_profile.l2_norm_squared());
  }
  return acc;
}

}  // namespace

void validate_plan(const EpsilonSweepPlan& plan) {
  const auto& e = plan.eps_list;
  require(!e.empty(), ErrorKind::InvalidParameter, "eps_list is empty");
  for (std::size_t i = 0; i < e.size(); ++i) {
    require(e[i] > 0.0 && e[i] <= 1.0, ErrorKind::InvalidParameter, "eps must lie in (0, 1]");
    require(i == 0 || e[i] < e[i - 1], ErrorKind::InvalidParameter, "eps_list must be strictly decreasing");
  }
  require(plan.T_star > 0.0, ErrorKind::InvalidParameter, "T_star must be > 0");
  require(plan.window_start >= 0.0 && plan.window_start <= 1.0, ErrorKind::InvalidParameter,
          "window_start must lie in [0, 1]");
  const auto& s = plan.base;
  require(s.sigma2.dim() >= 3, ErrorKind::DivergentConstant,
          "the limit needs kappa = int_0^inf q, which is infinite for n <= 2");
  require(s.V.nonnegative(), ErrorKind::Hypothesis, "(H7) the sweep needs V >= 0");
  require(std::isfinite(s.f0.sup()), ErrorKind::Hypothesis, "(H9) f0 must be bounded");
  for (double eps : e) {
    const double E = s.wave.vibrational_energy(1.0 / std::sqrt(eps), 1.0 / eps);
    require(std::isfinite(E), ErrorKind::Hypothesis, "(H8) rescaled initial wave energy must be finite");
  }
}

SweepResult run_epsilon_sweep(const EpsilonSweepPlan& plan) {
  validate_plan(plan);
  SweepResult res;
  res.kappa = KernelSpectrum(plan.base.sigma2).kappa();

  TransportSetup lim = plan.base;
  lim.coupling = Coupling::Limit;
  lim.T = plan.T_star;
  lim.wave_energy = false;
  lim.compare_direct = false;
  lim.snapshot_stride = 0;
  auto t0 = std::chrono::steady_clock::now();
  const RunRecord lrec = self_consistent_simulate(lim);
  res.limit_runtime = seconds_since(t0);
  res.limit_diag = lrec.steps.back().diag;
  const MacroDensity rho_lim = lrec.final_state.density();

  const SlicedWasserstein w1(plan.base.x, plan.base.v, plan.directions);
  const double s1 = std::sqrt(plan.base.sigma1.gradient_l2_norm_squared());
  const double s2 = std::sqrt(plan.base.sigma2.l2_norm_squared());
  const double bound = s1 * s2 * (wave_l2(plan.base.wave.psi0) + plan.T_star * wave_l2(plan.base.wave.psi1));

  for (double eps : plan.eps_list) {
    TransportSetup s = lim;
    s.coupling = Coupling::Rescaled;
    s.eps = eps;
    t0 = std::chrono::steady_clock::now();
    const RunRecord rec = self_consistent_simulate(s);
    SweepMember m;
    m.eps = eps;
    m.runtime = seconds_since(t0);
    m.final_diag = rec.steps.back().diag;
    m.w1 = w1(rec.final_state, lrec.final_state);
    const MacroDensity rho = rec.final_state.density();
    for (std::size_t i = 0; i < rho.rho.size(); ++i) m.rho_l1 += std::abs(rho.rho[i] - rho_lim.rho[i]);
    m.rho_l1 *= rho.x.step();
    const double t_window = plan.window_start * plan.T_star;
    for (std::size_t k = 0; k < rec.steps.size(); ++k) {
      if (k * s.dt >= t_window - 1e-12) m.phi0_probe = std::max(m.phi0_probe, rec.steps[k].phi0_grad_sup);
    }
    m.phi0_bound = bound;
    res.members.push_back(m);
  }
  res.strictly_decreasing = true;
  for (std::size_t i = 1; i < res.members.size(); ++i) {
    if (!(res.members[i].w1 < res.members[i - 1].w1)) res.strictly_decreasing = false;
  }
  return res;
}

std::vector<FrozenRhoRow> frozen_rho_check(const FormFactor& sigma1, const FormFactor& sigma2,
                                           const MacroDensity& rho, const std::vector<double>& eps_list,
                                           const std::vector<double>& times, double dt) {
  require(sigma2.dim() >= 3, ErrorKind::DivergentConstant, "kappa is infinite for n <= 2");
  require(!times.empty() && !eps_list.empty(), ErrorKind::InvalidParameter, "empty eps or time list");
  double t_max = 0.0;
  for (double t : times) {
    require(t > 0.0, ErrorKind::InvalidParameter, "frozen-rho check needs t > 0");
    t_max = std::max(t_max, t);
  }
  const Grid1D& x = rho.x;
  const Grid1D fg = x.padded(static_cast<int>(std::ceil(2.0 * sigma1.support_radius() / x.step())) + 2);
  const ConvolvedProfile Sigma = self_convolve(sigma1);
  const GridConvolution conv = sigma_convolution(Sigma, x, fg);
  std::vector<double> S(fg.n), dS(fg.n);
  conv.apply(rho.rho, S);
  conv.apply_derivative(rho.rho, dS);
  double smax = 0.0;
  for (double v : S) smax = std::max(smax, std::abs(v));

  const auto N = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
  MemoryHistory hist(dt);
  for (std::size_t k = 0; k <= N; ++k) hist.push(S, dS);

  const KernelSpectrum spec(sigma2);
  const double kap = spec.kappa(), K = spec.tail_constant();
  std::vector<FrozenRhoRow> rows;
  for (double eps : eps_list) {
    require(eps > 0.0 && eps <= 1.0, ErrorKind::InvalidParameter, "eps must lie in (0, 1]");
    const RescaledStep st = rescaled_step(dt, eps);
    const KernelTable q(spec, 1.0, st.du, N * st.substeps * st.du);
    // Trapezoid error in u is at most du^2/12 * |q'(U) - q'(0)| <= du^2/6 * max|q'|.
    double qprime = 0.0;
    for (std::size_t j = 1; j < q.size(); ++j) qprime = std::max(qprime, std::abs(q[j] - q[j - 1]) / st.du);
    const double slack = st.du * st.du / 6.0 * qprime * smax;
    for (double t : times) {
      const auto k = static_cast<std::size_t>(std::llround(t / dt));
      const PotentialField L = rescaled_memory_potential(hist, q, k, eps, fg);
      FrozenRhoRow r;
      r.eps = eps;
      r.t = k * dt;
      for (int i = 0; i < fg.n; ++i) r.error = std::max(r.error, std::abs(L.values[i] - kap * S[i]));
      r.bound = K * std::sqrt(eps) / r.t * smax + slack;
      r.satisfied = r.error <= r.bound;
      rows.push_back(r);
    }
  }
  return rows;
}

double interpolation_constant(double m, int d) {
  require(m > 0.0 && d >= 1, ErrorKind::InvalidParameter, "interpolation needs m > 0, d >= 1");
  return 2.0 * std::pow(ball_volume(d), m / (m + d));
}

InterpolationResult interpolation_check(const PhaseSpaceState& f, double m) {
  const double C = interpolation_constant(m, 1);
  const double hx = f.x.step(), hv = f.v.step();
  double sup = 0.0, mom = 0.0, lhs = 0.0;
  for (int i = 0; i < f.x.n; ++i) {
    double rho = 0.0;
    for (int j = 0; j < f.v.n; ++j) {
      const double a = f.at(i, j);
      rho += a;
      sup = std::max(sup, a);
      mom += std::pow(std::abs(f.v.node(j)), m) * a;
    }
    rho *= hv;
    lhs += std::pow(rho, 1.0 + m);
  }
  InterpolationResult r;
  r.lhs = std::pow(lhs * hx, 1.0 / (1.0 + m));
  r.rhs = C * std::pow(sup, m / (1.0 + m)) * std::pow(mom * hx * hv, 1.0 / (1.0 + m));
  r.satisfied = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

InitialProfile random_profile(std::mt19937_64& rng, const Grid1D& x, const Grid1D& v, int max_bumps) {
  require(max_bumps >= 1, ErrorKind::InvalidParameter, "max_bumps must be >= 1");
  std::uniform_int_distribution<int> count(1, max_bumps);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double span = std::min(x.hi - x.lo, v.hi - v.lo);
  std::vector<PhaseBump> bumps(count(rng));
  for (auto& b : bumps) {
    b.radius = span * (0.08 + 0.17 * unit(rng));
    b.x = x.lo + b.radius + (x.hi - x.lo - 2 * b.radius) * unit(rng);
    b.v = v.lo + b.radius + (v.hi - v.lo - 2 * b.radius) * unit(rng);
    b.mass = 0.1 + 1.9 * unit(rng);
  }
  return InitialProfile(std::move(bumps));
}

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values) {
  require(eps.size() == values.size() && eps.size() >= 2, ErrorKind::InvalidParameter,
          "a rate fit needs at least two matching points");
  RateFit r;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    require(eps[i] > 0.0 && values[i] > 0.0, ErrorKind::InvalidParameter,
            "rate fit needs positive abscissae and values");
    r.abscissae.push_back(std::log(eps[i]));
    r.ordinates.push_back(std::log(values[i]));
  }
  const LinearFit f = linear_fit(r.abscissae, r.ordinates);
  r.slope = f.slope;
  r.intercept = f.intercept;
  r.residual = f.residual;
  return r;
}

VpKernelStudy vp_kernel_rate_study(const std::vector<double>& eps_list, double q_exp,
                                   const GapNormOptions& opt) {
  require(q_exp > 1.5 && std::isfinite(q_exp), ErrorKind::InvalidParameter,
          "q_exp must lie in (3/2, inf)");
  require(eps_list.size() >= 2, ErrorKind::InvalidParameter, "rate study needs >= 2 eps values");
  VpKernelStudy s;
  s.eps = eps_list;
  for (double e : eps_list) {
    s.gaps.push_back(kernel_gap_norm(e, q_exp, opt));
    s.inner.push_back(inner_factor_norm(e, 2.0, 3, opt.radial_panels));
  }
  s.gaps_decreasing = true;
  for (std::size_t i = 1; i < s.gaps.size(); ++i) {
    if (!(s.gaps[i] < s.gaps[i - 1])) s.gaps_decreasing = false;
  }
  s.gap_fit = fit_rate(s.eps, s.gaps);
  s.inner_fit = fit_rate(s.eps, s.inner);
  GapNormOptions off = opt;
  off.cutoff = false;
  s.control_gap = kernel_gap_norm(eps_list.front(), q_exp, off);
  return s;
}

RescaledEnergy rescaled_energy(const PhaseSpaceState& f, const PotentialField& phi,
                               const ExternalPotential& V, const DirectWaveSolver* wave) {
  RescaledEnergy e;
  if (wave) {
    const WaveEnergy we = wave->energy();
    e.terms = total_energy(f, phi, V, &we);
    e.partial = false;
  } else {
    e.terms = total_energy(f, phi, V);
  }
  return e;
}

double hls_ratio(const FormFactor& g) {
  require(g.dim() == 3, ErrorKind::UnsupportedDimension, "HLS ratio is implemented for d = 3");
  require(!g.is_zero(), ErrorKind::InvalidInput, "HLS ratio undefined for g = 0");
  const std::size_t n = 4001;
  const double R = g.support_radius(), h = R / (n - 1);
  std::vector<double> a(n), b(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = i * h, v = g(r);
    a[i] = r * r * v;
    b[i] = r * v;
    c[i] = r * r * std::pow(v, 1.2);
  }
  const auto A = cumulative_integral(a, h);
  const auto B = cumulative_integral(b, h);
  const auto Cn = cumulative_integral(c, h);
  std::vector<double> inner(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = i * h;
    const double U = 4.0 * pi * ((i == 0 ? 0.0 : A[i] / r) + (B[n - 1] - B[i]));
    inner[i] = a[i] * U;
  }
  const double I = 4.0 * pi * cumulative_integral(inner, h).back();
  const double norm = std::pow(4.0 * pi * Cn.back(), 5.0 / 6.0);
  return I / (norm * norm);
}

double hls_sharp_constant() {
  return std::sqrt(pi) / std::tgamma(2.5) * std::pow(std::tgamma(1.5) / std::tgamma(3.0), -2.0 / 3.0);
}

}  // namespace vwlab
