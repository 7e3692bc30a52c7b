#include "vwlab/potential.hpp"

#include <algorithm>
#include <cmath>

#include "vwlab/error.hpp"

namespace vwlab {

const char* to_string(SourceTag tag) noexcept {
  switch (tag) {
    case SourceTag::Phi0: return "phi0";
    case SourceTag::Memory: return "memory";
    case SourceTag::Rescaled: return "rescaled";
    case SourceTag::Limit: return "limit";
    case SourceTag::DirectWave: return "direct-wave";
    case SourceTag::Combined: return "combined";
  }
  return "unknown";
}

double WaveInitialData::x_extent() const {
  double m = 0.0;
  for (const auto* list : {&psi0, &psi1}) {
    for (const auto& w : *list) m = std::max(m, std::abs(w.center) + w.x_profile.support_radius());
  }
  return m;
}

void WaveInitialData::validate(int n_expected) const {
  require(n == n_expected, ErrorKind::InvalidInput,
          "wave data dimension " + std::to_string(n) + " differs from sigma2 dimension " +
              std::to_string(n_expected));
  for (const auto* list : {&psi0, &psi1}) {
    for (const auto& w : *list) {
      require(w.x_profile.dim() == 1, ErrorKind::InvalidInput, "wave x-profile must be 1D");
      require(w.y_profile.dim() == n, ErrorKind::InvalidInput,
              "wave y-profile dimension differs from n");
      require(std::isfinite(w.center), ErrorKind::Hypothesis, "(H3) wave data must be finite");
    }
  }
}

namespace {

// int a(x - ca) b(x - cb) dx for 1D profiles.
double overlap_1d(const FormFactor& a, double ca, const FormFactor& b, double cb) {
  const double lo = std::max(ca - a.support_radius(), cb - b.support_radius());
  const double hi = std::min(ca + a.support_radius(), cb + b.support_radius());
  if (hi <= lo) return 0.0;
  return integrate_gl([&](double x) { return a(x - ca) * b(x - cb); }, lo, hi, 16);
}

double gradient_overlap(const FormFactor& a, const FormFactor& b) {
  const double R = std::min(a.support_radius(), b.support_radius());
  const int d = a.dim();
  return sphere_area(d) *
         integrate_gl([&](double s) { return std::pow(s, d - 1) * a.derivative(s) * b.derivative(s); },
                      0.0, R, 32);
}

}  // namespace

double WaveInitialData::vibrational_energy(double c, double lambda) const {
  double kin = 0.0, ela = 0.0;
  for (const auto& p : psi1) {
    for (const auto& q : psi1) {
      kin += overlap_1d(p.x_profile, p.center, q.x_profile, q.center) *
             p.y_profile.radial_integral([&](double s) { return q.y_profile(s); });
    }
  }
  for (const auto& p : psi0) {
    for (const auto& q : psi0) {
      ela += overlap_1d(p.x_profile, p.center, q.x_profile, q.center) *
             gradient_overlap(p.y_profile, q.y_profile);
    }
  }
  return (0.5 * kin + 0.5 * c * c * ela) / lambda;
}

PotentialField PotentialField::zeros(const Grid1D& grid, SourceTag tag) {
  PotentialField p;
  p.grid = grid;
  p.values.assign(grid.n, 0.0);
  p.gradient.assign(grid.n, 0.0);
  p.source = tag;
  return p;
}

HermiteCell PotentialField::eval(double x) const {
  const double h = grid.step();
  const double u = (x - grid.lo) / h - 0.5;
  // Virtual zero nodes at -1 and n close the interpolant.
  if (!(u > -1.0 && u < grid.n)) return {0.0, 0.0};
  const int i = static_cast<int>(std::floor(u));
  const double s = u - i;
  const double y0 = i >= 0 ? values[i] : 0.0, m0 = i >= 0 ? gradient[i] : 0.0;
  const double y1 = i + 1 < grid.n ? values[i + 1] : 0.0;
  const double m1 = i + 1 < grid.n ? gradient[i + 1] : 0.0;
  return hermite(s, h, y0, m0, y1, m1);
}

double PotentialField::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double PotentialField::gradient_sup_norm() const {
  double m = 0.0;
  for (double v : gradient) m = std::max(m, std::abs(v));
  return m;
}

PotentialField& PotentialField::add(const PotentialField& other, double scale) {
  require(other.grid == grid, ErrorKind::InvalidInput, "potential fields live on different grids");
  for (int i = 0; i < grid.n; ++i) {
    values[i] += scale * other.values[i];
    gradient[i] += scale * other.gradient[i];
  }
  source = SourceTag::Combined;
  return *this;
}

void GridConvolution::init(double support) {
  h_ = src_.step();
  require(std::abs(dst_.step() - h_) <= 1e-12 * h_, ErrorKind::InvalidInput,
          "convolution grids must share their spacing");
  const double shift = (src_.lo - dst_.lo) / h_;
  offset_ = static_cast<int>(std::lround(shift));
  require(std::abs(shift - offset_) < 1e-9, ErrorKind::InvalidInput,
          "convolution grids must be aligned");
  reach_ = static_cast<int>(std::floor(support / h_));
  k_.assign(2 * reach_ + 1, 0.0);
  dk_.assign(2 * reach_ + 1, 0.0);
}

void GridConvolution::run(const std::vector<double>& kern, std::span<const double> u,
                          std::span<double> out) const {
  require(static_cast<int>(u.size()) == src_.n && static_cast<int>(out.size()) == dst_.n,
          ErrorKind::InvalidInput, "convolution input size mismatch");
  const int ns = src_.n;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < dst_.n; ++i) {
    // x_i - y_j = (i - offset - j) h
    const int c = i - offset_;
    const int jlo = std::max(0, c - reach_), jhi = std::min(ns - 1, c + reach_);
    double acc = 0.0;
    for (int j = jlo; j <= jhi; ++j) acc += kern[c - j + reach_] * u[j];
    out[i] = acc * h_;
  }
}

void GridConvolution::apply(std::span<const double> u, std::span<double> out) const {
  run(k_, u, out);
}

void GridConvolution::apply_derivative(std::span<const double> u, std::span<double> out) const {
  run(dk_, u, out);
}

GridConvolution sigma_convolution(const ConvolvedProfile& Sigma, const Grid1D& src,
                                  const Grid1D& dst) {
  return GridConvolution(
      src, dst, Sigma.support_radius(), [&](double x) { return Sigma(std::abs(x)); },
      [&](double x) { return Sigma.derivative_1d(x); });
}

GridConvolution sigma1_convolution(const FormFactor& sigma1, const Grid1D& src, const Grid1D& dst) {
  require(sigma1.dim() == 1, ErrorKind::UnsupportedDimension, "gridded transport needs a 1D sigma1");
  return GridConvolution(
      src, dst, sigma1.support_radius(), [&](double x) { return sigma1(x); },
      [&](double x) { return sigma1.derivative(x); });
}

InitialPotential::InitialPotential(const WaveInitialData& wave, const FormFactor& sigma1,
                                   const FormFactor& sigma2, double c, const Grid1D& grid)
    : grid_(grid), n_(sigma2.dim()), c_(c) {
  require(c > 0.0, ErrorKind::InvalidParameter, "wave speed must be > 0");
  require(sigma1.dim() == 1, ErrorKind::UnsupportedDimension, "gridded transport needs a 1D sigma1");
  wave.validate(n_);
  if (wave.empty() || sigma1.is_zero() || sigma2.is_zero()) return;

  double rb = sigma2.support_radius();
  for (const auto* list : {&wave.psi0, &wave.psi1}) {
    for (const auto& w : *list) rb = std::max(rb, w.y_profile.support_radius());
  }
  dr_ = 0.025 / rb;
  std::size_t m = static_cast<std::size_t>(std::ceil(spectral_cutoff(sigma2) / dr_)) + 1;
  if (m % 2 == 0) ++m;
  std::vector<double> s2(m);
  for (std::size_t j = 0; j < m; ++j) s2[j] = radial_fourier(sigma2, j * dr_);
  const double cn = spectral_prefactor(n_);
  const double R1 = sigma1.support_radius();

  auto add_term = [&](const WaveTerm& w, bool velocity) {
    Term t;
    t.velocity = velocity;
    t.xv.resize(grid.n);
    t.xg.resize(grid.n);
    const double Ra = w.x_profile.support_radius();
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.node(i);
      const double lo = std::max(x - R1, w.center - Ra), hi = std::min(x + R1, w.center + Ra);
      if (hi <= lo) {
        t.xv[i] = t.xg[i] = 0.0;
        continue;
      }
      t.xv[i] = integrate_gl([&](double z) { return sigma1(x - z) * w.x_profile(z - w.center); },
                             lo, hi, 8);
      t.xg[i] = integrate_gl(
          [&](double z) { return sigma1.derivative(x - z) * w.x_profile(z - w.center); }, lo, hi, 8);
    }
    t.weight.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double r = j * dr_;
      const double b = radial_fourier(w.y_profile, r);
      if (!velocity) {
        t.weight[j] = cn * std::pow(r, n_ - 1) * s2[j] * b;
      } else if (n_ >= 2) {
        t.weight[j] = cn * std::pow(r, n_ - 2) * s2[j] * b / c;
      } else {
        t.weight[j] = cn * s2[j] * b;  // combined with t sinc(c r t) at evaluation
      }
    }
    terms_.push_back(std::move(t));
  };
  for (const auto& w : wave.psi0) add_term(w, false);
  for (const auto& w : wave.psi1) add_term(w, true);
}

PotentialField InitialPotential::at(double t) const {
  require(t >= 0.0, ErrorKind::InvalidParameter, "time must be >= 0");
  PotentialField out = PotentialField::zeros(grid_, SourceTag::Phi0);
  for (const auto& term : terms_) {
    double factor;
    if (!term.velocity) {
      factor = filon(term.weight, dr_, c_ * t, Trig::Cos);
    } else if (n_ >= 2) {
      factor = filon(term.weight, dr_, c_ * t, Trig::Sin);
    } else {
      // Simpson on weight * t sinc(c r t).
      const std::size_t m = term.weight.size();
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double a = c_ * j * dr_ * t;
        const double sinc = a == 0.0 ? 1.0 : std::sin(a) / a;
        const double w = (j == 0 || j + 1 == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        acc += w * term.weight[j] * t * sinc;
      }
      factor = acc * dr_ / 3.0;
    }
    for (int i = 0; i < grid_.n; ++i) {
      out.values[i] += factor * term.xv[i];
      out.gradient[i] += factor * term.xg[i];
    }
  }
  return out;
}

double InitialPotential::c1_bound(double t, int samples) const {
  if (terms_.empty()) return 0.0;
  double best = 0.0;
  for (int s = 0; s <= samples; ++s) {
    const auto f = at(t * s / samples);
    best = std::max(best, f.sup_norm() + f.gradient_sup_norm());
  }
  return best;
}

PotentialField initial_potential(double t, const WaveInitialData& wave, const FormFactor& sigma1,
                                 const FormFactor& sigma2, double c, const Grid1D& grid) {
  return InitialPotential(wave, sigma1, sigma2, c, grid).at(t);
}

MemoryHistory::MemoryHistory(double dt) : dt_(dt) {
  require(dt > 0.0, ErrorKind::InvalidParameter, "history step must be > 0");
}

void MemoryHistory::push(std::vector<double> S, std::vector<double> dS) {
  require(S.size() == dS.size(), ErrorKind::InvalidInput, "history snapshot size mismatch");
  require(S_.empty() || S.size() == S_.front().size(), ErrorKind::InvalidInput,
          "history snapshot size changed");
  S_.push_back(std::move(S));
  dS_.push_back(std::move(dS));
}

void MemoryHistory::truncate(std::size_t count) {
  if (count < S_.size()) {
    S_.resize(count);
    dS_.resize(count);
  }
}

namespace {

void check_history(const MemoryHistory& h, std::size_t k, const Grid1D& grid) {
  require(h.size() > k, ErrorKind::MissingHistory,
          "history holds " + std::to_string(h.size()) + " snapshots, step " + std::to_string(k) +
              " needs " + std::to_string(k + 1));
  require(static_cast<int>(h.S(0).size()) == grid.n, ErrorKind::InvalidInput,
          "history snapshots do not match the field grid");
}

}  // namespace

PotentialField memory_potential(const MemoryHistory& history, const KernelTable& kernel,
                                std::size_t k, const Grid1D& grid) {
  check_history(history, k, grid);
  const double dt = history.dt();
  require(std::abs(kernel.dt() - dt) <= 1e-12 * dt, ErrorKind::InvalidInput,
          "kernel table step differs from history step");
  require(kernel.size() > k, ErrorKind::TableTooShort,
          "kernel table ends before t = " + std::to_string(k * dt) + "; extend it");
  PotentialField out = PotentialField::zeros(grid, SourceTag::Memory);
  for (std::size_t j = 0; j <= k; ++j) {
    const double w = (j == 0 || j == k) ? 0.5 : 1.0;
    const double coef = w * kernel[k - j] * dt;
    if (coef == 0.0) continue;
    const auto& S = history.S(j);
    const auto& dS = history.dS(j);
    for (int i = 0; i < grid.n; ++i) {
      out.values[i] += coef * S[i];
      out.gradient[i] += coef * dS[i];
    }
  }
  return out;
}

RescaledStep rescaled_step(double dt, double eps, double du_max) {
  require(eps > 0.0 && eps <= 1.0, ErrorKind::InvalidParameter, "eps must lie in (0, 1]");
  require(dt > 0.0 && du_max > 0.0, ErrorKind::InvalidParameter, "steps must be > 0");
  const double se = std::sqrt(eps);
  const int m = std::max(1, static_cast<int>(std::ceil(dt / (se * du_max) - 1e-9)));
  return {m, dt / (se * m)};
}

PotentialField rescaled_memory_potential(const MemoryHistory& history, const KernelTable& q_table,
                                         std::size_t k, double eps, const Grid1D& grid,
                                         double du_max) {
  check_history(history, k, grid);
  const auto st = rescaled_step(history.dt(), eps, du_max);
  require(std::abs(q_table.dt() - st.du) <= 1e-12 * st.du && q_table.wave_speed() == 1.0,
          ErrorKind::InvalidInput, "rescaled kernel table must use c = 1 and the rescaled step");
  const std::size_t last = k * st.substeps;
  require(q_table.size() > last, ErrorKind::TableTooShort,
          "kernel table ends at u = " + std::to_string(q_table.t_max()) + " but t/sqrt(eps) = " +
              std::to_string(last * st.du) + "; extend it");
  PotentialField out = PotentialField::zeros(grid, SourceTag::Rescaled);
  const std::size_t m = st.substeps;
  std::vector<double> coef(k + 1, 0.0);
  // Fold the u-quadrature onto history snapshots; descending u matches memory_potential order.
  for (std::size_t ii = last + 1; ii-- > 0;) {
    const double w = (ii == 0 || ii == last) ? 0.5 : 1.0;
    const double c = w * q_table[ii] * st.du;
    const std::size_t a = ii / m, b = ii % m;
    if (b == 0) {
      coef[k - a] += c;
    } else {
      const double frac = static_cast<double>(b) / static_cast<double>(m);
      coef[k - a] += (1.0 - frac) * c;
      coef[k - a - 1] += frac * c;
    }
  }
  for (std::size_t j = 0; j <= k; ++j) {
    if (coef[j] == 0.0) continue;
    const auto& S = history.S(j);
    const auto& dS = history.dS(j);
    for (int i = 0; i < grid.n; ++i) {
      out.values[i] += coef[j] * S[i];
      out.gradient[i] += coef[j] * dS[i];
    }
  }
  return out;
}

PotentialField limit_potential(const MemoryHistory& history, std::size_t k, double kappa,
                               const Grid1D& grid) {
  check_history(history, k, grid);
  PotentialField out = PotentialField::zeros(grid, SourceTag::Limit);
  const auto& S = history.S(k);
  const auto& dS = history.dS(k);
  for (int i = 0; i < grid.n; ++i) {
    out.values[i] = -kappa * S[i];
    out.gradient[i] = -kappa * dS[i];
  }
  return out;
}

PotentialField limit_potential(const MacroDensity& rho, const ConvolvedProfile& Sigma,
                               double kappa, const Grid1D& grid) {
  const auto conv = sigma_convolution(Sigma, rho.x, grid);
  PotentialField out = PotentialField::zeros(grid, SourceTag::Limit);
  conv.apply(rho.rho, out.values);
  conv.apply_derivative(rho.rho, out.gradient);
  for (int i = 0; i < grid.n; ++i) {
    out.values[i] *= -kappa;
    out.gradient[i] *= -kappa;
  }
  return out;
}

DirectWaveSolver::DirectWaveSolver(const WaveInitialData& wave, const FormFactor& sigma1,
                                   const FormFactor& sigma2, double c, double lambda,
                                   const Grid1D& density_grid, const Grid1D& field_grid,
                                   double horizon, double dr_scale)
    : n_(sigma2.dim()), c_(c), lambda_(lambda), horizon_(horizon), field_(field_grid) {
  require(c > 0.0 && lambda > 0.0 && dr_scale > 0.0, ErrorKind::InvalidParameter,
          "wave solver needs c > 0, lambda > 0, dr_scale > 0");
  wave.validate(n_);
  s1rho_ = sigma1_convolution(sigma1, density_grid, field_grid);
  s1w_ = sigma1_convolution(sigma1, field_grid, field_grid);

  double rb = sigma2.support_radius();
  for (const auto* list : {&wave.psi0, &wave.psi1}) {
    for (const auto& w : *list) rb = std::max(rb, w.y_profile.support_radius());
  }
  double dr = pi / (10.0 * rb);
  if (horizon > 0.0) dr = std::min(dr, 2.0 * pi / (20.0 * c * horizon));
  dr_ = dr * dr_scale;
  const std::size_t m = static_cast<std::size_t>(std::ceil(spectral_cutoff(sigma2) / dr_)) + 1;
  r_.resize(m);
  sh_.resize(m);
  contract_.resize(m);
  const double cn = spectral_prefactor(n_);
  for (std::size_t j = 0; j < m; ++j) {
    r_[j] = j * dr_;
    sh_[j] = radial_fourier(sigma2, r_[j]);
    const double w = (j == 0 || j + 1 == m) ? 0.5 : 1.0;
    contract_[j] = cn * std::pow(r_[j], n_ - 1) * w * dr_;
  }

  const std::size_t nx = field_grid.n;
  psi_.assign(nx * m, 0.0);
  psit_.assign(nx * m, 0.0);
  auto load = [&](const std::vector<WaveTerm>& terms, std::vector<double>& dst) {
    for (const auto& w : terms) {
      std::vector<double> bh(m);
      for (std::size_t j = 0; j < m; ++j) bh[j] = radial_fourier(w.y_profile, r_[j]);
      for (std::size_t i = 0; i < nx; ++i) {
        const double a = w.x_profile(field_grid.node(static_cast<int>(i)) - w.center);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < m; ++j) dst[i * m + j] += a * bh[j];
      }
    }
  };
  load(wave.psi0, psi_);
  load(wave.psi1, psit_);
  force_.assign(nx, 0.0);
}

std::vector<double> DirectWaveSolver::forcing(const MacroDensity& rho) const {
  std::vector<double> g(field_.n);
  s1rho_.apply(rho.rho, g);
  return g;
}

void DirectWaveSolver::start(const MacroDensity& rho0) {
  force_ = forcing(rho0);
  t_ = 0.0;
  started_ = true;
}

void DirectWaveSolver::advance(const MacroDensity& rho_next, double h) {
  require(started_, ErrorKind::MissingHistory, "wave solver advanced before start()");
  require(h > 0.0, ErrorKind::InvalidParameter, "wave step must be > 0");
  const auto g1 = forcing(rho_next);
  const std::size_t m = r_.size(), nx = field_.n;
  std::vector<double> C(m), S(m), A(m), B(m), W2S(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double w = c_ * r_[j], th = w * h;
    if (th < 1e-3) {
      const double w2 = w * w, h2 = h * h;
      C[j] = std::cos(th);
      S[j] = h * (1.0 - w2 * h2 / 6.0);
      A[j] = h2 * (0.5 - w2 * h2 / 24.0);
      B[j] = h2 * h * (1.0 / 6.0 - w2 * h2 / 120.0);
    } else {
      C[j] = std::cos(th);
      S[j] = std::sin(th) / w;
      A[j] = (1.0 - C[j]) / (w * w);
      B[j] = (th - std::sin(th)) / (w * w * w);
    }
    W2S[j] = w * w * S[j];
  }
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < nx; ++i) {
    const double g0 = force_[i], dg = (g1[i] - g0) / h;
    double* ps = &psi_[i * m];
    double* pt = &psit_[i * m];
    for (std::size_t j = 0; j < m; ++j) {
      const double src = -lambda_ * sh_[j];
      const double F0 = src * g0, dF = src * dg;
      const double p = ps[j], q = pt[j];
      ps[j] = C[j] * p + S[j] * q + A[j] * F0 + B[j] * dF;
      pt[j] = -W2S[j] * p + C[j] * q + S[j] * F0 + A[j] * dF;
    }
  }
  force_ = g1;
  t_ += h;
  if (horizon_ > 0.0 && t_ > horizon_ * (1.0 + 1e-9)) {
    if (!warned_) {
      warn("radial wavenumber grid sized for t <= " + std::to_string(horizon_) +
           " is under-resolved at t = " + std::to_string(t_));
      warned_ = true;
    }
  }
}

PotentialField DirectWaveSolver::potential() const {
  const std::size_t m = r_.size(), nx = field_.n;
  std::vector<double> w(nx, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < nx; ++i) {
    double acc = 0.0;
    const double* ps = &psi_[i * m];
    for (std::size_t j = 0; j < m; ++j) acc += contract_[j] * sh_[j] * ps[j];
    w[i] = acc;
  }
  PotentialField out = PotentialField::zeros(field_, SourceTag::DirectWave);
  s1w_.apply(w, out.values);
  s1w_.apply_derivative(w, out.gradient);
  return out;
}

WaveEnergy DirectWaveSolver::energy() const {
  const std::size_t m = r_.size(), nx = field_.n;
  double kin = 0.0, ela = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    double k = 0.0, e = 0.0;
    const double* ps = &psi_[i * m];
    const double* pt = &psit_[i * m];
    for (std::size_t j = 0; j < m; ++j) {
      k += contract_[j] * pt[j] * pt[j];
      e += contract_[j] * r_[j] * r_[j] * ps[j] * ps[j];
    }
    kin += k;
    ela += e;
  }
  const double hx = field_.step();
  return {0.5 * kin * hx / lambda_, 0.5 * c_ * c_ * ela * hx / lambda_};
}

PotentialField direct_wave_potential(std::span<const MacroDensity> history, double dt,
                                     const WaveInitialData& wave, const FormFactor& sigma1,
                                     const FormFactor& sigma2, double c, const Grid1D& field_grid,
                                     double dr_scale) {
  require(!history.empty(), ErrorKind::MissingHistory, "direct wave potential needs a density history");
  const double horizon = dt * static_cast<double>(history.size() - 1);
  DirectWaveSolver solver(wave, sigma1, sigma2, c, 1.0, history.front().x, field_grid, horizon,
                          dr_scale);
  solver.start(history.front());
  for (std::size_t k = 1; k < history.size(); ++k) solver.advance(history[k], dt);
  return solver.potential();
}

}  // namespace vwlab
