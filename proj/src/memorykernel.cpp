#include "vwlab/memorykernel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "vwlab/error.hpp"

namespace vwlab {

double spectral_prefactor(int n) { return sphere_area(n) / std::pow(2.0 * pi, n); }

double spectral_cutoff(const FormFactor& s, double rel) {
  if (s.is_zero()) return 1.0 / s.support_radius();
  const int n = s.dim();
  const double R = s.support_radius();
  const double step = 0.5 / R;
  double peak = 0.0, last = step;
  for (int i = 1;; ++i) {
    const double k = i * step;
    const double sh = radial_fourier(s, k);
    const double v = std::pow(k, n - 1) * sh * sh;
    peak = std::max(peak, v);
    if (v >= rel * peak) last = k;
    if (k > 2.0 * last + 10.0 / R && k > 50.0 / R) break;
    if (k > 1e5 / R) break;
  }
  return last + step;
}

KernelSpectrum::KernelSpectrum(const FormFactor& sigma2, SpectrumOptions opt) : n_(sigma2.dim()) {
  require(opt.dr > 0.0 && opt.cutoff_rel > 0.0, ErrorKind::InvalidParameter,
          "spectrum options must be positive");
  zero_ = sigma2.is_zero();
  l2_sq_ = sigma2.l2_norm_squared();
  const double R = sigma2.support_radius();
  dr_ = opt.dr / R;
  const double rc = zero_ ? 4.0 * dr_ : spectral_cutoff(sigma2, opt.cutoff_rel);
  std::size_t m = static_cast<std::size_t>(std::ceil(rc / dr_)) + 1;
  if (m % 2 == 0) ++m;
  m = std::max<std::size_t>(m, 3);
  sigma_hat_.resize(m);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t j = 0; j < m; ++j) sigma_hat_[j] = radial_fourier(sigma2, j * dr_);

  const double cn = spectral_prefactor(n_);
  at_zero_sq_ = sigma_hat_[0] * sigma_hat_[0];
  weight_.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double r = j * dr_;
    const double e = sigma_hat_[j] * sigma_hat_[j];
    if (n_ >= 2) {
      weight_[j] = cn * std::pow(r, n_ - 2) * e;
    } else {
      // Gaussian subtraction removes the 1/r singularity; restored analytically in q().
      weight_[j] = j == 0 ? 0.0 : cn * (e - at_zero_sq_ * std::exp(-r * r)) / r;
    }
  }
}

double KernelSpectrum::q(double t) const {
  require(t >= 0.0 && std::isfinite(t), ErrorKind::InvalidParameter, "kernel time must be >= 0");
  if (zero_) return 0.0;
  double v = filon(weight_, dr_, t, Trig::Sin);
  if (n_ == 1) v += spectral_prefactor(1) * at_zero_sq_ * 0.5 * pi * std::erf(0.5 * t);
  return v;
}

double KernelSpectrum::p(double t, double c) const {
  require(t >= 0.0 && std::isfinite(t), ErrorKind::InvalidParameter, "kernel time must be >= 0");
  require(c > 0.0 && std::isfinite(c), ErrorKind::InvalidParameter, "wave speed must be > 0");
  return q(c * t) / c;
}

double KernelSpectrum::kappa() const {
  require(n_ >= 3, ErrorKind::DivergentConstant,
          "kappa = int |sigma2_hat|^2/|xi|^2 is infinite for n <= 2");
  if (zero_) return 0.0;
  const std::size_t m = sigma_hat_.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double r = j * dr_;
    const double f = std::pow(r, n_ - 3) * sigma_hat_[j] * sigma_hat_[j];
    const double w = (j == 0 || j + 1 == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    acc += w * f;
  }
  return spectral_prefactor(n_) * acc * dr_ / 3.0;
}

double KernelSpectrum::tail_constant() const {
  require(n_ >= 3, ErrorKind::UnsupportedDimension,
          "tail constant needs n >= 3 for the double integration by parts");
  if (zero_) return 0.0;
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(sigma_hat_.size());
  const double parity = (n_ % 2 == 0) ? 1.0 : -1.0;
  auto G = [&](std::ptrdiff_t j) -> double {
    if (j >= m) return 0.0;
    const std::ptrdiff_t a = j < 0 ? -j : j;
    const double r = a * dr_;
    const double v = std::pow(r, n_ - 2) * sigma_hat_[a] * sigma_hat_[a];
    return j < 0 ? parity * v : v;
  };
  const double h2 = dr_ * dr_;
  double acc = 0.0;
  for (std::ptrdiff_t j = 0; j < m; ++j) {
    const double d1 = (G(j + 1) - 2 * G(j) + G(j - 1)) / h2;
    const double d2 = (G(j + 2) - 2 * G(j) + G(j - 2)) / (4 * h2);
    const double w = (j == 0 || j + 1 == m) ? 0.5 : 1.0;
    acc += w * std::abs((4 * d1 - d2) / 3.0);
  }
  return spectral_prefactor(n_) * acc * dr_;
}

KernelTable::KernelTable(const KernelSpectrum& spectrum, double c, double dt, double t_max)
    : n_(spectrum.n()), c_(c), dt_(dt) {
  require(c > 0.0 && dt > 0.0 && t_max >= 0.0, ErrorKind::InvalidParameter,
          "kernel table needs c > 0, dt > 0, t_max >= 0");
  const std::size_t m = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9)) + 1;
  values_.resize(std::max<std::size_t>(m, 2));
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] = spectrum.p(k * dt, c);
  cumulative_ = cumulative_integral(values_, dt);
  kappa_ = n_ >= 3 ? spectrum.kappa() : std::numeric_limits<double>::quiet_NaN();
  tail_K_ = n_ >= 3 ? spectrum.tail_constant() : std::numeric_limits<double>::quiet_NaN();
  r_cut_ = spectrum.r_cut();
  nodes_ = spectrum.nodes();
}

double KernelTable::partial_integral(double T) const {
  require(T >= 0.0, ErrorKind::InvalidParameter, "partial integral horizon must be >= 0");
  require(T <= t_max() * (1 + 1e-12), ErrorKind::TableTooShort,
          "kernel table ends at t = " + std::to_string(t_max()) + ", extend it past " +
              std::to_string(T));
  const double u = T / dt_;
  std::size_t i = static_cast<std::size_t>(u);
  if (i + 1 >= values_.size()) i = values_.size() - 2;
  const double s = u - static_cast<double>(i);
  if (s == 0.0) return cumulative_[i];
  return hermite(s, dt_, cumulative_[i], values_[i], cumulative_[i + 1], values_[i + 1]).value;
}

double KernelTable::kappa() const {
  require(has_kappa(), ErrorKind::DivergentConstant, "kappa is infinite for n <= 2");
  return kappa_;
}

double KernelTable::tail_K() const {
  require(has_kappa(), ErrorKind::UnsupportedDimension, "tail constant needs n >= 3");
  return tail_K_;
}

void KernelTable::write_csv(std::ostream& os, const std::string& header) const {
  os << std::setprecision(17);
  if (!header.empty()) os << header;
  os << "# n=" << n_ << " c=" << c_ << " dt=" << dt_ << " r_cut=" << r_cut_
     << " nodes=" << nodes_ << "\n";
  os << "t,q,cumulative\n";
  for (std::size_t k = 0; k < values_.size(); ++k) {
    os << k * dt_ << ',' << values_[k] << ',' << cumulative_[k] << '\n';
  }
}

double eval_kernel(double t, double c, const FormFactor& sigma2) {
  require(t >= 0.0, ErrorKind::InvalidParameter, "kernel time must be >= 0");
  require(c > 0.0, ErrorKind::InvalidParameter, "wave speed must be > 0");
  if (sigma2.is_zero() || t == 0.0) return 0.0;
  return KernelSpectrum(sigma2).p(t, c);
}

double kappa(const FormFactor& sigma2, int n) {
  require(sigma2.dim() == n, ErrorKind::InvalidParameter, "sigma2 dimension differs from n");
  require(n >= 3, ErrorKind::DivergentConstant, "kappa is infinite for n <= 2");
  return KernelSpectrum(sigma2).kappa();
}

double partial_integral(double T, const FormFactor& sigma2, int n, double dt) {
  require(sigma2.dim() == n, ErrorKind::InvalidParameter, "sigma2 dimension differs from n");
  require(T >= 0.0, ErrorKind::InvalidParameter, "partial integral horizon must be >= 0");
  if (T == 0.0) return 0.0;
  KernelSpectrum spec(sigma2);
  return KernelTable(spec, 1.0, dt, T).partial_integral(T);
}

double tail_constant(const FormFactor& sigma2, int n) {
  require(sigma2.dim() == n, ErrorKind::InvalidParameter, "sigma2 dimension differs from n");
  return KernelSpectrum(sigma2).tail_constant();
}

}  // namespace vwlab
