#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "vwlab/formfactors.hpp"

namespace vwlab {

struct SpectrumOptions {
  double dr = 0.025;          // radial step times sigma2 support radius
  double cutoff_rel = 1e-14;  // truncate where r^{n-1}|sigma2_hat|^2 < cutoff_rel * max
};

// |S^{n-1}| / (2 pi)^n, the radial Plancherel weight in R^n.
double spectral_prefactor(int n);

// Wavenumber beyond which r^{n-1}|sigma_hat(r)|^2 stays below rel times its maximum.
double spectral_cutoff(const FormFactor& sigma, double rel = 1e-14);

// |sigma2_hat|^2 tabulated on a uniform radial grid, shared by all kernel evaluations.
class KernelSpectrum {
 public:
  explicit KernelSpectrum(const FormFactor& sigma2, SpectrumOptions opt = {});

  int n() const { return n_; }
  double dr() const { return dr_; }
  double r_cut() const { return dr_ * static_cast<double>(nodes() - 1); }
  std::size_t nodes() const { return sigma_hat_.size(); }
  const std::vector<double>& sigma_hat() const { return sigma_hat_; }
  double sigma2_l2_squared() const { return l2_sq_; }
  bool is_zero() const { return zero_; }

  // q(t) = |S^{n-1}|/(2 pi)^n int sin(r t) r^{n-2} |sigma2_hat|^2 dr.
  double q(double t) const;
  // p(t; c) = q(c t) / c.
  double p(double t, double c) const;
  double kappa() const;
  double tail_constant() const;

 private:
  int n_;
  double dr_;
  bool zero_;
  double l2_sq_;
  double at_zero_sq_;
  std::vector<double> sigma_hat_;
  std::vector<double> weight_;  // integrand of q without the sine
};

class KernelTable {
 public:
  // p(k dt; c) for k = 0 .. ceil(t_max / dt).
  KernelTable(const KernelSpectrum& spectrum, double c, double dt, double t_max);

  int n() const { return n_; }
  double wave_speed() const { return c_; }
  double dt() const { return dt_; }
  double t_max() const { return dt_ * static_cast<double>(values_.size() - 1); }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& cumulative() const { return cumulative_; }

  double partial_integral(double T) const;
  bool has_kappa() const { return n_ >= 3; }
  double kappa() const;
  double tail_K() const;
  double r_cut() const { return r_cut_; }
  std::size_t quadrature_nodes() const { return nodes_; }

  // Columns: t, q, cumulative; '#' header lines first.
  void write_csv(std::ostream& os, const std::string& header) const;

 private:
  int n_;
  double c_, dt_;
  std::vector<double> values_, cumulative_;
  double kappa_, tail_K_;
  double r_cut_;
  std::size_t nodes_;
};

double eval_kernel(double t, double c, const FormFactor& sigma2);
double kappa(const FormFactor& sigma2, int n);
double partial_integral(double T, const FormFactor& sigma2, int n, double dt = 0.01);
double tail_constant(const FormFactor& sigma2, int n);

}  // namespace vwlab
