#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "vwlab/numerics.hpp"

namespace vwlab {

// Radial, nonnegative, compactly supported profile on R^dim.
class FormFactor {
 public:
  FormFactor() = default;

  // A * exp(-1 / (1 - (r/R)^2)) on r < R, with A fixing the dim-dimensional integral to mass.
  static FormFactor bump(int dim, double support_radius, double mass);
  // Profile given by a uniform table on [0, support_radius]; must be nonnegative.
  static FormFactor tabulated(int dim, RadialTable table);
  static FormFactor parse(std::string_view text);

  int dim() const { return dim_; }
  double support_radius() const { return radius_; }
  double mass() const { return mass_; }
  bool is_bump() const { return table_ == nullptr; }
  bool is_zero() const { return mass_ == 0.0 && amplitude_ == 0.0 && table_ == nullptr; }
  double amplitude() const { return amplitude_; }

  double operator()(double r) const;
  double derivative(double r) const;

  // |S^{dim-1}| int_0^R s^{dim-1} w(s) sigma(s) ds.
  template <class W>
  double radial_integral(W&& w, int panels = 64) const {
    if (is_zero()) return 0.0;
    const int d = dim_;
    return sphere_area(d) *
           integrate_gl([&](double s) { return std::pow(s, d - 1) * w(s) * (*this)(s); }, 0.0,
                        radius_, panels);
  }

  double l2_norm_squared() const;
  double gradient_l2_norm_squared() const;
  double lp_norm(double p) const;
  double sup() const { return (*this)(0.0); }

  FormFactor scaled(double lambda) const;
  std::string serialize(std::size_t samples = 4096) const;

 private:
  int dim_ = 1;
  double radius_ = 1.0;
  double mass_ = 0.0;
  double amplitude_ = 0.0;
  std::shared_ptr<const RadialTable> table_;
  double table_scale_ = 1.0;
};

// sigma_hat(k) for sigma_hat(xi) = int exp(-i xi.y) sigma(y) dy, |xi| = k.
double radial_fourier(const FormFactor& ff, double k);

// Sigma = sigma1 * sigma1 on [0, 2R] with first and second radial derivative tables.
class ConvolvedProfile {
 public:
  ConvolvedProfile() = default;
  ConvolvedProfile(int dim, RadialTable table, std::vector<double> second);

  int dim() const { return dim_; }
  double support_radius() const { return table_.rmax(); }
  double operator()(double r) const { return table_.value(r); }
  double slope(double r) const { return table_.slope(r); }
  // Signed derivative along a line for d = 1 arguments.
  double derivative_1d(double x) const {
    const double s = table_.slope(std::abs(x));
    return x < 0 ? -s : s;
  }
  double second(double r) const;
  double peak() const { return table_.values().front(); }
  const RadialTable& table() const { return table_; }
  double max_abs_slope() const;
  double max_abs_second() const;

 private:
  int dim_ = 1;
  RadialTable table_;
  std::vector<double> second_;
};

ConvolvedProfile self_convolve(const FormFactor& sigma1, std::size_t points = 4096);

// Smooth cut-off: 1 on [0,1], 0 on [2,inf).
double cutoff_theta(double r);
double cutoff_theta_derivative(double r);

// C_d from its defining integral, d >= 3.
double coulomb_constant(int dim);

struct MollifiedCoulombFamily {
  double epsilon = 1.0;
  int dim = 3;
  double c_d = 0.0;
  FormFactor delta_eps;
  FormFactor sigma1_eps;

  double theta_eps(double r) const;
};

MollifiedCoulombFamily mollified_coulomb(double eps, int dim, std::size_t points = 2048);

struct GapNormOptions {
  bool cutoff = true;
  int radial_panels = 96;
  int inner_panels = 6;
};

// Radial value of O_eps at |x| = r (d = 3).
double kernel_gap_profile(double eps, double r, const GapNormOptions& opt = {});
double kernel_gap_norm(double eps, double q_exp, const GapNormOptions& opt = {});

// L^p norm of |theta_eps'/r^2 + (1-d)(theta_eps - 1)/r^3| over R^d.
double inner_factor_norm(double eps, double p, int dim = 3, int panels = 96);

}  // namespace vwlab
