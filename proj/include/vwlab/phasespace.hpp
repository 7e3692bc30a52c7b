#pragma once

#include <string>
#include <vector>

namespace vwlab {

// Cell-centered uniform grid: node i sits at lo + (i + 1/2) h.
struct Grid1D {
  double lo = -1.0;
  double hi = 1.0;
  int n = 2;

  double step() const { return (hi - lo) / n; }
  double node(int i) const { return lo + (i + 0.5) * step(); }
  // Same spacing, widened by pad cells on each side.
  Grid1D padded(int pad) const;
  bool operator==(const Grid1D&) const = default;
};

struct MacroDensity {
  Grid1D x;
  std::vector<double> rho;

  double mass() const;
};

// f(x_i, v_j) stored row-major with v fastest.
struct PhaseSpaceState {
  Grid1D x, v;
  std::vector<double> f;
  double t = 0.0;

  PhaseSpaceState() = default;
  PhaseSpaceState(Grid1D xg, Grid1D vg);

  double& at(int i, int j) { return f[static_cast<std::size_t>(i) * v.n + j]; }
  double at(int i, int j) const { return f[static_cast<std::size_t>(i) * v.n + j]; }
  double cell_volume() const { return x.step() * v.step(); }
  double mass() const;
  double sup() const;
  MacroDensity density() const;
};

// Compactly supported radial bump in the (x, v) plane.
struct PhaseBump {
  double x = 0.0;
  double v = 0.0;
  double radius = 1.0;
  double mass = 1.0;
};

class InitialProfile {
 public:
  InitialProfile() = default;
  explicit InitialProfile(std::vector<PhaseBump> bumps);

  const std::vector<PhaseBump>& bumps() const { return bumps_; }
  double operator()(double x, double v) const;
  double mass() const;
  double sup() const;
  // Largest |(x, v)| reached by the support.
  double support_radius() const;
  double max_abs_x() const;
  double max_abs_v() const;
  PhaseSpaceState sample(const Grid1D& x, const Grid1D& v) const;

 private:
  std::vector<PhaseBump> bumps_;
};

class ExternalPotential {
 public:
  enum class Kind { Zero, Harmonic, Linear, Table };

  static ExternalPotential zero();
  // V = k x^2 / 2
  static ExternalPotential harmonic(double k);
  // V = F x
  static ExternalPotential linear(double F);
  // Nodal values on [lo, hi] inclusive; undefined outside.
  static ExternalPotential table(double lo, double hi, std::vector<double> values);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  double value(double x) const;
  double gradient(double x) const;
  // sup |V''| over |x| <= r.
  double hessian_bound(double r) const;
  // Smallest C >= 0 with V(x) >= -C (1 + x^2) on the domain.
  double lower_bound_constant() const;
  bool nonnegative() const;
  std::string describe() const;
  const std::vector<double>& table_values() const { return values_; }
  double table_lo() const { return lo_; }
  double table_hi() const { return hi_; }

 private:
  Kind kind_ = Kind::Zero;
  double param_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;
  std::vector<double> values_, slopes_;
};

}  // namespace vwlab
