#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vwlab/formfactors.hpp"
#include "vwlab/memorykernel.hpp"
#include "vwlab/phasespace.hpp"

namespace vwlab {

// One separable term a(x - center) b(|y|) of the wave initial data.
struct WaveTerm {
  double center = 0.0;
  FormFactor x_profile;  // dimension 1
  FormFactor y_profile;  // dimension n
};

struct WaveInitialData {
  int n = 3;
  std::vector<WaveTerm> psi0, psi1;

  bool empty() const { return psi0.empty() && psi1.empty(); }
  // Largest |x| reached by any x-profile.
  double x_extent() const;
  // (1/lambda) (1/2 |Psi1|^2 + c^2/2 |grad_y Psi0|^2), integrated over x and y.
  double vibrational_energy(double c, double lambda) const;
  void validate(int n_expected) const;
};

enum class SourceTag { Phi0, Memory, Rescaled, Limit, DirectWave, Combined };
const char* to_string(SourceTag tag) noexcept;

// Nodal values and x-derivatives; cubic Hermite in between, zero past the outer nodes.
struct PotentialField {
  Grid1D grid;
  std::vector<double> values, gradient;
  SourceTag source = SourceTag::Combined;

  static PotentialField zeros(const Grid1D& grid, SourceTag tag);
  HermiteCell eval(double x) const;
  double sup_norm() const;
  double gradient_sup_norm() const;
  // this += scale * other on an identical grid.
  PotentialField& add(const PotentialField& other, double scale = 1.0);
};

// Discrete convolution h * sum_j K(x_i - y_j) u_j between two aligned grids with equal spacing.
class GridConvolution {
 public:
  GridConvolution() = default;
  template <class Value, class Slope>
  GridConvolution(const Grid1D& src, const Grid1D& dst, double support, Value&& value,
                  Slope&& slope)
      : src_(src), dst_(dst) {
    init(support);
    for (int m = -reach_; m <= reach_; ++m) {
      k_[m + reach_] = value(m * h_);
      dk_[m + reach_] = slope(m * h_);
    }
  }

  const Grid1D& source() const { return src_; }
  const Grid1D& target() const { return dst_; }
  void apply(std::span<const double> u, std::span<double> out) const;
  void apply_derivative(std::span<const double> u, std::span<double> out) const;

 private:
  void init(double support);
  void run(const std::vector<double>& kern, std::span<const double> u, std::span<double> out) const;

  Grid1D src_, dst_;
  double h_ = 1.0;
  int offset_ = 0;  // index shift: dst node i sits over src node i - offset_
  int reach_ = 0;
  std::vector<double> k_, dk_;
};

// Sigma = sigma1 * sigma1 convolved against densities on the phase x-grid.
GridConvolution sigma_convolution(const ConvolvedProfile& Sigma, const Grid1D& src,
                                  const Grid1D& dst);
// sigma1 itself, used by the wave forcing.
GridConvolution sigma1_convolution(const FormFactor& sigma1, const Grid1D& src, const Grid1D& dst);

// Phi_0(t, x) for separable wave data by radial quadrature in the transverse wavenumber.
class InitialPotential {
 public:
  InitialPotential(const WaveInitialData& wave, const FormFactor& sigma1, const FormFactor& sigma2,
                   double c, const Grid1D& grid);

  PotentialField at(double t) const;
  // C1 norm of Phi_0 on [0, t], sampled at the given number of times.
  double c1_bound(double t, int samples = 64) const;

 private:
  struct Term {
    std::vector<double> xv, xg;       // (sigma1 * a)(x) and its derivative
    std::vector<double> weight;       // radial weight multiplying the time factor
    bool velocity;                    // psi1 term
  };
  Grid1D grid_;
  int n_;
  double c_, dr_;
  std::vector<Term> terms_;
};

PotentialField initial_potential(double t, const WaveInitialData& wave, const FormFactor& sigma1,
                                 const FormFactor& sigma2, double c, const Grid1D& grid);

// Sigma * rho(s_k) and its x-derivative at s_k = k dt, appended once per step.
class MemoryHistory {
 public:
  explicit MemoryHistory(double dt);

  double dt() const { return dt_; }
  std::size_t size() const { return S_.size(); }
  // Index of the newest snapshot.
  std::size_t step() const { return S_.size() - 1; }
  void push(std::vector<double> S, std::vector<double> dS);
  const std::vector<double>& S(std::size_t k) const { return S_[k]; }
  const std::vector<double>& dS(std::size_t k) const { return dS_[k]; }
  void truncate(std::size_t count);

 private:
  double dt_;
  std::vector<std::vector<double>> S_, dS_;
};

// L(f)(t_k) = int_0^{t_k} p(t_k - s) (Sigma * rho)(s) ds by the trapezoid rule; Phi gets -L.
PotentialField memory_potential(const MemoryHistory& history, const KernelTable& kernel,
                                std::size_t k, const Grid1D& grid);

struct RescaledStep {
  int substeps;  // u-nodes per history interval
  double du;
};
RescaledStep rescaled_step(double dt, double eps, double du_max = 0.01);

// (1/eps) L_eps(f)(t_k) = Sigma * int_0^{t_k/sqrt(eps)} q(u) rho(t_k - u sqrt(eps)) du, with the
// history linear in time; q_table must use c = 1 and step rescaled_step(...).du.
PotentialField rescaled_memory_potential(const MemoryHistory& history, const KernelTable& q_table,
                                         std::size_t k, double eps, const Grid1D& grid,
                                         double du_max = 0.01);

// -kappa (Sigma * rho).
PotentialField limit_potential(const MemoryHistory& history, std::size_t k, double kappa,
                               const Grid1D& grid);
PotentialField limit_potential(const MacroDensity& rho, const ConvolvedProfile& Sigma,
                               double kappa, const Grid1D& grid);

struct WaveEnergy {
  double kinetic = 0.0;
  double elastic = 0.0;
};

// Psi_hat(t, x_i, r_j) advanced by exact harmonic steps with forcing linear in time.
class DirectWaveSolver {
 public:
  // lambda scales the source and divides the energy; horizon and dr_scale size the radial grid.
  DirectWaveSolver(const WaveInitialData& wave, const FormFactor& sigma1, const FormFactor& sigma2,
                   double c, double lambda, const Grid1D& density_grid, const Grid1D& field_grid,
                   double horizon, double dr_scale = 1.0);

  void start(const MacroDensity& rho0);
  void advance(const MacroDensity& rho_next, double dt);
  double time() const { return t_; }
  PotentialField potential() const;
  WaveEnergy energy() const;
  std::size_t radial_nodes() const { return r_.size(); }
  double dr() const { return dr_; }

 private:
  std::vector<double> forcing(const MacroDensity& rho) const;

  int n_;
  double c_, lambda_, dr_, t_ = 0.0, horizon_;
  bool started_ = false;
  bool warned_ = false;
  Grid1D field_;
  GridConvolution s1rho_, s1w_;
  std::vector<double> r_, sh_, contract_;  // nodes, sigma2_hat, contraction weights
  std::vector<double> psi_, psit_;          // [x * nr + j]
  std::vector<double> force_;               // sigma1 * rho at the current time
};

// Replays a density history at spacing dt through DirectWaveSolver.
PotentialField direct_wave_potential(std::span<const MacroDensity> history, double dt,
                                     const WaveInitialData& wave, const FormFactor& sigma1,
                                     const FormFactor& sigma2, double c, const Grid1D& field_grid,
                                     double dr_scale = 1.0);

}  // namespace vwlab
