#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "vwlab/diagnostics.hpp"
#include "vwlab/formfactors.hpp"
#include "vwlab/transport.hpp"

namespace vwlab {

struct EpsilonSweepPlan {
  TransportSetup base;  // coupling, eps and T are overridden per member
  std::vector<double> eps_list{1.0, 0.25, 1.0 / 16.0, 1.0 / 64.0};
  double T_star = 1.0;
  int directions = 64;
  double window_start = 0.5;  // grad Phi0 probe over [window_start * T_star, T_star]
};

struct SweepMember {
  double eps = 1.0;
  double w1 = 0.0;          // sliced W1 between f_eps(T*) and f_limit(T*)
  double rho_l1 = 0.0;      // L1 distance of the densities at T*
  double phi0_probe = 0.0;  // sup |grad Phi0_eps| over the comparison window
  double phi0_bound = 0.0;  // ||sigma1'|| ||sigma2|| (||Psi0|| + T* ||Psi1||)
  double runtime = 0.0;     // seconds
  DiagnosticsRecord final_diag;
};

struct SweepResult {
  std::vector<SweepMember> members;
  DiagnosticsRecord limit_diag;
  double kappa = 0.0;
  double limit_runtime = 0.0;
  bool strictly_decreasing = false;
};

// Checks the plan hypotheses: eps strictly decreasing in (0, 1], n >= 3, V >= 0, f0 bounded,
// finite rescaled wave energy.
void validate_plan(const EpsilonSweepPlan& plan);
SweepResult run_epsilon_sweep(const EpsilonSweepPlan& plan);

// Frozen density: (1/eps) L_eps(t) against kappa Sigma * rho, nodewise.
struct FrozenRhoRow {
  double eps = 1.0;
  double t = 0.0;
  double error = 0.0;  // max_x |(1/eps) L_eps - kappa S|
  double bound = 0.0;  // K sqrt(eps)/t max_x S plus the u-quadrature error bound
  bool satisfied = false;
};
std::vector<FrozenRhoRow> frozen_rho_check(const FormFactor& sigma1, const FormFactor& sigma2,
                                           const MacroDensity& rho, const std::vector<double>& eps_list,
                                           const std::vector<double>& times, double dt = 0.02);

// ||rho||_{L^{1+m}} <= C ||f||_inf^{m/(1+m)} (int |v|^m f)^{1/(1+m)}, C = 2 |B_1|^{m/(m+1)}, d = 1.
struct InterpolationResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
};
InterpolationResult interpolation_check(const PhaseSpaceState& f, double m);
double interpolation_constant(double m, int d = 1);

// Random nonnegative bump mixture inside the given grids.
InitialProfile random_profile(std::mt19937_64& rng, const Grid1D& x, const Grid1D& v, int max_bumps = 4);

struct RateFit {
  std::vector<double> abscissae;  // log eps
  std::vector<double> ordinates;  // log metric
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values);

struct VpKernelStudy {
  std::vector<double> eps;
  std::vector<double> gaps, inner;  // gap norms at q_exp, inner factor at p = 2
  RateFit gap_fit, inner_fit;
  double control_gap = 0.0;  // cutoff disabled
  bool gaps_decreasing = false;
};
VpKernelStudy vp_kernel_rate_study(const std::vector<double>& eps_list, double q_exp,
                                   const GapNormOptions& opt = {});

// Energy terms with the wave part weighted by eps (lambda = 1/eps); partial when wave is null.
struct RescaledEnergy {
  DiagnosticsRecord terms;
  bool partial = true;
};
RescaledEnergy rescaled_energy(const PhaseSpaceState& f, const PotentialField& phi,
                               const ExternalPotential& V, const DirectWaveSolver* wave);

// int int g(x) g(y) / |x - y| dx dy divided by ||g||_{6/5}^2 for radial g on R^3.
double hls_ratio(const FormFactor& g);
// Sharp constant for that ratio.
double hls_sharp_constant();

}  // namespace vwlab
