#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "vwlab/diagnostics.hpp"
#include "vwlab/formfactors.hpp"
#include "vwlab/memorykernel.hpp"
#include "vwlab/phasespace.hpp"
#include "vwlab/potential.hpp"

namespace vwlab {

struct FlowPoint {
  double X = 0.0;
  double Xi = 0.0;
};

// Potential fields at t_k = k dt; field k acts on [t_k, t_{k+1}).
class FieldHistory {
 public:
  explicit FieldHistory(double dt);

  double dt() const { return dt_; }
  std::size_t size() const { return fields_.size(); }
  void push(PotentialField field);
  const PotentialField& operator[](std::size_t k) const { return fields_[k]; }
  // d/dx Phi held at step k; throws if x leaves a field that is still nonzero at its edge.
  double gradient(std::size_t k, double x) const;
  void truncate(std::size_t count);

 private:
  // Hermite slope per cell as a quadratic in the cell coordinate; cell 0 starts at virtual node -1.
  struct SlopeTable {
    double lo, inv_h;
    int n;
    bool open_edge;
    std::vector<std::array<double, 3>> coef;
  };
  double dt_;
  std::vector<PotentialField> fields_;
  std::vector<SlopeTable> slopes_;
};

// RK4 for X' = Xi, Xi' = -V'(X) - Phi_x(t, X); at most max_step per substep, never straddling
// a field switch. Works in both time directions.
FlowPoint trace_flow(FlowPoint start, double t0, double t1, const FieldHistory& phi,
                     const ExternalPotential& V, double max_step = 1e-3);
FlowPoint trace_flow(FlowPoint start, double t0, double t1, const ExternalPotential& V,
                     double max_step = 1e-3);

// Gronwall bound on |(X(t), Xi(t))| for potentials with C1 norm <= norm.
double apriori_radius(double norm, double t, FlowPoint start, const ExternalPotential& V);

// f(t_k) = f0 o (backward flow t_k -> 0) with bicubic interpolation of f0; one RK4 step per
// field interval. Negative interpolation undershoot is clipped and reported.
struct PushforwardResult {
  PhaseSpaceState state;
  double clipped_mass = 0.0;
  bool support_breach = false;
};
PushforwardResult liouville_pushforward(const PhaseSpaceState& f0, const FieldHistory& phi,
                                        const ExternalPotential& V, std::size_t k);
// Free or external-only transport to time t with a fixed number of RK4 steps.
PushforwardResult liouville_pushforward(const PhaseSpaceState& f0, const ExternalPotential& V,
                                        double t, int steps);

enum class Coupling { None, Memory, DirectWave, Rescaled, Limit };
const char* to_string(Coupling c) noexcept;

struct TransportSetup {
  Grid1D x{-4.0, 4.0, 256};
  Grid1D v{-4.0, 4.0, 256};
  InitialProfile f0;
  ExternalPotential V;
  FormFactor sigma1, sigma2;
  WaveInitialData wave;
  double c = 1.0;
  double eps = 1.0;  // Rescaled: lambda = 1/eps, c = 1/sqrt(eps)
  double dt = 0.01;
  double T = 1.0;
  Coupling coupling = Coupling::Memory;
  bool wave_energy = true;      // shadow wave solver for energy bookkeeping
  bool compare_direct = false;  // record |Phi_direct - Phi| each step
  double dr_scale = 1.0;
  double du_max = 0.01;
  int snapshot_stride = 0;      // 0: none
  double mass_abort = 1e-3;     // relative drift that aborts the run
  int field_pad = -1;           // cells; -1 sizes it from the supports
};

struct StepRecord {
  DiagnosticsRecord diag;
  double clipped_mass = 0.0;
  double phi_sup = 0.0;
  double grad_sup = 0.0;
  double phi0_sup = 0.0;
  double phi0_grad_sup = 0.0;
  double direct_gap = std::numeric_limits<double>::quiet_NaN();  // relative L-inf
};

struct RunRecord {
  std::vector<StepRecord> steps;
  std::vector<PhaseSpaceState> snapshots;
  std::vector<PhaseSpaceState> states;  // every step, only when requested
  PhaseSpaceState final_state;
  Grid1D field_grid;
  double mass0 = 0.0;
  bool support_breach = false;
};

// Field grid: the x-grid padded so every potential vanishes past its ends.
Grid1D field_grid_for(const TransportSetup& s);

struct SimulateOptions {
  bool keep_states = false;
  std::function<void(const StepRecord&)> on_step;
  // Step index, state and the field it generates, before the field enters the history.
  std::function<void(std::size_t, const PhaseSpaceState&, const PotentialField&)> on_field;
};

RunRecord self_consistent_simulate(const TransportSetup& setup, const SimulateOptions& opt = {});

struct PicardOptions {
  double tol = 1e-6;
  int max_iterations = 30;
  int directions = 64;
};

struct PicardResult {
  std::vector<double> gaps;  // g_l = sup_t W1(f^{l+1}(t), f^l(t))
  bool converged = false;
  bool diverging = false;
  std::vector<PhaseSpaceState> fixed_point;  // states at every step
};

PicardResult picard_solve(const TransportSetup& setup, const PicardOptions& opt);

// Definition-1 style finiteness check.
struct UniquenessCheck {
  double norm_bound = 0.0;  // C1 bound on the self-consistent potential over [0, T]
  double max_radius = 0.0;  // a-priori radius over the support of f0
  double constant = 0.0;    // int f0 exp(int_0^T hess bound)
  bool finite = false;      // false: existence-only regime
};
// Without sample_constant only norm_bound and max_radius are filled; the grids are not used.
UniquenessCheck definition_check(const TransportSetup& setup, bool sample_constant = true);

struct ParticleSetup {
  int d = 1;
  std::vector<std::vector<double>> x, v;  // N points of dimension d
  std::vector<double> weights;
  double harmonic_k = 0.0;                // V = k |x|^2 / 2
  double drift = 0.0;                     // V += drift x_1
  FormFactor sigma1, sigma2;
  WaveInitialData wave;                   // d = 1 only
  double c = 1.0;
  double dt = 0.05;
  double T = 1.0;
};

struct ParticleRecord {
  std::vector<double> times;
  std::vector<std::vector<std::vector<double>>> x, v;  // [step][particle][component]
};

ParticleRecord nparticle_simulate(const ParticleSetup& setup);

// Samples from f0 by rejection on its support box.
void sample_particles(const InitialProfile& f0, int N, std::uint64_t seed,
                      std::vector<std::vector<double>>& x, std::vector<std::vector<double>>& v);

}  // namespace vwlab
