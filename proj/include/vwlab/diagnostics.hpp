#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "vwlab/phasespace.hpp"
#include "vwlab/potential.hpp"

namespace vwlab {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
  double kinetic = 0.0;
  double external = 0.0;
  double coupling = 0.0;  // int rho Phi
  double wave_kinetic = 0.0;
  double wave_elastic = 0.0;
  bool wave_terms = false;
  double m2 = 0.0;  // int (|x|^2 + |v|^2) f
  double w1_reference = std::numeric_limits<double>::quiet_NaN();

  double total() const { return kinetic + external + coupling + wave_kinetic + wave_elastic; }
};

// Energy terms by the solver's own cell quadrature; wave terms only when supplied.
DiagnosticsRecord total_energy(const PhaseSpaceState& f, const PotentialField& phi,
                               const ExternalPotential& V, const WaveEnergy* wave = nullptr);

double lp_norm(const PhaseSpaceState& f, double p);

// int |x|^k f (or x^k f when signed) and likewise in v.
double moment_x(const PhaseSpaceState& f, double k, bool signed_power = false);
double moment_v(const PhaseSpaceState& f, double k, bool signed_power = false);

// Nonnegative measure on the line: atoms plus uniform-density segments.
class Distribution1D {
 public:
  void add_atom(double x, double w);
  void add_segment(double a, double b, double w);
  static Distribution1D from_density(const MacroDensity& rho);
  static Distribution1D from_atoms(std::span<const double> x, std::span<const double> w);

  double mass() const;
  void scale(double s);

  struct Atom {
    double x, w;
  };
  struct Segment {
    double a, b, w;
  };
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Segment>& segments() const { return segments_; }

 private:
  std::vector<Atom> atoms_;
  std::vector<Segment> segments_;
};

// Exact int |F_a - F_b| dx.
double wasserstein1_1d(const Distribution1D& a, const Distribution1D& b);

// Sliced W1 over directions (k + 1/2) pi / count in the (x, v) plane, cells as atoms.
class SlicedWasserstein {
 public:
  SlicedWasserstein(const Grid1D& x, const Grid1D& v, int directions = 64);
  double operator()(const PhaseSpaceState& a, const PhaseSpaceState& b) const;
  int directions() const { return static_cast<int>(order_.size()); }

 private:
  Grid1D x_, v_;
  std::vector<std::vector<std::size_t>> order_;  // per direction, cells by projection
  std::vector<std::vector<double>> gaps_;        // consecutive projection gaps in that order
  mutable bool warned_ = false;                  // mass-mismatch warning is issued once
};

double sliced_wasserstein1(const PhaseSpaceState& a, const PhaseSpaceState& b, int directions = 64);

}  // namespace vwlab
