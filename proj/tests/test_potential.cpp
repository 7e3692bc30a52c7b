#include <cmath>

#include "doctest.h"
#include "vwlab/asymptotics.hpp"
#include "vwlab/potential.hpp"
#include "vwlab/transport.hpp"

using namespace vwlab;

namespace {

// Unit-mass spike in cell i0.
MacroDensity spike(const Grid1D& g, int i0) {
  MacroDensity rho{g, std::vector<double>(g.n, 0.0)};
  rho.rho[i0] = 1.0 / g.step();
  return rho;
}

}  // namespace

TEST_CASE("Sigma convolution reproduces the profile on both sides") {
  const auto s1 = FormFactor::bump(1, 0.5, 1.0);
  const ConvolvedProfile Sigma = self_convolve(s1);
  const Grid1D g{-2.0, 2.0, 80};  // h = 0.05, offset 0.3 = 6 cells
  const auto conv = sigma_convolution(Sigma, g, g);
  const MacroDensity rho = spike(g, 40);
  std::vector<double> out(g.n), dout(g.n);
  conv.apply(rho.rho, out);
  conv.apply_derivative(rho.rho, dout);
  // scipy quadrature of sigma1 * sigma1
  CHECK(out[40] == doctest::Approx(1.3502336260193954).epsilon(1e-6));
  CHECK(out[46] == doctest::Approx(0.8339108101404422).epsilon(1e-6));
  CHECK(out[34] == doctest::Approx(0.8339108101404422).epsilon(1e-6));
  CHECK(dout[46] == doctest::Approx(-dout[34]).epsilon(1e-12));
  CHECK(dout[46] < 0.0);  // Sigma decreases away from 0
}

TEST_CASE("limit potential is minus kappa Sigma * rho") {
  const auto s1 = FormFactor::bump(1, 0.5, 1.0);
  const ConvolvedProfile Sigma = self_convolve(s1);
  const Grid1D g{-2.0, 2.0, 80};
  const MacroDensity rho = spike(g, 40);
  const PotentialField phi = limit_potential(rho, Sigma, 0.25, g);
  CHECK(phi.values[40] == doctest::Approx(-0.25 * 1.3502336260193954).epsilon(1e-6));
  CHECK(phi.values[46] == doctest::Approx(-0.25 * 0.8339108101404422).epsilon(1e-6));
}

TEST_CASE("homogeneous wave potential vanishes without data and is time-even for Psi0") {
  const auto s1 = FormFactor::bump(1, 0.5, 1.0);
  const auto s2 = FormFactor::bump(3, 1.0, 1.0);
  const Grid1D g{-3.0, 3.0, 120};
  WaveInitialData none;
  const PotentialField z = initial_potential(0.7, none, s1, s2, 1.0, g);
  CHECK(z.sup_norm() == 0.0);

  WaveInitialData w;
  w.psi0 = {WaveTerm{0.0, FormFactor::bump(1, 1.0, 1.0), FormFactor::bump(3, 1.0, 1.0)}};
  const InitialPotential p0(w, s1, s2, 1.0, g);
  const PotentialField a = p0.at(0.0);
  CHECK(a.sup_norm() > 0.0);
  // Symmetric data centred at 0 gives an even potential.
  for (int i = 0; i < g.n; ++i) CHECK(a.values[i] == doctest::Approx(a.values[g.n - 1 - i]).epsilon(1e-10));
}

TEST_CASE("memory potential agrees with the direct wave solver on a frozen density") {
  const auto s1 = FormFactor::bump(1, 0.5, 1.0);
  const auto s2 = FormFactor::bump(3, 1.0, 1.0);
  const Grid1D x{-2.0, 2.0, 64};
  const Grid1D fg = x.padded(24);
  const InitialProfile prof({PhaseBump{0.0, 0.0, 1.0, 1.0}});
  const MacroDensity rho = prof.sample(x, Grid1D{-2.0, 2.0, 64}).density();
  const double dt = 0.02, T = 1.0;
  const int N = static_cast<int>(std::lround(T / dt));

  const ConvolvedProfile Sigma = self_convolve(s1);
  const auto conv = sigma_convolution(Sigma, x, fg);
  MemoryHistory hist(dt);
  std::vector<MacroDensity> densities;
  for (int k = 0; k <= N; ++k) {
    std::vector<double> S(fg.n), dS(fg.n);
    conv.apply(rho.rho, S);
    conv.apply_derivative(rho.rho, dS);
    hist.push(std::move(S), std::move(dS));
    densities.push_back(rho);
  }
  const KernelTable table(KernelSpectrum(s2), 1.0, dt, T);
  PotentialField mem = memory_potential(hist, table, N, fg);
  PotentialField direct = direct_wave_potential(densities, dt, WaveInitialData{}, s1, s2, 1.0, fg);
  double gap = 0.0;
  for (int i = 0; i < fg.n; ++i) gap = std::max(gap, std::abs(direct.values[i] + mem.values[i]));
  CHECK(gap <= 1e-4 * mem.sup_norm());
}

TEST_CASE("rescaled memory at a frozen density approaches the limit") {
  const auto s1 = FormFactor::bump(1, 0.5, 1.0);
  const auto s2 = FormFactor::bump(3, 1.0, 1.0);
  const InitialProfile prof({PhaseBump{0.0, 0.0, 1.0, 1.0}});
  const Grid1D g{-2.0, 2.0, 64};
  const auto rows = frozen_rho_check(s1, s2, prof.sample(g, g).density(), {1.0, 0.25, 1.0 / 16}, {0.5, 1.0});
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) CHECK(r.satisfied);
  // Error shrinks with eps at fixed t.
  CHECK(rows[5].error < rows[1].error);
}
