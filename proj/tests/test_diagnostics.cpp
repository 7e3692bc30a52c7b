#include <cmath>
#include <random>

#include "doctest.h"
#include "vwlab/diagnostics.hpp"
#include "vwlab/validation.hpp"

using namespace vwlab;

TEST_CASE("W1 on atoms matches a frozen reference and the LP") {
  const std::vector<double> x{-1.0, 0.2, 0.5, 2.0}, wx{0.1, 0.4, 0.3, 0.2};
  const std::vector<double> y{-0.5, 0.0, 1.5}, wy{0.5, 0.25, 0.25};
  const double w = wasserstein1_1d(Distribution1D::from_atoms(x, wx), Distribution1D::from_atoms(y, wy));
  CHECK(w == doctest::Approx(0.605).epsilon(1e-12));  // scipy.stats.wasserstein_distance
  CHECK(transport_lp(x, wx, y, wy) == doctest::Approx(0.605).epsilon(1e-12));
}

TEST_CASE("W1 metric properties on random atoms") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0), uw(0.1, 1.0);
  auto make = [&] {
    std::vector<double> x(8), w(8);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
      x[i] = u(rng);
      s += (w[i] = uw(rng));
    }
    for (auto& v : w) v /= s;
    return Distribution1D::from_atoms(x, w);
  };
  for (int k = 0; k < 20; ++k) {
    const auto a = make(), b = make(), c = make();
    const double ab = wasserstein1_1d(a, b), ba = wasserstein1_1d(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-13));
    CHECK(wasserstein1_1d(a, a) == doctest::Approx(0.0));
    CHECK(wasserstein1_1d(a, c) <= ab + wasserstein1_1d(b, c) + 1e-13);
  }
}

TEST_CASE("segments: uniform density against its translate") {
  Distribution1D a, b;
  a.add_segment(0.0, 1.0, 1.0);
  b.add_segment(0.25, 1.25, 1.0);
  CHECK(wasserstein1_1d(a, b) == doctest::Approx(0.25).epsilon(1e-13));
  Distribution1D c;
  c.add_atom(0.5, 1.0);
  CHECK(wasserstein1_1d(a, c) == doctest::Approx(0.25).epsilon(1e-13));  // int |x - 1/2| on [0, 1]
}

TEST_CASE("sliced W1 of a one-cell translation") {
  const Grid1D g{-2.0, 2.0, 32};
  PhaseSpaceState a(g, g), b(g, g);
  a.at(10, 12) = 1.0 / a.cell_volume();
  b.at(11, 12) = 1.0 / b.cell_volume();
  const int dirs = 64;
  double expect = 0.0;
  for (int k = 0; k < dirs; ++k) expect += g.step() * std::abs(std::cos((k + 0.5) * pi / dirs));
  expect /= dirs;
  CHECK(sliced_wasserstein1(a, b, dirs) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("norms, moments and energy of a sampled bump") {
  const Grid1D g{-4.0, 4.0, 256};
  const InitialProfile prof({PhaseBump{-0.4, 0.3, 2.0, 1.0}});
  const PhaseSpaceState f = prof.sample(g, g);
  CHECK(f.mass() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(lp_norm(f, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(lp_norm(f, INFINITY) == doctest::Approx(f.sup()));
  CHECK(moment_v(f, 1.0, true) == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(moment_x(f, 1.0, true) == doctest::Approx(-0.4).epsilon(1e-8));
  // E[(v - v0)^2] = r^2 E|z|^2 / 2 for the unit bump (scipy).
  const double ev2 = 0.09 + 0.5226224068411082;
  const auto d = total_energy(f, PotentialField::zeros(g, SourceTag::Combined), ExternalPotential::zero());
  CHECK(d.kinetic == doctest::Approx(0.5 * ev2).epsilon(1e-6));
  CHECK(d.coupling == 0.0);
  CHECK_FALSE(d.wave_terms);
}

TEST_CASE("Lp norms are invariant under free transport of a symmetric state") {
  const Grid1D g{-4.0, 4.0, 128};
  const InitialProfile prof({PhaseBump{0.0, 0.0, 1.5, 1.0}});
  const PhaseSpaceState f = prof.sample(g, g);
  const auto moved = liouville_pushforward(f, ExternalPotential::harmonic(1.0), 1.0, 50);
  for (double p : {1.0, 2.0, 3.0}) CHECK(lp_norm(moved.state, p) == doctest::Approx(lp_norm(f, p)).epsilon(1e-3));
}
