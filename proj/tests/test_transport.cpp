#include <cmath>
#include <random>

#include "doctest.h"
#include "vwlab/error.hpp"
#include "vwlab/transport.hpp"
#include "vwlab/validation.hpp"

using namespace vwlab;

TEST_CASE("characteristics: free streaming and harmonic rotation") {
  const auto zero = ExternalPotential::zero();
  const auto osc = ExternalPotential::harmonic(4.0);  // omega = 2
  const FlowPoint p{0.7, -1.1};
  const FlowPoint q = trace_flow(p, 0.0, 2.5, zero);
  CHECK(q.X == doctest::Approx(0.7 - 2.75).epsilon(1e-13));
  CHECK(q.Xi == doctest::Approx(-1.1).epsilon(1e-13));
  const double t = 0.9;
  const FlowPoint r = trace_flow(p, 0.0, t, osc);
  CHECK(r.X == doctest::Approx(0.7 * std::cos(2 * t) - 1.1 / 2 * std::sin(2 * t)).epsilon(1e-10));
  CHECK(r.Xi == doctest::Approx(-1.4 * std::sin(2 * t) - 1.1 * std::cos(2 * t)).epsilon(1e-10));
  const FlowPoint back = trace_flow(r, t, 0.0, osc);
  CHECK(back.X == doctest::Approx(p.X).epsilon(1e-10));
  CHECK(back.Xi == doctest::Approx(p.Xi).epsilon(1e-10));
}

TEST_CASE("a-priori radius bounds the harmonic and linear flows") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& V : {ExternalPotential::harmonic(1.0), ExternalPotential::linear(0.5), ExternalPotential::zero()}) {
    for (int i = 0; i < 50; ++i) {
      const FlowPoint p{u(rng), u(rng)};
      for (double t : {0.5, 1.0, 2.0}) {
        const FlowPoint q = trace_flow(p, 0.0, t, V);
        CHECK(std::hypot(q.X, q.Xi) <= apriori_radius(0.0, t, p, V));
      }
    }
  }
  CHECK_THROWS_AS(apriori_radius(-1.0, 1.0, {}, ExternalPotential::zero()), Error);
}

TEST_CASE("field history: zero outside a closed field, error past an open edge") {
  const Grid1D g{-1.0, 1.0, 20};
  FieldHistory fh(0.1);
  PotentialField closed = PotentialField::zeros(g, SourceTag::Combined);
  closed.values[10] = 1.0;
  fh.push(closed);
  CHECK(fh.gradient(0, 5.0) == 0.0);
  PotentialField open = PotentialField::zeros(g, SourceTag::Combined);
  for (int i = 0; i < g.n; ++i) {
    open.values[i] = g.node(i);
    open.gradient[i] = 1.0;
  }
  fh.push(open);
  CHECK(fh.gradient(1, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fh.gradient(1, 5.0), Error);
}

TEST_CASE("free streaming on the grid") {
  const Grid1D g{-4.0, 4.0, 128};
  const InitialProfile prof({PhaseBump{-0.5, 0.4, 1.5, 1.0}});
  const PhaseSpaceState f0 = prof.sample(g, g);
  const auto r = liouville_pushforward(f0, ExternalPotential::zero(), 0.5, 4);
  double err = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) err = std::max(err, std::abs(r.state.at(i, j) - prof(g.node(i) - 0.5 * g.node(j), g.node(j))));
  CHECK(err <= 2e-3 * f0.sup());
  CHECK(r.state.mass() == doctest::Approx(f0.mass()).epsilon(1e-4));  // clipping at 128^2
  CHECK_FALSE(r.support_breach);
}

TEST_CASE("time grid must divide T") {
  TransportSetup s = reference_setup(32);
  s.T = 0.05;
  s.dt = 0.02;
  CHECK_THROWS_AS(self_consistent_simulate(s), Error);
}

TEST_CASE("coupled run conserves mass and keeps snapshots at the stride") {
  TransportSetup s = reference_setup(96);
  s.T = 0.2;
  s.dt = 0.02;
  s.snapshot_stride = 3;
  const RunRecord rec = self_consistent_simulate(s);
  REQUIRE(rec.steps.size() == 11);
  CHECK(rec.snapshots.size() == 4);  // k = 0, 3, 6, 9
  for (const auto& st : rec.steps) CHECK(std::abs(st.diag.mass - rec.mass0) <= 1e-4 * rec.mass0);
  CHECK(rec.steps.back().diag.t == doctest::Approx(0.2));
}

TEST_CASE("Picard fixed point coincides with the marching solution") {
  TransportSetup s = reference_setup(64);
  s.T = 0.2;
  s.dt = 0.02;
  s.wave_energy = false;
  PicardOptions opt;
  opt.tol = 1e-12;
  const PicardResult pr = picard_solve(s, opt);
  CHECK(pr.converged);
  CHECK_FALSE(pr.diverging);
  SimulateOptions so;
  so.keep_states = true;
  const RunRecord rec = self_consistent_simulate(s, so);
  REQUIRE(rec.states.size() == pr.fixed_point.size());
  CHECK(sliced_wasserstein1(rec.states.back(), pr.fixed_point.back()) <= 1e-10);
  s.coupling = Coupling::DirectWave;
  CHECK_THROWS_AS(picard_solve(s, opt), Error);
}

TEST_CASE("finiteness check reports a bounded constant for smooth data") {
  TransportSetup s = reference_setup(64);
  const UniquenessCheck u = definition_check(s);
  CHECK(u.finite);
  CHECK(u.norm_bound > 0.0);
  CHECK(u.max_radius > s.f0.support_radius());
  CHECK(std::isfinite(u.constant));
}

TEST_CASE("particle sampling and the uncoupled oscillator") {
  const InitialProfile prof({PhaseBump{0.0, 0.0, 1.0, 1.0}});
  ParticleSetup ps;
  sample_particles(prof, 50, 42, ps.x, ps.v);
  for (std::size_t p = 0; p < ps.x.size(); ++p) CHECK(prof(ps.x[p][0], ps.v[p][0]) > 0.0);
  ps.weights.assign(50, 1.0 / 50);
  ps.harmonic_k = 1.0;
  ps.sigma1 = FormFactor::bump(1, 0.5, 0.0);
  ps.sigma2 = FormFactor::bump(3, 1.0, 0.0);
  ps.dt = 0.01;
  ps.T = 1.0;
  const ParticleRecord rec = nparticle_simulate(ps);
  const auto& x0 = rec.x.front()[7];
  const auto& v0 = rec.v.front()[7];
  CHECK(rec.x.back()[7][0] == doctest::Approx(x0[0] * std::cos(1.0) + v0[0] * std::sin(1.0)).epsilon(1e-4));
  std::vector<std::vector<double>> x2, v2;
  sample_particles(prof, 50, 42, x2, v2);
  CHECK(x2 == rec.x.front());  // same seed, same draw
}
