#include <cmath>
#include <random>

#include "doctest.h"
#include "vwlab/asymptotics.hpp"
#include "vwlab/error.hpp"
#include "vwlab/validation.hpp"

using namespace vwlab;

TEST_CASE("interpolation constant") {
  CHECK(interpolation_constant(1.0) == doctest::Approx(2.0 * std::pow(2.0, 0.5)));
  CHECK(interpolation_constant(2.0, 1) == doctest::Approx(2.0 * std::pow(2.0, 2.0 / 3.0)));
}

TEST_CASE("interpolation inequality on random states and on a velocity plateau") {
  const Grid1D x{-4.0, 4.0, 96}, v{-4.0, 4.0, 96};
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto r = interpolation_check(random_profile(rng, x, v).sample(x, v), 1.5);
    CHECK(r.satisfied);
    CHECK(r.lhs <= r.rhs);
  }
  // f = 1 on |v| <= 1 over the x window: lhs / rhs = 1 / sqrt(2) at m = 1.
  const Grid1D gx{-1.0, 1.0, 64}, gv{-2.0, 2.0, 256};
  PhaseSpaceState f(gx, gv);
  for (int i = 0; i < gx.n; ++i)
    for (int j = 0; j < gv.n; ++j) f.at(i, j) = std::abs(gv.node(j)) <= 1.0 ? 1.0 : 0.0;
  const auto r = interpolation_check(f, 1.0);
  CHECK(r.lhs / r.rhs == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(r.satisfied);
}

TEST_CASE("rate fit recovers a power law") {
  const std::vector<double> eps{1.0, 0.25, 0.0625, 0.015625};
  std::vector<double> y;
  for (double e : eps) y.push_back(3.0 * std::pow(e, 0.75));
  const RateFit f = fit_rate(eps, y);
  CHECK(f.slope == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.residual < 1e-12);
}

TEST_CASE("HLS ratio stays below the sharp constant") {
  CHECK(hls_sharp_constant() == doctest::Approx(2.294010703541599).epsilon(1e-12));  // scipy gamma
  for (double R : {0.5, 1.0, 3.0}) {
    const double r = hls_ratio(FormFactor::bump(3, R, 1.0));
    CHECK(r > 0.0);
    CHECK(r <= hls_sharp_constant());
  }
  // Scale invariance of the ratio.
  CHECK(hls_ratio(FormFactor::bump(3, 0.5, 1.0)) == doctest::Approx(hls_ratio(FormFactor::bump(3, 2.0, 1.0))).epsilon(1e-6));
}

TEST_CASE("sweep plan hypotheses") {
  EpsilonSweepPlan plan;
  plan.base = reference_setup(32);
  CHECK_NOTHROW(validate_plan(plan));
  auto bad = plan;
  bad.eps_list = {1.0, 0.5, 0.5};
  CHECK_THROWS_AS(validate_plan(bad), Error);
  bad = plan;
  bad.base.V = ExternalPotential::harmonic(-1.0);
  try {
    validate_plan(bad);
    FAIL("negative V accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Hypothesis);
    CHECK(std::string(e.what()).find("H7") != std::string::npos);
  }
  bad = plan;
  bad.base.sigma2 = FormFactor::bump(2, 1.0, 1.0);
  bad.base.wave.n = 2;
  CHECK_THROWS_AS(validate_plan(bad), Error);
}

TEST_CASE("VP kernel study trends") {
  const VpKernelStudy st = vp_kernel_rate_study({1.0, 0.25, 0.0625}, 2.0);
  CHECK(st.gaps_decreasing);
  CHECK(st.inner_fit.slope == doctest::Approx(0.75).epsilon(0.2));
  CHECK(st.control_gap <= 1e-6);
  CHECK_THROWS_AS(vp_kernel_rate_study({1.0, 0.25}, 1.2), Error);
}
