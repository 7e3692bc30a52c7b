#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "vwlab/error.hpp"
#include "vwlab/memorykernel.hpp"

using namespace vwlab;

TEST_CASE("n = 3 kernel is t times the self-convolution") {
  const auto s2 = FormFactor::bump(3, 1.0, 1.0);
  const KernelSpectrum spec(s2);
  CHECK(spec.q(0.5) == doctest::Approx(0.5 * 0.3116207137303464).epsilon(1e-8));
  CHECK(spec.q(1.2) == doctest::Approx(1.2 * 0.027957197841030297).epsilon(1e-6));
  CHECK(std::abs(spec.q(2.5)) < 1e-10);
  CHECK(spec.q(0.0) == 0.0);
}

TEST_CASE("kappa matches the Coulomb self energy") {
  const auto s2 = FormFactor::bump(3, 1.0, 1.0);
  CHECK(kappa(s2, 3) == doctest::Approx(0.1286017803762574).epsilon(1e-10));
  CHECK(partial_integral(2.0, s2, 3) == doctest::Approx(0.1286017803762574).epsilon(1e-8));
  CHECK_THROWS_AS(kappa(FormFactor::bump(2, 1.0, 1.0), 2), Error);
}

TEST_CASE("n = 1 kernel is the integral of the self-convolution") {
  const KernelSpectrum spec(FormFactor::bump(1, 1.0, 1.0));
  CHECK(spec.q(0.7) == doctest::Approx(0.38519302718658865).epsilon(1e-8));
  CHECK(spec.q(3.0) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("wave speed scaling") {
  const KernelSpectrum spec(FormFactor::bump(3, 1.0, 1.0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(0.0, 3.0), uc(0.2, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double t = ut(rng), c = uc(rng);
    CHECK(std::abs(spec.p(t, c) - spec.q(c * t) / c) <= 1e-14);
  }
  CHECK_THROWS_AS(spec.p(1.0, 0.0), Error);
  CHECK_THROWS_AS(spec.q(-1.0), Error);
}

TEST_CASE("tail constant bounds the kernel") {
  const auto s2 = FormFactor::bump(3, 1.0, 1.0);
  const KernelSpectrum spec(s2);
  const double K = spec.tail_constant();
  CHECK(K > 0.0);
  for (double t : {0.5, 1.0, 1.5, 1.9}) CHECK(std::abs(spec.q(t)) <= K / (t * t));
}

TEST_CASE("kernel table") {
  const KernelSpectrum spec(FormFactor::bump(3, 1.0, 1.0));
  const KernelTable tab(spec, 1.0, 0.01, 3.0);
  CHECK(tab.size() == 301);
  CHECK(tab[50] == doctest::Approx(spec.q(0.5)).epsilon(1e-14));
  CHECK(tab.partial_integral(3.0) == doctest::Approx(tab.kappa()).epsilon(1e-8));
  CHECK_THROWS_AS(tab.partial_integral(4.0), Error);
  std::ostringstream os;
  tab.write_csv(os, "# h\n");
  CHECK(os.str().find("t,q,cumulative") != std::string::npos);
}

TEST_CASE("two-dimensional kernel has a logarithmic primitive") {
  const auto s2 = FormFactor::bump(2, 1.0, 1.0);
  const KernelSpectrum spec(s2);
  // q(t) ~ mass^2 / (2 pi t) for t beyond the support.
  CHECK(spec.q(50.0) * 50.0 == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-3));
}
