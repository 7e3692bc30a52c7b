#include <cmath>

#include "doctest.h"
#include "vwlab/error.hpp"
#include "vwlab/formfactors.hpp"

using namespace vwlab;

TEST_CASE("bump mass matches a fine trapezoid sum") {
  for (int d : {1, 2, 3, 5}) {
    const auto s = FormFactor::bump(d, 1.3, 2.0);
    const int m = 100000;
    const double h = 1.3 / m;
    double acc = d == 1 ? 0.5 * s(0.0) : 0.0;
    for (int j = 1; j < m; ++j) acc += std::pow(j * h, d - 1) * s(j * h);
    acc *= h * sphere_area(d);
    CHECK(acc == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(s.mass() == 2.0);
  }
}

TEST_CASE("bump support and symmetry") {
  const auto s = FormFactor::bump(3, 1.0, 1.0);
  CHECK(s(1.0) == 0.0);
  CHECK(s(1.5) == 0.0);
  CHECK(s(-0.4) == s(0.4));
  CHECK(s.derivative(0.0) == 0.0);
  CHECK(s.derivative(0.5) < 0.0);
}

TEST_CASE("invalid form factor parameters are rejected") {
  CHECK_THROWS_AS(FormFactor::bump(3, -1.0, 1.0), Error);
  CHECK_THROWS_AS(FormFactor::bump(3, 1.0, -1.0), Error);
  CHECK_THROWS_AS(FormFactor::bump(0, 1.0, 1.0), Error);
}

TEST_CASE("zero form factor") {
  const auto z = FormFactor::bump(3, 1.0, 0.0);
  CHECK(z.is_zero());
  CHECK(radial_fourier(z, 2.0) == 0.0);
  CHECK(self_convolve(z, 64)(0.3) == 0.0);
}

TEST_CASE("radial Fourier transform against independent quadrature") {
  CHECK(radial_fourier(FormFactor::bump(3, 1.0, 1.0), 3.0) ==
        doctest::Approx(0.5859391504898646).epsilon(1e-10));
  CHECK(radial_fourier(FormFactor::bump(1, 1.0, 2.0), 2.5) ==
        doctest::Approx(1.1694590036647132).epsilon(1e-10));
  CHECK(radial_fourier(FormFactor::bump(5, 1.0, 1.0), 2.0) ==
        doctest::Approx(0.8378605782491838).epsilon(1e-9));
  CHECK(radial_fourier(FormFactor::bump(3, 1.0, 0.7), 0.0) == 0.7);
}

TEST_CASE("self convolution against direct integration") {
  const auto c1 = self_convolve(FormFactor::bump(1, 1.0, 2.0));
  CHECK(c1(0.7) == doctest::Approx(1.4084311092632886).epsilon(1e-8));
  CHECK(c1(2.1) == 0.0);
  const auto c3 = self_convolve(FormFactor::bump(3, 1.0, 1.0));
  CHECK(c3(0.5) == doctest::Approx(0.3116207137303464).epsilon(1e-7));
  CHECK(c3(1.2) == doctest::Approx(0.027957197841030297).epsilon(1e-6));
  CHECK(c3.derivative_1d(-0.5) == doctest::Approx(-c3.derivative_1d(0.5)));
}

TEST_CASE("cut-off function") {
  CHECK(cutoff_theta(0.5) == 1.0);
  CHECK(cutoff_theta(2.5) == 0.0);
  CHECK(cutoff_theta(1.5) == doctest::Approx(0.5));
  const double h = 1e-6;
  CHECK(cutoff_theta_derivative(1.3) ==
        doctest::Approx((cutoff_theta(1.3 + h) - cutoff_theta(1.3 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("Coulomb normalization constant") {
  CHECK(std::abs(coulomb_constant(3) - 1.0 / (2 * pi * pi)) < 1e-10);
  // pi^{d/2+1} Gamma((d-2)/2) / Gamma((d-1)/2)^2 for the defining integral.
  for (int d : {4, 5}) {
    const double I = std::pow(pi, 0.5 * d + 1) * std::tgamma(0.5 * (d - 2)) /
                     std::pow(std::tgamma(0.5 * (d - 1)), 2);
    const double expect = 1.0 / std::sqrt(sphere_area(d) * (d - 2) * I);
    CHECK(coulomb_constant(d) == doctest::Approx(expect).epsilon(1e-8));
  }
  CHECK_THROWS_AS(coulomb_constant(2), Error);
}

TEST_CASE("mollified Coulomb profile against direct convolution") {
  const auto fam = mollified_coulomb(1.0, 3);
  CHECK(fam.sigma1_eps(0.3) == doctest::Approx(0.2867242601843731).epsilon(1e-4));
  CHECK(fam.sigma1_eps(1.5) == doctest::Approx(0.013978611488935064).epsilon(1e-4));
  CHECK(fam.sigma1_eps.support_radius() == doctest::Approx(3.0));
  CHECK_THROWS_AS(mollified_coulomb(0.5, 2), Error);
}

TEST_CASE("kernel gap decays with eps") {
  const double eps[] = {1.0, 0.25, 1.0 / 16, 1.0 / 64};
  double prev = 1e300;
  std::vector<double> lx, ly, li;
  for (double e : eps) {
    const double g = kernel_gap_norm(e, 2.0);
    CHECK(g < prev);
    prev = g;
    lx.push_back(std::log(e));
    ly.push_back(std::log(g));
    li.push_back(std::log(inner_factor_norm(e, 2.0)));
  }
  // Exact scalings: gap ~ eps^{1 - 3/(2q)}, inner factor ~ eps^{3/4} at p = 2.
  CHECK(linear_fit(lx, ly).slope == doctest::Approx(0.25).epsilon(0.05));
  CHECK(linear_fit(lx, li).slope == doctest::Approx(0.75).epsilon(0.02));
  GapNormOptions off;
  off.cutoff = false;
  CHECK(kernel_gap_norm(0.25, 2.0, off) == 0.0);
  CHECK_THROWS_AS(kernel_gap_norm(0.25, 1.2), Error);
}

TEST_CASE("serialize round trip") {
  const auto s = FormFactor::bump(3, 0.8, 1.5);
  const auto t = FormFactor::parse(s.serialize());
  CHECK(t(0.3) == doctest::Approx(s(0.3)).epsilon(1e-12));
  const auto tab = FormFactor::parse(FormFactor::tabulated(3, RadialTable(1.0, {2, 1, 0}, {0, -2, 0})).serialize(9));
  CHECK(tab.dim() == 3);
}
