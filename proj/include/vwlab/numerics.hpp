#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace vwlab {

inline constexpr double pi = std::numbers::pi;

// |S^{dim-1}|, with |S^0| = 2.
double sphere_area(int dim);
double ball_volume(int dim);

// Composite 20-point Gauss-Legendre on [a, b] split into equal panels.
template <class F>
double integrate_gl(F&& f, double a, double b, int panels) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  if (b <= a) return 0.0;
  const double w = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * w;
    acc += Rule::integrate(f, lo, lo + w);
  }
  return acc;
}

enum class Trig { Sin, Cos };

// Filon-Simpson rule for int_0^{(N-1)h} g(r) trig(omega r) dr on a uniform grid, N odd.
// Exactly zero for Trig::Sin at omega = 0.
double filon(std::span<const double> g, double h, double omega, Trig kind);

// Cumulative integral on a uniform grid, fourth order, out[0] = 0.
std::vector<double> cumulative_integral(std::span<const double> f, double h);

// Weights of the 4-point Lagrange interpolant on nodes -1, 0, 1, 2 at 0 <= s < 1.
inline std::array<double, 4> lagrange4(double s) {
  const double sm1 = s - 1.0, sm2 = s - 2.0, sp1 = s + 1.0;
  return {-s * sm1 * sm2 / 6.0, sp1 * sm1 * sm2 / 2.0, -sp1 * s * sm2 / 2.0, sp1 * s * sm1 / 6.0};
}

// Cubic Hermite value and derivative on a unit cell, with h the physical cell size.
struct HermiteCell {
  double value;
  double slope;
};
inline HermiteCell hermite(double s, double h, double y0, double m0, double y1, double m1) {
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1;
  const double d11 = 3 * s2 - 2 * s;
  return {h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1,
          (d00 * (y0 - y1)) / h + d10 * m0 + d11 * m1};
}

// Uniform table on [0, rmax] with node slopes; cubic Hermite between nodes, zero beyond rmax.
class RadialTable {
 public:
  RadialTable() = default;
  RadialTable(double rmax, std::vector<double> values, std::vector<double> slopes);

  double rmax() const { return rmax_; }
  double step() const { return h_; }
  std::size_t size() const { return v_.size(); }
  const std::vector<double>& values() const { return v_; }
  const std::vector<double>& slopes() const { return d_; }

  double value(double r) const { return eval(r).value; }
  double slope(double r) const { return eval(r).slope; }
  HermiteCell eval(double r) const;

 private:
  double rmax_ = 0.0;
  double h_ = 1.0;
  std::vector<double> v_, d_;
};

// Fourth-order centered first derivative of samples on [0, rmax], using parity for ghost
// nodes below 0 (parity = +1 even, -1 odd) and zeros beyond rmax.
std::vector<double> derivative_table(std::span<const double> v, double h, int parity);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |fit - y|
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace vwlab
