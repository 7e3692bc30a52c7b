#include "vwlab/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "vwlab/error.hpp"

namespace vwlab {

double sphere_area(int dim) {
  return 2.0 * std::pow(pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double ball_volume(int dim) { return sphere_area(dim) / dim; }

namespace {

struct FilonCoefficients {
  double alpha, beta, gamma;
};

FilonCoefficients filon_coefficients(double th) {
  if (std::abs(th) < 1.0 / 6.0) {
    const double t2 = th * th, t3 = t2 * th, t4 = t2 * t2, t5 = t4 * th, t6 = t4 * t2, t7 = t6 * th;
    return {2.0 * t3 / 45.0 - 2.0 * t5 / 315.0 + 2.0 * t7 / 4725.0,
            2.0 / 3.0 + 2.0 * t2 / 15.0 - 4.0 * t4 / 105.0 + 2.0 * t6 / 567.0,
            4.0 / 3.0 - 2.0 * t2 / 15.0 + t4 / 210.0 - t6 / 11340.0};
  }
  const double s = std::sin(th), c = std::cos(th), t3 = th * th * th;
  return {(th * th + th * s * c - 2.0 * s * s) / t3,
          2.0 * (th * (1.0 + c * c) - 2.0 * s * c) / t3,
          4.0 * (s - th * c) / t3};
}

}  // namespace

double filon(std::span<const double> g, double h, double omega, Trig kind) {
  const std::size_t n = g.size();
  require(n >= 3 && n % 2 == 1, ErrorKind::InvalidInput, "filon: node count must be odd and >= 3");
  const double th = omega * h;
  const auto [alpha, beta, gamma] = filon_coefficients(th);

  // sin/cos of omega*r_j by rotation, reseeded every 64 nodes.
  const double cs = std::cos(th), sn = std::sin(th);
  double even = 0.0, odd = 0.0;
  double s = 0.0, c = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j % 64 == 0) {
      s = std::sin(omega * h * static_cast<double>(j));
      c = std::cos(omega * h * static_cast<double>(j));
    }
    const double w = (kind == Trig::Sin) ? s : c;
    if (j % 2 == 0) {
      even += g[j] * w;
    } else {
      odd += g[j] * w;
    }
    const double s1 = s * cs + c * sn;
    c = c * cs - s * sn;
    s = s1;
  }
  const double b = h * static_cast<double>(n - 1);
  const double sb = std::sin(omega * b), cb = std::cos(omega * b);
  if (kind == Trig::Sin) {
    even -= 0.5 * (g[n - 1] * sb);  // sin(0) = 0 at the left end
    return h * (alpha * (g[0] - g[n - 1] * cb) + beta * even + gamma * odd);
  }
  even -= 0.5 * (g[0] + g[n - 1] * cb);
  return h * (alpha * (g[n - 1] * sb) + beta * even + gamma * odd);
}

std::vector<double> cumulative_integral(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n < 4) {
    for (std::size_t k = 1; k < n; ++k) out[k] = out[k - 1] + 0.5 * h * (f[k - 1] + f[k]);
    return out;
  }
  const double c = h / 24.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double piece;
    if (k == 0) {
      piece = c * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]);
    } else if (k + 2 >= n) {
      piece = c * (f[k - 2] - 5 * f[k - 1] + 19 * f[k] + 9 * f[k + 1]);
    } else {
      piece = c * (-f[k - 1] + 13 * f[k] + 13 * f[k + 1] - f[k + 2]);
    }
    out[k + 1] = out[k] + piece;
  }
  return out;
}

RadialTable::RadialTable(double rmax, std::vector<double> values, std::vector<double> slopes)
    : rmax_(rmax), v_(std::move(values)), d_(std::move(slopes)) {
  require(v_.size() >= 2 && v_.size() == d_.size(), ErrorKind::InvalidInput,
          "radial table needs >= 2 nodes with matching slopes");
  h_ = rmax_ / static_cast<double>(v_.size() - 1);
}

HermiteCell RadialTable::eval(double r) const {
  if (r >= rmax_ || v_.empty()) return {0.0, 0.0};
  const double u = r / h_;
  std::size_t i = static_cast<std::size_t>(u);
  if (i + 1 >= v_.size()) i = v_.size() - 2;
  const double s = u - static_cast<double>(i);
  return hermite(s, h_, v_[i], d_[i], v_[i + 1], d_[i + 1]);
}

std::vector<double> derivative_table(std::span<const double> v, double h, int parity) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
  auto at = [&](std::ptrdiff_t i) -> double {
    if (i < 0) return parity * v[static_cast<std::size_t>(-i)];
    if (i >= n) return 0.0;
    return v[static_cast<std::size_t>(i)];
  };
  std::vector<double> d(v.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    d[static_cast<std::size_t>(i)] =
        (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
  }
  return d;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  require(n >= 2 && y.size() == n, ErrorKind::InvalidInput, "linear_fit needs >= 2 points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    fit.residual = std::max(fit.residual, std::abs(fit.intercept + fit.slope * x[i] - y[i]));
  }
  return fit;
}

}  // namespace vwlab
