#include "vwlab/formfactors.hpp"

#include <algorithm>
#include <cmath>
#include <math.h>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "vwlab/error.hpp"

namespace vwlab {

namespace {

double bump_shape(double u) {
  if (u >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

// |S^{d-1}| int_0^1 u^{d-1} bump_shape(u) du
double bump_unit_integral(int dim) {
  return sphere_area(dim) *
         integrate_gl([dim](double u) { return std::pow(u, dim - 1) * bump_shape(u); }, 0.0, 1.0,
                      64);
}

}  // namespace

FormFactor FormFactor::bump(int dim, double support_radius, double mass) {
  require(dim >= 1, ErrorKind::InvalidParameter, "form factor dimension must be positive");
  require(support_radius > 0.0 && std::isfinite(support_radius), ErrorKind::InvalidParameter,
          "form factor support radius must be positive");
  require(mass >= 0.0 && std::isfinite(mass), ErrorKind::InvalidParameter,
          "form factor mass must be nonnegative");
  FormFactor ff;
  ff.dim_ = dim;
  ff.radius_ = support_radius;
  ff.mass_ = mass;
  ff.amplitude_ = mass / (bump_unit_integral(dim) * std::pow(support_radius, dim));
  return ff;
}

FormFactor FormFactor::tabulated(int dim, RadialTable table) {
  require(dim >= 1, ErrorKind::InvalidParameter, "form factor dimension must be positive");
  for (double v : table.values()) {
    require(v >= 0.0 && std::isfinite(v), ErrorKind::InvalidParameter,
            "tabulated form factor must be finite and nonnegative");
  }
  FormFactor ff;
  ff.dim_ = dim;
  ff.radius_ = table.rmax();
  ff.table_ = std::make_shared<const RadialTable>(std::move(table));
  ff.amplitude_ = 1.0;
  ff.mass_ = ff.radial_integral([](double) { return 1.0; }, 256);
  return ff;
}

double FormFactor::operator()(double r) const {
  r = std::abs(r);
  if (r >= radius_) return 0.0;
  if (table_) return table_scale_ * table_->value(r);
  if (amplitude_ == 0.0) return 0.0;
  return amplitude_ * bump_shape(r / radius_);
}

double FormFactor::derivative(double r) const {
  const double a = std::abs(r);
  if (a >= radius_) return 0.0;
  double d;
  if (table_) {
    d = table_scale_ * table_->slope(a);
  } else {
    if (amplitude_ == 0.0) return 0.0;
    const double u = a / radius_;
    const double w = 1.0 - u * u;
    d = amplitude_ * bump_shape(u) * (-2.0 * u / (w * w)) / radius_;
  }
  return r < 0 ? -d : d;
}

double FormFactor::l2_norm_squared() const {
  return radial_integral([this](double s) { return (*this)(s); });
}

double FormFactor::gradient_l2_norm_squared() const {
  if (is_zero()) return 0.0;
  const int d = dim_;
  return sphere_area(d) * integrate_gl(
                              [&](double s) {
                                const double g = derivative(s);
                                return std::pow(s, d - 1) * g * g;
                              },
                              0.0, radius_, 64);
}

double FormFactor::lp_norm(double p) const {
  require(p >= 1.0, ErrorKind::InvalidParameter, "lp_norm needs p >= 1");
  if (is_zero()) return 0.0;
  if (std::isinf(p)) return sup();
  const double integral = radial_integral([&](double s) { return std::pow((*this)(s), p - 1.0); });
  return std::pow(integral, 1.0 / p);
}

FormFactor FormFactor::scaled(double lambda) const {
  require(lambda >= 0.0, ErrorKind::InvalidParameter, "form factor scaling must be nonnegative");
  FormFactor ff = *this;
  ff.mass_ *= lambda;
  if (table_) {
    ff.table_scale_ *= lambda;
  } else {
    ff.amplitude_ *= lambda;
  }
  return ff;
}

std::string FormFactor::serialize(std::size_t samples) const {
  samples = std::max<std::size_t>(samples, 2);
  std::ostringstream os;
  os << std::setprecision(17);
  os << "formfactor\n";
  os << "dim " << dim_ << "\n";
  os << "radius " << radius_ << "\n";
  os << "mass " << mass_ << "\n";
  os << "kind " << (is_bump() ? "bump" : "table") << "\n";
  os << "samples " << samples << "\n";
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = radius_ * static_cast<double>(i) / static_cast<double>(samples - 1);
    os << (*this)(r) << ((i % 4 == 3 || i + 1 == samples) ? '\n' : ' ');
  }
  os << "end\n";
  return os.str();
}

FormFactor FormFactor::parse(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string word;
  is >> word;
  require(word == "formfactor", ErrorKind::InvalidInput, "form factor block must start with 'formfactor'");
  int dim = 0;
  double radius = 0, mass = 0;
  std::string kind;
  std::size_t samples = 0;
  for (int field = 0; field < 5; ++field) {
    is >> word;
    if (word == "dim") is >> dim;
    else if (word == "radius") is >> radius;
    else if (word == "mass") is >> mass;
    else if (word == "kind") is >> kind;
    else if (word == "samples") is >> samples;
    else fail(ErrorKind::InvalidInput, "unknown form factor field '" + word + "'");
  }
  require(static_cast<bool>(is) && samples >= 2, ErrorKind::InvalidInput, "malformed form factor header");
  std::vector<double> values(samples);
  for (auto& v : values) is >> v;
  is >> word;
  require(static_cast<bool>(is) && word == "end", ErrorKind::InvalidInput, "form factor block missing 'end'");
  if (kind == "bump") return bump(dim, radius, mass);
  require(kind == "table", ErrorKind::InvalidInput, "form factor kind must be bump or table");
  const double h = radius / static_cast<double>(samples - 1);
  auto slopes = derivative_table(values, h, +1);
  return tabulated(dim, RadialTable(radius, std::move(values), std::move(slopes)));
}

double radial_fourier(const FormFactor& ff, double k) {
  require(k >= 0.0 && std::isfinite(k), ErrorKind::InvalidParameter, "wavenumber must be >= 0");
  if (ff.is_zero()) return 0.0;
  const double R = ff.support_radius();
  const int d = ff.dim();
  if (k == 0.0) return ff.mass();
  const int panels = std::max(8, static_cast<int>(std::ceil(k * R / 2.0)) + 8);
  if (d == 1) {
    return 2.0 * integrate_gl([&](double s) { return std::cos(k * s) * ff(s); }, 0.0, R, panels);
  }
  if (d == 3) {
    return 4.0 * pi / k *
           integrate_gl([&](double s) { return s * std::sin(k * s) * ff(s); }, 0.0, R, panels);
  }
  const double nu = 0.5 * d - 1.0;
  const double pref = std::pow(2.0 * pi, 0.5 * d) * std::pow(k, -nu);
  // Integer orders via jn; half-integer orders via spherical Bessel functions.
  auto bessel = [d](double x) {
    if (d % 2 == 0) return ::jn(d / 2 - 1, x);
    if (x == 0.0) return 0.0;
    return std::sqrt(2.0 * x / pi) * std::sph_bessel(static_cast<unsigned>((d - 3) / 2), x);
  };
  return pref * integrate_gl(
                    [&](double s) { return std::pow(s, 0.5 * d) * bessel(k * s) * ff(s); }, 0.0,
                    R, panels);
}

ConvolvedProfile::ConvolvedProfile(int dim, RadialTable table, std::vector<double> second)
    : dim_(dim), table_(std::move(table)), second_(std::move(second)) {}

double ConvolvedProfile::second(double r) const {
  r = std::abs(r);
  if (r >= table_.rmax() || second_.empty()) return 0.0;
  const double u = r / table_.step();
  std::size_t i = static_cast<std::size_t>(u);
  if (i + 1 >= second_.size()) i = second_.size() - 2;
  const double s = u - static_cast<double>(i);
  return (1.0 - s) * second_[i] + s * second_[i + 1];
}

double ConvolvedProfile::max_abs_slope() const {
  double m = 0;
  for (double v : table_.slopes()) m = std::max(m, std::abs(v));
  return m;
}

double ConvolvedProfile::max_abs_second() const {
  double m = 0;
  for (double v : second_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

std::vector<double> convolve_1d(const FormFactor& s, const std::vector<double>& rs) {
  const double R = s.support_radius();
  std::vector<double> out(rs.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double r = rs[i];
    if (r >= 2 * R) {
      out[i] = 0.0;
      continue;
    }
    out[i] = integrate_gl([&](double y) { return s(y) * s(r - y); }, r - R, R, 16);
  }
  return out;
}

// Radial reduction: Sigma(r) = (2 pi / r) int s sigma(s) [P(r+s) - P(|r-s|)] ds, P' = u sigma(u).
std::vector<double> convolve_3d(const FormFactor& s, const std::vector<double>& rs) {
  const double R = s.support_radius();
  const std::size_t m = 8193;
  const double hp = R / static_cast<double>(m - 1);
  std::vector<double> P(m, 0.0), dP(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) dP[j] = j * hp * s(j * hp);
  for (std::size_t j = 1; j < m; ++j) {
    const double a = (j - 1) * hp;
    P[j] = P[j - 1] + integrate_gl([&](double u) { return u * s(u); }, a, a + hp, 1);
  }
  const RadialTable ptab(R, P, dP);
  const double ptop = P.back();
  auto Pf = [&](double u) { return u >= R ? ptop : ptab.value(u); };
  const double at_zero = s.l2_norm_squared();

  std::vector<double> out(rs.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double r = rs[i];
    if (r == 0.0) {
      out[i] = at_zero;
      continue;
    }
    if (r >= 2 * R) {
      out[i] = 0.0;
      continue;
    }
    auto f = [&](double y) { return y * s(y) * (Pf(r + y) - Pf(std::abs(r - y))); };
    double acc;
    if (r < R) {
      acc = integrate_gl(f, 0.0, r, 8) + integrate_gl(f, r, R, 16);
    } else {
      acc = integrate_gl(f, 0.0, R, 16);
    }
    out[i] = 2.0 * pi / r * acc;
  }
  return out;
}

// Angular quadrature for general d >= 2.
std::vector<double> convolve_angular(const FormFactor& s, const std::vector<double>& rs) {
  const int d = s.dim();
  const double R = s.support_radius();
  const double shell = sphere_area(d - 1);
  std::vector<double> out(rs.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double r = rs[i];
    if (r >= 2 * R) {
      out[i] = 0.0;
      continue;
    }
    auto outer = [&](double y) {
      auto inner = [&](double phi) {
        const double dist = std::sqrt(std::max(0.0, r * r + y * y - 2 * r * y * std::cos(phi)));
        return s(dist) * std::pow(std::sin(phi), d - 2);
      };
      return std::pow(y, d - 1) * s(y) * integrate_gl(inner, 0.0, pi, 8);
    };
    out[i] = shell * integrate_gl(outer, 0.0, R, 8);
  }
  return out;
}

}  // namespace

ConvolvedProfile self_convolve(const FormFactor& sigma1, std::size_t points) {
  require(points >= 8, ErrorKind::InvalidParameter, "self_convolve needs at least 8 points");
  const double rmax = 2.0 * sigma1.support_radius();
  const double h = rmax / static_cast<double>(points - 1);
  std::vector<double> rs(points);
  for (std::size_t i = 0; i < points; ++i) rs[i] = i * h;
  std::vector<double> values;
  if (sigma1.is_zero()) {
    values.assign(points, 0.0);
  } else if (sigma1.dim() == 1) {
    values = convolve_1d(sigma1, rs);
  } else if (sigma1.dim() == 3) {
    values = convolve_3d(sigma1, rs);
  } else {
    values = convolve_angular(sigma1, rs);
  }
  auto slopes = derivative_table(values, h, +1);
  auto second = derivative_table(slopes, h, -1);
  return ConvolvedProfile(sigma1.dim(), RadialTable(rmax, std::move(values), std::move(slopes)),
                          std::move(second));
}

namespace {

double hfun(double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; }
double hfun_prime(double s) { return s > 0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

}  // namespace

double cutoff_theta(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = hfun(2.0 - r), b = hfun(r - 1.0);
  return a / (a + b);
}

double cutoff_theta_derivative(double r) {
  if (r <= 1.0 || r >= 2.0) return 0.0;
  const double a = hfun(2.0 - r), b = hfun(r - 1.0);
  const double da = -hfun_prime(2.0 - r), db = hfun_prime(r - 1.0);
  return (da * b - a * db) / ((a + b) * (a + b));
}

double coulomb_constant(int dim) {
  require(dim >= 3, ErrorKind::UnsupportedDimension,
          "C_d normalization integral diverges for dimension < 3");
  boost::math::quadrature::tanh_sinh<double> ts;
  double integral;
  if (dim == 3) {
    // Angular part done analytically; [1, inf) folds onto (0, 1) under r -> 1/r.
    auto f = [](double u, double uc) {
      const double one_minus = (u > 0.5) ? uc : 1.0 - u;
      if (u < 1e-8) return 2.0;
      return (std::log1p(u) - std::log(one_minus)) / u;
    };
    integral = 2.0 * 2.0 * pi * ts.integrate(f, 0.0, 1.0);
  } else {
    const double shell = sphere_area(dim - 1);
    auto angular = [&](double u, double uc) {
      const double one_minus = (u > 0.5) ? uc : 1.0 - u;
      auto inner = [&](double phi) {
        const double sh = std::sin(0.5 * phi);
        const double q = one_minus * one_minus + 4.0 * u * sh * sh;
        if (q <= 0.0) return 0.0;
        const double sp = std::sin(phi);
        return std::pow(sp * sp / q, 0.5 * (dim - 2)) / std::sqrt(q);
      };
      boost::math::quadrature::tanh_sinh<double> inner_ts;
      return shell * inner_ts.integrate(inner, 0.0, pi) * (1.0 + std::pow(u, dim - 3));
    };
    integral = ts.integrate(angular, 0.0, 1.0);
  }
  return 1.0 / std::sqrt(sphere_area(dim) * (dim - 2) * integral);
}

double MollifiedCoulombFamily::theta_eps(double r) const {
  return cutoff_theta(std::sqrt(epsilon) * std::abs(r));
}

namespace {

// a(y) = int_1^y (theta(w) - 1)/w dw, continued by a(2) - ln(y/2) for y > 2.
class CutoffLogIntegral {
 public:
  CutoffLogIntegral() {
    const std::size_t m = 4097;
    const double h = 1.0 / static_cast<double>(m - 1);
    std::vector<double> v(m, 0.0), d(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double y = 1.0 + j * h;
      d[j] = (cutoff_theta(y) - 1.0) / y;
    }
    for (std::size_t j = 1; j < m; ++j) {
      const double a = 1.0 + (j - 1) * h;
      v[j] = v[j - 1] +
             integrate_gl([](double y) { return (cutoff_theta(y) - 1.0) / y; }, a, a + h, 1);
    }
    top_ = v.back();
    table_ = RadialTable(1.0, std::move(v), std::move(d));
  }
  double operator()(double y) const {
    if (y <= 1.0) return 0.0;
    if (y >= 2.0) return top_ - std::log(0.5 * y);
    return table_.value(y - 1.0);
  }

 private:
  RadialTable table_;
  double top_ = 0.0;
};

const CutoffLogIntegral& cutoff_log_integral() {
  static const CutoffLogIntegral a;
  return a;
}

}  // namespace

MollifiedCoulombFamily mollified_coulomb(double eps, int dim, std::size_t points) {
  require(eps > 0.0 && eps <= 1.0, ErrorKind::InvalidParameter, "mollified_coulomb needs 0 < eps <= 1");
  require(dim >= 3, ErrorKind::UnsupportedDimension,
          "mollified Coulomb family requires dimension >= 3");
  require(dim == 3, ErrorKind::UnsupportedDimension,
          "mollified Coulomb profile is implemented for dimension 3 only");
  MollifiedCoulombFamily fam;
  fam.epsilon = eps;
  fam.dim = dim;
  fam.c_d = coulomb_constant(dim);
  const double se = std::sqrt(eps);
  fam.delta_eps = FormFactor::bump(dim, se, 1.0);

  const auto& alog = cutoff_log_integral();
  auto B = [&](double u) { return std::log(u) + alog(se * u); };
  const double rmax = 2.0 / se + se;
  const double h = rmax / static_cast<double>(points - 1);
  std::vector<double> values(points);
  const FormFactor& de = fam.delta_eps;
  const double c = fam.c_d;
  const double at_zero = c * de.radial_integral([](double s) { return 1.0 / (s * s); });
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < points; ++i) {
    const double r = i * h;
    if (i == 0) {
      values[i] = at_zero;
      continue;
    }
    if (i + 1 == points) {
      values[i] = 0.0;
      continue;
    }
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double s) {
      if (s <= 0.0 || s == r) return 0.0;
      return s * de(s) * (B(r + s) - B(std::abs(r - s)));
    };
    double acc;
    if (r < se) {
      acc = ts.integrate(f, 0.0, r) + ts.integrate(f, r, se);
    } else {
      acc = ts.integrate(f, 0.0, se);
    }
    values[i] = std::max(0.0, c * 2.0 * pi / r * acc);
  }
  auto slopes = derivative_table(values, h, +1);
  fam.sigma1_eps = FormFactor::tabulated(dim, RadialTable(rmax, std::move(values), std::move(slopes)));
  return fam;
}

namespace {

// chi_2(y) = sum_k y^(2k+1) / (2k+1)^2 for 0 <= y <= 1/2.
double legendre_chi2(double y) {
  double acc = 0, p = y;
  const double y2 = y * y;
  for (int k = 0; k < 200; ++k) {
    const double term = p / ((2.0 * k + 1) * (2.0 * k + 1));
    acc += term;
    if (term < 1e-18 * acc) break;
    p *= y2;
  }
  return acc;
}

}  // namespace

double kernel_gap_profile(double eps, double r, const GapNormOptions& opt) {
  require(eps > 0.0 && eps <= 1.0, ErrorKind::InvalidParameter, "kernel gap needs 0 < eps <= 1");
  if (!opt.cutoff || r <= 0.0) return 0.0;
  const double se = std::sqrt(eps);
  const double l1 = 1.0 / se, l2 = 2.0 / se;
  const auto& alog = cutoff_log_integral();
  auto theta = [&](double u) { return cutoff_theta(se * u); };
  auto Aa = [&](double u) { return alog(se * u); };                    // int_0^u (theta-1)/w dw
  auto At = [&](double u) { return u > l1 ? (theta(u) - 1.0) / u : 0.0; };  // (theta-1)/u

  const double S = 2.0 * r + l2;
  const double s0 = std::max(0.0, l1 - r);
  std::vector<double> cuts = {s0, r, std::abs(l1 - r), l1 + r, std::abs(l2 - r), l1, l2, l2 + r, S};
  std::vector<double> pts;
  for (double c : cuts) {
    if (c >= s0 && c <= S) pts.push_back(c);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }),
            pts.end());

  double J = 0.0, Jp = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k], b = pts[k + 1];
    if (b - a <= 0) continue;
    J += integrate_gl(
        [&](double s) { return (theta(s) + 1.0) / s * (Aa(r + s) - Aa(std::abs(r - s))); }, a, b,
        opt.inner_panels);
    Jp += integrate_gl(
        [&](double s) {
          const double sg = (r > s) ? 1.0 : -1.0;
          return (theta(s) + 1.0) / s * (At(r + s) - sg * At(std::abs(r - s)));
        },
        a, b, opt.inner_panels);
  }
  const double y = r / S;
  J += -2.0 * legendre_chi2(y);
  Jp += -std::log1p(-y * y) / r;

  const double c = coulomb_constant(3);
  return c * c * 2.0 * pi * (Jp / r - J / (r * r));
}

double kernel_gap_norm(double eps, double q_exp, const GapNormOptions& opt) {
  require(q_exp > 1.5 && std::isfinite(q_exp), ErrorKind::InvalidParameter,
          "kernel gap exponent must satisfy 3/2 < q < inf");
  require(eps > 0.0 && eps <= 1.0, ErrorKind::InvalidParameter, "kernel gap needs 0 < eps <= 1");
  if (!opt.cutoff) return 0.0;
  const double se = std::sqrt(eps);
  const double R = 4.0 / se;
  const int per = std::max(2, opt.radial_panels / 4);
  double acc = 0.0;
  for (int seg = 0; seg < 4; ++seg) {
    acc += integrate_gl(
        [&](double r) {
          const double o = kernel_gap_profile(eps, r, opt);
          return 4.0 * pi * r * r * std::pow(std::abs(o), q_exp);
        },
        seg / se, (seg + 1) / se, per);
  }
  const double tail = std::pow(4.0 * pi, 1.0 - q_exp) * std::pow(R, 3.0 - 2.0 * q_exp) / (2.0 * q_exp - 3.0);
  return std::pow(acc + tail, 1.0 / q_exp);
}

double inner_factor_norm(double eps, double p, int dim, int panels) {
  require(eps > 0.0 && eps <= 1.0, ErrorKind::InvalidParameter, "inner factor needs 0 < eps <= 1");
  require(dim >= 3, ErrorKind::UnsupportedDimension, "inner factor requires dimension >= 3");
  require(3.0 * p > dim, ErrorKind::InvalidParameter, "inner factor norm diverges for 3p <= d");
  const double se = std::sqrt(eps);
  auto h = [&](double r) {
    const double th = cutoff_theta(se * r);
    const double dth = se * cutoff_theta_derivative(se * r);
    return std::abs(dth / (r * r) + (1.0 - dim) * (th - 1.0) / (r * r * r));
  };
  const double area = sphere_area(dim);
  const double acc = area * integrate_gl(
                                [&](double r) { return std::pow(r, dim - 1) * std::pow(h(r), p); },
                                1.0 / se, 2.0 / se, panels);
  const double R = 2.0 / se;
  const double tail = area * std::pow(dim - 1.0, p) * std::pow(R, dim - 3.0 * p) / (3.0 * p - dim);
  return std::pow(acc + tail, 1.0 / p);
}

}  // namespace vwlab
