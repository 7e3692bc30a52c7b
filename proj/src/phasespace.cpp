#include "vwlab/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vwlab/error.hpp"
#include "vwlab/numerics.hpp"

namespace vwlab {

Grid1D Grid1D::padded(int pad) const {
  const double h = step();
  return {lo - pad * h, hi + pad * h, n + 2 * pad};
}

double MacroDensity::mass() const {
  double acc = 0.0;
  for (double r : rho) acc += r;
  return acc * x.step();
}

PhaseSpaceState::PhaseSpaceState(Grid1D xg, Grid1D vg) : x(xg), v(vg) {
  require(x.n >= 2 && v.n >= 2 && x.hi > x.lo && v.hi > v.lo, ErrorKind::InvalidParameter,
          "phase-space grid needs >= 2 cells and hi > lo on both axes");
  f.assign(static_cast<std::size_t>(x.n) * v.n, 0.0);
}

double PhaseSpaceState::mass() const {
  // Row partial sums keep the reduction order fixed.
  double acc = 0.0;
  for (int i = 0; i < x.n; ++i) {
    double row = 0.0;
    for (int j = 0; j < v.n; ++j) row += at(i, j);
    acc += row;
  }
  return acc * cell_volume();
}

double PhaseSpaceState::sup() const {
  double m = 0.0;
  for (double a : f) m = std::max(m, std::abs(a));
  return m;
}

MacroDensity PhaseSpaceState::density() const {
  MacroDensity d{x, std::vector<double>(x.n, 0.0)};
  const double hv = v.step();
  for (int i = 0; i < x.n; ++i) {
    double row = 0.0;
    for (int j = 0; j < v.n; ++j) row += at(i, j);
    d.rho[i] = row * hv;
  }
  return d;
}

namespace {

double bump_profile(double u) { return u < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

// 2 pi int_0^1 u bump(u) du
double bump_plane_integral() {
  static const double v =
      2.0 * pi * integrate_gl([](double u) { return u * bump_profile(u); }, 0.0, 1.0, 64);
  return v;
}

}  // namespace

InitialProfile::InitialProfile(std::vector<PhaseBump> bumps) : bumps_(std::move(bumps)) {
  for (const auto& b : bumps_) {
    require(b.radius > 0.0 && std::isfinite(b.radius), ErrorKind::InvalidParameter,
            "phase bump radius must be positive");
    require(b.mass >= 0.0 && std::isfinite(b.mass), ErrorKind::Hypothesis,
            "(H4) initial density must be nonnegative with finite mass");
    require(std::isfinite(b.x) && std::isfinite(b.v), ErrorKind::InvalidParameter,
            "phase bump center must be finite");
  }
}

double InitialProfile::operator()(double x, double v) const {
  double acc = 0.0;
  const double norm = bump_plane_integral();
  for (const auto& b : bumps_) {
    const double dx = (x - b.x) / b.radius, dv = (v - b.v) / b.radius;
    const double u2 = dx * dx + dv * dv;
    if (u2 >= 1.0) continue;
    acc += b.mass / (norm * b.radius * b.radius) * std::exp(-1.0 / (1.0 - u2));
  }
  return acc;
}

double InitialProfile::mass() const {
  double m = 0.0;
  for (const auto& b : bumps_) m += b.mass;
  return m;
}

double InitialProfile::sup() const {
  // Maximum over bump centres; exact for disjoint bumps.
  double best = 0.0;
  for (const auto& b : bumps_) best = std::max(best, (*this)(b.x, b.v));
  return best;
}

double InitialProfile::support_radius() const {
  double r = 0.0;
  for (const auto& b : bumps_) r = std::max(r, std::hypot(b.x, b.v) + b.radius);
  return r;
}

double InitialProfile::max_abs_x() const {
  double r = 0.0;
  for (const auto& b : bumps_) r = std::max(r, std::abs(b.x) + b.radius);
  return r;
}

double InitialProfile::max_abs_v() const {
  double r = 0.0;
  for (const auto& b : bumps_) r = std::max(r, std::abs(b.v) + b.radius);
  return r;
}

PhaseSpaceState InitialProfile::sample(const Grid1D& x, const Grid1D& v) const {
  PhaseSpaceState s(x, v);
  for (int i = 0; i < x.n; ++i) {
    for (int j = 0; j < v.n; ++j) s.at(i, j) = (*this)(x.node(i), v.node(j));
  }
  return s;
}

ExternalPotential ExternalPotential::zero() { return {}; }

ExternalPotential ExternalPotential::harmonic(double k) {
  require(std::isfinite(k), ErrorKind::InvalidParameter, "harmonic constant must be finite");
  ExternalPotential p;
  p.kind_ = Kind::Harmonic;
  p.param_ = k;
  return p;
}

ExternalPotential ExternalPotential::linear(double F) {
  require(std::isfinite(F), ErrorKind::InvalidParameter, "drift constant must be finite");
  ExternalPotential p;
  p.kind_ = Kind::Linear;
  p.param_ = F;
  return p;
}

ExternalPotential ExternalPotential::table(double lo, double hi, std::vector<double> values) {
  require(hi > lo && values.size() >= 4, ErrorKind::InvalidParameter,
          "potential table needs hi > lo and >= 4 nodes");
  for (double v : values) {
    require(std::isfinite(v), ErrorKind::Hypothesis, "(H2) potential table must be finite");
  }
  ExternalPotential p;
  p.kind_ = Kind::Table;
  p.lo_ = lo;
  p.hi_ = hi;
  const std::size_t n = values.size();
  const double h = (hi - lo) / static_cast<double>(n - 1);
  p.slopes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      p.slopes_[i] = (-3 * values[0] + 4 * values[1] - values[2]) / (2 * h);
    } else if (i + 1 == n) {
      p.slopes_[i] = (3 * values[n - 1] - 4 * values[n - 2] + values[n - 3]) / (2 * h);
    } else {
      p.slopes_[i] = (values[i + 1] - values[i - 1]) / (2 * h);
    }
  }
  p.values_ = std::move(values);
  return p;
}

namespace {

HermiteCell table_eval(double x, double lo, double hi, const std::vector<double>& v,
                       const std::vector<double>& d) {
  require(x >= lo && x <= hi, ErrorKind::OutOfDomain,
          "position outside the external potential table; widen the table beyond the a-priori "
          "radius");
  const double h = (hi - lo) / static_cast<double>(v.size() - 1);
  const double u = (x - lo) / h;
  std::size_t i = static_cast<std::size_t>(u);
  if (i + 1 >= v.size()) i = v.size() - 2;
  return hermite(u - static_cast<double>(i), h, v[i], d[i], v[i + 1], d[i + 1]);
}

}  // namespace

double ExternalPotential::value(double x) const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Harmonic: return 0.5 * param_ * x * x;
    case Kind::Linear: return param_ * x;
    case Kind::Table: return table_eval(x, lo_, hi_, values_, slopes_).value;
  }
  return 0.0;
}

double ExternalPotential::gradient(double x) const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Harmonic: return param_ * x;
    case Kind::Linear: return param_;
    case Kind::Table: return table_eval(x, lo_, hi_, values_, slopes_).slope;
  }
  return 0.0;
}

double ExternalPotential::hessian_bound(double r) const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::Linear: return 0.0;
    case Kind::Harmonic: return std::abs(param_);
    case Kind::Table: {
      const double h = (hi_ - lo_) / static_cast<double>(values_.size() - 1);
      double m = 0.0;
      for (std::size_t i = 0; i < slopes_.size(); ++i) {
        const double x = lo_ + i * h;
        if (std::abs(x) > r + h) continue;
        if (i + 1 < slopes_.size()) {
          // Hermite second derivative peaks at cell ends.
          const double dv = (values_[i + 1] - values_[i]) / h;
          const double a = std::abs((6 * dv - 4 * slopes_[i] - 2 * slopes_[i + 1]) / h);
          const double b = std::abs((-6 * dv + 2 * slopes_[i] + 4 * slopes_[i + 1]) / h);
          m = std::max({m, a, b});
        }
      }
      return m;
    }
  }
  return 0.0;
}

double ExternalPotential::lower_bound_constant() const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Harmonic: return param_ >= 0 ? 0.0 : 0.5 * -param_;
    case Kind::Linear: return 0.5 * std::abs(param_);
    case Kind::Table: {
      const double h = (hi_ - lo_) / static_cast<double>(values_.size() - 1);
      double c = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        const double x = lo_ + i * h;
        c = std::max(c, -values_[i] / (1.0 + x * x));
      }
      return c;
    }
  }
  return 0.0;
}

bool ExternalPotential::nonnegative() const {
  switch (kind_) {
    case Kind::Zero: return true;
    case Kind::Harmonic: return param_ >= 0.0;
    case Kind::Linear: return param_ == 0.0;
    case Kind::Table:
      return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
  }
  return false;
}

std::string ExternalPotential::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Zero: os << "zero"; break;
    case Kind::Harmonic: os << "harmonic " << param_; break;
    case Kind::Linear: os << "linear " << param_; break;
    case Kind::Table: os << "table " << lo_ << ' ' << hi_ << ' ' << values_.size(); break;
  }
  return os.str();
}

}  // namespace vwlab
