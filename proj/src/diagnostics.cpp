#include "vwlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vwlab/error.hpp"

namespace vwlab {

namespace {

void require_match(const PhaseSpaceState& f, const PotentialField& phi) {
  require(f.x.n >= 1 && !phi.values.empty(), ErrorKind::InvalidInput, "empty state or field");
  const double h = f.x.step();
  require(std::abs(phi.grid.step() - h) <= 1e-12 * h, ErrorKind::InvalidInput,
          "potential grid spacing differs from the phase-space grid");
}

}  // namespace

DiagnosticsRecord total_energy(const PhaseSpaceState& f, const PotentialField& phi,
                               const ExternalPotential& V, const WaveEnergy* wave) {
  require_match(f, phi);
  DiagnosticsRecord d;
  d.t = f.t;
  const double vol = f.cell_volume();
  double mass = 0, l2 = 0, linf = 0, kin = 0, ext = 0, cpl = 0, m2 = 0;
  for (int i = 0; i < f.x.n; ++i) {
    const double x = f.x.node(i);
    const double Vx = V.value(x), Px = phi.eval(x).value;
    double rm = 0, rl2 = 0, rk = 0, rv2 = 0;
    for (int j = 0; j < f.v.n; ++j) {
      const double a = f.at(i, j), v = f.v.node(j);
      rm += a;
      rl2 += a * a;
      rk += a * v * v;
      rv2 += a * v * v;
      linf = std::max(linf, std::abs(a));
    }
    mass += rm;
    l2 += rl2;
    kin += 0.5 * rk;
    ext += Vx * rm;
    cpl += Px * rm;
    m2 += x * x * rm + rv2;
  }
  d.mass = mass * vol;
  d.l1 = d.mass;
  d.l2 = std::sqrt(l2 * vol);
  d.linf = linf;
  d.kinetic = kin * vol;
  d.external = ext * vol;
  d.coupling = cpl * vol;
  d.m2 = m2 * vol;
  if (wave) {
    d.wave_terms = true;
    d.wave_kinetic = wave->kinetic;
    d.wave_elastic = wave->elastic;
  }
  return d;
}

double lp_norm(const PhaseSpaceState& f, double p) {
  require(p >= 1.0, ErrorKind::InvalidParameter, "lp_norm needs p >= 1");
  if (std::isinf(p)) return f.sup();
  double acc = 0;
  for (int i = 0; i < f.x.n; ++i) {
    double row = 0;
    for (int j = 0; j < f.v.n; ++j) row += std::pow(std::abs(f.at(i, j)), p);
    acc += row;
  }
  return std::pow(acc * f.cell_volume(), 1.0 / p);
}

namespace {

double power(double z, double k, bool signed_power) {
  const double a = std::pow(std::abs(z), k);
  return (signed_power && z < 0) ? -a : a;
}

}  // namespace

double moment_x(const PhaseSpaceState& f, double k, bool signed_power) {
  require(k >= 0.0, ErrorKind::InvalidParameter, "moment order must be >= 0");
  double acc = 0;
  for (int i = 0; i < f.x.n; ++i) {
    double row = 0;
    for (int j = 0; j < f.v.n; ++j) row += f.at(i, j);
    acc += power(f.x.node(i), k, signed_power) * row;
  }
  return acc * f.cell_volume();
}

double moment_v(const PhaseSpaceState& f, double k, bool signed_power) {
  require(k >= 0.0, ErrorKind::InvalidParameter, "moment order must be >= 0");
  std::vector<double> col(f.v.n, 0.0);
  for (int i = 0; i < f.x.n; ++i) {
    for (int j = 0; j < f.v.n; ++j) col[j] += f.at(i, j);
  }
  double acc = 0;
  for (int j = 0; j < f.v.n; ++j) acc += power(f.v.node(j), k, signed_power) * col[j];
  return acc * f.cell_volume();
}

void Distribution1D::add_atom(double x, double w) {
  require(w >= 0.0 && std::isfinite(w) && std::isfinite(x), ErrorKind::InvalidInput,
          "atoms need finite position and nonnegative weight");
  if (w > 0.0) atoms_.push_back({x, w});
}

void Distribution1D::add_segment(double a, double b, double w) {
  require(b > a && w >= 0.0 && std::isfinite(w), ErrorKind::InvalidInput,
          "segments need b > a and nonnegative weight");
  if (w > 0.0) segments_.push_back({a, b, w});
}

Distribution1D Distribution1D::from_density(const MacroDensity& rho) {
  Distribution1D d;
  const double h = rho.x.step();
  for (int i = 0; i < rho.x.n; ++i) {
    const double lo = rho.x.lo + i * h;
    d.add_segment(lo, lo + h, std::max(0.0, rho.rho[i]) * h);
  }
  return d;
}

Distribution1D Distribution1D::from_atoms(std::span<const double> x, std::span<const double> w) {
  require(x.size() == w.size(), ErrorKind::InvalidInput, "atom positions and weights differ in size");
  Distribution1D d;
  for (std::size_t i = 0; i < x.size(); ++i) d.add_atom(x[i], w[i]);
  return d;
}

double Distribution1D::mass() const {
  double m = 0;
  for (const auto& a : atoms_) m += a.w;
  for (const auto& s : segments_) m += s.w;
  return m;
}

void Distribution1D::scale(double s) {
  for (auto& a : atoms_) a.w *= s;
  for (auto& g : segments_) g.w *= s;
}

namespace {

struct Event {
  double x;
  double jump;     // atom mass, signed by distribution
  double density;  // change in signed active density
};

// Integral over [0, L] of |c0 + s t|.
double abs_linear_integral(double c0, double s, double L) {
  const double c1 = c0 + s * L;
  if ((c0 >= 0 && c1 >= 0) || (c0 <= 0 && c1 <= 0)) return 0.5 * std::abs(c0 + c1) * L;
  const double root = -c0 / s;
  return 0.5 * std::abs(c0) * root + 0.5 * std::abs(c1) * (L - root);
}

}  // namespace

double wasserstein1_1d(const Distribution1D& a, const Distribution1D& b) {
  const double ma = a.mass(), mb = b.mass();
  require(ma > 0.0 && mb > 0.0, ErrorKind::UndefinedDistance, "W1 undefined for zero-mass input");
  double sa = 1.0, sb = 1.0;
  // Unequal masses: b is rescaled to the mass of a; mismatches beyond the drift tolerance warn.
  if (ma != mb) {
    sb = ma / mb;
    if (std::abs(ma - mb) > 1e-6 * std::max(ma, mb)) {
      warn("W1 inputs differ in mass (" + std::to_string(ma) + " vs " + std::to_string(mb) +
           "); second input rescaled to the first");
    }
  }
  // Difference measure a - b as a sorted event stream.
  std::vector<Event> ev;
  ev.reserve(a.atoms().size() + b.atoms().size() + 2 * (a.segments().size() + b.segments().size()));
  auto push = [&](const Distribution1D& d, double sign) {
    for (const auto& t : d.atoms()) ev.push_back({t.x, sign * t.w, 0.0});
    for (const auto& s : d.segments()) {
      const double rho = sign * s.w / (s.b - s.a);
      ev.push_back({s.a, 0.0, rho});
      ev.push_back({s.b, 0.0, -rho});
    }
  };
  push(a, sa);
  push(b, -sb);
  std::sort(ev.begin(), ev.end(), [](const Event& p, const Event& q) { return p.x < q.x; });
  double F = 0.0, dens = 0.0, acc = 0.0;
  std::size_t i = 0;
  while (i < ev.size()) {
    const double x = ev[i].x;
    while (i < ev.size() && ev[i].x == x) {
      F += ev[i].jump;
      dens += ev[i].density;
      ++i;
    }
    if (i == ev.size()) break;
    const double L = ev[i].x - x;
    acc += abs_linear_integral(F, dens, L);
    F += dens * L;
  }
  return acc;
}

SlicedWasserstein::SlicedWasserstein(const Grid1D& x, const Grid1D& v, int directions)
    : x_(x), v_(v) {
  require(directions >= 1, ErrorKind::InvalidParameter, "sliced W1 needs >= 1 direction");
  const std::size_t cells = static_cast<std::size_t>(x.n) * v.n;
  order_.resize(directions);
  gaps_.resize(directions);
  std::vector<double> proj(cells);
  for (int k = 0; k < directions; ++k) {
    const double th = (k + 0.5) * pi / directions;
    const double ct = std::cos(th), st = std::sin(th);
    for (int i = 0; i < x.n; ++i) {
      for (int j = 0; j < v.n; ++j) proj[static_cast<std::size_t>(i) * v.n + j] = x.node(i) * ct + v.node(j) * st;
    }
    auto& ord = order_[k];
    ord.resize(cells);
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::stable_sort(ord.begin(), ord.end(), [&](std::size_t p, std::size_t q) { return proj[p] < proj[q]; });
    auto& g = gaps_[k];
    g.resize(cells);
    for (std::size_t m = 0; m + 1 < cells; ++m) g[m] = proj[ord[m + 1]] - proj[ord[m]];
    g[cells - 1] = 0.0;
  }
}

double SlicedWasserstein::operator()(const PhaseSpaceState& a, const PhaseSpaceState& b) const {
  require(a.x == x_ && a.v == v_ && b.x == x_ && b.v == v_, ErrorKind::InvalidInput,
          "sliced W1 inputs must live on the precomputed grid");
  const double ma = a.mass(), mb = b.mass();
  require(ma > 0.0 && mb > 0.0, ErrorKind::UndefinedDistance, "W1 undefined for zero-mass input");
  double sa = 1.0, sb = 1.0;
  // Unequal masses: b is rescaled to the mass of a; mismatches beyond the drift tolerance warn.
  if (ma != mb) {
    sb = ma / mb;
    if (!warned_ && std::abs(ma - mb) > 1e-6 * std::max(ma, mb)) {
      warned_ = true;
      warn("W1 inputs differ in mass (" + std::to_string(ma) + " vs " + std::to_string(mb) +
           "); second input rescaled to the first");
    }
  }
  const double vol = a.cell_volume();
  std::vector<double> per(order_.size());
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < order_.size(); ++k) {
    const auto& ord = order_[k];
    const auto& g = gaps_[k];
    double F = 0.0, acc = 0.0;
    for (std::size_t m = 0; m < ord.size(); ++m) {
      F += (sa * a.f[ord[m]] - sb * b.f[ord[m]]) * vol;
      acc += std::abs(F) * g[m];
    }
    per[k] = acc;
  }
  double total = 0.0;
  for (double p : per) total += p;
  return total / static_cast<double>(per.size());
}

double sliced_wasserstein1(const PhaseSpaceState& a, const PhaseSpaceState& b, int directions) {
  return SlicedWasserstein(a.x, a.v, directions)(a, b);
}

}  // namespace vwlab
