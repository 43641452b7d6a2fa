#include "tcethermo/rational_map.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tcethermo/errors.hpp"

namespace tce {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::size_t effective_degree(const std::vector<Complex>& c) {
  std::size_t n = c.size();
  while (n > 0 && c[n - 1] == Complex{0.0, 0.0}) --n;
  return n == 0 ? 0 : n - 1;
}

double max_norm(const std::vector<Complex>& c) {
  double m = 0.0;
  for (const Complex& z : c) m = std::max(m, std::abs(z));
  return m;
}

std::vector<Complex> poly_mul(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  std::vector<Complex> out(a.size() + b.size() - 1, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<Complex> poly_derivative(const std::vector<Complex>& a) {
  if (a.size() <= 1) return {Complex{0.0, 0.0}};
  std::vector<Complex> out(a.size() - 1);
  for (std::size_t k = 1; k < a.size(); ++k) out[k - 1] = static_cast<double>(k) * a[k];
  return out;
}

void add_into(std::vector<Complex>& acc, const std::vector<Complex>& term, Complex scale) {
  if (acc.size() < term.size()) acc.resize(term.size(), Complex{0.0, 0.0});
  for (std::size_t k = 0; k < term.size(); ++k) acc[k] += scale * term[k];
}

/// Resultant magnitude of two homogeneous forms of degree d given by
/// ascending coefficient lists of length d + 1.
double homogeneous_resultant_abs(const std::vector<Complex>& f, const std::vector<Complex>& g) {
  const int d = static_cast<int>(f.size()) - 1;
  const int n = 2 * d;
  Eigen::MatrixXcd sylvester = Eigen::MatrixXcd::Zero(n, n);
  for (int row = 0; row < d; ++row) {
    for (int k = 0; k <= d; ++k) {
      sylvester(row, row + k) = f[d - k];
      sylvester(row + d, row + k) = g[d - k];
    }
  }
  return std::abs(sylvester.partialPivLu().determinant());
}

// Coefficients in the chart u = 1/z: u^d N(1/u) reverses the list.
std::vector<Complex> reversed(const std::vector<Complex>& c) { return {c.rbegin(), c.rend()}; }

// Value and derivative of the homogeneous pair in the chart that keeps |u| <= 1.
struct ChartValue {
  Complex u;
  PolyValue p;
  PolyValue q;
};

ChartValue chart_eval(const RationalMap& map, const SpherePoint& z) {
  const auto& num = map.numerator();
  const auto& den = map.denominator();
  if (!z.is_infinity() && std::abs(z.value()) <= 1.0) {
    return {z.value(), horner(num, z.value()), horner(den, z.value())};
  }
  const Complex u = z.is_infinity() ? Complex{0.0, 0.0} : 1.0 / z.value();
  const std::vector<Complex> rn = reversed(num);
  const std::vector<Complex> rd = reversed(den);
  return {u, horner(rn, u), horner(rd, u)};
}

SpherePoint finite_or_infinity(Complex w) {
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return SpherePoint::infinity();
  return SpherePoint(w);
}

}  // namespace

RationalMap::RationalMap(std::vector<Complex> num, std::vector<Complex> den, bool polynomial)
    : num_(std::move(num)), den_(std::move(den)), degree_(static_cast<int>(num_.size()) - 1),
      polynomial_(polynomial) {}

RationalMap RationalMap::polynomial(std::vector<Complex> coeffs) {
  const std::size_t d = effective_degree(coeffs);
  if (d < 2) {
    std::ostringstream msg;
    msg << "polynomial degree " << d << " < 2";
    throw InvalidMap(msg.str());
  }
  coeffs.resize(d + 1);
  std::vector<Complex> den(d + 1, Complex{0.0, 0.0});
  den[0] = 1.0;
  return RationalMap(std::move(coeffs), std::move(den), true);
}

RationalMap RationalMap::rational(std::vector<Complex> numerator, std::vector<Complex> denominator) {
  const std::size_t dn = effective_degree(numerator);
  const std::size_t dd = effective_degree(denominator);
  if (max_norm(denominator) == 0.0) throw InvalidMap("denominator is identically zero");
  if (max_norm(numerator) == 0.0) throw InvalidMap("numerator is identically zero");
  if (dd == 0) {
    const Complex c = denominator[0];
    for (Complex& a : numerator) a /= c;
    return polynomial(std::move(numerator));
  }
  const std::size_t d = std::max(dn, dd);
  if (d < 2) throw InvalidMap("rational map degree < 2");
  numerator.resize(d + 1, Complex{0.0, 0.0});
  denominator.resize(d + 1, Complex{0.0, 0.0});

  std::vector<Complex> nf = numerator;
  std::vector<Complex> df = denominator;
  for (Complex& a : nf) a /= max_norm(numerator);
  for (Complex& b : df) b /= max_norm(denominator);
  const double res = homogeneous_resultant_abs(nf, df);
  if (!(res > 1e-10)) {
    std::ostringstream msg;
    msg << "numerator and denominator share a root (|resultant| = " << res << ")";
    throw InvalidMap(msg.str());
  }
  const double scale = std::max(max_norm(numerator), max_norm(denominator));
  for (Complex& a : numerator) a /= scale;
  for (Complex& b : denominator) b /= scale;
  return RationalMap(std::move(numerator), std::move(denominator), false);
}

std::optional<int> RationalMap::monomial_degree() const {
  if (!polynomial_) return std::nullopt;
  for (int k = 0; k < degree_; ++k) {
    if (num_[k] != Complex{0.0, 0.0}) return std::nullopt;
  }
  return degree_;
}

RationalMap RationalMap::compose(const RationalMap& inner) const {
  const std::vector<Complex>& p = inner.num_;
  const std::vector<Complex>& q = inner.den_;
  const int d = degree_;
  // powers of P and Q up to d
  std::vector<std::vector<Complex>> p_pow{{Complex{1.0, 0.0}}};
  std::vector<std::vector<Complex>> q_pow{{Complex{1.0, 0.0}}};
  for (int k = 1; k <= d; ++k) {
    p_pow.push_back(poly_mul(p_pow.back(), p));
    q_pow.push_back(poly_mul(q_pow.back(), q));
  }
  std::vector<Complex> num;
  std::vector<Complex> den;
  for (int k = 0; k <= d; ++k) {
    const std::vector<Complex> term = poly_mul(p_pow[k], q_pow[d - k]);
    add_into(num, term, num_[k]);
    add_into(den, term, den_[k]);
  }
  if (polynomial_ && inner.polynomial_) {
    const Complex c = den[0];
    for (Complex& a : num) a /= c;
    return polynomial(std::move(num));
  }
  return rational(std::move(num), std::move(den));
}

SpherePoint eval(const RationalMap& map, const SpherePoint& z) {
  if (map.is_polynomial()) {
    if (z.is_infinity()) return SpherePoint::infinity();
    return finite_or_infinity(horner(map.numerator(), z.value()).value);
  }
  const ChartValue cv = chart_eval(map, z);
  if (cv.q.value == Complex{0.0, 0.0}) return SpherePoint::infinity();
  return finite_or_infinity(cv.p.value / cv.q.value);
}

double sph_deriv_abs(const RationalMap& map, const SpherePoint& z) {
  const ChartValue cv = chart_eval(map, z);
  const Complex w = cv.p.derivative * cv.q.value - cv.p.value * cv.q.derivative;
  const double denom = std::norm(cv.p.value) + std::norm(cv.q.value);
  return std::abs(w) * (1.0 + std::norm(cv.u)) / denom;
}

Complex derivative(const RationalMap& map, Complex z) {
  const PolyValue n = horner(map.numerator(), z);
  if (map.is_polynomial()) return n.derivative;
  const PolyValue d = horner(map.denominator(), z);
  return (n.derivative * d.value - n.value * d.derivative) / (d.value * d.value);
}

double deriv_abs(const RationalMap& map, const SpherePoint& z, DerivativeKind kind) {
  if (kind == DerivativeKind::Spherical) return sph_deriv_abs(map, z);
  if (z.is_infinity()) return std::numeric_limits<double>::infinity();
  const Complex dz = derivative(map, z.value());
  if (!std::isfinite(dz.real()) || !std::isfinite(dz.imag())) return std::numeric_limits<double>::infinity();
  return std::abs(dz);
}

namespace {

// Newton polish of a simple root of p in the chart keeping |z| <= 1.
Complex polish_root(std::span<const Complex> coeffs, std::span<const Complex> rev_coeffs, Complex z) {
  const bool outer = std::abs(z) > 1.0;
  Complex u = outer ? 1.0 / z : z;
  std::span<const Complex> c = outer ? rev_coeffs : coeffs;
  PolyValue pv = horner(c, u);
  for (int it = 0; it < 8; ++it) {
    if (pv.derivative == Complex{0.0, 0.0} || pv.value == Complex{0.0, 0.0}) break;
    const Complex next = u - pv.value / pv.derivative;
    const PolyValue nv = horner(c, next);
    if (!(std::abs(nv.value) < std::abs(pv.value))) break;
    const double step = std::abs(next - u);
    u = next;
    pv = nv;
    if (step <= 2.0 * kEps * std::abs(u)) break;
  }
  if (!outer) return u;
  return 1.0 / u;
}

struct Cluster {
  std::vector<SpherePoint> members;
};

// Groups roots closer than `radius` (chordal) and returns one representative
// per group with its multiplicity.
std::vector<Preimage> cluster_roots(const std::vector<SpherePoint>& roots, double radius) {
  const std::size_t n = roots.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (chordal(roots[i], roots[j]) < radius) parent[find(i)] = find(j);

  std::vector<Preimage> out;
  std::vector<std::size_t> slot(n, n);
  std::vector<Complex> sums;
  std::vector<bool> has_inf;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] == n) {
      slot[r] = out.size();
      out.push_back({roots[i], 0});
      sums.push_back(Complex{0.0, 0.0});
      has_inf.push_back(false);
    }
    const std::size_t s = slot[r];
    out[s].multiplicity += 1;
    if (roots[i].is_infinity()) {
      has_inf[s] = true;
    } else {
      sums[s] += roots[i].value();
    }
  }
  for (std::size_t s = 0; s < out.size(); ++s) {
    if (out[s].multiplicity == 1) continue;
    if (has_inf[s]) {
      out[s].point = SpherePoint::infinity();
    } else {
      out[s].point = SpherePoint(sums[s] / static_cast<double>(out[s].multiplicity));
    }
  }
  return out;
}

// Roots on the sphere of the degree-`total` homogeneous polynomial whose affine
// coefficients are `c`; missing top degrees become roots at infinity.
std::vector<Preimage> sphere_roots(std::vector<Complex> c, int total, const SolverOptions& opts,
                                   bool* converged) {
  const std::span<const Complex> full = trim_leading(c, 4.0 * kEps);
  const int finite_count = full.empty() ? 0 : static_cast<int>(full.size()) - 1;
  std::span<const Complex> trimmed = full;
  std::vector<SpherePoint> roots;
  roots.reserve(total);
  // exact zero roots are split off so that fibers over critical values
  // such as 0 for z^2 collapse to the exact critical point
  while (trimmed.size() > 1 && trimmed.front() == Complex{0.0, 0.0}) {
    roots.emplace_back(0.0);
    trimmed = trimmed.subspan(1);
  }
  if (trimmed.size() > 1) {
    AberthResult ar = aberth_roots(trimmed, opts.aberth_max_iter);
    *converged = ar.converged;
    for (const Complex& z : ar.roots) roots.emplace_back(z);
  }
  for (int k = finite_count; k < total; ++k) roots.push_back(SpherePoint::infinity());

  std::vector<Preimage> clusters = cluster_roots(roots, opts.merge_radius);
  if (trimmed.size() > 1) {
    const std::vector<Complex> coeffs(full.begin(), full.end());
    const std::vector<Complex> rev = reversed(coeffs);
    for (Preimage& pre : clusters) {
      if (pre.multiplicity == 1 && !pre.point.is_infinity()) {
        pre.point = SpherePoint(polish_root(coeffs, rev, pre.point.value()));
      }
    }
  }
  return clusters;
}

// Closed form for two well separated simple roots; anything near a
// critical value or with a vanishing leading term takes the general path.
bool quadratic_fiber(const std::vector<Complex>& c, const SolverOptions& opts, PreimageSet& out) {
  if (c.size() != 3) return false;
  const double scale = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
  if (!(std::abs(c[2]) > 1e-3 * scale)) return false;
  const Complex disc = c[1] * c[1] - 4.0 * c[2] * c[0];
  if (!(std::abs(disc) > 1e-6 * (std::norm(c[1]) + std::abs(4.0 * c[2] * c[0])))) return false;
  Complex sq = std::sqrt(disc);
  if ((std::conj(c[1]) * sq).real() < 0.0) sq = -sq;
  const Complex q = -0.5 * (c[1] + sq);
  if (q == Complex{0.0, 0.0}) return false;
  const Complex r1 = q / c[2];
  const Complex r2 = c[0] / q;
  if (chordal(r1, r2) < 100.0 * opts.merge_radius) return false;
  out.clear();
  out.push_back({SpherePoint(r1), 1});
  out.push_back({SpherePoint(r2), 1});
  return true;
}

}  // namespace

PreimageSet preimages(const RationalMap& map, const SpherePoint& x, const SolverOptions& opts) {
  const auto& num = map.numerator();
  const auto& den = map.denominator();
  const int d = map.degree();
  std::vector<Complex> c(d + 1);
  if (x.is_infinity()) {
    c = den;
  } else if (std::abs(x.value()) <= 1.0) {
    for (int k = 0; k <= d; ++k) c[k] = num[k] - x.value() * den[k];
  } else {
    const Complex xi = 1.0 / x.value();
    for (int k = 0; k <= d; ++k) c[k] = xi * num[k] - den[k];
  }
  bool converged = true;
  PreimageSet out;
  if (!quadratic_fiber(c, opts, out)) out = sphere_roots(std::move(c), d, opts, &converged);
  for (const Preimage& pre : out) {
    const double residual = chordal(eval(map, pre.point), x);
    if (!(residual < opts.root_tolerance)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "preimage residual " << residual << " exceeds " << opts.root_tolerance << " for x = "
          << (x.is_infinity() ? Complex{INFINITY, 0.0} : x.value())
          << (converged ? "" : " (Aberth iteration cap reached)");
      throw SolverDiverged(msg.str());
    }
  }
  std::sort(out.begin(), out.end(), [](const Preimage& a, const Preimage& b) { return lex_less(a.point, b.point); });
  return out;
}

std::vector<FixedPoint> fixed_points(const RationalMap& map, const SolverOptions& opts) {
  const auto& num = map.numerator();
  const auto& den = map.denominator();
  const int d = map.degree();
  std::vector<Complex> c(d + 2, Complex{0.0, 0.0});
  for (int k = 0; k <= d; ++k) {
    c[k] += num[k];
    c[k + 1] -= den[k];
  }
  bool converged = true;
  const std::vector<Preimage> roots = sphere_roots(std::move(c), d + 1, opts, &converged);
  std::vector<FixedPoint> out;
  for (const Preimage& r : roots) {
    out.push_back({r.point, sph_deriv_abs(map, r.point)});
  }
  std::sort(out.begin(), out.end(), [](const FixedPoint& a, const FixedPoint& b) { return lex_less(a.point, b.point); });
  return out;
}

SpherePoint repelling_fixed_point(const RationalMap& map, const SolverOptions& opts) {
  const std::vector<FixedPoint> fps = fixed_points(map, opts);
  const auto best = std::max_element(fps.begin(), fps.end(), [](const FixedPoint& a, const FixedPoint& b) {
    return a.multiplier < b.multiplier;
  });
  if (best == fps.end() || !(best->multiplier > 1.0)) {
    throw SolverDiverged("no repelling fixed point found");
  }
  return best->point;
}

std::vector<Preimage> critical_points(const RationalMap& map, const SolverOptions& opts) {
  const std::vector<Complex>& num = map.numerator();
  const std::vector<Complex>& den = map.denominator();
  std::vector<Complex> w;
  add_into(w, poly_mul(poly_derivative(num), den), Complex{1.0, 0.0});
  add_into(w, poly_mul(num, poly_derivative(den)), Complex{-1.0, 0.0});
  const int total = 2 * map.degree() - 2;
  w.resize(total + 1, Complex{0.0, 0.0});
  bool converged = true;
  std::vector<Preimage> out = sphere_roots(std::move(w), total, opts, &converged);
  std::sort(out.begin(), out.end(), [](const Preimage& a, const Preimage& b) { return lex_less(a.point, b.point); });
  return out;
}

}  // namespace tce
