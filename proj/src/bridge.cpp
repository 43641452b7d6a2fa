#include "tcethermo/bridge.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "tcethermo/errors.hpp"

namespace tce {

std::uint64_t itinerary(const SpherePoint& z, int n, double tolerance) {
  if (n < 1 || n > 60) throw InvalidArgument("itinerary length must lie in [1, 60]");
  if (z.is_infinity() || std::abs(std::abs(z.value()) - 1.0) > 1e-6) {
    throw InvalidArgument("itinerary needs a point on the unit circle");
  }
  double t = std::arg(z.value()) / (2.0 * std::numbers::pi);
  if (t < 0.0) t += 1.0;
  const double scale = std::ldexp(1.0, n);
  const double snapped = std::round(t * scale) / scale;
  const bool dyadic = std::abs(t - snapped) < 1e-12;
  if (dyadic) t = snapped >= 1.0 ? 0.0 : snapped;

  std::uint64_t word = 0;
  for (int k = 0; k < n; ++k) {
    if (!dyadic) {
      const double edge = std::min({t, std::abs(t - 0.5), 1.0 - t});
      if (edge < tolerance) throw BoundaryItinerary("iterate " + std::to_string(k) + " lies on a digit boundary");
    }
    const int digit = t >= 0.5 ? 1 : 0;
    word = (word << 1) | static_cast<std::uint64_t>(digit);
    t = 2.0 * t - digit;  // exact in binary floating point
  }
  return word;
}

CircleBridge circle_bridge(int n) {
  if (n < 1 || n > 24) throw InvalidArgument("circle_bridge depth must lie in [1, 24]");
  CircleBridge b;
  b.n = n;
  const std::uint64_t count = std::uint64_t{1} << n;
  b.points.reserve(count);
  b.words.reserve(count);
  for (std::uint64_t j = 0; j < count; ++j) {
    const double turn = static_cast<double>(j) / static_cast<double>(count);
    b.points.emplace_back(std::polar(1.0, 2.0 * std::numbers::pi * turn));
    b.words.push_back(itinerary(b.points.back(), n));
  }
  return b;
}

Observable symbol_frequency(double width) { return Observable::arc_indicator(0.5, 1.0, width).with_name("freq1"); }

Observable symbol_potential(double a, double b, double width) {
  return Observable::linear_combination({{1.0, Observable::constant(a)}, {b - a, symbol_frequency(width)}})
      .with_name("symbol_potential");
}

BridgeReport bridge_validate(const EmpiricalEnsemble& e, double a, double b, const std::string& frequency_name,
                             double tolerance) {
  const std::vector<double>& freq = e.sum_of(frequency_name);
  const double log_norm = std::log(std::exp(a) + std::exp(b));
  BridgeReport r;
  r.members = e.size();
  std::vector<std::uint32_t> seen(e.n <= 24 ? (std::size_t{1} << e.n) : 0, 0);
  for (std::size_t i = 0; i < e.size(); ++i) {
    std::uint64_t w = 0;
    try {
      w = itinerary(e.points[i], e.n, tolerance);
    } catch (const BoundaryItinerary&) {
      ++r.excluded;
      continue;
    }
    const int ones = std::popcount(w);
    if (!seen.empty()) ++seen[w];
    r.max_frequency_error = std::max(r.max_frequency_error, std::abs(freq[i] - ones));
    // cylinder weight of the word under the Bernoulli measure of (a, b)
    const double cylinder = ones * b + (e.n - ones) * a - e.n * log_norm;
    r.max_weight_error = std::max(r.max_weight_error, std::abs(e.log_weights[i] - cylinder));
  }
  r.bijective = r.excluded == 0 && !seen.empty() && e.size() == seen.size();
  for (std::uint32_t c : seen) r.bijective = r.bijective && c == 1;
  return r;
}

}  // namespace tce
