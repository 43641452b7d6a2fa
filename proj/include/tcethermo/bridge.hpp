#pragma once

#include <cstdint>
#include <vector>

#include "tcethermo/ldp.hpp"

namespace tce {

/// First n binary digits of z under angle doubling: digit k is 0 when
/// T^k(z) has argument in [0, 1/2) turns and 1 in [1/2, 1). The first digit
/// is the most significant bit. Points whose angle agrees with a dyadic
/// k / 2^n to 1e-12 are snapped onto it, so exact dyadic angles follow the
/// left-closed convention; any other iterate within `tolerance` turns of
/// 0 or 1/2 raises BoundaryItinerary.
std::uint64_t itinerary(const SpherePoint& z, int n, double tolerance = 1e-9);

/// The depth-n preimages of 1 under z^2 (angles j / 2^n, in order) and
/// their itineraries; word j is the binary expansion of j.
struct CircleBridge {
  int n = 0;
  std::vector<SpherePoint> points;
  std::vector<std::uint64_t> words;
};
CircleBridge circle_bridge(int n);

/// Frequency of symbol 1: the indicator of the lower half circle, ramped
/// over `width` turns.
Observable symbol_frequency(double width = 1e-8);
/// phi = a on symbol 0 and b on symbol 1 through the smoothed indicator.
Observable symbol_potential(double a, double b, double width = 1e-8);

/// Comparison of an ensemble of z^2 against the full 2-shift with
/// phi(0) = a, phi(1) = b.
struct BridgeReport {
  std::size_t members = 0;
  std::size_t excluded = 0;          ///< members with a boundary itinerary
  bool bijective = false;            ///< every word of length n seen exactly once
  double max_weight_error = 0.0;     ///< max |log w - log cylinder weight|
  double max_frequency_error = 0.0;  ///< max |S_n(freq) - popcount(word)|
};

/// The ensemble must record the observable named `frequency_name`.
BridgeReport bridge_validate(const EmpiricalEnsemble& e, double a, double b, const std::string& frequency_name,
                             double tolerance = 1e-9);

}  // namespace tce
