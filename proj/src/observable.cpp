#include "tcethermo/observable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tcethermo/errors.hpp"
#include "tcethermo/julia.hpp"
#include "tcethermo/numeric.hpp"

namespace tce {

namespace {

constexpr double kCriticalThreshold = 1e-6;

double ramp_value(double u, double len, double width) {
  const double half = 0.5 * width;
  if (width <= 0.0) return (u >= 0.0 && u < len) ? 1.0 : 0.0;
  const double left = std::clamp((u + half) / width, 0.0, 1.0);
  const double right = std::clamp((len - u + half) / width, 0.0, 1.0);
  return std::min(left, right);
}

}  // namespace

Observable Observable::constant(double c) {
  Observable o;
  o.kind_ = ObservableKind::Constant;
  o.params_ = {c};
  return o;
}

Observable Observable::re_poly(std::vector<Complex> coeffs) {
  Observable o;
  o.kind_ = ObservableKind::RePoly;
  o.coeffs_ = std::move(coeffs);
  return o;
}

Observable Observable::im_poly(std::vector<Complex> coeffs) {
  Observable o;
  o.kind_ = ObservableKind::ImPoly;
  o.coeffs_ = std::move(coeffs);
  return o;
}

Observable Observable::neg_t_log_deriv(double t) {
  Observable o;
  o.kind_ = ObservableKind::NegTLogDeriv;
  o.params_ = {t};
  return o;
}

Observable Observable::arc_indicator(double start, double end, double width) {
  if (!(end > start) || end - start > 1.0 || width < 0.0) {
    throw InvalidArgument("arc_indicator needs start < end <= start + 1 and width >= 0");
  }
  Observable o;
  o.kind_ = ObservableKind::ArcIndicator;
  o.params_ = {start, end, width};
  return o;
}

Observable Observable::linear_combination(std::vector<Term> terms) {
  Observable o;
  o.kind_ = ObservableKind::LinearCombination;
  o.terms_ = std::move(terms);
  return o;
}

Observable Observable::with_name(std::string name) const {
  Observable o = *this;
  o.name_ = std::move(name);
  return o;
}

Observable Observable::with_holder_exponent(double kappa) const {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw InvalidArgument("holder exponent must lie in (0, 1]");
  Observable o = *this;
  o.holder_ = kappa;
  return o;
}

bool Observable::is_constant() const {
  switch (kind_) {
    case ObservableKind::Constant:
      return true;
    case ObservableKind::RePoly:
    case ObservableKind::ImPoly:
      return std::all_of(coeffs_.begin() + std::min<std::size_t>(1, coeffs_.size()), coeffs_.end(),
                         [](Complex c) { return c == Complex{0.0, 0.0}; });
    case ObservableKind::NegTLogDeriv:
      return params_[0] == 0.0;
    case ObservableKind::ArcIndicator:
      return params_[1] - params_[0] >= 1.0;
    case ObservableKind::LinearCombination:
      return std::all_of(terms_.begin(), terms_.end(),
                         [](const Term& t) { return t.weight == 0.0 || t.obs.is_constant(); });
  }
  return false;
}

bool Observable::uses_log_derivative() const {
  if (kind_ == ObservableKind::NegTLogDeriv) return params_[0] != 0.0;
  if (kind_ == ObservableKind::LinearCombination) {
    return std::any_of(terms_.begin(), terms_.end(),
                       [](const Term& t) { return t.weight != 0.0 && t.obs.uses_log_derivative(); });
  }
  return false;
}

double Observable::operator()(const RationalMap& map, const SpherePoint& z) const {
  switch (kind_) {
    case ObservableKind::Constant:
      return params_[0];
    case ObservableKind::RePoly:
    case ObservableKind::ImPoly: {
      if (z.is_infinity()) {
        if (is_constant()) return coeffs_.empty() ? 0.0 : (kind_ == ObservableKind::RePoly ? coeffs_[0].real() : coeffs_[0].imag());
        throw InvalidArgument("polynomial observable is unbounded at infinity");
      }
      const Complex v = horner(coeffs_, z.value()).value;
      return kind_ == ObservableKind::RePoly ? v.real() : v.imag();
    }
    case ObservableKind::NegTLogDeriv: {
      const double t = params_[0];
      if (t == 0.0) return 0.0;
      const double d = sph_deriv_abs(map, z);
      if (!(d > 0.0)) {
        std::ostringstream msg;
        msg << "log-derivative potential evaluated at a critical point";
        throw CriticalOnJulia(msg.str());
      }
      return -t * std::log(d);
    }
    case ObservableKind::ArcIndicator: {
      if (z.is_infinity() || z.value() == Complex{0.0, 0.0}) return 0.0;
      const double turn = std::arg(z.value()) / (2.0 * std::numbers::pi);
      const double start = params_[0];
      const double len = params_[1] - params_[0];
      double u = turn - start;
      u -= std::floor(u);
      // the ramp below the start edge sits at u close to 1
      return std::max(ramp_value(u, len, params_[2]), ramp_value(u - 1.0, len, params_[2]));
    }
    case ObservableKind::LinearCombination: {
      CompensatedSum acc;
      for (const Term& t : terms_) {
        if (t.weight != 0.0) acc.add(t.weight * t.obs(map, z));
      }
      return acc.value();
    }
  }
  return 0.0;
}

double birkhoff_sum(const RationalMap& map, const Observable& obs, const SpherePoint& x, int n) {
  if (n < 1) throw InvalidArgument("birkhoff_sum needs n >= 1");
  if (obs.kind() == ObservableKind::Constant) return n * obs.params()[0];
  CompensatedSum acc;
  SpherePoint z = x;
  for (int k = 0; k < n; ++k) {
    acc.add(obs(map, z));
    if (k + 1 < n) z = eval(map, z);
  }
  return acc.value();
}

void check_critical_guard(const RationalMap& map, const Observable& obs, const JuliaCloud& cloud) {
  if (!obs.uses_log_derivative()) return;
  for (const SpherePoint& z : cloud.points()) {
    const double d = sph_deriv_abs(map, z);
    if (d < kCriticalThreshold) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "|T'| = " << d << " at a Julia point; potential '" << obs.name() << "' is not Holder on J";
      throw CriticalOnJulia(msg.str());
    }
  }
  if (critical_point_near_julia(map, cloud)) {
    throw CriticalOnJulia("a critical orbit does not settle on an attracting cycle; potential '" + obs.name() +
                          "' is not admitted");
  }
}

bool critical_point_near_julia(const RationalMap& map, const JuliaCloud& cloud) {
  for (const SpherePoint& z : cloud.points()) {
    if (sph_deriv_abs(map, z) < kCriticalThreshold) return true;
  }
  // A critical point lies in the Fatou set of a hyperbolic map iff its orbit
  // is attracted to a cycle; we detect this by waiting until the orbit
  // returns within 1e-10 of an earlier point with contracting derivative.
  constexpr int kSteps = 4000;
  constexpr int kMaxPeriod = 64;
  for (const Preimage& c : critical_points(map)) {
    if (map.is_polynomial() && c.point.is_infinity()) continue;  // superattracting
    SpherePoint z = c.point;
    bool attracted = false;
    std::vector<SpherePoint> recent;
    for (int k = 0; k < kSteps && !attracted; ++k) {
      z = eval(map, z);
      if (map.is_polynomial() && (z.is_infinity() || std::abs(z.value()) > 1e8)) {
        attracted = true;  // escapes to the superattracting point at infinity
        break;
      }
      if (k > kSteps / 2) {
        for (int p = 1; p <= static_cast<int>(recent.size()) && p <= kMaxPeriod; ++p) {
          if (chordal(z, recent[recent.size() - p]) < 1e-10) {
            double mult = 1.0;
            SpherePoint w = z;
            for (int j = 0; j < p; ++j) {
              mult *= sph_deriv_abs(map, w);
              w = eval(map, w);
            }
            if (mult < 1.0 - 1e-6) attracted = true;
            break;
          }
        }
        recent.push_back(z);
        if (recent.size() > kMaxPeriod) recent.erase(recent.begin());
      }
    }
    if (!attracted) return true;
  }
  return false;
}

std::size_t find_observable(const std::vector<Observable>& list, const std::string& name) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i].name() == name) return i;
  }
  throw UnknownObservable("no observable named '" + name + "'");
}

}  // namespace tce
