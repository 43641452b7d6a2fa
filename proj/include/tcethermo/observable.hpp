#pragma once

#include <string>
#include <vector>

#include "tcethermo/rational_map.hpp"

namespace tce {

class JuliaCloud;

enum class ObservableKind { Constant, RePoly, ImPoly, NegTLogDeriv, ArcIndicator, LinearCombination };

/// A real function on the sphere drawn from a closed family of analytic forms.
class Observable {
 public:
  struct Term;

  static Observable constant(double c);
  /// Re p(z) and Im p(z), coefficients in ascending powers.
  static Observable re_poly(std::vector<Complex> coeffs);
  static Observable im_poly(std::vector<Complex> coeffs);
  /// -t log|T'(z)| in the spherical metric.
  static Observable neg_t_log_deriv(double t);
  /// Indicator of the circular arc of arguments [start, end) (in turns,
  /// 0 <= start < end <= start + 1), ramped linearly over `width` turns
  /// around each edge so that it is Lipschitz.
  static Observable arc_indicator(double start, double end, double width);
  static Observable linear_combination(std::vector<Term> terms);

  Observable with_name(std::string name) const;
  Observable with_holder_exponent(double kappa) const;

  const std::string& name() const { return name_; }
  ObservableKind kind() const { return kind_; }
  double holder_exponent() const { return holder_; }
  const std::vector<Complex>& coefficients() const { return coeffs_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// True when the value does not depend on the point.
  bool is_constant() const;
  /// True when any component is a log-derivative term.
  bool uses_log_derivative() const;

  double operator()(const RationalMap& map, const SpherePoint& z) const;

 private:
  ObservableKind kind_ = ObservableKind::Constant;
  std::string name_;
  double holder_ = 1.0;
  std::vector<Complex> coeffs_;
  std::vector<double> params_;
  std::vector<Term> terms_;
};

struct Observable::Term {
  double weight = 1.0;
  Observable obs;
};

inline double evaluate(const Observable& obs, const RationalMap& map, const SpherePoint& z) { return obs(map, z); }

/// sum_{k<n} obs(T^k x), compensated.
double birkhoff_sum(const RationalMap& map, const Observable& obs, const SpherePoint& x, int n);

/// Throws CriticalOnJulia if `obs` involves log|T'| and |T'| falls below
/// 1e-6 anywhere on the cloud.
void check_critical_guard(const RationalMap& map, const Observable& obs, const JuliaCloud& cloud);

/// Whether some critical point lies on (or accumulates on) the Julia set:
/// the cloud test above plus a forward-orbit test that every critical point
/// escapes to an attracting cycle.
bool critical_point_near_julia(const RationalMap& map, const JuliaCloud& cloud);

/// Index of the observable called `name`; UnknownObservable otherwise.
std::size_t find_observable(const std::vector<Observable>& list, const std::string& name);

}  // namespace tce
