#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace tce {

/// Real number extended by the two infinities. Empty weighted sums are
/// reported as neg_inf() and unresolved conjugates as pos_inf(); both are
/// IEEE infinities so they survive arithmetic, but callers test them through
/// the named predicates rather than by magnitude.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr explicit ExtReal(double v) : v_(v) {}

  static constexpr ExtReal neg_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }
  static constexpr ExtReal pos_inf() { return ExtReal(std::numeric_limits<double>::infinity()); }

  bool is_neg_inf() const { return std::isinf(v_) && v_ < 0; }
  bool is_pos_inf() const { return std::isinf(v_) && v_ > 0; }
  bool finite() const { return std::isfinite(v_); }
  constexpr double value() const { return v_; }

  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }

 private:
  double v_ = 0.0;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Streaming log-sum-exp with compensated accumulation of the rescaled terms.
/// The result depends only on the order of add()/merge() calls.
class LogSumExp {
 public:
  void add(double log_term) {
    if (std::isinf(log_term) && log_term < 0) return;
    if (empty_) {
      max_ = log_term;
      empty_ = false;
      sum_ = CompensatedSum{};
      sum_.add(1.0);
      return;
    }
    if (log_term > max_) {
      rescale(log_term);
    }
    sum_.add(std::exp(log_term - max_));
  }

  void merge(const LogSumExp& other) {
    if (other.empty_) return;
    if (empty_) {
      *this = other;
      return;
    }
    const double other_sum = other.sum_.value();
    if (other.max_ > max_) rescale(other.max_);
    sum_.add(other_sum * std::exp(other.max_ - max_));
  }

  bool empty() const { return empty_; }

  /// log of the accumulated sum; -inf when nothing was added.
  double value() const {
    if (empty_) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_.value());
  }

 private:
  void rescale(double new_max) {
    const double factor = std::exp(max_ - new_max);
    const double old = sum_.value();
    sum_ = CompensatedSum{};
    sum_.add(old * factor);
    max_ = new_max;
  }

  bool empty_ = true;
  double max_ = 0.0;
  CompensatedSum sum_;
};

inline double log_sum_exp(std::span<const double> terms) {
  LogSumExp acc;
  for (double t : terms) acc.add(t);
  return acc.value();
}

/// Log-domain value carrying a sign, used for transfer-operator images of
/// signed functions.
struct SignedLog {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;

  double to_double() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

/// a - b for two nonnegative quantities given by their logarithms.
inline SignedLog log_difference(double log_a, double log_b) {
  const bool a_zero = std::isinf(log_a) && log_a < 0;
  const bool b_zero = std::isinf(log_b) && log_b < 0;
  if (a_zero && b_zero) return {};
  if (b_zero) return {log_a, 1};
  if (a_zero) return {log_b, -1};
  if (log_a == log_b) return {};
  if (log_a > log_b) return {log_a + std::log1p(-std::exp(log_b - log_a)), 1};
  return {log_b + std::log1p(-std::exp(log_a - log_b)), -1};
}

}  // namespace tce
