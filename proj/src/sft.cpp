#include "tcethermo/sft.hpp"

#include <cmath>

#include "tcethermo/errors.hpp"

namespace tce {

WeightedSft WeightedSft::full_shift(const std::vector<double>& symbol_potential) {
  const int m = static_cast<int>(symbol_potential.size());
  if (m < 1) throw InvalidArgument("full shift needs at least one symbol");
  WeightedSft s;
  s.allowed = Eigen::MatrixXi::Ones(m, m);
  s.potential.resize(m, m);
  for (int a = 0; a < m; ++a) s.potential.row(a).setConstant(symbol_potential[a]);
  return s;
}

bool is_irreducible(const Eigen::MatrixXi& allowed) {
  const int m = static_cast<int>(allowed.rows());
  if (m == 0 || allowed.cols() != m) return false;
  // every symbol reaches every other: BFS from each symbol
  for (int start = 0; start < m; ++start) {
    std::vector<char> seen(m, 0);
    std::vector<int> stack{start};
    int reached = 0;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < m; ++b) {
        if (allowed(a, b) && !seen[b]) {
          seen[b] = 1;
          ++reached;
          stack.push_back(b);
        }
      }
    }
    if (reached != m) return false;
  }
  return true;
}

void WeightedSft::validate() const {
  if (allowed.rows() != allowed.cols() || potential.rows() != allowed.rows() || potential.cols() != allowed.cols()) {
    throw InvalidArgument("transition and potential matrices must be square of the same size");
  }
  for (int a = 0; a < allowed.rows(); ++a) {
    for (int b = 0; b < allowed.cols(); ++b) {
      if (allowed(a, b) != 0 && allowed(a, b) != 1) throw InvalidArgument("transition matrix must be 0/1");
      if (allowed(a, b) && !std::isfinite(potential(a, b))) throw InvalidArgument("potential must be finite");
    }
  }
  if (!is_irreducible(allowed)) throw Reducible("transition matrix is not irreducible");
}

namespace {

Eigen::MatrixXd weighted_matrix(const WeightedSft& sft) {
  const int m = sft.alphabet();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      if (sft.allowed(a, b)) w(a, b) = std::exp(sft.potential(a, b));
    }
  }
  return w;
}

// Perron vector of a nonnegative irreducible matrix via the primitive shift
// M + I; returns the eigenvalue of M.
double power_iteration(const Eigen::MatrixXd& m, Eigen::VectorXd& v) {
  const Eigen::MatrixXd shifted = m + Eigen::MatrixXd::Identity(m.rows(), m.cols());
  v = Eigen::VectorXd::Constant(m.rows(), 1.0 / m.rows());
  double mu = 0.0;
  int settled = 0;
  for (int it = 0; it < 2000000; ++it) {
    Eigen::VectorXd next = shifted * v;
    const double norm = next.sum();
    next /= norm;
    const double change = (next - v).cwiseAbs().maxCoeff();
    v = std::move(next);
    const bool stable = std::abs(norm - mu) <= 1e-15 * norm && change <= 1e-15;
    mu = norm;
    // a few extra sweeps once the tolerance is met polish the vector to
    // machine precision
    if (stable && ++settled >= 8) break;
  }
  return mu - 1.0;
}

}  // namespace

PerronData sft_perron(const WeightedSft& sft) {
  sft.validate();
  const Eigen::MatrixXd w = weighted_matrix(sft);
  PerronData d;
  d.lambda = power_iteration(w, d.right);
  power_iteration(w.transpose(), d.left);
  return d;
}

double sft_pressure(const WeightedSft& sft) { return std::log(sft_perron(sft).lambda); }

MarkovMeasure sft_equilibrium(const WeightedSft& sft) {
  const PerronData d = sft_perron(sft);
  const Eigen::MatrixXd w = weighted_matrix(sft);
  const int m = sft.alphabet();
  MarkovMeasure mu;
  mu.pi = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    double row = 0.0;
    for (int b = 0; b < m; ++b) {
      mu.pi(a, b) = w(a, b) * d.right(b) / (d.lambda * d.right(a));
      row += mu.pi(a, b);
    }
    mu.pi.row(a) /= row;  // removes the last-ulp drift of the eigen relation
  }
  mu.p = d.left.cwiseProduct(d.right);
  mu.p /= mu.p.sum();
  return mu;
}

MarkovMeasure markov_from_transition(const Eigen::MatrixXd& pi) {
  MarkovMeasure mu;
  mu.pi = pi;
  const int m = static_cast<int>(pi.rows());
  // lazy chain (Pi + I) / 2 is aperiodic with the same stationary vector
  const Eigen::MatrixXd lazy = 0.5 * (pi.transpose() + Eigen::MatrixXd::Identity(m, m));
  Eigen::VectorXd v = Eigen::VectorXd::Constant(m, 1.0 / m);
  for (int it = 0; it < 2000000; ++it) {
    Eigen::VectorXd next = lazy * v;
    next /= next.sum();
    const double change = (next - v).cwiseAbs().maxCoeff();
    v = std::move(next);
    if (change <= 1e-16) break;
  }
  mu.p = v;
  return mu;
}

double sft_entropy(const MarkovMeasure& mu) {
  CompensatedSum acc;
  for (int a = 0; a < mu.pi.rows(); ++a) {
    for (int b = 0; b < mu.pi.cols(); ++b) {
      const double t = mu.pi(a, b);
      if (t > 0.0) acc.add(-mu.p(a) * t * std::log(t));
    }
  }
  return acc.value();
}

double sft_integral(const Eigen::MatrixXd& phi, const MarkovMeasure& mu) {
  CompensatedSum acc;
  for (int a = 0; a < mu.pi.rows(); ++a) {
    for (int b = 0; b < mu.pi.cols(); ++b) {
      if (mu.pi(a, b) > 0.0) acc.add(mu.p(a) * mu.pi(a, b) * phi(a, b));
    }
  }
  return acc.value();
}

double sft_Qstar(const WeightedSft& sft, const MarkovMeasure& mu) {
  const int m = sft.alphabet();
  if (mu.p.size() != m || mu.pi.rows() != m || mu.pi.cols() != m) throw InvalidArgument("measure alphabet mismatch");
  const Eigen::VectorXd moved = mu.pi.transpose() * mu.p;
  if ((moved - mu.p).cwiseAbs().maxCoeff() > 1e-10 || std::abs(mu.p.sum() - 1.0) > 1e-10) {
    throw NotInvariant("p Pi differs from p");
  }
  for (int a = 0; a < m; ++a) {
    if (std::abs(mu.pi.row(a).sum() - 1.0) > 1e-10) throw NotInvariant("transition rows must sum to one");
    for (int b = 0; b < m; ++b) {
      if (mu.p(a) > 0.0 && mu.pi(a, b) > 0.0 && !sft.allowed(a, b)) return INFINITY;
    }
  }
  return sft_pressure(sft) - sft_integral(sft.potential, mu) - sft_entropy(mu);
}

GateauxResiduals sft_gateaux_check(const WeightedSft& sft, const Eigen::MatrixXd& psi, double h) {
  if (psi.rows() != sft.alphabet() || psi.cols() != sft.alphabet()) throw InvalidArgument("psi shape mismatch");
  WeightedSft plus = sft;
  plus.potential += psi;
  const MarkovMeasure mu_plus = sft_equilibrium(plus);
  const double q = sft_pressure(plus) - sft_pressure(sft);
  GateauxResiduals r;
  r.identity = std::abs(q - (sft_integral(psi, mu_plus) - sft_Qstar(sft, mu_plus)));

  WeightedSft up = sft, down = sft;
  up.potential += h * psi;
  down.potential -= h * psi;
  const double fd = (sft_pressure(up) - sft_pressure(down)) / (2.0 * h);
  r.derivative = std::abs(fd - sft_integral(psi, sft_equilibrium(sft)));
  return r;
}

ExtReal sft_exact_tail(double a, double b, int n, double s) {
  if (n < 1) throw InvalidArgument("sft_exact_tail needs n >= 1");
  if (s > 1.0) return ExtReal::neg_inf();
  if (s <= 0.0) return ExtReal(0.0);
  const int k0 = static_cast<int>(std::ceil(s * n - 1e-9));
  const double log_norm = n * (std::max(a, b) + std::log(std::exp(a - std::max(a, b)) + std::exp(b - std::max(a, b))));
  LogSumExp acc;
  for (int k = k0; k <= n; ++k) {
    const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    acc.add(log_binom + k * b + (n - k) * a);
  }
  return ExtReal((acc.value() - log_norm) / n);
}

double bernoulli_rate(double p, double s) {
  if (s < 0.0 || s > 1.0) return INFINITY;
  double r = 0.0;
  if (s > 0.0) r += s * std::log(s / p);
  if (s < 1.0) r += (1.0 - s) * std::log((1.0 - s) / (1.0 - p));
  return r;
}

WeightedSft random_sft(std::mt19937_64& rng, int max_alphabet, double spread) {
  std::uniform_int_distribution<int> size(2, std::max(2, max_alphabet));
  std::uniform_real_distribution<double> weight(-spread, spread);
  std::bernoulli_distribution edge(0.6);
  for (;;) {
    const int m = size(rng);
    WeightedSft s;
    s.allowed.resize(m, m);
    s.potential.resize(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        s.allowed(a, b) = edge(rng) ? 1 : 0;
        s.potential(a, b) = weight(rng);
      }
    }
    if (is_irreducible(s.allowed)) return s;
  }
}

}  // namespace tce
