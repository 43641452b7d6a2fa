#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tcethermo/numeric.hpp"

namespace tce {

/// Subshift of finite type on {0..m-1} with transitions allowed by A and a
/// potential phi(a, b) on allowed transitions.
struct WeightedSft {
  Eigen::MatrixXi allowed;   ///< 0/1
  Eigen::MatrixXd potential; ///< phi(a, b); ignored where not allowed

  int alphabet() const { return static_cast<int>(allowed.rows()); }

  /// Full shift on m symbols with phi depending on the first symbol only.
  static WeightedSft full_shift(const std::vector<double>& symbol_potential);
  /// Throws InvalidArgument for shape mismatches, Reducible for reducible A.
  void validate() const;
};

bool is_irreducible(const Eigen::MatrixXi& allowed);

struct MarkovMeasure {
  Eigen::VectorXd p;   ///< stationary vector
  Eigen::MatrixXd pi;  ///< row-stochastic transition matrix
};

/// Markov measure with the given transition matrix and its stationary
/// vector (power iteration on the lazy chain).
MarkovMeasure markov_from_transition(const Eigen::MatrixXd& pi);

struct PerronData {
  double lambda = 0.0;
  Eigen::VectorXd right;
  Eigen::VectorXd left;
};

/// Perron root and vectors of A o exp(phi) by power iteration on M + I, run
/// until the eigenvalue changes by less than 1e-15 relative.
PerronData sft_perron(const WeightedSft& sft);

double sft_pressure(const WeightedSft& sft);
MarkovMeasure sft_equilibrium(const WeightedSft& sft);
double sft_entropy(const MarkovMeasure& mu);
/// sum p(a) Pi(a, b) phi(a, b).
double sft_integral(const Eigen::MatrixXd& phi, const MarkovMeasure& mu);
/// P(phi) - int phi d mu - h(mu). Throws NotInvariant if p Pi != p; returns
/// +inf if mu charges a forbidden transition.
double sft_Qstar(const WeightedSft& sft, const MarkovMeasure& mu);

struct GateauxResiduals {
  double identity = 0.0;    ///< |Q(psi) - (int psi d mu_{phi+psi} - Q*(mu_{phi+psi}))|
  double derivative = 0.0;  ///< |central difference of t -> P(phi + t psi) at 0 - int psi d mu_phi|
};
GateauxResiduals sft_gateaux_check(const WeightedSft& sft, const Eigen::MatrixXd& psi, double h = 1e-5);

/// (1/n) log of the Bernoulli(e^b / (e^a + e^b)) probability that at least
/// s n of n symbols are 1, with phi(0) = a, phi(1) = b.
ExtReal sft_exact_tail(double a, double b, int n, double s);
/// The Bernoulli(p) frequency rate s log(s/p) + (1-s) log((1-s)/(1-p)).
double bernoulli_rate(double p, double s);

/// Random irreducible weighted SFT with alphabet in [2, max_alphabet] and
/// potential entries uniform in [-spread, spread].
WeightedSft random_sft(std::mt19937_64& rng, int max_alphabet = 5, double spread = 1.0);

}  // namespace tce
