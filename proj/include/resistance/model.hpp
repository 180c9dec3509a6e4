#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace resistance {

/// Raised when inputs violate a documented precondition.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation leaves the finite domain (singular drift,
/// overflow, non-finite wealth).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Observable market quantities. Prices are absolute, rates per unit time.
struct MarketInputs {
  double mu0 = 0.0;
  double sigma = 0.0;
  double r = 0.0;
  double s0 = 1.0;
  double s0_minus = 0.0;  // support
  double s0_plus = 0.0;   // upper edge of the resistance band

  bool operator==(const MarketInputs&) const = default;
};

/// MarketInputs plus the log-scale quantities every other module works in.
/// The risky asset is s0 * exp(sigma * X) with X a Brownian motion of
/// drift `mu`; support and resistance sit at X = -alpha and X = epsilon.
struct ModelParams {
  MarketInputs market;
  double mu = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  double p = 0.0;  // probability of one downcrossing 0 -> -alpha before epsilon

  double mu0() const { return market.mu0; }
  double sigma() const { return market.sigma; }
  double r() const { return market.r; }
};

/// Levels placed so that the log-scale depths come out as `alpha` and `epsilon`.
MarketInputs market_from_depths(double mu0, double sigma, double r, double s0,
                                double alpha, double epsilon);

/// Validates `inputs` and computes mu, alpha, epsilon and p.
/// Throws ModelError on sigma <= 0, misordered levels, or mu <= 0 (the
/// upcrossing factor in the martingale is only position independent when
/// the drift is nonnegative, and mu == 0 makes the scale function flat).
ModelParams derive_params(const MarketInputs& inputs);

/// Scale function of Brownian motion with drift mu: exp(-2 mu x).
inline double scale_fn(double x, double mu) { return std::exp(-2.0 * mu * x); }

/// (S(eps) - S(0)) / (S(eps) - S(-alpha)); requires mu > 0.
double crossing_prob_p(double mu, double alpha, double epsilon);
double crossing_prob_p(const ModelParams& params);

/// P(A_n) = p^n.
double prob_An(double p, std::size_t n);

// ---------------------------------------------------------------------------
// Law of the required number of downcrossings.

struct FixedLaw {
  std::size_t n = 0;
};

struct GeometricLaw {
  double q = 0.0;  // P(xi = n) = q^n (1 - q)
};

struct FiniteSupportLaw {
  std::vector<double> weights;  // weights[n] = P(xi = n), n = 0..N
};

/// Arbitrary head alpha_0..alpha_N of mass S in (0,1), followed by the
/// geometric tail alpha_n = q^n (1 - q), q = (1 - S)^(1/(N+1)).
struct GeometricTailLaw {
  std::vector<double> head;
  double head_mass = 0.0;
  double q = 0.0;
};

/// Distribution of xi. Construct through the named factories, which validate
/// and normalize the weights.
class XiLaw {
 public:
  using Variant = std::variant<FixedLaw, GeometricLaw, FiniteSupportLaw, GeometricTailLaw>;

  static XiLaw fixed(std::size_t n);
  static XiLaw geometric(double q);
  /// Weights summing to 1 within 1e-9 are renormalized; otherwise rejected.
  static XiLaw finite_support(std::vector<double> weights);
  /// Head weights must sum to a value in (0,1).
  static XiLaw geometric_tail(std::vector<double> head);

  const Variant& variant() const { return law_; }
  std::string kind() const;

  /// P(xi = n).
  double weight(std::size_t n) const;
  /// P(xi <= n).
  double cumulative(std::size_t n) const;
  /// Largest n with positive mass, or none for unbounded support.
  bool bounded() const;
  std::size_t support_max() const;

 private:
  explicit XiLaw(Variant v) : law_(std::move(v)) {}
  Variant law_;
};

/// P(A_xi) = sum_n alpha_n p^n, closed form where one exists.
double prob_Axi(const XiLaw& law, double p);

/// Law of xi under Q = P( . | A_xi): beta_n = alpha_n p^n / P(A_xi).
/// Unbounded laws are truncated at the first n whose Q-tail mass is below
/// 1e-12; the dropped mass is reported and the vector renormalized.
struct QWeights {
  std::vector<double> beta;
  double truncated_mass = 0.0;
};
QWeights law_under_Q(const XiLaw& law, double p);

/// Inverse of law_under_Q on finite support:
/// alpha_n = (beta_n / p^n) / sum_i beta_i / p^i.
std::vector<double> law_from_Q(const std::vector<double>& beta, double p);

}  // namespace resistance
