#include "resistance/model.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace resistance {

namespace {

constexpr double kNormTolerance = 1e-9;
constexpr double kQTailCutoff = 1e-12;

std::vector<double> normalized(std::vector<double> w, const char* what) {
  if (w.empty()) throw ModelError(std::string(what) + ": empty weight vector");
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0)
      throw ModelError(std::string(what) + ": weights must be finite and nonnegative");
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::abs(total - 1.0) > kNormTolerance) {
    std::ostringstream os;
    os << what << ": weights sum to " << total << ", expected 1";
    throw ModelError(os.str());
  }
  for (double& v : w) v /= total;
  return w;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

MarketInputs market_from_depths(double mu0, double sigma, double r, double s0,
                                double alpha, double epsilon) {
  MarketInputs m;
  m.mu0 = mu0;
  m.sigma = sigma;
  m.r = r;
  m.s0 = s0;
  m.s0_minus = s0 * std::exp(-sigma * alpha);
  m.s0_plus = s0 * std::exp(sigma * epsilon);
  return m;
}

ModelParams derive_params(const MarketInputs& in) {
  if (!(in.sigma > 0.0) || !std::isfinite(in.sigma))
    throw ModelError("sigma must be positive");
  if (!std::isfinite(in.mu0) || !std::isfinite(in.r))
    throw ModelError("mu0 and r must be finite");
  if (!(in.s0_minus > 0.0 && in.s0_minus < in.s0 && in.s0 < in.s0_plus) ||
      !std::isfinite(in.s0_plus))
    throw ModelError("levels must satisfy 0 < s0_minus < s0 < s0_plus");

  ModelParams out;
  out.market = in;
  out.mu = (in.mu0 - 0.5 * in.sigma * in.sigma) / in.sigma;
  out.alpha = -std::log(in.s0_minus / in.s0) / in.sigma;
  out.epsilon = std::log(in.s0_plus / in.s0) / in.sigma;
  if (!(out.mu > 0.0))
    throw ModelError("drift regime not supported: reduced drift mu must be > 0");
  out.p = crossing_prob_p(out.mu, out.alpha, out.epsilon);
  return out;
}

double crossing_prob_p(double mu, double alpha, double epsilon) {
  if (!(alpha > 0.0) || !(epsilon > 0.0))
    throw ModelError("degenerate geometry: alpha and epsilon must be positive");
  if (!(mu > 0.0)) throw ModelError("drift regime not supported: mu must be > 0");
  const double s_eps = scale_fn(epsilon, mu);
  const double s_low = scale_fn(-alpha, mu);
  return (s_eps - 1.0) / (s_eps - s_low);
}

double crossing_prob_p(const ModelParams& params) {
  return crossing_prob_p(params.mu, params.alpha, params.epsilon);
}

double prob_An(double p, std::size_t n) { return std::pow(p, static_cast<double>(n)); }

// ---------------------------------------------------------------------------

XiLaw XiLaw::fixed(std::size_t n) { return XiLaw(FixedLaw{n}); }

XiLaw XiLaw::geometric(double q) {
  if (!(q >= 0.0 && q < 1.0)) throw ModelError("geometric law: q must lie in [0,1)");
  return XiLaw(GeometricLaw{q});
}

XiLaw XiLaw::finite_support(std::vector<double> weights) {
  return XiLaw(FiniteSupportLaw{normalized(std::move(weights), "finite-support law")});
}

XiLaw XiLaw::geometric_tail(std::vector<double> head) {
  if (head.empty()) throw ModelError("geometric-tail law: empty head");
  for (double v : head) {
    if (!std::isfinite(v) || v < 0.0)
      throw ModelError("geometric-tail law: weights must be finite and nonnegative");
  }
  const double mass = std::accumulate(head.begin(), head.end(), 0.0);
  if (!(mass > 0.0 && mass < 1.0))
    throw ModelError("geometric-tail law: head mass must lie in (0,1)");
  const double q = std::pow(1.0 - mass, 1.0 / static_cast<double>(head.size()));
  return XiLaw(GeometricTailLaw{std::move(head), mass, q});
}

std::string XiLaw::kind() const {
  return std::visit(overloaded{[](const FixedLaw&) { return "fixed"; },
                               [](const GeometricLaw&) { return "geometric"; },
                               [](const FiniteSupportLaw&) { return "finite_support"; },
                               [](const GeometricTailLaw&) { return "geometric_tail"; }},
                    law_);
}

double XiLaw::weight(std::size_t n) const {
  return std::visit(
      overloaded{
          [&](const FixedLaw& l) { return n == l.n ? 1.0 : 0.0; },
          [&](const GeometricLaw& l) { return std::pow(l.q, double(n)) * (1.0 - l.q); },
          [&](const FiniteSupportLaw& l) { return n < l.weights.size() ? l.weights[n] : 0.0; },
          [&](const GeometricTailLaw& l) {
            return n < l.head.size() ? l.head[n] : std::pow(l.q, double(n)) * (1.0 - l.q);
          }},
      law_);
}

double XiLaw::cumulative(std::size_t n) const {
  return std::visit(
      overloaded{
          [&](const FixedLaw& l) { return n >= l.n ? 1.0 : 0.0; },
          [&](const GeometricLaw& l) { return 1.0 - std::pow(l.q, double(n + 1)); },
          [&](const FiniteSupportLaw& l) {
            const std::size_t last = std::min(n + 1, l.weights.size());
            return std::min(1.0, std::accumulate(l.weights.begin(), l.weights.begin() + last, 0.0));
          },
          [&](const GeometricTailLaw& l) {
            const std::size_t big_n = l.head.size() - 1;
            const std::size_t last = std::min(n, big_n);
            double c = std::accumulate(l.head.begin(), l.head.begin() + last + 1, 0.0);
            // sum_{k=N+1}^{n} q^k (1-q) = q^{N+1} - q^{n+1}
            if (n > big_n) c += std::pow(l.q, double(big_n + 1)) - std::pow(l.q, double(n + 1));
            return c;
          }},
      law_);
}

bool XiLaw::bounded() const {
  return std::visit(overloaded{[](const FixedLaw&) { return true; },
                               [](const GeometricLaw& l) { return l.q == 0.0; },
                               [](const FiniteSupportLaw&) { return true; },
                               [](const GeometricTailLaw&) { return false; }},
                    law_);
}

std::size_t XiLaw::support_max() const {
  if (!bounded()) throw ModelError("support_max: law has unbounded support");
  return std::visit(overloaded{[](const FixedLaw& l) { return l.n; },
                               [](const GeometricLaw&) { return std::size_t{0}; },
                               [](const FiniteSupportLaw& l) {
                                 std::size_t m = 0;
                                 for (std::size_t i = 0; i < l.weights.size(); ++i)
                                   if (l.weights[i] > 0.0) m = i;
                                 return m;
                               },
                               [](const GeometricTailLaw&) { return std::size_t{0}; }},
                    law_);
}

double prob_Axi(const XiLaw& law, double p) {
  return std::visit(
      overloaded{
          [&](const FixedLaw& l) { return prob_An(p, l.n); },
          [&](const GeometricLaw& l) { return (1.0 - l.q) / (1.0 - p * l.q); },
          [&](const FiniteSupportLaw& l) {
            double s = 0.0;
            for (std::size_t n = 0; n < l.weights.size(); ++n) s += l.weights[n] * prob_An(p, n);
            return s;
          },
          [&](const GeometricTailLaw& l) {
            double s = 0.0;
            for (std::size_t n = 0; n < l.head.size(); ++n) s += l.head[n] * prob_An(p, n);
            const double pq = p * l.q;
            return s + std::pow(pq, double(l.head.size())) * (1.0 - l.q) / (1.0 - pq);
          }},
      law.variant());
}

QWeights law_under_Q(const XiLaw& law, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ModelError("law_under_Q: p must lie in (0,1)");
  const double total = prob_Axi(law, p);
  QWeights out;

  if (const auto* fixed = std::get_if<FixedLaw>(&law.variant())) {
    out.beta.assign(fixed->n + 1, 0.0);
    out.beta[fixed->n] = 1.0;
    return out;
  }
  if (const auto* fs = std::get_if<FiniteSupportLaw>(&law.variant())) {
    if (fs->weights.empty()) throw ModelError("law_under_Q: empty support");
    out.beta.resize(fs->weights.size());
    for (std::size_t n = 0; n < fs->weights.size(); ++n)
      out.beta[n] = fs->weights[n] * prob_An(p, n) / total;
    return out;
  }

  // Unbounded: the Q-tail beyond n is (1-q) (pq)^{m} / (1-pq) / P(A_xi) with
  // m = n+1 once n is past the explicit head.
  double q = 0.0;
  std::size_t head = 0;
  if (const auto* g = std::get_if<GeometricLaw>(&law.variant())) {
    q = g->q;
  } else {
    const auto& gt = std::get<GeometricTailLaw>(law.variant());
    q = gt.q;
    head = gt.head.size();
  }
  const double pq = p * q;
  auto q_tail_after = [&](std::size_t n) {
    return (1.0 - q) * std::pow(pq, double(n + 1)) / (1.0 - pq) / total;
  };
  std::size_t cutoff = head == 0 ? 0 : head - 1;
  while (q_tail_after(cutoff) >= kQTailCutoff) ++cutoff;

  out.beta.resize(cutoff + 1);
  double kept = 0.0;
  for (std::size_t n = 0; n <= cutoff; ++n) {
    out.beta[n] = law.weight(n) * prob_An(p, n) / total;
    kept += out.beta[n];
  }
  out.truncated_mass = std::max(0.0, 1.0 - kept);
  for (double& b : out.beta) b /= kept;
  return out;
}

std::vector<double> law_from_Q(const std::vector<double>& beta, double p) {
  if (!(p > 0.0)) throw ModelError("law_from_Q: p must be positive");
  if (!(p < 1.0)) throw ModelError("law_from_Q: p must be below 1");
  const auto b = normalized(beta, "law_from_Q");
  std::vector<double> alpha(b.size());
  double denom = 0.0;
  for (std::size_t n = 0; n < b.size(); ++n) {
    alpha[n] = b[n] / prob_An(p, n);
    denom += alpha[n];
  }
  for (double& a : alpha) a /= denom;
  return alpha;
}

}  // namespace resistance
