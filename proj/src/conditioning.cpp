#include "resistance/conditioning.hpp"

#include <variant>

namespace resistance {

namespace {

void require_below_epsilon(double x, const ModelParams& params) {
  if (!(x < params.epsilon))
    throw NumericError("state at or above the breakout level epsilon");
}

// (S(eps) - S(x)) / (S(eps) - S(-alpha)): probability of reaching -alpha
// before eps from x.
double reach_support_prob(double x, const ModelParams& params) {
  const double s_eps = scale_fn(params.epsilon, params.mu);
  return (s_eps - scale_fn(x, params.mu)) / (s_eps - scale_fn(-params.alpha, params.mu));
}

// Pieces of sum_n alpha_n M_t^n:
//   head = sum_{n <= i0} alpha_n
//   down = sum_{n > i0} alpha_n p^{n-1-i0}
// so that the Up value is head + p * down and the Down value is
// head + R(x) * down.
struct MixtureParts {
  double head = 0.0;
  double down = 0.0;
};

MixtureParts mixture_parts(const XiLaw& law, std::size_t i0, double p) {
  MixtureParts parts;
  parts.head = law.cumulative(i0);
  if (const auto* f = std::get_if<FixedLaw>(&law.variant())) {
    parts.down = f->n > i0 ? prob_An(p, f->n - 1 - i0) : 0.0;
  } else if (const auto* g = std::get_if<GeometricLaw>(&law.variant())) {
    parts.down = (1.0 - g->q) * std::pow(g->q, double(i0 + 1)) / (1.0 - p * g->q);
  } else if (const auto* fs = std::get_if<FiniteSupportLaw>(&law.variant())) {
    for (std::size_t n = i0 + 1; n < fs->weights.size(); ++n)
      parts.down += fs->weights[n] * prob_An(p, n - 1 - i0);
  } else {
    const auto& gt = std::get<GeometricTailLaw>(law.variant());
    const std::size_t big_n = gt.head.size() - 1;
    for (std::size_t n = i0 + 1; n <= big_n; ++n)
      parts.down += gt.head[n] * prob_An(p, n - 1 - i0);
    const double q = gt.q;
    const std::size_t q_exp = std::max(big_n, i0) + 1;
    const std::size_t p_exp = big_n > i0 ? big_n - i0 : 0;
    parts.down += (1.0 - q) * std::pow(q, double(q_exp)) * prob_An(p, p_exp) / (1.0 - p * q);
  }
  return parts;
}

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Down: return "down";
    case Phase::Up: return "up";
    case Phase::Free: return "free";
  }
  return "?";
}

double martingale_value(std::size_t n, const PhaseState& state, const ModelParams& params) {
  if (state.i0 >= n) return 1.0;
  switch (state.phase) {
    case Phase::Down:
      require_below_epsilon(state.x, params);
      return prob_An(params.p, n - 1 - state.i0) * reach_support_prob(state.x, params);
    case Phase::Up:
      require_below_epsilon(state.x, params);
      return prob_An(params.p, n - state.i0);
    case Phase::Free:
      return 0.0;
  }
  return 0.0;
}

double conditioned_drift(double x, const ModelParams& params) {
  require_below_epsilon(x, params);
  const double s_x = scale_fn(x, params.mu);
  return 2.0 * params.mu * s_x / (scale_fn(params.epsilon, params.mu) - s_x);
}

double classic_strategy(const ModelParams& params) {
  return (params.mu0() - params.r()) / (params.sigma() * params.sigma());
}

double optimal_strategy_fixed(std::size_t n, const PhaseState& state, const ModelParams& params) {
  const double pi_c = classic_strategy(params);
  if (state.phase != Phase::Down || state.i0 >= n) return pi_c;
  return pi_c + conditioned_drift(state.x, params) / params.sigma();
}

MixtureWeight mixture_weight(const XiLaw& law, const PhaseState& state, const ModelParams& params) {
  const MixtureParts parts = mixture_parts(law, state.i0, params.p);
  MixtureWeight w;
  switch (state.phase) {
    case Phase::Down: {
      require_below_epsilon(state.x, params);
      w.down_mass = reach_support_prob(state.x, params) * parts.down;
      w.value = parts.head + w.down_mass;
      break;
    }
    case Phase::Up:
      require_below_epsilon(state.x, params);
      w.value = parts.head + params.p * parts.down;
      break;
    case Phase::Free:
      w.value = parts.head;
      break;
  }
  return w;
}

double optimal_strategy_random(const XiLaw& law, const PhaseState& state,
                               const ModelParams& params) {
  const double pi_c = classic_strategy(params);
  if (state.phase != Phase::Down) return pi_c;
  const MixtureWeight w = mixture_weight(law, state, params);
  if (w.down_mass <= 0.0) return pi_c;
  return pi_c + conditioned_drift(state.x, params) / params.sigma() * (w.down_mass / w.value);
}

}  // namespace resistance
