#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "resistance/conditioning.hpp"

using namespace resistance;
using testing_support::baseline_params;

namespace {

std::vector<PhaseState> state_grid(const ModelParams& p, std::size_t max_i0) {
  std::vector<PhaseState> out;
  for (std::size_t i0 = 0; i0 <= max_i0; ++i0)
    for (double x = -p.alpha; x < p.epsilon - 1e-3; x += 0.037) {
      out.push_back({i0, Phase::Down, x, std::nullopt});
      out.push_back({i0, Phase::Up, x, std::nullopt});
      out.push_back({i0, Phase::Free, x, std::nullopt});
    }
  return out;
}

MixtureWeight by_series(const XiLaw& law, const PhaseState& s, const ModelParams& p, std::size_t terms) {
  MixtureWeight w;
  for (std::size_t n = 0; n < terms; ++n) {
    const double m = law.weight(n) * martingale_value(n, s, p);
    w.value += m;
    if (s.phase == Phase::Down && n > s.i0) w.down_mass += m;
  }
  return w;
}

}  // namespace

TEST_CASE("drift identity") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const ModelParams p = baseline_params(alpha);
    for (double x = -3.0; x < p.epsilon - 1e-4; x += 0.0113) {
      const double lhs = p.mu + conditioned_drift(x, p);
      const double rhs = -p.mu / std::tanh(p.mu * (p.epsilon - x));
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
      CHECK(conditioned_drift(x, p) < 0.0);
    }
  }
}

TEST_CASE("martingale value at phase boundaries") {
  const ModelParams p = baseline_params();
  for (std::size_t n = 1; n <= 5; ++n)
    for (std::size_t i0 = 0; i0 < n; ++i0) {
      // reaching -alpha completes a downcrossing
      const double down_end = martingale_value(n, {i0, Phase::Down, -p.alpha}, p);
      const double up_start = martingale_value(n, {i0 + 1, Phase::Up, -p.alpha}, p);
      CHECK(std::abs(down_end - up_start) < 1e-12);
      // returning to 0 starts the next one
      const double up_end = martingale_value(n, {i0, Phase::Up, 0.0}, p);
      const double down_start = martingale_value(n, {i0, Phase::Down, 0.0}, p);
      CHECK(std::abs(up_end - down_start) < 1e-12);
      // breakout kills the event
      const double near_eps = martingale_value(n, {i0, Phase::Down, p.epsilon - 1e-13}, p);
      CHECK(std::abs(near_eps - martingale_value(n, {i0, Phase::Free, p.epsilon}, p)) < 1e-12);
    }
  CHECK(martingale_value(2, {0, Phase::Down, 0.0}, p) == doctest::Approx(p.p * p.p).epsilon(1e-14));
  CHECK(martingale_value(2, {2, Phase::Free, 0.5}, p) == 1.0);
}

TEST_CASE("states at or above epsilon are rejected") {
  const ModelParams p = baseline_params();
  CHECK_THROWS_AS(martingale_value(1, {0, Phase::Down, p.epsilon}, p), NumericError);
  CHECK_THROWS_AS(conditioned_drift(p.epsilon + 0.1, p), NumericError);
  CHECK_THROWS_AS(mixture_weight(XiLaw::fixed(2), {0, Phase::Up, 0.4}, p), NumericError);
}

TEST_CASE("fixed law reproduces the fixed-n strategy") {
  const ModelParams p = baseline_params();
  for (std::size_t n = 0; n <= 4; ++n) {
    const XiLaw law = XiLaw::fixed(n);
    for (const auto& s : state_grid(p, 5)) {
      const double a = optimal_strategy_random(law, s, p);
      const double b = optimal_strategy_fixed(n, s, p);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }
  }
}

TEST_CASE("closed-form mixtures match the series") {
  const ModelParams p = baseline_params();
  const std::vector<XiLaw> laws{XiLaw::geometric(0.3), XiLaw::geometric(0.8),
                                XiLaw::geometric_tail({0.1, 0.2, 0.05}),
                                XiLaw::geometric_tail({0.6}),
                                XiLaw::finite_support(law_from_Q(testing_support::baseline_beta(), p.p))};
  for (const auto& law : laws)
    for (const auto& s : state_grid(p, 6)) {
      const MixtureWeight closed = mixture_weight(law, s, p);
      const MixtureWeight series = by_series(law, s, p, 400);
      CHECK(std::abs(closed.value - series.value) < 1e-10);
      CHECK(std::abs(closed.down_mass - series.down_mass) < 1e-10);
      CHECK(closed.down_mass >= 0.0);
    }
}

TEST_CASE("strategy structure") {
  const ModelParams p = baseline_params();
  const double pi_c = classic_strategy(p);
  CHECK(pi_c == doctest::Approx(0.08 / 0.0225).epsilon(1e-14));
  const XiLaw law = XiLaw::finite_support(law_from_Q(testing_support::baseline_beta(), p.p));
  for (const auto& s : state_grid(p, 8)) {
    const double pi = optimal_strategy_random(law, s, p);
    if (s.phase != Phase::Down || s.i0 >= 6) {
      CHECK(pi == pi_c);
    } else {
      CHECK(pi < pi_c);
    }
    CHECK(project_unit(pi) >= 0.0);
    CHECK(project_unit(pi) <= 1.0);
  }
}
