#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "resistance/simulator.hpp"

using namespace resistance;
using testing_support::baseline_params;

namespace {

SimConfig sim(std::uint64_t seed, double horizon = 10.0) {
  SimConfig c;
  c.seed = seed;
  c.horizon = horizon;
  return c;
}

std::size_t down_runs(const std::vector<PhaseState>& states) {
  std::size_t runs = 0;
  for (std::size_t k = 0; k < states.size(); ++k)
    if (states[k].phase == Phase::Down && (k == 0 || states[k - 1].phase != Phase::Down)) ++runs;
  return runs;
}

}  // namespace

TEST_CASE("config validation") {
  const ModelParams p = baseline_params();
  SimConfig c = sim(1);
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(p), ModelError);
  c = sim(1, -1.0);
  CHECK_THROWS_AS(c.validate(p), ModelError);
  CHECK(sim(1).steps() == 10000);
}

TEST_CASE("same seed, same path") {
  const ModelParams p = baseline_params();
  const PathRecord a = simulate_path(p, 3, sim(99));
  const PathRecord b = simulate_path(p, 3, sim(99));
  CHECK(a.x == b.x);
  CHECK(a.phase == b.phase);
  SimConfig other = sim(99);
  other.path_index = 1;
  CHECK(simulate_path(p, 3, other).x != a.x);
}

TEST_CASE("forced downcrossings then breakout") {
  const ModelParams p = baseline_params();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PathRecord rec = simulate_path(p, 3, sim(seed, 200.0));
    REQUIRE(rec.phase.back().phase == Phase::Free);
    CHECK(down_runs(rec.phase) == 3);
    CHECK(rec.xi_realized == 3);
    std::size_t k = 0;
    while (rec.phase[k].phase != Phase::Free) {
      CHECK(rec.x[k] < p.epsilon);
      ++k;
    }
    for (; k < rec.phase.size(); ++k) CHECK(rec.phase[k].phase == Phase::Free);
  }
}

TEST_CASE("zero forced downcrossings start free") {
  const ModelParams p = baseline_params();
  const PathRecord rec = simulate_path(p, 0, sim(5));
  for (const auto& s : rec.phase) CHECK(s.phase == Phase::Free);
  CHECK(rec.observed.front().phase == Phase::Down);
}

TEST_CASE("unconditioned path turns free at epsilon") {
  const ModelParams p = baseline_params();
  SimConfig c = sim(17, 200.0);
  c.stop_after_breakout = true;
  const PathRecord rec = simulate_unconditioned(p, c);
  REQUIRE(rec.t_eps.has_value());
  CHECK(rec.phase.back().phase == Phase::Free);
  CHECK(rec.x.back() >= p.epsilon - 0.1);
}

TEST_CASE("wealth oracles") {
  const ModelParams p = baseline_params();
  const PathRecord rec = simulate_path(p, 2, sim(3));
  const WealthOptions raw{false, Information::Forced};

  const auto cash = evolve_wealth(rec, [](const PhaseState&) { return 0.0; }, p, 2.0, raw);
  for (std::size_t k = 0; k < rec.times.size(); k += 97)
    CHECK(std::abs(cash.w[k] - 2.0 * std::exp(p.r() * rec.times[k])) < 1e-12 * cash.w[k]);

  const auto stock = evolve_wealth(rec, [](const PhaseState&) { return 1.0; }, p, 1.0, raw);
  for (std::size_t k = 0; k < rec.times.size(); k += 97)
    CHECK(std::abs(std::log(stock.w[k]) - p.sigma() * rec.x[k]) < 1e-10);

  const auto proj = evolve_wealth(rec, [](const PhaseState&) { return 7.0; }, p, 1.0, {});
  for (double pi : proj.pi_used) CHECK(pi == 1.0);
}

TEST_CASE("classic strategy log-wealth growth on unconditioned paths") {
  const ModelParams p = baseline_params();
  const double pi = classic_strategy(p);
  const double growth = p.r() + pi * (p.mu0() - p.r()) - 0.5 * pi * pi * p.sigma() * p.sigma();
  const std::size_t n = 2000;
  double s = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    SimConfig c = sim(8, 1.0);
    c.path_index = i;
    const PathRecord rec = simulate_unconditioned(p, c);
    const double lw = std::log(evolve_wealth(rec, [&](const PhaseState&) { return pi; }, p, 1.0,
                                             {false, Information::Forced})
                                   .w.back());
    s += lw;
    ss += lw * lw;
  }
  const double mean = s / n, se = std::sqrt((ss / n - mean * mean) / n);
  CHECK(std::abs(mean - growth) < 4.0 * se);
}

TEST_CASE("xi sampling frequencies") {
  const ModelParams p = baseline_params();
  const XiLaw law = XiLaw::geometric(0.5);
  Rng rng = make_rng(21, 0);
  const std::size_t n = 100000;
  std::size_t zeros_p = 0, zeros_q = 0;
  for (std::size_t i = 0; i < n; ++i) {
    zeros_p += sample_xi(law, p, Measure::P, rng) == 0;
    zeros_q += sample_xi(law, p, Measure::Q, rng) == 0;
  }
  const double target_q = 1.0 - p.p * 0.5;
  CHECK(std::abs(double(zeros_p) / n - 0.5) < 4.0 * std::sqrt(0.25 / n));
  CHECK(std::abs(double(zeros_q) / n - target_q) < 4.0 * std::sqrt(target_q * (1 - target_q) / n));

  const XiLaw alpha = XiLaw::finite_support(law_from_Q(testing_support::baseline_beta(), p.p));
  std::vector<std::size_t> counts(7, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[sample_xi(alpha, p, Measure::Q, rng)];
  for (std::size_t k = 0; k < 7; ++k) {
    const double b = testing_support::baseline_beta()[k];
    CHECK(std::abs(double(counts[k]) / n - b) < 4.0 * std::sqrt(b * (1 - b) / n));
  }
}
