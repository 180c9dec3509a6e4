#pragma once

#include "resistance/model.hpp"
#include "resistance/montecarlo.hpp"

namespace testing_support {

inline resistance::ModelParams baseline_params(double alpha = 1.0, double mu0 = 0.1) {
  return resistance::derive_params(
      resistance::market_from_depths(mu0, 0.15, 0.02, 1.0, alpha, 0.3));
}

inline const std::vector<double>& baseline_beta() {
  static const std::vector<double> beta{0.1, 0.1, 0.2, 0.2, 0.2, 0.1, 0.1};
  return beta;
}

inline resistance::ExperimentConfig baseline_experiment(std::uint64_t seed, std::size_t n_paths) {
  resistance::ExperimentConfig cfg;
  cfg.params = baseline_params();
  cfg.xi = {resistance::Measure::Q, resistance::XiLaw::finite_support(baseline_beta())};
  cfg.sim.seed = seed;
  cfg.n_paths = n_paths;
  return cfg;
}

}  // namespace testing_support
