#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "resistance/conditioning.hpp"
#include "resistance/model.hpp"

namespace resistance {

using Rng = std::mt19937_64;

/// Per-replication generator from a stateless mix of (seed, path_index).
Rng make_rng(std::uint64_t seed, std::uint64_t path_index);

/// Time stepping of the conditioned SDE inside a forced downcrossing.
enum class DownScheme {
  DriftImplicit,  // solves y1 = y0 + mu coth(mu y1) dt - dW for y = eps - x; stays below eps
  Explicit,       // plain Euler-Maruyama with guard rejection
};

/// How level crossings between grid points are detected.
enum class CrossingDetection {
  Bridge,  // Brownian-bridge crossing probability exp(-2 d0 d1 / dt)
  Grid,    // grid points only
};

struct SimConfig {
  double dt = 1e-3;
  double horizon = 10.0;
  std::optional<double> guard;  // defaults to 1e-4 * epsilon
  std::size_t max_reject = 100;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  DownScheme scheme = DownScheme::DriftImplicit;
  CrossingDetection crossing = CrossingDetection::Bridge;
  bool stop_after_breakout = false;  // unconditioned paths only

  double guard_for(const ModelParams& params) const {
    return guard ? *guard : 1e-4 * params.epsilon;
  }
  std::size_t steps() const;
  void validate(const ModelParams& params) const;
};

/// A discretized trajectory. `phase` is the simulator's own bookkeeping of
/// forced downcrossings; `observed` is what a trader watching only the price
/// can reconstruct (the same until the forced cycle ends, then the geometric
/// crossings of 0 / -alpha continue until epsilon is hit).
struct PathRecord {
  std::vector<double> times;
  std::vector<double> x;
  std::vector<PhaseState> phase;
  std::vector<PhaseState> observed;
  std::vector<double> db;  // x[k+1] - x[k] - mu dt
  std::size_t xi_realized = 0;
  std::optional<double> t_eps;
};

struct WealthSeries {
  std::vector<double> w;
  std::vector<double> pi_used;  // strategy applied on step k (size = steps)
};

enum class Measure { P, Q };

/// Which PhaseState sequence a strategy is evaluated on.
enum class Information { Forced, Observed };

std::size_t sample_xi(const XiLaw& law, const ModelParams& params, Measure measure, Rng& rng);

/// Path of the conditioned process with `n_forced` forced downcrossings.
PathRecord simulate_path(const ModelParams& params, std::size_t n_forced, const SimConfig& cfg);

/// Drifted Brownian motion with the same crossing bookkeeping; Free after
/// the first hit of epsilon.
PathRecord simulate_unconditioned(const ModelParams& params, const SimConfig& cfg);

using Strategy = std::function<double(const PhaseState&)>;

struct WealthOptions {
  bool project = true;
  Information information = Information::Forced;
};

/// Log-Euler wealth integration on the path's own Brownian increments:
/// ln w[k+1] = ln w[k] + (r + pi (mu0 - r) - pi^2 sigma^2 / 2) dt + pi sigma db[k].
WealthSeries evolve_wealth(const PathRecord& path, const Strategy& strategy,
                           const ModelParams& params, double w0, WealthOptions opts = {});

// ---------------------------------------------------------------------------
// Single-excursion samplers used by the validation oracles.

enum class DownDrift {
  Conditioned,  // -mu coth(mu (eps - x))
  Reversed,     // constant -mu: negative control, ignores the breakout level
};

/// Time for the conditioned process started at 0 to reach -alpha.
double sample_conditioned_descent(const ModelParams& params, const SimConfig& cfg, Rng& rng,
                                  DownDrift drift = DownDrift::Conditioned);

struct ExitSample {
  bool hit_support = false;  // reached -alpha before epsilon
  double time = 0.0;
};

/// Drifted Brownian motion from 0 until it leaves (-alpha, epsilon).
ExitSample sample_unconditioned_exit(const ModelParams& params, const SimConfig& cfg, Rng& rng);

}  // namespace resistance
