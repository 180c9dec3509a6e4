#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "resistance/conditioning.hpp"
#include "resistance/model.hpp"
#include "resistance/simulator.hpp"

namespace resistance {

struct McSummary {
  double mean = 0.0;
  double std_err = 0.0;
  double std_dev = 0.0;
  std::size_t n = 0;
  std::string quantity;
};

/// Per-replication samples keyed by path index. The summary reduces in index
/// order, so any partition of the index range merges to the same numbers.
class McAccumulator {
 public:
  void add(std::uint64_t path_index, double value);
  void merge(const McAccumulator& other);
  std::size_t size() const { return samples_.size(); }
  McSummary summary(std::string quantity) const;
  /// Values in path-index order.
  std::vector<double> values() const;

 private:
  std::vector<std::pair<std::uint64_t, double>> samples_;
};

/// Law of xi as it is specified: either directly under P, or observed under Q
/// (the frequencies read off charts), in which case the P-weights used by the
/// strategy are recovered with law_from_Q at the current p.
struct XiSpec {
  Measure measure = Measure::P;
  XiLaw law = XiLaw::fixed(0);

  XiLaw law_under_P(double p) const;
};

struct ExperimentConfig {
  ModelParams params;
  XiSpec xi;
  SimConfig sim;
  std::size_t n_paths = 2000;
  double w0 = 1.0;
  Information information = Information::Forced;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

/// Replication `index`: xi drawn under Q from its own stream, then the
/// conditioned path on the (seed, index) generator.
PathRecord replicate_path(const ExperimentConfig& cfg, std::uint64_t index);

/// Mean of W*_T - W^c_T over replications [first, last).
McAccumulator run_compare_range(const ExperimentConfig& cfg, std::uint64_t first,
                                std::uint64_t last);
McSummary run_compare(const ExperimentConfig& cfg);

enum class SweepParam { Mu0, Alpha };
SweepParam parse_sweep_param(const std::string& name);
std::string to_string(SweepParam param);

/// Copy of `cfg` with one market input replaced and everything derived
/// recomputed.
ExperimentConfig with_param(const ExperimentConfig& cfg, SweepParam param, double value);

struct SweepRow {
  double value = 0.0;
  McSummary summary;
  double p = 0.0;
  double mu = 0.0;
};
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, SweepParam param,
                                const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Oracles.

struct PnRow {
  std::size_t n = 0;
  double expected = 0.0;
  double frequency = 0.0;
  double std_err = 0.0;
  double z = 0.0;
  bool passed = false;
};

struct PnReport {
  std::vector<PnRow> rows;
  std::size_t paths = 0;
  std::size_t unresolved = 0;  // no breakout before the horizon
  bool passed = false;
};

/// Empirical P(at least n downcrossings before epsilon) on unconditioned
/// paths against p^n, 3 binomial standard errors.
PnReport validate_pn(const ModelParams& params, const SimConfig& cfg, std::size_t n_max,
                     std::size_t n_paths, unsigned threads = 0);

struct HTransformReport {
  std::size_t samples = 0;
  double conditioned_mean = 0.0, conditioned_var = 0.0;
  double oracle_mean = 0.0, oracle_var = 0.0;
  double z_mean = 0.0, z_var = 0.0;
  double ks_distance = 0.0;
  std::size_t oracle_trials = 0;
  double acceptance_rate = 0.0, acceptance_se = 0.0, acceptance_z = 0.0;
  bool passed = false;
};

/// First-downcrossing durations of the conditioned simulator against
/// unconditioned excursions kept only when they reach -alpha before epsilon.
/// Throws NumericError if the rejection oracle accepts fewer than 1e-4 of
/// its trials.
HTransformReport validate_htransform(const ModelParams& params, const SimConfig& cfg,
                                     std::size_t n_samples, DownDrift drift = DownDrift::Conditioned,
                                     unsigned threads = 0);

struct MartingaleRow {
  double t = 0.0;
  double mean = 0.0;
  double std_err = 0.0;
  double z = 0.0;
  bool passed = false;
};

struct MartingaleReport {
  std::size_t n = 0;
  double expected = 0.0;
  std::vector<MartingaleRow> rows;
  bool passed = false;
};

/// Mean of M_t^n over unconditioned paths at each time, against p^n.
MartingaleReport validate_martingale(const ModelParams& params, const SimConfig& cfg,
                                     std::size_t n, const std::vector<double>& times,
                                     std::size_t n_paths, unsigned threads = 0);

/// How the challenger arms perturb pi*.
enum class Perturbation {
  Feasible,  // project(project(pi*) +- delta): moves inside [0,1]
  Literal,   // project(pi* +- delta)
};

struct ArmResult {
  std::string name;
  double mean_log_wealth = 0.0;
  double margin = 0.0;  // pi* arm minus this arm, paired
  double margin_se = 0.0;
  bool beaten = false;  // margin > 0 and margin >= 2 SE
};

struct OptimalityReport {
  double star_mean_log_wealth = 0.0;
  std::vector<ArmResult> challengers;
  bool passed = false;
};

/// Terminal log-wealth of projected pi* against perturbed arms and the
/// projected classic strategy, all on the same paths.
OptimalityReport validate_optimality(const ExperimentConfig& cfg, double delta = 0.25,
                                     Perturbation mode = Perturbation::Feasible);

}  // namespace resistance
