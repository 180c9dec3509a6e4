#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "resistance/model.hpp"
#include "resistance/montecarlo.hpp"
#include "resistance/simulator.hpp"

namespace resistance {

/// Invalid or unreadable configuration. `what()` carries the source name and
/// line when one is known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The xi law exactly as written in the config file.
struct LawConfig {
  std::string kind = "fixed";  // fixed | geometric | finite_support | geometric_tail
  Measure measure = Measure::P;
  std::size_t n = 0;            // fixed
  double q = 0.0;               // geometric
  std::vector<double> weights;  // finite_support weights, geometric_tail head

  XiSpec to_spec() const;
  bool operator==(const LawConfig&) const = default;
};

struct ExperimentSettings {
  std::size_t n_paths = 2000;
  double w0 = 1.0;
  Information information = Information::Forced;
  unsigned threads = 0;
  std::string sweep_param;
  std::vector<double> sweep_values;

  bool operator==(const ExperimentSettings&) const = default;
};

struct ValidationSettings {
  std::size_t pn_paths = 100000;
  std::size_t n_max = 2;
  double pn_horizon = 200.0;
  std::size_t htransform_samples = 10000;
  std::size_t martingale_n = 2;
  std::vector<double> martingale_times{0.5, 1.0, 2.0};
  std::size_t martingale_paths = 100000;
  double delta = 0.25;
  Perturbation perturbation = Perturbation::Feasible;

  bool operator==(const ValidationSettings&) const = default;
};

struct OutputSettings {
  std::string dir = "out";
  int precision = 6;

  bool operator==(const OutputSettings&) const = default;
};

/// Sim fields that live in the file (the seed and path index come from the
/// command line).
struct SimSettings {
  double dt = 1e-3;
  double horizon = 10.0;
  std::optional<double> guard;
  std::size_t max_reject = 100;
  DownScheme scheme = DownScheme::DriftImplicit;
  CrossingDetection crossing = CrossingDetection::Bridge;

  SimConfig to_config(std::uint64_t seed) const;
  bool operator==(const SimSettings&) const = default;
};

struct RunConfig {
  MarketInputs market;
  LawConfig law;
  SimSettings sim;
  ExperimentSettings experiment;
  ValidationSettings validation;
  OutputSettings output;

  /// Throws ConfigError if a derived quantity is invalid (params, law, sim).
  void validate() const;
  ExperimentConfig experiment_config(std::uint64_t seed) const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses YAML text. Unknown keys and invalid values are rejected with a
/// message of the form "<source>:<line>: ...".
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// YAML text that parse_config maps back to an identical RunConfig.
std::string serialize_config(const RunConfig& cfg);

}  // namespace resistance
