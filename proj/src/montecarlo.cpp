#include "resistance/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

namespace resistance {

namespace {

// Stream tags keep the xi draw, the oracle trials and the conditioned
// samples on generators distinct from the path noise of the same index.
constexpr std::uint64_t kXiStream = 0x5851f42d4c957f2dULL;
constexpr std::uint64_t kOracleStream = 0x14057b7ef767814fULL;
constexpr std::uint64_t kDescentStream = 0x2545f4914f6cdd1dULL;

unsigned resolve_threads(unsigned requested, std::size_t work) {
  unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(work, 1)));
}

// Runs fn(i) for i in [0, count) over contiguous blocks.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
  threads = resolve_threads(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      const std::size_t begin = count * t / threads;
      const std::size_t end = count * (t + 1) / threads;
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Moments {
  double mean = 0.0, var = 0.0, m4 = 0.0;
  std::size_t n = 0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  m.n = v.size();
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / double(m.n);
  double s2 = 0.0, s4 = 0.0;
  for (double x : v) {
    const double d = x - m.mean;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  m.var = s2 / double(m.n - 1);
  m.m4 = s4 / double(m.n);
  return m;
}

// Two-sample Kolmogorov-Smirnov statistic; ties advance both samples.
double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(double(i) / double(a.size()) - double(j) / double(b.size())));
  }
  return d;
}

double terminal_log_wealth(const PathRecord& path, const Strategy& s, const ExperimentConfig& cfg) {
  return std::log(evolve_wealth(path, s, cfg.params, cfg.w0, {true, cfg.information}).w.back());
}

PathRecord replicate_path(const ExperimentConfig& cfg, const XiLaw& law_p, std::uint64_t index) {
  Rng xi_rng = make_rng(cfg.sim.seed ^ kXiStream, index);
  const std::size_t n = sample_xi(law_p, cfg.params, Measure::Q, xi_rng);
  SimConfig sim = cfg.sim;
  sim.path_index = index;
  return simulate_path(cfg.params, n, sim);
}

}  // namespace

// ---------------------------------------------------------------------------

void McAccumulator::add(std::uint64_t path_index, double value) {
  samples_.emplace_back(path_index, value);
}

void McAccumulator::merge(const McAccumulator& other) {
  samples_.insert(samples_.end(), other.samples_.begin(), other.samples_.end());
}

std::vector<double> McAccumulator::values() const {
  auto sorted = samples_;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(sorted.size());
  for (const auto& s : sorted) out.push_back(s.second);
  return out;
}

McSummary McAccumulator::summary(std::string quantity) const {
  McSummary s;
  s.quantity = std::move(quantity);
  const auto v = values();
  s.n = v.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / double(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std_dev = std::sqrt(ss / double(s.n - 1));
    s.std_err = s.std_dev / std::sqrt(double(s.n));
  }
  return s;
}

XiLaw XiSpec::law_under_P(double p) const {
  if (measure == Measure::P) return law;
  if (std::holds_alternative<FixedLaw>(law.variant())) return law;
  if (const auto* fs = std::get_if<FiniteSupportLaw>(&law.variant()))
    return XiLaw::finite_support(law_from_Q(fs->weights, p));
  if (const auto* g = std::get_if<GeometricLaw>(&law.variant())) {
    const double q = g->q / p;
    if (!(q < 1.0)) throw ModelError("geometric law under Q needs ratio below p");
    return XiLaw::geometric(q);
  }
  throw ModelError("geometric-tail laws can only be specified under P");
}

void ExperimentConfig::validate() const {
  if (n_paths < 2) throw ModelError("n_paths must be at least 2");
  if (!(w0 > 0.0)) throw ModelError("initial wealth must be positive");
  sim.validate(params);
}

McAccumulator run_compare_range(const ExperimentConfig& cfg, std::uint64_t first,
                                std::uint64_t last) {
  cfg.validate();
  const XiLaw law_p = cfg.xi.law_under_P(cfg.params.p);
  const ModelParams& params = cfg.params;
  const Strategy star = [&](const PhaseState& s) { return optimal_strategy_random(law_p, s, params); };
  const Strategy classic = [&](const PhaseState&) { return classic_strategy(params); };

  const std::size_t count = last > first ? last - first : 0;
  std::vector<double> diff(count);
  parallel_for(count, cfg.threads, [&](std::size_t i) {
    const PathRecord path = replicate_path(cfg, law_p, first + i);
    const auto w_star = evolve_wealth(path, star, params, cfg.w0, {true, cfg.information});
    const auto w_c = evolve_wealth(path, classic, params, cfg.w0, {true, cfg.information});
    diff[i] = w_star.w.back() - w_c.w.back();
  });
  McAccumulator acc;
  for (std::size_t i = 0; i < count; ++i) acc.add(first + i, diff[i]);
  return acc;
}

PathRecord replicate_path(const ExperimentConfig& cfg, std::uint64_t index) {
  return replicate_path(cfg, cfg.xi.law_under_P(cfg.params.p), index);
}

McSummary run_compare(const ExperimentConfig& cfg) {
  return run_compare_range(cfg, 0, cfg.n_paths).summary("W_star_T - W_c_T");
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "mu0") return SweepParam::Mu0;
  if (name == "alpha") return SweepParam::Alpha;
  throw ModelError("unknown sweep parameter '" + name + "' (expected mu0 or alpha)");
}

std::string to_string(SweepParam param) { return param == SweepParam::Mu0 ? "mu0" : "alpha"; }

ExperimentConfig with_param(const ExperimentConfig& cfg, SweepParam param, double value) {
  ExperimentConfig out = cfg;
  MarketInputs m = cfg.params.market;
  if (param == SweepParam::Mu0) {
    m.mu0 = value;
  } else {
    if (!(value > 0.0)) throw ModelError("alpha must be positive");
    m.s0_minus = m.s0 * std::exp(-m.sigma * value);
  }
  out.params = derive_params(m);
  return out;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, SweepParam param,
                                const std::vector<double>& values) {
  if (values.empty()) throw ModelError("sweep needs at least one value");
  std::vector<SweepRow> rows;
  for (double v : values) {
    const ExperimentConfig c = with_param(cfg, param, v);
    rows.push_back({v, run_compare(c), c.params.p, c.params.mu});
  }
  return rows;
}

// ---------------------------------------------------------------------------

PnReport validate_pn(const ModelParams& params, const SimConfig& cfg, std::size_t n_max,
                     std::size_t n_paths, unsigned threads) {
  if (n_max < 1) throw ModelError("validate_pn: n_max must be at least 1");
  if (n_paths < 2) throw ModelError("validate_pn: need at least 2 paths");
  SimConfig sim = cfg;
  sim.stop_after_breakout = true;
  std::vector<std::size_t> counts(n_paths);
  std::vector<char> resolved(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    SimConfig local = sim;
    local.path_index = i;
    const PathRecord rec = simulate_unconditioned(params, local);
    counts[i] = rec.xi_realized;
    resolved[i] = rec.t_eps.has_value();
  });

  PnReport report;
  report.paths = n_paths;
  report.unresolved = std::count(resolved.begin(), resolved.end(), 0);
  report.passed = true;
  for (std::size_t n = 0; n <= n_max; ++n) {
    PnRow row;
    row.n = n;
    row.expected = prob_An(params.p, n);
    const auto hits = std::count_if(counts.begin(), counts.end(), [&](std::size_t c) { return c >= n; });
    row.frequency = double(hits) / double(n_paths);
    row.std_err = std::sqrt(row.expected * (1.0 - row.expected) / double(n_paths));
    row.z = row.std_err > 0.0 ? (row.frequency - row.expected) / row.std_err
                              : (row.frequency == row.expected ? 0.0 : INFINITY);
    row.passed = std::abs(row.z) <= 3.0;
    report.passed = report.passed && row.passed;
    report.rows.push_back(row);
  }
  return report;
}

HTransformReport validate_htransform(const ModelParams& params, const SimConfig& cfg,
                                     std::size_t n_samples, DownDrift drift, unsigned threads) {
  if (n_samples < 1000) throw ModelError("validate_htransform: need at least 1000 samples");
  cfg.validate(params);

  std::vector<double> conditioned(n_samples);
  parallel_for(n_samples, threads, [&](std::size_t i) {
    Rng rng = make_rng(cfg.seed ^ kDescentStream, i);
    conditioned[i] = sample_conditioned_descent(params, cfg, rng, drift);
  });

  std::vector<double> oracle;
  oracle.reserve(n_samples);
  std::size_t trials = 0;
  while (oracle.size() < n_samples) {
    const std::size_t missing = n_samples - oracle.size();
    const std::size_t batch = std::max<std::size_t>(10'000, std::size_t(double(missing) / params.p * 1.1));
    std::vector<ExitSample> out(batch);
    parallel_for(batch, threads, [&](std::size_t j) {
      Rng rng = make_rng(cfg.seed ^ kOracleStream, trials + j);
      out[j] = sample_unconditioned_exit(params, cfg, rng);
    });
    for (std::size_t j = 0; j < batch && oracle.size() < n_samples; ++j) {
      ++trials;
      if (out[j].hit_support) oracle.push_back(out[j].time);
    }
    if (double(oracle.size()) < 1e-4 * double(trials))
      throw NumericError("rejection oracle infeasible: acceptance rate below 1e-4");
  }

  HTransformReport r;
  r.samples = n_samples;
  const Moments mc = moments(conditioned);
  const Moments mo = moments(oracle);
  r.conditioned_mean = mc.mean;
  r.conditioned_var = mc.var;
  r.oracle_mean = mo.mean;
  r.oracle_var = mo.var;
  r.z_mean = (mc.mean - mo.mean) / std::sqrt(mc.var / double(mc.n) + mo.var / double(mo.n));
  const double se_var_c = (mc.m4 - mc.var * mc.var) / double(mc.n);
  const double se_var_o = (mo.m4 - mo.var * mo.var) / double(mo.n);
  r.z_var = (mc.var - mo.var) / std::sqrt(std::max(se_var_c, 0.0) + std::max(se_var_o, 0.0));
  r.ks_distance = ks_distance(conditioned, oracle);
  r.oracle_trials = trials;
  r.acceptance_rate = double(n_samples) / double(trials);
  r.acceptance_se = std::sqrt(params.p * (1.0 - params.p) / double(trials));
  r.acceptance_z = (r.acceptance_rate - params.p) / r.acceptance_se;
  r.passed = std::abs(r.z_mean) < 3.0 && std::abs(r.z_var) < 3.0 && r.ks_distance < 0.03 &&
             std::abs(r.acceptance_z) <= 3.0;
  return r;
}

MartingaleReport validate_martingale(const ModelParams& params, const SimConfig& cfg,
                                     std::size_t n, const std::vector<double>& times,
                                     std::size_t n_paths, unsigned threads) {
  if (times.empty()) throw ModelError("validate_martingale: no evaluation times");
  SimConfig sim = cfg;
  sim.horizon = *std::max_element(times.begin(), times.end());
  sim.stop_after_breakout = true;
  sim.validate(params);

  std::vector<std::size_t> grid;
  for (double t : times) grid.push_back(static_cast<std::size_t>(std::llround(t / sim.dt)));

  std::vector<std::vector<double>> values(times.size(), std::vector<double>(n_paths));
  parallel_for(n_paths, threads, [&](std::size_t i) {
    SimConfig local = sim;
    local.path_index = i;
    const PathRecord rec = simulate_unconditioned(params, local);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      // A path stopped at breakout keeps its final (Free) state.
      const PhaseState& s = rec.phase[std::min(grid[j], rec.phase.size() - 1)];
      values[j][i] = martingale_value(n, s, params);
    }
  });

  MartingaleReport report;
  report.n = n;
  report.expected = prob_An(params.p, n);
  report.passed = true;
  for (std::size_t j = 0; j < times.size(); ++j) {
    McAccumulator acc;
    for (std::size_t i = 0; i < n_paths; ++i) acc.add(i, values[j][i]);
    const McSummary s = acc.summary("M_t");
    MartingaleRow row{times[j], s.mean, s.std_err, 0.0, false};
    row.z = s.std_err > 0.0 ? (s.mean - report.expected) / s.std_err : 0.0;
    row.passed = std::abs(row.z) <= 3.0;
    report.passed = report.passed && row.passed;
    report.rows.push_back(row);
  }
  return report;
}

OptimalityReport validate_optimality(const ExperimentConfig& cfg, double delta,
                                     Perturbation mode) {
  cfg.validate();
  if (delta < 0.0) throw ModelError("validate_optimality: delta must be nonnegative");
  const XiLaw law_p = cfg.xi.law_under_P(cfg.params.p);
  const ModelParams& params = cfg.params;
  auto raw = [&](const PhaseState& s) { return optimal_strategy_random(law_p, s, params); };
  auto shifted = [&](double shift) -> Strategy {
    if (mode == Perturbation::Feasible)
      return [=](const PhaseState& s) { return project_unit(raw(s)) + shift; };
    return [=](const PhaseState& s) { return raw(s) + shift; };
  };
  const std::vector<std::pair<std::string, Strategy>> arms = {
      {"pi_star", raw},
      {"pi_star+delta", shifted(delta)},
      {"pi_star-delta", shifted(-delta)},
      {"pi_c", [&](const PhaseState&) { return classic_strategy(params); }},
  };

  std::vector<std::vector<double>> log_w(arms.size(), std::vector<double>(cfg.n_paths));
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t i) {
    const PathRecord path = replicate_path(cfg, law_p, i);
    for (std::size_t a = 0; a < arms.size(); ++a)
      log_w[a][i] = terminal_log_wealth(path, arms[a].second, cfg);
  });

  OptimalityReport report;
  McAccumulator star;
  for (std::size_t i = 0; i < cfg.n_paths; ++i) star.add(i, log_w[0][i]);
  report.star_mean_log_wealth = star.summary("log W_T").mean;
  report.passed = true;
  for (std::size_t a = 1; a < arms.size(); ++a) {
    McAccumulator arm, margin;
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
      arm.add(i, log_w[a][i]);
      margin.add(i, log_w[0][i] - log_w[a][i]);
    }
    const McSummary m = margin.summary("log W*_T - log W_T");
    ArmResult res{arms[a].first, arm.summary("log W_T").mean, m.mean, m.std_err, false};
    res.beaten = res.margin > 0.0 && res.margin >= 2.0 * res.margin_se;
    report.passed = report.passed && res.beaten;
    report.challengers.push_back(res);
  }
  return report;
}

}  // namespace resistance
