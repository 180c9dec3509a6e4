#include "resistance/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

namespace resistance {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::size_t kMaxExcursionSteps = 100'000'000;

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericError(std::string("non-finite ") + what);
}

// Noise and crossing tests for one replication.
class Stepper {
 public:
  Stepper(const ModelParams& params, const SimConfig& cfg, Rng& rng)
      : params_(params),
        cfg_(cfg),
        rng_(rng),
        sqrt_dt_(std::sqrt(cfg.dt)),
        guard_(cfg.guard_for(params)) {}

  double free_step(double x0) { return x0 + sqrt_dt_ * normal_(rng_) + params_.mu * cfg_.dt; }

  double down_step(double x0, DownDrift drift = DownDrift::Conditioned) {
    const double ceiling = params_.epsilon - guard_;
    for (std::size_t attempt = 0; attempt <= cfg_.max_reject; ++attempt) {
      const double dw = sqrt_dt_ * normal_(rng_);
      double x1;
      if (drift == DownDrift::Reversed) {
        x1 = x0 - params_.mu * cfg_.dt + dw;
      } else if (cfg_.scheme == DownScheme::DriftImplicit) {
        x1 = params_.epsilon - implicit_distance(params_.epsilon - x0 - dw);
      } else {
        const double y0 = params_.epsilon - x0;
        x1 = x0 - params_.mu / std::tanh(params_.mu * y0) * cfg_.dt + dw;
      }
      check_finite(x1, "state in downcrossing");
      if (x1 < ceiling) return x1;
    }
    return x0 - 0.5 * sqrt_dt_;
  }

  /// Did the path cross `level` going down between x0 and x1?
  bool crossed_down(double x0, double x1, double level) {
    if (x1 <= level) return true;
    return bridge_hit(x0 - level, x1 - level);
  }

  bool crossed_up(double x0, double x1, double level) {
    if (x1 >= level) return true;
    return bridge_hit(level - x0, level - x1);
  }

  double dt() const { return cfg_.dt; }

 private:
  bool bridge_hit(double d0, double d1) {
    if (cfg_.crossing == CrossingDetection::Grid) return false;
    const double prob = std::exp(-2.0 * d0 * d1 / cfg_.dt);
    return uniform_(rng_) < prob;
  }

  // Positive root y of  y - mu dt coth(mu y) = c.  The left side is
  // increasing on (0, inf) and spans the real line, so the root is unique.
  double implicit_distance(double c) const {
    const double mu = params_.mu;
    const double a = mu * cfg_.dt;
    auto h = [&](double y) { return y - a / std::tanh(mu * y) - c; };
    // Small-y limit coth(u) ~ 1/u gives y^2 - c y - dt = 0.
    double guess = 0.5 * (c + std::sqrt(c * c + 4.0 * cfg_.dt));
    double hi = std::max(guess, 1e-300) * 2.0 + a;
    while (h(hi) <= 0.0) hi *= 2.0;
    double lo = std::min(guess, hi) * 0.5;
    while (h(lo) >= 0.0) lo *= 0.5;
    guess = std::clamp(guess, lo, hi);
    auto fn = [&](double y) {
      const double s = std::sinh(mu * y);
      return std::make_pair(h(y), 1.0 + a * mu / (s * s));
    };
    std::uintmax_t iters = 100;
    return boost::math::tools::newton_raphson_iterate(fn, guess, lo, hi, 50, iters);
  }

  const ModelParams& params_;
  const SimConfig& cfg_;
  Rng& rng_;
  double sqrt_dt_;
  double guard_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

// Geometric downcrossing bookkeeping of a free path: Down until -alpha or
// epsilon, Up until 0, Free once epsilon is hit.
void advance_geometric(PhaseState& s, double x0, double x1, Stepper& stepper,
                       const ModelParams& params) {
  switch (s.phase) {
    case Phase::Down:
      if (x1 <= -params.alpha) {
        s.phase = Phase::Up;
        ++s.i0;
      } else if (stepper.crossed_up(x0, x1, params.epsilon)) {
        s.phase = Phase::Free;
      } else if (stepper.crossed_down(x0, x1, -params.alpha)) {
        s.phase = Phase::Up;
        ++s.i0;
      }
      break;
    case Phase::Up:
      if (stepper.crossed_up(x0, x1, 0.0)) {
        s.phase = x1 >= params.epsilon ? Phase::Free : Phase::Down;
      }
      break;
    case Phase::Free:
      break;
  }
  s.x = x1;
}

PathRecord make_record(std::size_t steps) {
  PathRecord rec;
  rec.times.reserve(steps + 1);
  rec.x.reserve(steps + 1);
  rec.phase.reserve(steps + 1);
  rec.observed.reserve(steps + 1);
  rec.db.reserve(steps);
  rec.times.push_back(0.0);
  rec.x.push_back(0.0);
  return rec;
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t path_index) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(path_index + 0x632be59bd9b4e019ULL)));
}

std::size_t SimConfig::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

void SimConfig::validate(const ModelParams& params) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ModelError("dt must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ModelError("horizon must be positive");
  if (!(dt < horizon)) throw ModelError("dt must be smaller than the horizon");
  const double g = guard_for(params);
  if (!(g > 0.0) || !(g < params.epsilon)) throw ModelError("guard must lie in (0, epsilon)");
}

std::size_t sample_xi(const XiLaw& law, const ModelParams& params, Measure measure, Rng& rng) {
  const double p = params.p;
  if (const auto* f = std::get_if<FixedLaw>(&law.variant())) return f->n;
  if (const auto* g = std::get_if<GeometricLaw>(&law.variant())) {
    // Under Q the law stays geometric with ratio p q.
    const double ratio = measure == Measure::Q ? p * g->q : g->q;
    if (ratio == 0.0) return 0;
    return std::geometric_distribution<std::size_t>(1.0 - ratio)(rng);
  }
  if (const auto* fs = std::get_if<FiniteSupportLaw>(&law.variant())) {
    const auto& w = measure == Measure::Q ? law_under_Q(law, p).beta : fs->weights;
    return std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng);
  }
  const auto& gt = std::get<GeometricTailLaw>(law.variant());
  const std::size_t head_len = gt.head.size();
  const double ratio = measure == Measure::Q ? p * gt.q : gt.q;
  std::vector<double> head(gt.head);
  double tail = std::pow(gt.q, double(head_len));  // P-mass beyond N
  if (measure == Measure::Q) {
    for (std::size_t n = 0; n < head_len; ++n) head[n] *= prob_An(p, n);
    tail = (1.0 - gt.q) * std::pow(ratio, double(head_len)) / (1.0 - ratio);
  }
  head.push_back(tail);
  const std::size_t pick = std::discrete_distribution<std::size_t>(head.begin(), head.end())(rng);
  if (pick < head_len) return pick;
  return head_len + std::geometric_distribution<std::size_t>(1.0 - ratio)(rng);
}

PathRecord simulate_path(const ModelParams& params, std::size_t n_forced, const SimConfig& cfg) {
  cfg.validate(params);
  if (!(params.mu > 0.0)) throw ModelError("drift regime not supported: mu must be > 0");
  Rng rng = make_rng(cfg.seed, cfg.path_index);
  Stepper stepper(params, cfg, rng);
  const std::size_t steps = cfg.steps();

  PathRecord rec = make_record(steps);
  rec.xi_realized = n_forced;

  PhaseState forced{0, n_forced > 0 ? Phase::Down : Phase::Free, 0.0, n_forced};
  PhaseState observed{0, Phase::Down, 0.0, std::nullopt};
  rec.phase.push_back(forced);
  rec.observed.push_back(observed);

  for (std::size_t k = 0; k < steps; ++k) {
    const double x0 = forced.x;
    double x1 = 0.0;
    switch (forced.phase) {
      case Phase::Down:
        x1 = stepper.down_step(x0);
        if (stepper.crossed_down(x0, x1, -params.alpha)) {
          ++forced.i0;
          forced.phase = forced.i0 >= n_forced ? Phase::Free : Phase::Up;
        }
        observed.i0 = forced.i0;
        observed.phase = forced.phase == Phase::Down ? Phase::Down : Phase::Up;
        observed.x = x1;
        break;
      case Phase::Up:
        x1 = stepper.free_step(x0);
        if (stepper.crossed_up(x0, x1, 0.0)) forced.phase = Phase::Down;
        observed.i0 = forced.i0;
        observed.phase = forced.phase;
        observed.x = x1;
        break;
      case Phase::Free:
        x1 = stepper.free_step(x0);
        advance_geometric(observed, x0, x1, stepper, params);
        break;
    }
    check_finite(x1, "path state");
    forced.x = x1;
    const double t1 = double(k + 1) * cfg.dt;
    if (forced.phase == Phase::Free && observed.phase == Phase::Free && !rec.t_eps) rec.t_eps = t1;

    rec.times.push_back(t1);
    rec.x.push_back(x1);
    rec.db.push_back(x1 - x0 - params.mu * cfg.dt);
    rec.phase.push_back(forced);
    rec.observed.push_back(observed);
  }
  return rec;
}

PathRecord simulate_unconditioned(const ModelParams& params, const SimConfig& cfg) {
  cfg.validate(params);
  Rng rng = make_rng(cfg.seed, cfg.path_index);
  Stepper stepper(params, cfg, rng);
  const std::size_t steps = cfg.steps();

  PathRecord rec = make_record(steps);
  PhaseState state{0, Phase::Down, 0.0, std::nullopt};
  rec.phase.push_back(state);
  rec.observed.push_back(state);

  for (std::size_t k = 0; k < steps; ++k) {
    const double x0 = state.x;
    const double x1 = stepper.free_step(x0);
    check_finite(x1, "path state");
    advance_geometric(state, x0, x1, stepper, params);
    const double t1 = double(k + 1) * cfg.dt;
    rec.times.push_back(t1);
    rec.x.push_back(x1);
    rec.db.push_back(x1 - x0 - params.mu * cfg.dt);
    rec.phase.push_back(state);
    rec.observed.push_back(state);
    if (state.phase == Phase::Free && !rec.t_eps) {
      rec.t_eps = t1;
      if (cfg.stop_after_breakout) break;
    }
  }
  rec.xi_realized = state.i0;
  return rec;
}

WealthSeries evolve_wealth(const PathRecord& path, const Strategy& strategy,
                           const ModelParams& params, double w0, WealthOptions opts) {
  const std::size_t n = path.x.size();
  const auto& states = opts.information == Information::Forced ? path.phase : path.observed;
  if (n == 0 || path.times.size() != n || states.size() != n || path.db.size() + 1 != n)
    throw ModelError("evolve_wealth: mismatched grid lengths");
  if (!(w0 > 0.0)) throw ModelError("evolve_wealth: initial wealth must be positive");

  const double mu0 = params.mu0();
  const double r = params.r();
  const double sigma = params.sigma();

  WealthSeries out;
  out.w.resize(n);
  out.pi_used.resize(n - 1);
  out.w[0] = w0;
  double log_w = std::log(w0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double pi = strategy(states[k]);
    if (opts.project) pi = project_unit(pi);
    const double dt = path.times[k + 1] - path.times[k];
    log_w += (r + pi * (mu0 - r) - 0.5 * pi * pi * sigma * sigma) * dt + pi * sigma * path.db[k];
    out.pi_used[k] = pi;
    out.w[k + 1] = std::exp(log_w);
    if (!std::isfinite(out.w[k + 1]) || !(out.w[k + 1] > 0.0))
      throw NumericError("non-finite wealth");
  }
  return out;
}

double sample_conditioned_descent(const ModelParams& params, const SimConfig& cfg, Rng& rng,
                                  DownDrift drift) {
  Stepper stepper(params, cfg, rng);
  double x = 0.0;
  for (std::size_t k = 0; k < kMaxExcursionSteps; ++k) {
    const double x1 = stepper.down_step(x, drift);
    if (stepper.crossed_down(x, x1, -params.alpha)) return double(k + 1) * cfg.dt;
    x = x1;
  }
  throw NumericError("conditioned descent did not reach the support");
}

ExitSample sample_unconditioned_exit(const ModelParams& params, const SimConfig& cfg, Rng& rng) {
  Stepper stepper(params, cfg, rng);
  double x = 0.0;
  for (std::size_t k = 0; k < kMaxExcursionSteps; ++k) {
    const double x1 = stepper.free_step(x);
    const double t = double(k + 1) * cfg.dt;
    if (x1 <= -params.alpha) return {true, t};
    if (stepper.crossed_up(x, x1, params.epsilon)) return {false, t};
    if (stepper.crossed_down(x, x1, -params.alpha)) return {true, t};
    x = x1;
  }
  throw NumericError("unconditioned excursion did not leave the band");
}

}  // namespace resistance
