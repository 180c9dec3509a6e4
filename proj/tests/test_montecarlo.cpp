#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "resistance/montecarlo.hpp"

using namespace resistance;
using testing_support::baseline_experiment;

TEST_CASE("xi = 0 gives no advantage") {
  ExperimentConfig cfg = baseline_experiment(4, 50);
  cfg.xi = {Measure::P, XiLaw::fixed(0)};
  const McSummary s = run_compare(cfg);
  CHECK(s.mean == 0.0);
  CHECK(s.std_dev == 0.0);
  CHECK(s.n == 50);
}

TEST_CASE("split ranges merge to the full run") {
  ExperimentConfig cfg = baseline_experiment(42, 60);
  const McSummary full = run_compare(cfg);
  McAccumulator acc = run_compare_range(cfg, 37, 60);
  acc.merge(run_compare_range(cfg, 0, 37));
  const McSummary merged = acc.summary(full.quantity);
  CHECK(merged.mean == full.mean);
  CHECK(merged.std_err == full.std_err);

  cfg.threads = 3;
  CHECK(run_compare(cfg).mean == full.mean);
}

TEST_CASE("n_paths below two is rejected") {
  ExperimentConfig cfg = baseline_experiment(1, 1);
  CHECK_THROWS_AS(run_compare(cfg), ModelError);
}

TEST_CASE("Q-specified laws map to P") {
  const double p = testing_support::baseline_params().p;
  const XiSpec g{Measure::Q, XiLaw::geometric(0.05)};
  CHECK(std::get<GeometricLaw>(g.law_under_P(p).variant()).q == doctest::Approx(0.05 / p));
  CHECK_THROWS_AS((XiSpec{Measure::Q, XiLaw::geometric(0.5)}.law_under_P(p)), ModelError);
  CHECK_THROWS_AS((XiSpec{Measure::Q, XiLaw::geometric_tail({0.5})}.law_under_P(p)), ModelError);
}

TEST_CASE("sweep recomputes derived parameters") {
  const ExperimentConfig cfg = baseline_experiment(2, 4);
  const ExperimentConfig a = with_param(cfg, SweepParam::Alpha, 0.5);
  CHECK(a.params.alpha == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.params.p > cfg.params.p);
  const ExperimentConfig m = with_param(cfg, SweepParam::Mu0, 0.2);
  CHECK(m.params.mu > cfg.params.mu);
  CHECK_THROWS_AS(parse_sweep_param("sigma"), ModelError);
  const auto rows = run_sweep(cfg, SweepParam::Mu0, {0.1, 0.2});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].summary.mean == run_compare(cfg).mean);
}

TEST_CASE("zero perturbation ties exactly") {
  const ExperimentConfig cfg = baseline_experiment(9, 40);
  const OptimalityReport r = validate_optimality(cfg, 0.0, Perturbation::Feasible);
  REQUIRE(r.challengers.size() == 3);
  CHECK(r.challengers[0].margin == 0.0);
  CHECK(r.challengers[1].margin == 0.0);
  CHECK_FALSE(r.passed);
}

TEST_CASE("oracles on a small budget") {
  const ModelParams p = testing_support::baseline_params();
  SimConfig c;
  c.seed = 5;
  c.horizon = 200.0;
  const PnReport pn = validate_pn(p, c, 2, 4000);
  CHECK(pn.rows.size() == 3);
  CHECK(pn.unresolved == 0);
  for (const auto& row : pn.rows) CHECK(std::abs(row.z) < 4.0);

  c.horizon = 10.0;
  const HTransformReport good = validate_htransform(p, c, 1500);
  const HTransformReport bad = validate_htransform(p, c, 1500, DownDrift::Reversed);
  CHECK(std::abs(good.z_mean) < 4.0);
  CHECK(bad.ks_distance > 0.15);
  CHECK_FALSE(bad.passed);
}
