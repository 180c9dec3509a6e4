#include <doctest.h>

#include <clocale>
#include <locale>
#include <sstream>

#include "common.hpp"
#include "resistance/config.hpp"
#include "resistance/report.hpp"

using namespace resistance;

namespace {

const char* kBaseline = R"(market:
  mu0: 0.1
  sigma: 0.15
  r: 0.02
  alpha: 1.0
  epsilon: 0.3
xi:
  kind: finite_support
  measure: Q
  weights: [0.1, 0.1, 0.2, 0.2, 0.2, 0.1, 0.1]
experiment:
  n_paths: 2000
  sweep:
    param: alpha
    values: [0.5, 0.6, 0.7]
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("baseline config") {
  const RunConfig cfg = parse_config(kBaseline);
  const ModelParams p = derive_params(cfg.market);
  CHECK(p.mu == doctest::Approx(0.5916667).epsilon(1e-6));
  CHECK(p.alpha == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cfg.law.measure == Measure::Q);
  CHECK(cfg.experiment.sweep_values.size() == 3);
  CHECK(cfg.output.precision == 6);
}

TEST_CASE("round trip") {
  const RunConfig a = parse_config(kBaseline);
  CHECK(parse_config(serialize_config(a)) == a);

  const RunConfig b = parse_config(R"(market: {mu0: 0.13, sigma: 0.2, r: 0.01, s0: 50, s0_minus: 41.3, s0_plus: 53.7}
xi: {kind: geometric_tail, head: [0.1, 0.25]}
sim: {dt: 0.002, horizon: 3.5, guard: 1.0e-5, max_reject: 20, scheme: explicit, crossing: grid}
experiment: {n_paths: 17, w0: 2.5, information: observed, threads: 2}
validation: {pn_paths: 10, n_max: 3, martingale_times: [0.25], delta: 0.1, perturbation: literal}
output: {dir: results, precision: 9}
)");
  CHECK(parse_config(serialize_config(b)) == b);
  CHECK(serialize_config(parse_config(serialize_config(b))) == serialize_config(b));

  RunConfig c = a;
  c.law = {"geometric", Measure::P, 0, 0.3, {}};
  CHECK(parse_config(serialize_config(c)) == c);
  c.law = {"fixed", Measure::P, 4, 0.0, {}};
  CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("rejections carry the line") {
  std::string text = kBaseline;
  text += "output:\n  dir: x\n  colour: red\n";
  const std::string e = error_of(text);
  CHECK(e.find("cfg.yaml:18") != std::string::npos);
  CHECK(e.find("colour") != std::string::npos);

  CHECK(error_of("market: {mu0: 0.1, sigma: 0.15, r: 0.02, alpha: 1, epsilon: 0.3, s0_plus: 2}")
            .find("either") != std::string::npos);
  CHECK(error_of("market: {mu0: 0.1, sigma: -0.15, r: 0.02, alpha: 1, epsilon: 0.3}") != "");
  CHECK(error_of("market: {mu0: 0.1, sigma: 0.15, r: 0.02, alpha: 1, epsilon: 0.3}\n"
                 "experiment: {n_paths: 1}")
            .find("cfg.yaml:2") != std::string::npos);
  CHECK(error_of("market: {mu0: 0.1, sigma: 0.15, r: 0.02, alpha: 1, epsilon: 0.3}\n"
                 "sim: {scheme: rk4}") != "");
  CHECK(error_of("market: {mu0: abc, sigma: 0.15, r: 0.02, alpha: 1, epsilon: 0.3}") != "");
  CHECK(error_of("market: {mu0: 0.1, sigma: 0.15, r: 0.02, alpha: 1, epsilon: 0.3}\n"
                 "xi: {kind: finite_support, weights: [0.5, 0.2]}") != "");
  CHECK(error_of("market: [1, 2") != "");
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.yaml"), ConfigError);
}

TEST_CASE("number formatting ignores the locale") {
  std::setlocale(LC_ALL, "de_DE.UTF-8");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1234567.0) == "1.23457e+06");
  CHECK(format_number(0.5916666666, 4) == "0.5917");
  CHECK(format_number(-2.5) == "-2.5");
  std::setlocale(LC_ALL, "C");
}

TEST_CASE("path csv") {
  const auto cfg = testing_support::baseline_experiment(7, 2);
  const PathRecord path = replicate_path(cfg, 0);
  const XiLaw law = cfg.xi.law_under_P(cfg.params.p);
  std::ostringstream a, b;
  write_path_csv(a, path, law, cfg.params, 1.0, Information::Forced);
  write_path_csv(b, replicate_path(cfg, 0), law, cfg.params, 1.0, Information::Forced);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x,z,phase,i0,pi_star_raw,pi_star,pi_c,w_star,w_c");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    REQUIRE(cols.size() == 10);
    CHECK(cols[7] == "1");
  }
  CHECK(rows == path.x.size());
}

TEST_CASE("table csv") {
  std::ostringstream os;
  McSummary s{0.5, 0.01, 0.2, 400, "q"};
  write_table_csv(os, {{1.0, s, 0.1165, 0.5917}});
  CHECK(os.str() == "param_value,mean,std_err,std_dev,n,p,mu\n1,0.5,0.01,0.2,400,0.1165,0.5917\n");
}
