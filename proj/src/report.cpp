#include "resistance/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "resistance/conditioning.hpp"

namespace resistance {

std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

void write_path_csv(std::ostream& os, const PathRecord& path, const XiLaw& law_p,
                    const ModelParams& params, double w0, Information information,
                    int precision) {
  const Strategy star = [&](const PhaseState& s) { return optimal_strategy_random(law_p, s, params); };
  const Strategy classic = [&](const PhaseState&) { return classic_strategy(params); };
  const WealthOptions opts{true, information};
  const auto w_star = evolve_wealth(path, star, params, w0, opts);
  const auto w_c = evolve_wealth(path, classic, params, w0, opts);
  const auto& states = information == Information::Forced ? path.phase : path.observed;
  const double pi_c = project_unit(classic_strategy(params));

  auto f = [&](double v) { return format_number(v, precision); };
  os << "t,x,z,phase,i0,pi_star_raw,pi_star,pi_c,w_star,w_c\n";
  for (std::size_t k = 0; k < path.x.size(); ++k) {
    const PhaseState& s = states[k];
    const double raw = star(s);
    os << f(path.times[k]) << ',' << f(path.x[k]) << ','
       << f(params.market.s0 * std::exp(params.sigma() * path.x[k])) << ',' << to_string(s.phase)
       << ',' << s.i0 << ',' << f(raw) << ',' << f(project_unit(raw)) << ',' << f(pi_c) << ','
       << f(w_star.w[k]) << ',' << f(w_c.w[k]) << '\n';
  }
}

void write_table_csv(std::ostream& os, const std::vector<SweepRow>& rows, int precision) {
  auto f = [&](double v) { return format_number(v, precision); };
  os << "param_value,mean,std_err,std_dev,n,p,mu\n";
  for (const auto& r : rows)
    os << f(r.value) << ',' << f(r.summary.mean) << ',' << f(r.summary.std_err) << ','
       << f(r.summary.std_dev) << ',' << r.summary.n << ',' << f(r.p) << ',' << f(r.mu) << '\n';
}

nlohmann::json to_json(const McSummary& s) {
  return {{"quantity", s.quantity}, {"mean", s.mean}, {"std_err", s.std_err},
          {"std_dev", s.std_dev}, {"n", s.n}};
}

nlohmann::json to_json(const PnReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n}, {"expected", row.expected}, {"frequency", row.frequency},
                    {"std_err", row.std_err}, {"z", row.z}, {"passed", row.passed}});
  return {{"check", "pn"}, {"paths", r.paths}, {"unresolved", r.unresolved},
          {"rows", rows}, {"passed", r.passed}};
}

nlohmann::json to_json(const HTransformReport& r) {
  return {{"check", "htransform"},
          {"samples", r.samples},
          {"conditioned_mean", r.conditioned_mean},
          {"conditioned_var", r.conditioned_var},
          {"oracle_mean", r.oracle_mean},
          {"oracle_var", r.oracle_var},
          {"z_mean", r.z_mean},
          {"z_var", r.z_var},
          {"ks_distance", r.ks_distance},
          {"oracle_trials", r.oracle_trials},
          {"acceptance_rate", r.acceptance_rate},
          {"acceptance_z", r.acceptance_z},
          {"passed", r.passed}};
}

nlohmann::json to_json(const MartingaleReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"t", row.t}, {"mean", row.mean}, {"std_err", row.std_err},
                    {"z", row.z}, {"passed", row.passed}});
  return {{"check", "martingale"}, {"n", r.n}, {"expected", r.expected},
          {"rows", rows}, {"passed", r.passed}};
}

nlohmann::json to_json(const OptimalityReport& r) {
  auto arms = nlohmann::json::array();
  for (const auto& a : r.challengers)
    arms.push_back({{"arm", a.name}, {"mean_log_wealth", a.mean_log_wealth},
                    {"margin", a.margin}, {"margin_se", a.margin_se}, {"beaten", a.beaten}});
  return {{"check", "optimality"}, {"star_mean_log_wealth", r.star_mean_log_wealth},
          {"challengers", arms}, {"passed", r.passed}};
}

}  // namespace resistance
