#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "resistance/model.hpp"
#include "resistance/montecarlo.hpp"
#include "resistance/simulator.hpp"

namespace resistance {

/// Shortest-form decimal with `precision` significant digits, independent of
/// the global locale.
std::string format_number(double v, int precision = 6);

/// One row per grid point: t,x,z,phase,i0,pi_star_raw,pi_star,pi_c,w_star,w_c.
/// Strategies and phases follow `information`; pi_c is the projected Merton
/// fraction.
void write_path_csv(std::ostream& os, const PathRecord& path, const XiLaw& law_p,
                    const ModelParams& params, double w0, Information information,
                    int precision = 6);

/// param_value,mean,std_err,std_dev,n,p,mu
void write_table_csv(std::ostream& os, const std::vector<SweepRow>& rows, int precision = 6);

nlohmann::json to_json(const McSummary& s);
nlohmann::json to_json(const PnReport& r);
nlohmann::json to_json(const HTransformReport& r);
nlohmann::json to_json(const MartingaleReport& r);
nlohmann::json to_json(const OptimalityReport& r);

}  // namespace resistance
