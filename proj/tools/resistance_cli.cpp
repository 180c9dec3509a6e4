// resistance: command-line driver for the resistance-level model.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "resistance/config.hpp"
#include "resistance/montecarlo.hpp"
#include "resistance/report.hpp"

namespace fs = std::filesystem;
using namespace resistance;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kValidation = 3 };

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> dt;
  std::optional<std::string> out;
  std::optional<std::string> param;
  std::optional<std::string> values;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
      throw ConfigError("--values: '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--values: empty list");
  return out;
}

RunConfig load(const Flags& f) {
  RunConfig cfg = load_config(f.config);
  if (f.paths) cfg.experiment.n_paths = *f.paths;
  if (f.dt) cfg.sim.dt = *f.dt;
  if (f.out) cfg.output.dir = *f.out;
  if (f.param) cfg.experiment.sweep_param = *f.param;
  if (f.values) cfg.experiment.sweep_values = parse_list(*f.values);
  cfg.validate();
  return cfg;
}

std::uint64_t need_seed(const Flags& f) {
  if (!f.seed) throw ConfigError("--seed is required for this command");
  return *f.seed;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name, fs::path& where) {
  fs::create_directories(cfg.output.dir);
  where = fs::path(cfg.output.dir) / name;
  std::ofstream os(where, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + where.string());
  os.imbue(std::locale::classic());
  return os;
}

void finish(std::ofstream& os, const fs::path& where) {
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + where.string());
  std::cout << "wrote " << where.string() << "\n";
}

int cmd_params(const Flags& f) {
  const RunConfig cfg = load(f);
  const ModelParams params = derive_params(cfg.market);
  const XiSpec spec = cfg.law.to_spec();
  const XiLaw law_p = spec.law_under_P(params.p);
  const int prec = cfg.output.precision;
  auto num = [&](double v) { return format_number(v, prec); };

  std::cout << "mu       " << num(params.mu) << "\n"
            << "alpha    " << num(params.alpha) << "\n"
            << "epsilon  " << num(params.epsilon) << "\n"
            << "p        " << num(params.p) << "\n"
            << "P(A_xi)  " << num(prob_Axi(law_p, params.p)) << "\n"
            << "pi_c     " << num(classic_strategy(params)) << "\n";
  if (law_p.bounded()) {
    std::cout << "alpha_n (P weights)\n";
    for (std::size_t n = 0; n <= law_p.support_max(); ++n)
      std::cout << "  " << n << "  " << num(law_p.weight(n)) << "\n";
  } else if (const auto* g = std::get_if<GeometricLaw>(&law_p.variant())) {
    std::cout << "alpha_n = (1 - q) q^n, q = " << num(g->q) << "\n";
  }
  return kOk;
}

int cmd_simulate(const Flags& f) {
  const RunConfig cfg = load(f);
  const ExperimentConfig ex = cfg.experiment_config(need_seed(f));
  const PathRecord path = replicate_path(ex, 0);
  fs::path where;
  auto os = open_out(cfg, "path.csv", where);
  write_path_csv(os, path, ex.xi.law_under_P(ex.params.p), ex.params, ex.w0, ex.information,
                 cfg.output.precision);
  finish(os, where);
  std::cout << "xi " << path.xi_realized << "\n";
  return kOk;
}

void write_summary(const RunConfig& cfg, const std::string& name,
                   const std::vector<nlohmann::json>& records) {
  fs::path where;
  auto os = open_out(cfg, name, where);
  for (const auto& r : records) os << r.dump() << "\n";
  finish(os, where);
}

nlohmann::json record(const std::string& command, std::uint64_t seed, const RunConfig& cfg,
                      const SweepRow& row) {
  nlohmann::json j = to_json(row.summary);
  j["command"] = command;
  j["seed"] = seed;
  j["param_value"] = row.value;
  j["p"] = row.p;
  j["mu"] = row.mu;
  j["dt"] = cfg.sim.dt;
  j["horizon"] = cfg.sim.horizon;
  return j;
}

int cmd_compare(const Flags& f) {
  const RunConfig cfg = load(f);
  const std::uint64_t seed = need_seed(f);
  const ExperimentConfig ex = cfg.experiment_config(seed);
  const SweepRow row{ex.params.mu0(), run_compare(ex), ex.params.p, ex.params.mu};
  fs::path where;
  auto os = open_out(cfg, "compare.csv", where);
  write_table_csv(os, {row}, cfg.output.precision);
  finish(os, where);
  write_summary(cfg, "compare.jsonl", {record("compare", seed, cfg, row)});
  std::cout << "mean " << format_number(row.summary.mean, cfg.output.precision) << " +- "
            << format_number(row.summary.std_err, cfg.output.precision) << " (n="
            << row.summary.n << ")\n";
  return kOk;
}

int cmd_sweep(const Flags& f) {
  const RunConfig cfg = load(f);
  const std::uint64_t seed = need_seed(f);
  if (cfg.experiment.sweep_param.empty() || cfg.experiment.sweep_values.empty())
    throw ConfigError("sweep needs a parameter and values (--param/--values or experiment.sweep)");
  const SweepParam param = parse_sweep_param(cfg.experiment.sweep_param);
  const auto rows = run_sweep(cfg.experiment_config(seed), param, cfg.experiment.sweep_values);
  fs::path where;
  auto os = open_out(cfg, "sweep.csv", where);
  write_table_csv(os, rows, cfg.output.precision);
  finish(os, where);
  std::vector<nlohmann::json> records;
  for (const auto& row : rows) {
    records.push_back(record("sweep", seed, cfg, row));
    records.back()["param"] = to_string(param);
    std::cout << to_string(param) << "=" << format_number(row.value, cfg.output.precision)
              << "  mean " << format_number(row.summary.mean, cfg.output.precision) << " +- "
              << format_number(row.summary.std_err, cfg.output.precision) << "\n";
  }
  write_summary(cfg, "sweep.jsonl", records);
  return kOk;
}

int cmd_validate(const Flags& f) {
  const RunConfig cfg = load(f);
  const std::uint64_t seed = need_seed(f);
  const ExperimentConfig ex = cfg.experiment_config(seed);
  const auto& v = cfg.validation;
  const unsigned threads = cfg.experiment.threads;

  SimConfig pn_sim = ex.sim;
  pn_sim.horizon = v.pn_horizon;
  const auto pn = validate_pn(ex.params, pn_sim, v.n_max, v.pn_paths, threads);
  const auto ht = validate_htransform(ex.params, ex.sim, v.htransform_samples,
                                      DownDrift::Conditioned, threads);
  const auto mg = validate_martingale(ex.params, ex.sim, v.martingale_n, v.martingale_times,
                                      v.martingale_paths, threads);
  const auto opt = validate_optimality(ex, v.delta, v.perturbation);

  std::vector<nlohmann::json> records{to_json(pn), to_json(ht), to_json(mg), to_json(opt)};
  bool ok = true;
  for (auto& r : records) {
    r["seed"] = seed;
    ok = ok && r["passed"].get<bool>();
    std::cout << (r["passed"].get<bool>() ? "PASS " : "FAIL ") << r["check"].get<std::string>()
              << "\n";
  }
  write_summary(cfg, "validate.jsonl", records);
  return ok ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resistance-level price model: strategies, simulation and Monte Carlo checks"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub, bool experiment) {
    sub->add_option("--config", f.config, "YAML run configuration")->required();
    sub->add_option("--out", f.out, "output directory");
    if (!experiment) return;
    sub->add_option("--seed", f.seed, "master seed (required)");
    sub->add_option("--paths", f.paths, "number of replications");
    sub->add_option("--dt", f.dt, "time step");
  };

  auto* params = app.add_subcommand("params", "print derived parameters and xi weights");
  add_common(params, false);
  auto* simulate = app.add_subcommand("simulate", "write one path to path.csv");
  add_common(simulate, true);
  auto* compare = app.add_subcommand("compare", "mean W*_T - W^c_T");
  add_common(compare, true);
  auto* sweep = app.add_subcommand("sweep", "compare over a range of mu0 or alpha");
  add_common(sweep, true);
  sweep->add_option("--param", f.param, "mu0 or alpha");
  sweep->add_option("--values", f.values, "comma-separated values");
  auto* validate = app.add_subcommand("validate", "run the Monte Carlo oracle checks");
  add_common(validate, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (params->parsed()) return cmd_params(f);
    if (simulate->parsed()) return cmd_simulate(f);
    if (compare->parsed()) return cmd_compare(f);
    if (sweep->parsed()) return cmd_sweep(f);
    if (validate->parsed()) return cmd_validate(f);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ModelError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kRuntime;
}
