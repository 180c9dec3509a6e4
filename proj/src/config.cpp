#include "resistance/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace resistance {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
    os << ": " << msg;
    throw ConfigError(os.str());
  }

  void only_keys(const YAML::Node& map, const std::string& section,
                 std::initializer_list<const char*> allowed) const {
    if (!map.IsMap()) fail(map, "section '" + section + "' must be a mapping");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first, "unknown key '" + section + "." + key + "'");
    }
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& name) const {
    if (!node.IsScalar()) fail(node, "'" + name + "' must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + name + "' has an invalid value '" + node.Scalar() + "'");
    }
  }

  template <class T>
  void optional(const YAML::Node& map, const char* key, T& out, const std::string& section) const {
    if (const auto n = map[key]) out = scalar<T>(n, section + "." + key);
  }

  std::vector<double> doubles(const YAML::Node& node, const std::string& name) const {
    if (!node.IsSequence()) fail(node, "'" + name + "' must be a list");
    std::vector<double> out;
    for (const auto& v : node) out.push_back(scalar<double>(v, name));
    return out;
  }

  template <class E>
  E choice(const YAML::Node& node, const std::string& name,
           std::initializer_list<std::pair<const char*, E>> options) const {
    const auto s = scalar<std::string>(node, name);
    for (const auto& [label, value] : options)
      if (s == label) return value;
    std::string msg = "'" + name + "' must be one of:";
    for (const auto& o : options) msg += std::string(" ") + o.first;
    fail(node, msg);
  }

 private:
  std::string source_;
};

const char* name_of(Measure m) { return m == Measure::P ? "P" : "Q"; }
const char* name_of(Information i) { return i == Information::Forced ? "forced" : "observed"; }
const char* name_of(DownScheme s) { return s == DownScheme::DriftImplicit ? "implicit" : "explicit"; }
const char* name_of(CrossingDetection c) { return c == CrossingDetection::Bridge ? "bridge" : "grid"; }
const char* name_of(Perturbation p) { return p == Perturbation::Feasible ? "feasible" : "literal"; }

}  // namespace

XiSpec LawConfig::to_spec() const {
  XiSpec spec;
  spec.measure = measure;
  if (kind == "fixed") spec.law = XiLaw::fixed(n);
  else if (kind == "geometric") spec.law = XiLaw::geometric(q);
  else if (kind == "finite_support") spec.law = XiLaw::finite_support(weights);
  else if (kind == "geometric_tail") spec.law = XiLaw::geometric_tail(weights);
  else throw ModelError("unknown law kind '" + kind + "'");
  return spec;
}

SimConfig SimSettings::to_config(std::uint64_t seed) const {
  SimConfig c;
  c.dt = dt;
  c.horizon = horizon;
  c.guard = guard;
  c.max_reject = max_reject;
  c.scheme = scheme;
  c.crossing = crossing;
  c.seed = seed;
  return c;
}

ExperimentConfig RunConfig::experiment_config(std::uint64_t seed) const {
  ExperimentConfig c;
  c.params = derive_params(market);
  c.xi = law.to_spec();
  c.sim = sim.to_config(seed);
  c.n_paths = experiment.n_paths;
  c.w0 = experiment.w0;
  c.information = experiment.information;
  c.threads = experiment.threads;
  return c;
}

void RunConfig::validate() const {
  try {
    const ExperimentConfig c = experiment_config(0);
    c.validate();
    (void)c.xi.law_under_P(c.params.p);
    if (!experiment.sweep_param.empty()) (void)parse_sweep_param(experiment.sweep_param);
    if (output.precision < 1 || output.precision > 17)
      throw ModelError("output precision must lie in [1, 17]");
  } catch (const ModelError& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError(source + ": top level must be a mapping");
  rd.only_keys(root, "config", {"market", "xi", "sim", "experiment", "validation", "output"});

  RunConfig cfg;

  const auto market = root["market"];
  if (!market) throw ConfigError(source + ": missing section 'market'");
  rd.only_keys(market, "market",
               {"mu0", "sigma", "r", "s0", "s0_minus", "s0_plus", "alpha", "epsilon"});
  for (const char* key : {"mu0", "sigma", "r"})
    if (!market[key]) rd.fail(market, std::string("missing market.") + key);
  auto& m = cfg.market;
  m.mu0 = rd.scalar<double>(market["mu0"], "market.mu0");
  m.sigma = rd.scalar<double>(market["sigma"], "market.sigma");
  m.r = rd.scalar<double>(market["r"], "market.r");
  rd.optional(market, "s0", m.s0, "market");
  const bool levels = market["s0_minus"] || market["s0_plus"];
  const bool depths = market["alpha"] || market["epsilon"];
  if (levels == depths)
    rd.fail(market, "give either s0_minus/s0_plus or alpha/epsilon, not both or neither");
  if (levels) {
    if (!market["s0_minus"] || !market["s0_plus"]) rd.fail(market, "need both s0_minus and s0_plus");
    m.s0_minus = rd.scalar<double>(market["s0_minus"], "market.s0_minus");
    m.s0_plus = rd.scalar<double>(market["s0_plus"], "market.s0_plus");
  } else {
    if (!market["alpha"] || !market["epsilon"]) rd.fail(market, "need both alpha and epsilon");
    m = market_from_depths(m.mu0, m.sigma, m.r, m.s0,
                           rd.scalar<double>(market["alpha"], "market.alpha"),
                           rd.scalar<double>(market["epsilon"], "market.epsilon"));
  }

  if (const auto xi = root["xi"]) {
    rd.only_keys(xi, "xi", {"kind", "measure", "n", "q", "weights", "head"});
    auto& law = cfg.law;
    if (!xi["kind"]) rd.fail(xi, "missing xi.kind");
    law.kind = rd.scalar<std::string>(xi["kind"], "xi.kind");
    if (xi["measure"])
      law.measure = rd.choice<Measure>(xi["measure"], "xi.measure", {{"P", Measure::P}, {"Q", Measure::Q}});
    auto need = [&](const char* key) {
      if (!xi[key]) rd.fail(xi, "xi.kind '" + law.kind + "' needs xi." + key);
      return xi[key];
    };
    if (law.kind == "fixed") {
      law.n = rd.scalar<std::size_t>(need("n"), "xi.n");
    } else if (law.kind == "geometric") {
      law.q = rd.scalar<double>(need("q"), "xi.q");
    } else if (law.kind == "finite_support") {
      law.weights = rd.doubles(need("weights"), "xi.weights");
    } else if (law.kind == "geometric_tail") {
      law.weights = rd.doubles(need("head"), "xi.head");
    } else {
      rd.fail(xi["kind"], "xi.kind must be fixed, geometric, finite_support or geometric_tail");
    }
    try {
      (void)law.to_spec();
    } catch (const ModelError& e) {
      rd.fail(xi, e.what());
    }
  }

  if (const auto sim = root["sim"]) {
    rd.only_keys(sim, "sim", {"dt", "horizon", "guard", "max_reject", "scheme", "crossing"});
    auto& s = cfg.sim;
    rd.optional(sim, "dt", s.dt, "sim");
    rd.optional(sim, "horizon", s.horizon, "sim");
    if (sim["guard"]) s.guard = rd.scalar<double>(sim["guard"], "sim.guard");
    rd.optional(sim, "max_reject", s.max_reject, "sim");
    if (sim["scheme"])
      s.scheme = rd.choice<DownScheme>(sim["scheme"], "sim.scheme",
                                       {{"implicit", DownScheme::DriftImplicit},
                                        {"explicit", DownScheme::Explicit}});
    if (sim["crossing"])
      s.crossing = rd.choice<CrossingDetection>(sim["crossing"], "sim.crossing",
                                                {{"bridge", CrossingDetection::Bridge},
                                                 {"grid", CrossingDetection::Grid}});
  }

  if (const auto ex = root["experiment"]) {
    rd.only_keys(ex, "experiment", {"n_paths", "w0", "information", "threads", "sweep"});
    auto& e = cfg.experiment;
    rd.optional(ex, "n_paths", e.n_paths, "experiment");
    rd.optional(ex, "w0", e.w0, "experiment");
    rd.optional(ex, "threads", e.threads, "experiment");
    if (ex["information"])
      e.information = rd.choice<Information>(ex["information"], "experiment.information",
                                             {{"forced", Information::Forced},
                                              {"observed", Information::Observed}});
    if (const auto sw = ex["sweep"]) {
      rd.only_keys(sw, "experiment.sweep", {"param", "values"});
      if (sw["param"]) e.sweep_param = rd.scalar<std::string>(sw["param"], "experiment.sweep.param");
      if (sw["values"]) e.sweep_values = rd.doubles(sw["values"], "experiment.sweep.values");
    }
    if (e.n_paths < 2) rd.fail(ex, "experiment.n_paths must be at least 2");
  }

  if (const auto va = root["validation"]) {
    rd.only_keys(va, "validation",
                 {"pn_paths", "n_max", "pn_horizon", "htransform_samples", "martingale_n",
                  "martingale_times", "martingale_paths", "delta", "perturbation"});
    auto& v = cfg.validation;
    rd.optional(va, "pn_paths", v.pn_paths, "validation");
    rd.optional(va, "n_max", v.n_max, "validation");
    rd.optional(va, "pn_horizon", v.pn_horizon, "validation");
    rd.optional(va, "htransform_samples", v.htransform_samples, "validation");
    rd.optional(va, "martingale_n", v.martingale_n, "validation");
    if (va["martingale_times"]) v.martingale_times = rd.doubles(va["martingale_times"], "validation.martingale_times");
    rd.optional(va, "martingale_paths", v.martingale_paths, "validation");
    rd.optional(va, "delta", v.delta, "validation");
    if (va["perturbation"])
      v.perturbation = rd.choice<Perturbation>(va["perturbation"], "validation.perturbation",
                                               {{"feasible", Perturbation::Feasible},
                                                {"literal", Perturbation::Literal}});
  }

  if (const auto out = root["output"]) {
    rd.only_keys(out, "output", {"dir", "precision"});
    rd.optional(out, "dir", cfg.output.dir, "output");
    rd.optional(out, "precision", cfg.output.precision, "output");
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "market" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mu0" << YAML::Value << cfg.market.mu0;
  out << YAML::Key << "sigma" << YAML::Value << cfg.market.sigma;
  out << YAML::Key << "r" << YAML::Value << cfg.market.r;
  out << YAML::Key << "s0" << YAML::Value << cfg.market.s0;
  out << YAML::Key << "s0_minus" << YAML::Value << cfg.market.s0_minus;
  out << YAML::Key << "s0_plus" << YAML::Value << cfg.market.s0_plus;
  out << YAML::EndMap;

  const auto& law = cfg.law;
  out << YAML::Key << "xi" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << law.kind;
  out << YAML::Key << "measure" << YAML::Value << name_of(law.measure);
  if (law.kind == "fixed") out << YAML::Key << "n" << YAML::Value << law.n;
  if (law.kind == "geometric") out << YAML::Key << "q" << YAML::Value << law.q;
  if (law.kind == "finite_support")
    out << YAML::Key << "weights" << YAML::Value << YAML::Flow << law.weights;
  if (law.kind == "geometric_tail")
    out << YAML::Key << "head" << YAML::Value << YAML::Flow << law.weights;
  out << YAML::EndMap;

  const auto& s = cfg.sim;
  out << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dt" << YAML::Value << s.dt;
  out << YAML::Key << "horizon" << YAML::Value << s.horizon;
  if (s.guard) out << YAML::Key << "guard" << YAML::Value << *s.guard;
  out << YAML::Key << "max_reject" << YAML::Value << s.max_reject;
  out << YAML::Key << "scheme" << YAML::Value << name_of(s.scheme);
  out << YAML::Key << "crossing" << YAML::Value << name_of(s.crossing);
  out << YAML::EndMap;

  const auto& e = cfg.experiment;
  out << YAML::Key << "experiment" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_paths" << YAML::Value << e.n_paths;
  out << YAML::Key << "w0" << YAML::Value << e.w0;
  out << YAML::Key << "information" << YAML::Value << name_of(e.information);
  out << YAML::Key << "threads" << YAML::Value << e.threads;
  if (!e.sweep_param.empty() || !e.sweep_values.empty()) {
    out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
    if (!e.sweep_param.empty()) out << YAML::Key << "param" << YAML::Value << e.sweep_param;
    out << YAML::Key << "values" << YAML::Value << YAML::Flow << e.sweep_values;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  const auto& v = cfg.validation;
  out << YAML::Key << "validation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "pn_paths" << YAML::Value << v.pn_paths;
  out << YAML::Key << "n_max" << YAML::Value << v.n_max;
  out << YAML::Key << "pn_horizon" << YAML::Value << v.pn_horizon;
  out << YAML::Key << "htransform_samples" << YAML::Value << v.htransform_samples;
  out << YAML::Key << "martingale_n" << YAML::Value << v.martingale_n;
  out << YAML::Key << "martingale_times" << YAML::Value << YAML::Flow << v.martingale_times;
  out << YAML::Key << "martingale_paths" << YAML::Value << v.martingale_paths;
  out << YAML::Key << "delta" << YAML::Value << v.delta;
  out << YAML::Key << "perturbation" << YAML::Value << name_of(v.perturbation);
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << cfg.output.dir;
  out << YAML::Key << "precision" << YAML::Value << cfg.output.precision;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace resistance
