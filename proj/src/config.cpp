#include "gn/config.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace gn {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& path, const std::string& msg) {
  throw ConfigError("config: " + path + ": " + msg);
}

std::string join(const std::string& a, const char* b) {
  return a.empty() ? std::string(b) : a + "." + b;
}

// Typed access into one JSON object with unknown-key rejection.
class Section {
public:
  Section(const json* j, std::string path) : j_(j), path_(std::move(path)) {
    if (j_ && !j_->is_object()) bad_key(path_, "expected an object");
  }

  const json* find(const char* key) {
    if (!j_) return nullptr;
    const auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
  }

  double num(const char* key, double def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number()) bad_key(join(path_, key), "expected a number");
    return v->get<double>();
  }

  int integer(const char* key, int def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number_integer()) bad_key(join(path_, key), "expected an integer");
    return v->get<int>();
  }

  std::uint64_t u64(const char* key, std::uint64_t def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number_unsigned() && !v->is_number_integer())
      bad_key(join(path_, key), "expected a non-negative integer");
    const auto i = v->get<std::int64_t>();
    if (v->is_number_integer() && i < 0) bad_key(join(path_, key), "expected a non-negative integer");
    return v->get<std::uint64_t>();
  }

  bool boolean(const char* key, bool def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_boolean()) bad_key(join(path_, key), "expected true/false");
    return v->get<bool>();
  }

  std::string str(const char* key, std::string def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_string()) bad_key(join(path_, key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> num_array(const char* key) {
    const json* v = find(key);
    std::vector<double> out;
    if (!v) return out;
    if (!v->is_array()) bad_key(join(path_, key), "expected an array of numbers");
    for (const auto& e : *v) {
      if (!e.is_number()) bad_key(join(path_, key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::string> str_array(const char* key) {
    const json* v = find(key);
    std::vector<std::string> out;
    if (!v) return out;
    if (!v->is_array()) bad_key(join(path_, key), "expected an array of strings");
    for (const auto& e : *v) {
      if (!e.is_string()) bad_key(join(path_, key), "expected an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  Section section(const char* key) { return Section(find(key), join(path_, key)); }

  void check_keys(std::initializer_list<const char*> allowed) {
    if (!j_) return;
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j_->items()) {
      if (!ok.count(k)) bad_key(join(path_, k.c_str()), "unknown key");
    }
  }

  explicit operator bool() const { return j_ != nullptr; }
  const std::string& path() const { return path_; }
  const json* raw() const { return j_; }

private:
  const json* j_;
  std::string path_;
};

ParamPoint point(Section parent, const char* key, ParamPoint def) {
  Section s = parent.section(key);
  if (!s) return def;
  s.check_keys({"mu", "g"});
  return {s.num("mu", def.mu), s.num("g", def.g)};
}

std::vector<ParamPoint> point_array(Section& parent, const char* key,
                                    std::vector<ParamPoint> def) {
  const json* v = parent.find(key);
  if (!v) return def;
  if (!v->is_array()) bad_key(join(parent.path(), key), "expected an array of {mu, g} points");
  std::vector<ParamPoint> out;
  std::size_t i = 0;
  for (const auto& e : *v) {
    Section s(&e, join(parent.path(), key) + "[" + std::to_string(i++) + "]");
    s.check_keys({"mu", "g"});
    out.push_back({s.num("mu", 0.0), s.num("g", 0.0)});
  }
  return out;
}

RediagMode parse_rediag(const std::string& v, const std::string& path) {
  if (v == "per-stage") return RediagMode::PerStage;
  if (v == "per-step") return RediagMode::PerStep;
  bad_key(path, "expected \"per-stage\" or \"per-step\"");
}

DissipatorMode parse_dissipator(const std::string& v, const std::string& path) {
  if (v == "matrix") return DissipatorMode::Matrix;
  if (v == "explicit-sum") return DissipatorMode::ExplicitSum;
  bad_key(path, "expected \"matrix\" or \"explicit-sum\"");
}

SteadyStrategy parse_strategy(const std::string& v, const std::string& path) {
  if (v == "dynamics") return SteadyStrategy::Dynamics;
  if (v == "fixed-point") return SteadyStrategy::FixedPoint;
  bad_key(path, "expected \"dynamics\" or \"fixed-point\"");
}

SwitchPolicy parse_policy(const std::string& v, const std::string& path) {
  if (v == "fixed") return SwitchPolicy::FixedTime;
  if (v == "min-distance") return SwitchPolicy::MinDistance;
  if (v == "plateau-start") return SwitchPolicy::PlateauStart;
  bad_key(path, "expected \"fixed\", \"min-distance\", or \"plateau-start\"");
}

Interp parse_interp(const std::string& v, const std::string& path) {
  if (v == "linear") return Interp::Linear;
  if (v == "semilog") return Interp::SemiLog;
  bad_key(path, "expected \"linear\" or \"semilog\"");
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form key.path=value");
  const std::string keypath = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json parsed = json::parse(value, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) parsed = value; // not valid JSON: take it as a string

  json* cursor = &doc;
  std::stringstream ss(keypath);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key segment");
    parts.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    json& next = (*cursor)[parts[i]];
    if (!next.is_object() && !next.is_null())
      throw ConfigError("override '" + assignment + "': '" + parts[i] + "' is not a section");
    cursor = &next;
  }
  (*cursor)[parts.back()] = parsed;
}

const ParamPoint kP1{0.0, 1.1}, kP2{0.5, 1.1}, kP3{0.8, 1.1}, kP4{0.5, 0.9};

json dump_point(const ParamPoint& p) { return {{"mu", p.mu}, {"g", p.g}}; }

json dump_config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["model"] = {{"L", c.model.L},         {"J", c.model.J},   {"mu", c.model.mu},
                {"g", c.model.g},         {"gamma", c.model.gamma},
                {"kBT", c.model.kBT}};
  j["evolution"] = {
      {"dt", c.evo.dt},
      {"t_max", c.evo.t_max},
      {"sample_stride", c.evo.sample_stride},
      {"theta_stride", c.evo.theta_stride},
      {"steady_tol", c.evo.steady_tol},
      {"steady_window", c.evo.steady_window},
      {"steady_min_time", c.evo.steady_min_time},
      {"rediag", c.evo.rediag == RediagMode::PerStage ? "per-stage" : "per-step"},
      {"dissipator", c.evo.dissipator == DissipatorMode::Matrix ? "matrix" : "explicit-sum"},
      {"bounds_check_stride", c.evo.bounds_check_stride},
      {"bounds_tol", c.evo.bounds_tol}};
  j["steady"] = {{"strategy", c.steady.strategy == SteadyStrategy::Dynamics ? "dynamics"
                                                                            : "fixed-point"},
                 {"t_max", c.steady.evo.t_max},
                 {"tol", c.steady.evo.steady_tol},
                 {"window", c.steady.evo.steady_window},
                 {"theta_tol", c.steady.theta_residual_tol},
                 {"fp_mixing", c.steady.fp_mixing},
                 {"fp_max_iters", c.steady.fp_max_iters},
                 {"fp_tol", c.steady.fp_tol},
                 {"fp_init_scale", c.steady.fp_init_scale}};
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["nu_max"] = c.nu_max;
  j["output_dir"] = c.output_dir;
  j["quench"] = {{"from", dump_point(c.quench.from)},
                 {"to", dump_point(c.quench.to)},
                 {"dpt",
                  {{"dp_threshold", c.quench.dpt.dp_threshold},
                   {"meta_fraction", c.quench.dpt.meta_fraction},
                   {"growth_fraction", c.quench.dpt.growth_fraction}}}};
  json scan_points = json::array();
  for (const auto& p : c.scan.extra_points) scan_points.push_back(dump_point(p));
  j["scan"] = {{"mu", c.scan.mu_values},
               {"g", c.scan.g_values},
               {"points", scan_points},
               {"seeds", c.scan.classify.initial_seeds},
               {"extra_seeds", c.scan.classify.extra_seeds},
               {"dp_threshold", c.scan.classify.dp_threshold}};
  const char* policy = c.pme.policy == SwitchPolicy::FixedTime      ? "fixed"
                       : c.pme.policy == SwitchPolicy::MinDistance  ? "min-distance"
                                                                    : "plateau-start";
  j["pme"] = {{"s", dump_point(c.pme.s)},
              {"a", dump_point(c.pme.a)},
              {"f", dump_point(c.pme.f)},
              {"policy", policy},
              {"switch_time", c.pme.fixed_switch_time},
              {"threshold", c.pme.threshold},
              {"plateau_slope", c.pme.plateau_slope},
              {"interp", c.pme.interp == Interp::Linear ? "linear" : "semilog"}};
  json qme_points = json::array();
  for (const auto& p : c.qme.points) qme_points.push_back(dump_point(p));
  j["qme"] = {{"target", dump_point(c.qme.target)},
              {"points", qme_points},
              {"threshold", c.qme.threshold},
              {"noise_floor", c.qme.noise_floor},
              {"interp", c.qme.interp == Interp::Linear ? "linear" : "semilog"}};
  j["plot"] = {{"kind", c.plot.kind},
               {"input", c.plot.input},
               {"columns", c.plot.columns},
               {"output", c.plot.output},
               {"log_y", c.plot.log_y}};
  return j;
}

} // namespace

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                      const std::string& command) {
  json doc = json::object();
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open '" + path + "'");
    try {
      doc = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: '" + path + "' must hold a JSON object");
  }
  for (const auto& o : overrides) apply_override(doc, o);

  RunConfig c;
  Section root(&doc, "");
  root.check_keys({"command", "model", "evolution", "steady", "seed", "workers", "nu_max",
                   "output_dir", "quench", "scan", "pme", "qme", "plot"});

  c.command = command.empty() ? root.str("command", "") : command;
  static const std::set<std::string> kCommands{"scan", "steady", "quench", "pme",
                                               "qme",  "validate", "plot"};
  if (!kCommands.count(c.command))
    throw ConfigError("config: unknown or missing command '" + c.command + "'");

  {
    Section m = root.section("model");
    m.check_keys({"L", "J", "mu", "g", "gamma", "kBT"});
    c.model.L = m.integer("L", c.model.L);
    c.model.J = m.num("J", c.model.J);
    c.model.mu = m.num("mu", c.model.mu);
    c.model.g = m.num("g", c.model.g);
    c.model.gamma = m.num("gamma", c.model.gamma);
    c.model.kBT = m.num("kBT", c.model.kBT);
    c.model.validate();
  }
  {
    Section e = root.section("evolution");
    e.check_keys({"dt", "t_max", "sample_stride", "theta_stride", "steady_tol", "steady_window",
                  "steady_min_time", "rediag", "dissipator", "bounds_check_stride", "bounds_tol"});
    c.evo.dt = e.num("dt", c.evo.dt);
    c.evo.t_max = e.num("t_max", c.evo.t_max);
    c.evo.sample_stride = e.integer("sample_stride", c.evo.sample_stride);
    c.evo.theta_stride = e.integer("theta_stride", c.evo.theta_stride);
    c.evo.steady_tol = e.num("steady_tol", c.evo.steady_tol);
    c.evo.steady_window = e.num("steady_window", c.evo.steady_window);
    c.evo.steady_min_time = e.num("steady_min_time", c.evo.steady_min_time);
    c.evo.rediag = parse_rediag(e.str("rediag", "per-stage"), join(e.path(), "rediag"));
    c.evo.dissipator =
        parse_dissipator(e.str("dissipator", "matrix"), join(e.path(), "dissipator"));
    c.evo.bounds_check_stride = e.integer("bounds_check_stride", c.evo.bounds_check_stride);
    c.evo.bounds_tol = e.num("bounds_tol", c.evo.bounds_tol);
    c.evo.validate();
  }
  {
    Section s = root.section("steady");
    s.check_keys({"strategy", "t_max", "tol", "window", "theta_tol", "fp_mixing", "fp_max_iters",
                  "fp_tol", "fp_init_scale"});
    c.steady.strategy = parse_strategy(s.str("strategy", "dynamics"), join(s.path(), "strategy"));
    // The preparation integrator inherits step/stride/mode settings from the
    // evolution section but has its own horizon and convergence window.
    const EvolutionConfig defaults = SteadySolveOptions::default_steady_evolution();
    c.steady.evo = c.evo;
    c.steady.evo.theta_stride = 0;
    c.steady.evo.checkpoint_times.clear();
    c.steady.evo.t_max = s.num("t_max", defaults.t_max);
    c.steady.evo.steady_tol = s.num("tol", defaults.steady_tol);
    c.steady.evo.steady_window = s.num("window", defaults.steady_window);
    c.steady.theta_residual_tol = s.num("theta_tol", c.steady.theta_residual_tol);
    c.steady.fp_mixing = s.num("fp_mixing", c.steady.fp_mixing);
    c.steady.fp_max_iters = s.integer("fp_max_iters", c.steady.fp_max_iters);
    c.steady.fp_tol = s.num("fp_tol", c.steady.fp_tol);
    c.steady.fp_init_scale = s.num("fp_init_scale", c.steady.fp_init_scale);
    c.steady.evo.validate();
  }
  c.seed = root.u64("seed", c.seed);
  c.workers = root.integer("workers", c.workers);
  c.nu_max = root.integer("nu_max", c.nu_max);
  if (c.nu_max < 0 || c.nu_max > c.model.L / 2)
    throw ConfigError("config: nu_max must lie in [0, L/2]");
  c.output_dir = root.str("output_dir", c.output_dir);

  {
    Section q = root.section("quench");
    q.check_keys({"from", "to", "dpt"});
    c.quench.from = point(q, "from", kP2);
    c.quench.to = point(q, "to", kP3);
    Section d = q.section("dpt");
    d.check_keys({"dp_threshold", "meta_fraction", "growth_fraction"});
    c.quench.dpt.dp_threshold = d.num("dp_threshold", c.quench.dpt.dp_threshold);
    c.quench.dpt.meta_fraction = d.num("meta_fraction", c.quench.dpt.meta_fraction);
    c.quench.dpt.growth_fraction = d.num("growth_fraction", c.quench.dpt.growth_fraction);
    c.quench.seed = c.seed;
    c.quench.prep = c.steady;
    c.quench.evo = c.evo;
  }
  {
    Section s = root.section("scan");
    s.check_keys({"mu", "g", "points", "seeds", "extra_seeds", "dp_threshold"});
    c.scan.mu_values = s.num_array("mu");
    c.scan.g_values = s.num_array("g");
    const bool has_grid = !c.scan.mu_values.empty() && !c.scan.g_values.empty();
    c.scan.extra_points =
        point_array(s, "points", has_grid ? std::vector<ParamPoint>{}
                                          : std::vector<ParamPoint>{kP1, kP2, kP3, kP4});
    c.scan.classify.initial_seeds = s.integer("seeds", c.scan.classify.initial_seeds);
    c.scan.classify.extra_seeds = s.integer("extra_seeds", c.scan.classify.extra_seeds);
    c.scan.classify.dp_threshold = s.num("dp_threshold", c.scan.classify.dp_threshold);
    c.scan.classify.base_seed = c.seed;
    c.scan.classify.steady = c.steady;
    c.scan.workers = c.workers;
  }
  {
    Section p = root.section("pme");
    p.check_keys({"s", "a", "f", "policy", "switch_time", "threshold", "plateau_slope", "interp"});
    c.pme.s = point(p, "s", kP2);
    c.pme.a = point(p, "a", kP3);
    c.pme.f = point(p, "f", kP4);
    c.pme.policy = parse_policy(p.str("policy", "fixed"), join(p.path(), "policy"));
    c.pme.fixed_switch_time = p.num("switch_time", 960.0);
    c.pme.threshold = p.num("threshold", c.pme.threshold);
    c.pme.plateau_slope = p.num("plateau_slope", c.pme.plateau_slope);
    c.pme.interp = parse_interp(p.str("interp", "linear"), join(p.path(), "interp"));
    c.pme.seed = c.seed;
    c.pme.prep = c.steady;
    c.pme.evo = c.evo;
  }
  {
    Section q = root.section("qme");
    q.check_keys({"target", "points", "threshold", "noise_floor", "interp"});
    c.qme.target = point(q, "target", kP4);
    c.qme.points = point_array(
        q, "points",
        {kP2, kP3, ParamPoint{0.5, 1.3}, ParamPoint{0.25, 1.1}});
    c.qme.threshold = q.num("threshold", c.qme.threshold);
    c.qme.noise_floor = q.num("noise_floor", c.qme.noise_floor);
    c.qme.interp = parse_interp(q.str("interp", "linear"), join(q.path(), "interp"));
    c.qme.master_seed = c.seed;
    c.qme.prep = c.steady;
    c.qme.evo = c.evo;
    c.qme.workers = c.workers;
  }
  {
    Section p = root.section("plot");
    p.check_keys({"kind", "input", "columns", "output", "log_y"});
    c.plot.kind = p.str("kind", c.plot.kind);
    if (c.plot.kind != "lines" && c.plot.kind != "heatmap")
      bad_key(join(p.path(), "kind"), "expected \"lines\" or \"heatmap\"");
    c.plot.input = p.str("input", c.plot.input);
    c.plot.columns = p.str_array("columns");
    c.plot.output = p.str("output", c.plot.output);
    c.plot.log_y = p.boolean("log_y", c.plot.log_y);
  }

  c.effective_json = dump_config_json(c).dump();
  return c;
}

} // namespace gn
