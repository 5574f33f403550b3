#include "optlab/harness/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <set>

#include "optlab/error.hpp"

namespace optlab::harness {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(join(path, it.key()), "unknown field");
  }
}

const json& require_object(const json& obj, const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  return obj;
}

double get_number(const json& obj, const std::string& key, const std::string& path,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& key, const std::string& path,
                         std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  return v.get<std::int64_t>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(join(path, key), "required field missing");
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
  return v.get<std::string>();
}

Vector get_vector(const json& obj, const std::string& key, const std::string& path) {
  const std::string p = join(path, key);
  if (!obj.contains(key)) throw ConfigError(p, "required field missing");
  const json& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(p, "expected an array of numbers");
  Vector out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(p + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

// Re-throws a ConfigError raised by a component validator under `prefix`.
template <typename F>
void with_prefix(const std::string& prefix, F&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError(join(prefix, e.path()), e.message());
  }
}

ProblemSpec parse_problem(const json& obj, const std::string& path) {
  require_object(obj, path);
  reject_unknown(obj, path, {"name", "params", "x0", "noise"});
  ProblemSpec spec;
  spec.name = get_string(obj, "name", path);
  spec.x0 = get_vector(obj, "x0", path);
  if (spec.name == "pl_quadratic") {
    const std::string pp = join(path, "params");
    if (!obj.contains("params")) throw ConfigError(pp, "pl_quadratic needs params");
    const json& params = require_object(obj.at("params"), pp);
    reject_unknown(params, pp, {"spectrum", "x_star", "box"});
    spec.spectrum = get_vector(params, "spectrum", pp);
    spec.x_star = params.contains("x_star") ? get_vector(params, "x_star", pp)
                                            : Vector(spec.spectrum.size(), 0.0);
    if (params.contains("box")) {
      const std::string bp = join(pp, "box");
      const json& box = require_object(params.at("box"), bp);
      reject_unknown(box, bp, {"lo", "hi"});
      spec.box = DomainBox{get_vector(box, "lo", bp), get_vector(box, "hi", bp)};
    }
  } else if (spec.name != "camel3" && spec.name != "rosenbrock") {
    throw ConfigError(join(path, "name"), "unknown problem '" + spec.name + "'");
  } else if (obj.contains("params") && !obj.at("params").empty()) {
    throw ConfigError(join(path, "params"), spec.name + " takes no parameters");
  }
  if (obj.contains("noise")) {
    const std::string np = join(path, "noise");
    const json& noise = require_object(obj.at("noise"), np);
    reject_unknown(noise, np, {"kind", "sigma", "clip_G"});
    with_prefix(np, [&] { spec.noise.kind = parse_noise_kind(get_string(noise, "kind", "")); });
    spec.noise.sigma = get_number(noise, "sigma", np, 0.0);
    spec.noise.clip_G = get_number(noise, "clip_G", np, spec.noise.clip_G);
    with_prefix(np, [&] { spec.noise.validate(); });
  }
  return spec;
}

ScalingState parse_scaling(const json& obj, const std::string& path) {
  require_object(obj, path);
  reject_unknown(obj, path,
                 {"mode", "f_star", "f_min", "f_max", "iters_per_epoch", "continuous_refresh"});
  ScalingState s;
  with_prefix(path, [&] { s.mode = parse_scaling_mode(get_string(obj, "mode", "")); });
  s.f_star = get_number(obj, "f_star", path, 0.0);
  s.f_min = get_number(obj, "f_min", path, s.f_min);
  s.f_max = get_number(obj, "f_max", path, s.f_max);
  s.iters_per_epoch = get_integer(obj, "iters_per_epoch", path, s.iters_per_epoch);
  s.continuous_refresh = get_bool(obj, "continuous_refresh", path, false);
  if (s.mode == ScalingMode::KnownRange && (!obj.contains("f_min") || !obj.contains("f_max"))) {
    throw ConfigError(join(path, "f_max"), "known_range needs f_min and f_max");
  }
  with_prefix(path, [&] { s.validate(); });
  return s;
}

OptimizerEntry parse_optimizer(const json& obj, const std::string& path) {
  require_object(obj, path);
  reject_unknown(obj, path, {"label", "kind", "beta1", "beta2", "eta", "epsilon", "gamma", "phi",
                             "decay_schedule", "boost", "scaling"});
  OptimizerEntry entry;
  OptimizerConfig& c = entry.config;
  with_prefix(path, [&] { c.kind = parse_estimator_kind(get_string(obj, "kind", "")); });
  entry.label = obj.contains("label") ? get_string(obj, "label", path)
                                      : std::string(to_string(c.kind));
  c.beta1 = get_number(obj, "beta1", path, c.beta1);
  c.beta2 = get_number(obj, "beta2", path, c.beta2);
  c.eta = get_number(obj, "eta", path, c.eta);
  c.epsilon = get_number(obj, "epsilon", path, c.epsilon);
  c.gamma = get_number(obj, "gamma", path, c.gamma);
  c.phi = get_number(obj, "phi", path, c.phi);
  if (obj.contains("decay_schedule")) {
    const std::string dp = join(path, "decay_schedule");
    const json& list = obj.at("decay_schedule");
    if (!list.is_array()) throw ConfigError(dp, "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string ep = dp + "[" + std::to_string(i) + "]";
      require_object(list[i], ep);
      reject_unknown(list[i], ep, {"step", "factor"});
      if (!list[i].contains("step")) throw ConfigError(join(ep, "step"), "required field missing");
      if (!list[i].contains("factor")) throw ConfigError(join(ep, "factor"), "required field missing");
      c.decay_schedule.push_back({get_integer(list[i], "step", ep, 0),
                                  get_number(list[i], "factor", ep, 1.0)});
    }
  }
  if (obj.contains("boost")) {
    const std::string bp = join(path, "boost");
    const json& b = require_object(obj.at("boost"), bp);
    reject_unknown(b, bp, {"when_f_below", "factor"});
    c.boost = ValueTrigger{get_number(b, "when_f_below", bp, 1.0), get_number(b, "factor", bp, 10.0)};
  }
  with_prefix(path, [&] { c.validate(); });
  if (obj.contains("scaling")) {
    entry.scaling = parse_scaling(obj.at("scaling"), join(path, "scaling"));
  }
  return entry;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "", {"problem", "optimizers", "steps", "record_every", "seed", "repeats",
                           "output_dir", "mode_ratio", "analysis"});
  ExperimentConfig cfg;
  if (!doc.contains("problem")) throw ConfigError("problem", "required field missing");
  cfg.problem = parse_problem(doc.at("problem"), "problem");

  if (!doc.contains("optimizers")) throw ConfigError("optimizers", "required field missing");
  const json& opts = doc.at("optimizers");
  if (!opts.is_array() || opts.empty()) throw ConfigError("optimizers", "expected a non-empty array");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < opts.size(); ++i) {
    const std::string p = "optimizers[" + std::to_string(i) + "]";
    cfg.optimizers.push_back(parse_optimizer(opts[i], p));
    if (!labels.insert(cfg.optimizers.back().label).second) {
      throw ConfigError(p + ".label", "duplicate label '" + cfg.optimizers.back().label + "'");
    }
  }

  cfg.steps = get_integer(doc, "steps", "", cfg.steps);
  if (!doc.contains("steps")) throw ConfigError("steps", "required field missing");
  if (cfg.steps < 1) throw ConfigError("steps", "must be >= 1");
  cfg.record_every = get_integer(doc, "record_every", "", cfg.record_every);
  if (cfg.record_every < 1) throw ConfigError("record_every", "must be >= 1");
  const std::int64_t seed = get_integer(doc, "seed", "", 0);
  if (seed < 0) throw ConfigError("seed", "must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.repeats = get_integer(doc, "repeats", "", cfg.repeats);
  if (cfg.repeats < 1) throw ConfigError("repeats", "must be >= 1");
  if (doc.contains("output_dir")) cfg.output_dir = get_string(doc, "output_dir", "");
  cfg.mode_ratio = get_number(doc, "mode_ratio", "", cfg.mode_ratio);
  if (!(cfg.mode_ratio >= 1.0)) throw ConfigError("mode_ratio", "must be >= 1");

  if (doc.contains("analysis")) {
    const json& a = require_object(doc.at("analysis"), "analysis");
    reject_unknown(a, "analysis", {"k0", "mu", "L", "G"});
    if (a.contains("k0")) cfg.analysis.k0 = get_integer(a, "k0", "analysis", 1);
    if (a.contains("mu")) cfg.analysis.mu = get_number(a, "mu", "analysis", 0.0);
    if (a.contains("L")) cfg.analysis.L = get_number(a, "L", "analysis", 0.0);
    if (a.contains("G")) cfg.analysis.G = get_number(a, "G", "analysis", 0.0);
    if (cfg.analysis.k0 && *cfg.analysis.k0 < 1) throw ConfigError("analysis.k0", "must be >= 1");
  }

  // problem dimension is only known once the problem is built
  const Problem problem = [&] {
    try {
      return build_problem(cfg.problem);
    } catch (const InputError& e) {
      throw ConfigError("problem.params", e.what());
    }
  }();
  if (cfg.problem.x0.size() != problem.dim) {
    throw ConfigError("problem.x0", "expected " + std::to_string(problem.dim) +
                                        " coordinates, got " +
                                        std::to_string(cfg.problem.x0.size()));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

void apply_environment(ExperimentConfig& config) {
  const char* env = std::getenv("OPTLAB_SEED");
  if (env == nullptr || *env == '\0') return;
  std::uint64_t seed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  auto [ptr, ec] = std::from_chars(env, end, seed);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("OPTLAB_SEED", "expected a non-negative integer, got '" + std::string(env) + "'");
  }
  config.seed = seed;
}

Problem build_problem(const ProblemSpec& spec) {
  if (spec.name == "pl_quadratic") {
    if (spec.box) return pl_quadratic(spec.spectrum, spec.x_star, *spec.box);
    return pl_quadratic(spec.spectrum, spec.x_star);
  }
  return make_problem(spec.name);
}

}  // namespace optlab::harness
