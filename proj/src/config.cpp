#include "smcmc/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "smcmc/errors.hpp"

namespace smcmc {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) {
      throw ConfigError(detail::msg(where, ": unknown key '", item.key(), "'"));
    }
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(detail::msg(where, ": missing required key '", key, "'"));
  return *it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(detail::msg(where, ": expected a number"));
  return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(detail::msg(where, ": expected an integer"));
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(detail::msg(where, ": expected true or false"));
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(detail::msg(where, ": expected a string"));
  return j.get<std::string>();
}

std::uint64_t as_seed(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) {
    return static_cast<std::uint64_t>(j.get<long long>());
  }
  throw ConfigError(detail::msg(where, ": expected a non-negative integer"));
}

std::vector<ParamEntry> parse_param_entries(const json& arr) {
  if (!arr.is_array() || arr.empty()) {
    throw ConfigError("parameters: expected a non-empty array");
  }
  std::vector<ParamEntry> entries;
  int idx = 0;
  for (const auto& e : arr) {
    const std::string where = detail::msg("parameters[", idx, "]");
    if (!e.is_object()) throw ConfigError(where + ": expected an object");
    check_keys(e, where, {"name", "lower", "upper", "shared"});
    ParamEntry entry;
    entry.name = as_string(require(e, where, "name"), where + ".name");
    entry.lower = as_number(require(e, where, "lower"), where + ".lower");
    entry.upper = as_number(require(e, where, "upper"), where + ".upper");
    entry.shared = e.contains("shared") ? as_bool(e["shared"], where + ".shared") : false;
    entries.push_back(std::move(entry));
    ++idx;
  }
  return entries;
}

/// Truth values arrive keyed by entry name: a number for shared entries, an
/// array of n_conditions numbers (or a number when n_conditions is 1) for
/// per-condition entries. Flattening follows the ParamSpec slot layout.
Eigen::VectorXd parse_truth(const json& obj, const ParamSpec& spec) {
  if (!obj.is_object()) throw ConfigError("simulate.truth: expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const auto& e : spec.entries()) known = known || e.name == item.key();
    if (!known) {
      throw ConfigError(detail::msg("simulate.truth: unknown parameter '", item.key(), "'"));
    }
  }
  Eigen::VectorXd flat(spec.dim());
  for (const auto& e : spec.entries()) {
    const std::string where = "simulate.truth." + e.name;
    const json& v = require(obj, "simulate.truth", e.name.c_str());
    const int entry = spec.entry_index(e.name);
    if (e.shared) {
      flat[spec.slot(entry, 0)] = as_number(v, where);
      continue;
    }
    if (v.is_number() && spec.n_conditions() == 1) {
      flat[spec.slot(entry, 0)] = v.get<double>();
      continue;
    }
    if (!v.is_array() || static_cast<int>(v.size()) != spec.n_conditions()) {
      throw ConfigError(detail::msg(where, ": expected an array of ", spec.n_conditions(),
                                    " numbers"));
    }
    for (int c = 0; c < spec.n_conditions(); ++c) {
      flat[spec.slot(entry, c)] = as_number(v[static_cast<std::size_t>(c)],
                                            detail::msg(where, "[", c, "]"));
    }
  }
  return flat;
}

/// n_conditions per the truth block: the widest per-condition array (numbers
/// count as width 1).
int truth_width(const json& truth) {
  int width = 1;
  if (truth.is_object()) {
    for (const auto& item : truth.items()) {
      if (item.value().is_array()) width = std::max(width, static_cast<int>(item.value().size()));
    }
  }
  return width;
}

}  // namespace

int resolved_burn_in(const SamplerBlock& sampler) {
  if (sampler.burn_in.has_value()) return *sampler.burn_in;
  if (sampler.init_kind == InitKind::box_center) return sampler.iterations / 2;
  return 0;
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(detail::msg("config is not valid JSON: ", e.what()));
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(root, "config",
             {"model", "parameters", "simulate", "data", "sampler", "derivatives", "seed",
              "output_dir"});

  RunConfig cfg;

  const json& model = require(root, "config", "model");
  if (!model.is_object()) throw ConfigError("model: expected an object");
  check_keys(model, "model", {"type", "delta_t", "sigma_obs", "n_conditions"});
  cfg.model.type = as_string(require(model, "model", "type"), "model.type");
  if (cfg.model.type != "harmonic_oscillator") {
    throw ConfigError(detail::msg("model.type: unknown model '", cfg.model.type,
                                  "' (supported: harmonic_oscillator)"));
  }
  cfg.model.delta_t = as_number(require(model, "model", "delta_t"), "model.delta_t");
  if (!(cfg.model.delta_t > 0.0)) throw ConfigError("model.delta_t: must be positive");
  cfg.model.sigma_obs = as_number(require(model, "model", "sigma_obs"), "model.sigma_obs");
  if (cfg.model.sigma_obs < 0.0) throw ConfigError("model.sigma_obs: must be >= 0");

  const bool has_simulate = root.contains("simulate");
  const bool has_data = root.contains("data");
  if (has_simulate == has_data) {
    throw ConfigError("config: exactly one of 'simulate' and 'data' must be present");
  }

  // Establish n_conditions before the parameter spec: explicit key wins, else
  // the data file count or the widest truth array.
  int n_conditions = 0;
  if (model.contains("n_conditions")) {
    n_conditions = as_int(model["n_conditions"], "model.n_conditions");
    if (n_conditions < 1) throw ConfigError("model.n_conditions: must be >= 1");
  }
  if (has_data) {
    const json& data = root["data"];
    if (!data.is_object()) throw ConfigError("data: expected an object");
    check_keys(data, "data", {"files", "manifest"});
    const json& files = require(data, "data", "files");
    if (!files.is_array() || files.empty()) {
      throw ConfigError("data.files: expected a non-empty array of paths");
    }
    DataBlock block;
    int idx = 0;
    for (const auto& f : files) {
      block.files.push_back(as_string(f, detail::msg("data.files[", idx, "]")));
      ++idx;
    }
    if (data.contains("manifest")) block.manifest = as_string(data["manifest"], "data.manifest");
    if (n_conditions == 0) n_conditions = static_cast<int>(block.files.size());
    if (n_conditions != static_cast<int>(block.files.size())) {
      throw ConfigError(detail::msg("data.files: ", block.files.size(), " files for ",
                                    n_conditions, " conditions"));
    }
    cfg.data = std::move(block);
  } else {
    const json& sim = root["simulate"];
    if (!sim.is_object()) throw ConfigError("simulate: expected an object");
    check_keys(sim, "simulate", {"duration", "truth", "warmup_seconds", "substeps"});
    if (n_conditions == 0) n_conditions = truth_width(require(sim, "simulate", "truth"));
  }
  cfg.model.n_conditions = n_conditions;

  std::vector<ParamEntry> entries;
  if (root.contains("parameters")) {
    entries = parse_param_entries(root["parameters"]);
  } else {
    entries = {{"omega0", 1.0, 200.0, false},
               {"sigma_in", 0.1, 500.0, false},
               {"zeta", 0.01, 0.99, true}};
  }
  try {
    cfg.params = ParamSpec(std::move(entries), n_conditions);
  } catch (const Error& e) {
    throw ConfigError(detail::msg("parameters: ", e.what()));
  }

  if (has_simulate) {
    const json& sim = root["simulate"];
    SimulateBlock block;
    block.duration = as_number(require(sim, "simulate", "duration"), "simulate.duration");
    if (!(block.duration > 0.0)) throw ConfigError("simulate.duration: must be positive");
    block.truth = parse_truth(require(sim, "simulate", "truth"), cfg.params);
    if (!cfg.params.in_support(block.truth)) {
      throw ConfigError("simulate.truth: values fall outside the parameter bounds");
    }
    if (sim.contains("warmup_seconds")) {
      block.warmup_seconds = as_number(sim["warmup_seconds"], "simulate.warmup_seconds");
      if (block.warmup_seconds < 0.0) throw ConfigError("simulate.warmup_seconds: must be >= 0");
    }
    if (sim.contains("substeps")) {
      block.substeps = as_int(sim["substeps"], "simulate.substeps");
      if (block.substeps < 0) throw ConfigError("simulate.substeps: must be >= 0");
    }
    cfg.simulate = std::move(block);
  }

  if (root.contains("sampler")) {
    const json& s = root["sampler"];
    if (!s.is_object()) throw ConfigError("sampler: expected an object");
    check_keys(s, "sampler",
               {"algorithm", "iterations", "burn_in", "step_size", "hessian_floor",
                "target_accept", "max_tree_depth", "adapt_mass", "initial_step", "init"});
    SamplerBlock& sampler = cfg.sampler;
    const std::string algo = as_string(require(s, "sampler", "algorithm"), "sampler.algorithm");
    if (algo == "smmala") {
      sampler.algorithm = SamplerKind::smmala;
    } else if (algo == "nuts") {
      sampler.algorithm = SamplerKind::nuts;
    } else {
      throw ConfigError(detail::msg("sampler.algorithm: unknown algorithm '", algo,
                                    "' (supported: smmala, nuts)"));
    }
    sampler.iterations = as_int(require(s, "sampler", "iterations"), "sampler.iterations");
    if (sampler.iterations < 1) throw ConfigError("sampler.iterations: must be >= 1");
    if (s.contains("burn_in")) {
      const int b = as_int(s["burn_in"], "sampler.burn_in");
      if (b < 0 || b >= sampler.iterations) {
        throw ConfigError("sampler.burn_in: must lie in [0, iterations)");
      }
      sampler.burn_in = b;
    }
    if (s.contains("step_size")) {
      sampler.smmala.step_size = as_number(s["step_size"], "sampler.step_size");
      if (!(sampler.smmala.step_size > 0.0)) throw ConfigError("sampler.step_size: must be > 0");
    }
    if (s.contains("hessian_floor")) {
      sampler.smmala.hessian_floor = as_number(s["hessian_floor"], "sampler.hessian_floor");
      if (!(sampler.smmala.hessian_floor > 0.0)) {
        throw ConfigError("sampler.hessian_floor: must be > 0");
      }
    }
    if (s.contains("target_accept")) {
      sampler.nuts.target_accept = as_number(s["target_accept"], "sampler.target_accept");
      if (!(sampler.nuts.target_accept > 0.0 && sampler.nuts.target_accept < 1.0)) {
        throw ConfigError("sampler.target_accept: must lie in (0, 1)");
      }
    }
    if (s.contains("max_tree_depth")) {
      sampler.nuts.max_tree_depth = as_int(s["max_tree_depth"], "sampler.max_tree_depth");
      if (sampler.nuts.max_tree_depth < 0 || sampler.nuts.max_tree_depth > 14) {
        throw ConfigError("sampler.max_tree_depth: must lie in [0, 14]");
      }
    }
    if (s.contains("adapt_mass")) {
      sampler.nuts.adapt_mass = as_bool(s["adapt_mass"], "sampler.adapt_mass");
    }
    if (s.contains("initial_step")) {
      sampler.nuts.initial_step = as_number(s["initial_step"], "sampler.initial_step");
      if (sampler.nuts.initial_step < 0.0) throw ConfigError("sampler.initial_step: must be >= 0");
    }
    if (s.contains("init")) {
      const json& init = s["init"];
      if (init.is_string()) {
        const std::string kind = init.get<std::string>();
        if (kind == "truth") {
          sampler.init_kind = InitKind::truth;
        } else if (kind == "box_center") {
          sampler.init_kind = InitKind::box_center;
        } else {
          throw ConfigError(detail::msg("sampler.init: unknown mode '", kind,
                                        "' (use 'truth', 'box_center', or an array)"));
        }
      } else if (init.is_array()) {
        if (static_cast<int>(init.size()) != cfg.params.dim()) {
          throw ConfigError(detail::msg("sampler.init: expected ", cfg.params.dim(),
                                        " values, got ", init.size()));
        }
        sampler.init_values.resize(cfg.params.dim());
        for (int i = 0; i < cfg.params.dim(); ++i) {
          sampler.init_values[i] = as_number(init[static_cast<std::size_t>(i)],
                                             detail::msg("sampler.init[", i, "]"));
        }
        sampler.init_kind = InitKind::explicit_vector;
      } else {
        throw ConfigError("sampler.init: expected 'truth', 'box_center', or an array");
      }
    }
  }

  if (root.contains("derivatives")) {
    const json& d = root["derivatives"];
    if (!d.is_object()) throw ConfigError("derivatives: expected an object");
    check_keys(d, "derivatives", {"engine", "fd_step"});
    const std::string engine = as_string(require(d, "derivatives", "engine"),
                                         "derivatives.engine");
    if (engine == "fd") {
      cfg.derivatives.engine = DerivEngine::fd;
    } else if (engine == "ad") {
      cfg.derivatives.engine = DerivEngine::ad;
    } else {
      throw ConfigError(detail::msg("derivatives.engine: unknown engine '", engine,
                                    "' (supported: fd, ad)"));
    }
    if (d.contains("fd_step")) {
      cfg.derivatives.fd_step = as_number(d["fd_step"], "derivatives.fd_step");
      if (cfg.derivatives.fd_step < 0.0) throw ConfigError("derivatives.fd_step: must be >= 0");
    }
  }

  if (root.contains("seed")) cfg.seed = as_seed(root["seed"], "seed");
  if (root.contains("output_dir")) cfg.output_dir = as_string(root["output_dir"], "output_dir");

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(detail::msg("cannot open config file '", path, "'"));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(detail::msg(path, ": ", e.what()));
  }
}

}  // namespace smcmc
