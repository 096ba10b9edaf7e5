#include "mbm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mbm/errors.hpp"

namespace mbm {

using nlohmann::json;

const std::vector<std::string>& pipeline_names() {
  static const std::vector<std::string> names{"simulate", "exponents", "frontier", "boxdim",
                                              "pboxdim",  "levelset",  "gauss"};
  return names;
}

json default_config() {
  return json::parse(R"({
    "command": "simulate",
    "seed": 1,
    "workers": 1,
    "out": "out",
    "signal": "mbm",
    "hurst": "const:h=0.5",
    "a_plus": 1.0,
    "a_minus": 0.0,
    "grid": {"t_min": 0.0, "t_max": 1.0, "step": 0.000244140625},
    "noise": {"half_width": 2.0, "step": 0.0},
    "quadrature": {"truncation": 0.0, "tail_tol": 1e-6, "anchor_offset": 1.0, "fd_step": 0.001, "max_deriv": 3},
    "probes": [0.5],
    "scales": {"ball": 0, "point_fine": 0, "lag_coarse": 0, "lag_fine": 0},
    "sprime": [],
    "box": {"rho": 0.1, "coarse": 4, "fine": 10},
    "pbox": {"rho": 0.1, "h_metric": 0.5, "count": 8, "min_steps": 4.0},
    "levelset": {"mode": "probe", "value": 0.0, "t_min": 0.0, "t_max": 1.0, "coarse": 4, "fine": 10},
    "gauss": {"seeds": 500, "noise_step": 0.0009765625, "noise_half_width": 4.0, "rho": 0.05}
  })");
}

namespace {

std::string kind_of(const json& v) {
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_boolean()) return "boolean";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

void merge(json& base, const json& user, const std::string& prefix) {
  if (!user.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError(key, "unknown key");
    json& slot = base[it.key()];
    if (kind_of(slot) != kind_of(*it)) throw ConfigError(key, "expected " + kind_of(slot) + ", got " + kind_of(*it));
    if (slot.is_object()) {
      merge(slot, *it, key);
    } else if (slot.is_array()) {
      for (const auto& e : *it)
        if (!e.is_number()) throw ConfigError(key, "array entries must be numbers");
      slot = *it;
    } else {
      slot = *it;
    }
  }
}

void check_integer(const std::string& key, const json& v) {
  const double x = v.get<double>();
  if (x != std::floor(x)) throw ConfigError(key, "expected an integer");
}

}  // namespace

const json& ExperimentConfig::at(const std::string& dotted) const {
  const json* node = &values;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->contains(part)) throw ConfigError(dotted, "missing key");
    node = &(*node)[part];
  }
  return *node;
}

int ExperimentConfig::integer(const std::string& dotted) const {
  return static_cast<int>(std::llround(at(dotted).get<double>()));
}

ExperimentConfig make_config(const json& user, const CliOverrides& flags) {
  json cfg = default_config();
  merge(cfg, user, "");
  if (flags.command) cfg["command"] = *flags.command;
  if (flags.seed) cfg["seed"] = *flags.seed;
  if (flags.out) cfg["out"] = *flags.out;
  if (flags.workers) cfg["workers"] = *flags.workers;

  const auto& names = pipeline_names();
  const std::string cmd = cfg["command"].get<std::string>();
  if (std::find(names.begin(), names.end(), cmd) == names.end())
    throw ConfigError("command", "unknown pipeline '" + cmd + "'");
  for (const char* k : {"seed", "workers"}) check_integer(k, cfg[k]);
  if (cfg["seed"].get<double>() < 0) throw ConfigError("seed", "must be nonnegative");
  if (cfg["workers"].get<int>() < 1) throw ConfigError("workers", "must be at least 1");
  for (const char* k : {"ball", "point_fine", "lag_coarse", "lag_fine"})
    check_integer(std::string("scales.") + k, cfg["scales"][k]);
  for (const char* k : {"coarse", "fine"}) check_integer(std::string("box.") + k, cfg["box"][k]);
  check_integer("gauss.seeds", cfg["gauss"]["seeds"]);
  check_integer("quadrature.max_deriv", cfg["quadrature"]["max_deriv"]);
  const std::string mode = cfg["levelset"]["mode"].get<std::string>();
  if (mode != "probe" && mode != "value") throw ConfigError("levelset.mode", "expected 'probe' or 'value'");
  if (!(cfg["grid"]["step"].get<double>() > 0.0)) throw ConfigError("grid.step", "must be positive");
  if (cfg["probes"].empty()) throw ConfigError("probes", "at least one probe time is required");
  return {cfg};
}

ExperimentConfig load_config(const std::optional<std::string>& path, const CliOverrides& flags) {
  json user = json::object();
  if (path) {
    std::ifstream f(*path);
    if (!f) throw ConfigError("--config", "cannot open " + *path);
    try {
      user = json::parse(f);
    } catch (const json::parse_error& e) {
      throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
  }
  return make_config(user, flags);
}

}  // namespace mbm
