#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace mbm {

const std::vector<std::string>& pipeline_names();

// Full effective configuration: every key present, defaults filled in.
struct ExperimentConfig {
  nlohmann::json values;

  const nlohmann::json& at(const std::string& dotted) const;
  double real(const std::string& dotted) const { return at(dotted).get<double>(); }
  int integer(const std::string& dotted) const;
  std::string text(const std::string& dotted) const { return at(dotted).get<std::string>(); }
  std::vector<double> reals(const std::string& dotted) const { return at(dotted).get<std::vector<double>>(); }
  std::uint64_t seed() const { return at("seed").get<std::uint64_t>(); }
};

nlohmann::json default_config();

struct CliOverrides {
  std::optional<std::string> command;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
};

// Merges user JSON over the defaults; unknown keys and type mismatches raise ConfigError.
ExperimentConfig make_config(const nlohmann::json& user, const CliOverrides& flags = {});
ExperimentConfig load_config(const std::optional<std::string>& path, const CliOverrides& flags = {});

}  // namespace mbm
