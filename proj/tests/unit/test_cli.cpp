#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mbm/config.hpp"
#include "mbm/errors.hpp"
#include "mbm/pipelines.hpp"
#include "mbm/report.hpp"
#include "mbm/suites.hpp"

using namespace mbm;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    out.push_back(row);
  }
  return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("mbmlab-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("simulate twice gives identical bytes") {
  const auto dir = scratch_dir("simulate");
  const ExperimentConfig cfg =
      make_config({{"command", "simulate"}, {"hurst", "const:h=0.5"}, {"seed", 1}, {"out", dir.string()}});
  const auto [csv1, json1] = run_experiment(cfg);
  const std::string a = slurp(csv1), aj = slurp(json1);
  const auto [csv2, json2] = run_experiment(cfg);
  CHECK(slurp(csv2) == a);
  CHECK(slurp(json2) == aj);
  CHECK(a.rfind("t,x", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("simulate with H = 1/2 reproduces the Brownian path") {
  const ExperimentConfig cfg = make_config({{"hurst", "const:h=0.5"}, {"grid", {{"step", 1.0 / 64}}}});
  const auto rows = parse_csv(run_pipeline(cfg).csv);
  CHECK(rows.size() == 66);
  CHECK(std::stod(rows[1][1]) == 0.0);
}

TEST_CASE("configuration errors name the offending key") {
  try {
    make_config({{"grid", {{"stepp", 0.1}}}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "grid.stepp");
  }
  try {
    make_config({{"command", "no-such-pipeline"}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "command");
  }
  CHECK_THROWS_AS(make_config({{"seed", "seven"}}), ConfigError);
  CHECK_THROWS_AS(make_config({{"box", {{"coarse", 4.5}}}}), ConfigError);
  CHECK_THROWS_AS(load_config(std::string("/nonexistent/config.json")), ConfigError);
}

TEST_CASE("flags override the file") {
  CliOverrides o;
  o.seed = 9;
  o.workers = 3;
  o.command = "boxdim";
  const ExperimentConfig cfg = make_config({{"seed", 2}, {"command", "simulate"}}, o);
  CHECK(cfg.seed() == 9);
  CHECK(cfg.integer("workers") == 3);
  CHECK(cfg.text("command") == "boxdim");
  // every default is materialised
  CHECK(cfg.real("quadrature.fd_step") == 1e-3);
}

TEST_CASE("every pipeline is reachable") {
  std::set<std::string> names(pipeline_names().begin(), pipeline_names().end());
  CHECK(names == std::set<std::string>{"simulate", "exponents", "frontier", "boxdim", "pboxdim", "levelset", "gauss"});
}

TEST_CASE("report JSON round-trips byte for byte") {
  const ExperimentConfig cfg = make_config({{"command", "exponents"}, {"grid", {{"step", 1.0 / 16384}}}});
  const PipelineOutput out = run_pipeline(cfg);
  const std::string text = dump_json(out.report);
  CHECK(dump_json(json::parse(text)) == text);
  CHECK(out.report.at("config") == cfg.values);

  ReportRecord r;
  r.name = "x";
  r.seed = 5;
  r.rows = {near("a", 1.0, 1.05, 0.1), at_most("b", 0.1, std::nan("")), within("c", 0.2, 0.4, 0.3)};
  r.config = {{"k", 1}};
  r.config_hash = hash_json(r.config);
  const std::string s = dump_json(to_json(r));
  CHECK(dump_json(to_json(record_from_json(json::parse(s)))) == s);
}

TEST_CASE("check semantics") {
  CHECK(near("a", 1.0, 1.09, 0.1).pass);
  CHECK_FALSE(near("a", 1.0, 1.11, 0.1).pass);
  CHECK(at_most("b", 0.5, 0.5).pass);
  CHECK_FALSE(at_most("b", 0.5, 0.51).pass);
  CHECK(below("c", 0.5, 0.49).pass);
  CHECK_FALSE(below("c", 0.5, 0.5).pass);
  CHECK(within("d", 0.2, 0.4, 0.2).pass);
  CHECK_FALSE(within("d", 0.2, 0.4, 0.41).pass);
  CHECK_FALSE(near("e", 0.0, std::nan(""), 1.0).pass);
  ReportRecord empty;
  CHECK_FALSE(empty.pass());
}

TEST_CASE("CSV keeps 17 significant digits") {
  CsvTable t({"a", "b"});
  t.add({0.1, 1.0 / 3.0});
  const auto rows = parse_csv(t.str());
  CHECK(rows[0] == std::vector<std::string>{"a", "b"});
  CHECK(std::stod(rows[1][0]) == 0.1);
  CHECK(std::stod(rows[1][1]) == 1.0 / 3.0);
  CHECK(format_real(std::nan("")) == "nan");
}

TEST_CASE("unwritable output path") {
  CHECK_THROWS_AS(write_text("/proc/mbmlab/none.csv", "x"), IoError);
}

TEST_CASE("frontier pipeline on the chirp") {
  const ExperimentConfig cfg = make_config({{"command", "frontier"},
                                            {"signal", "chirp:alpha=0.5,beta=1"},
                                            {"grid", {{"t_min", -1.0}, {"t_max", 1.0}, {"step", std::ldexp(1.0, -16)}}},
                                            {"probes", {0.0}}});
  const auto rows = parse_csv(run_pipeline(cfg).csv);
  REQUIRE(rows[0] == std::vector<std::string>{"s_prime", "sigma_hat", "sigma_theory"});
  double worst = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double th = std::stod(rows[i][2]);
    if (th < 0.0) continue;  // sigma below 0 lies outside the estimator's range
    worst = std::max(worst, std::abs(std::stod(rows[i][1]) - std::min(th, 1.0)));
  }
  CHECK(worst <= 0.1);
}

TEST_CASE("suite registry covers every criterion once") {
  const auto& reg = suite_registry();
  CHECK(reg.size() == 12);
  std::set<int> crit;
  std::set<std::string> names;
  for (const auto& s : reg) {
    crit.insert(s.criterion);
    names.insert(s.name);
    CHECK(s.run != nullptr);
  }
  CHECK(crit.size() == 12);
  CHECK(*crit.begin() == 1);
  CHECK(*crit.rbegin() == 12);
  CHECK(names.size() == 12);
}

TEST_CASE("unknown suite lists the registered ones") {
  try {
    verify_suite("no-such");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const auto& s : suite_registry()) CHECK(msg.find(s.name) != std::string::npos);
  }
}

TEST_CASE("a fast suite passes") {
  const ReportRecord r = verify_suite("half-collapse");
  CHECK(r.pass());
  CHECK(r.rows.size() == 2);
}
