#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "mbm/config.hpp"
#include "mbm/errors.hpp"
#include "mbm/pipelines.hpp"
#include "mbm/report.hpp"
#include "mbm/suites.hpp"

namespace {

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  int workers = 0;
  std::string suite;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON configuration file");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
}

void print_record(const mbm::ReportRecord& r, double seconds) {
  for (const auto& c : r.rows)
    std::printf("  %s  %-58s estimated=%-12.6g predicted=%-12.6g tol=%-8.3g [%s]\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.estimated, c.predicted, c.tolerance, c.kind.c_str());
  std::printf("%s %s (%.1f s)\n", r.pass() ? "PASS" : "FAIL", r.name.c_str(), seconds);
}

int run_verify(const Flags& f, CLI::App* sub) {
  mbm::SuiteContext ctx;
  if (sub->count("--seed")) ctx.seed = f.seed;
  if (sub->count("--workers")) ctx.workers = f.workers;
  std::vector<std::string> names;
  if (f.suite == "all") {
    for (const auto& s : mbm::suite_registry()) names.push_back(s.name);
  } else {
    names.push_back(f.suite);
  }
  bool ok = true;
  for (const auto& name : names) {
    const auto t0 = std::chrono::steady_clock::now();
    const mbm::ReportRecord r = mbm::verify_suite(name, ctx);
    print_record(r, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    if (!f.out.empty())
      mbm::write_text((std::filesystem::path(f.out) / ("verify-" + name + ".json")).string(),
                      mbm::dump_json(mbm::to_json(r)));
    ok = ok && r.pass();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multifractional Brownian motion experiments"};
  app.require_subcommand(1);
  Flags f;
  std::vector<CLI::App*> pipelines;
  for (const auto& name : mbm::pipeline_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    add_common(sub, f);
    pipelines.push_back(sub);
  }
  CLI::App* verify = app.add_subcommand("verify", "run named verification suites");
  add_common(verify, f);
  verify->add_option("--suite", f.suite, "suite name or 'all'")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return run_verify(f, verify);
    for (CLI::App* sub : pipelines) {
      if (!sub->parsed()) continue;
      mbm::CliOverrides o;
      o.command = sub->get_name();
      if (sub->count("--seed")) o.seed = f.seed;
      if (sub->count("--out")) o.out = f.out;
      if (sub->count("--workers")) o.workers = f.workers;
      std::optional<std::string> path;
      if (!f.config.empty()) path = f.config;
      const mbm::ExperimentConfig cfg = mbm::load_config(path, o);
      const auto [csv, json] = mbm::run_experiment(cfg);
      std::printf("wrote %s\nwrote %s\n", csv.c_str(), json.c_str());
    }
    return 0;
  } catch (const mbm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
