#include "mbm/pipelines.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

#include "mbm/errors.hpp"
#include "mbm/field.hpp"
#include "mbm/fractal.hpp"
#include "mbm/gauss.hpp"
#include "mbm/hurst.hpp"
#include "mbm/noise.hpp"
#include "mbm/regularity.hpp"
#include "mbm/report.hpp"

namespace mbm {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double param(const HurstParams& p, const std::string& key, const std::string& where) {
  const auto it = p.find(key);
  if (it == p.end()) throw ConfigError("signal", "'" + where + "' needs parameter '" + key + "'");
  return it->second;
}

QuadratureConfig quadrature(const ExperimentConfig& cfg) {
  QuadratureConfig q;
  q.truncation = cfg.real("quadrature.truncation");
  if (q.truncation == 0.0) q.truncation = cfg.real("noise.half_width");
  q.tail_tol = cfg.real("quadrature.tail_tol");
  q.anchor_offset = cfg.real("quadrature.anchor_offset");
  q.fd_step = cfg.real("quadrature.fd_step");
  q.max_deriv = cfg.integer("quadrature.max_deriv");
  return q;
}

TimeGrid output_grid(const ExperimentConfig& cfg) {
  return TimeGrid(cfg.real("grid.t_min"), cfg.real("grid.t_max"), cfg.real("grid.step"));
}

BrownianPath noise(const ExperimentConfig& cfg) {
  const double U = cfg.real("noise.half_width");
  double step = cfg.real("noise.step");
  if (step == 0.0) step = cfg.real("grid.step");
  return gen_brownian(TimeGrid(-U, U, step), cfg.seed());
}

// Sampled signal plus what is known about its regularity.
struct Signal {
  std::string kind;
  Samples f;
  std::optional<HurstFunction> hurst;
  double h = kNaN;  // exponent of self-similar signals
  ChirpFunction chirp{0.0, 0.0};
};

Signal make_signal(const ExperimentConfig& cfg) {
  const auto [name, p] = parse_spec(cfg.text("signal"));
  const TimeGrid grid = output_grid(cfg);
  Signal s{name, {grid, {}}, std::nullopt};
  if (name == "mbm") {
    s.hurst = parse_hurst(cfg.text("hurst"));
    const MbmPath X = mbm_sample(grid, *s.hurst, cfg.real("a_plus"), cfg.real("a_minus"), noise(cfg), quadrature(cfg));
    s.f = X.samples();
  } else if (name == "fbm") {
    s.h = param(p, "h", name);
    s.f = gen_fbm(grid, s.h, cfg.seed()).samples();
  } else if (name == "brownian") {
    s.h = 0.5;
    s.f = gen_brownian(grid, cfg.seed()).samples();
  } else if (name == "chirp") {
    s.chirp = build_chirp(param(p, "alpha", name), param(p, "beta", name));
    s.f = s.chirp.sample(grid);
  } else if (name == "weierstrass") {
    s.h = param(p, "h", name);
    s.f = weierstrass_graph(grid, s.h, param(p, "lambda", name));
  } else if (name == "hurst") {
    s.hurst = parse_hurst(cfg.text("hurst"));
    s.f.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) s.f.values[i] = s.hurst->eval(grid.at(i));
  } else if (name == "derivative") {
    s.hurst = parse_hurst(cfg.text("hurst"));
    if (!s.hurst->is_constant()) throw ConfigError("hurst", "derivative fields need a constant Hurst function");
    const int k = static_cast<int>(param(p, "k", name));
    const double h = s.hurst->eval(0.0);
    const BrownianPath bm = noise(cfg);
    if (std::abs(bm.grid.step() - grid.step()) > 1e-15)
      throw ConfigError("noise.step", "derivative fields need the noise step equal to the grid step");
    const QuadratureConfig q = quadrature(cfg);
    const FieldEngine engine(bm, q, grid.t_min(), grid.t_max());
    std::vector<double> v(engine.out_grid().size(), 0.0);
    for (auto [side, a] : {std::pair{Side::plus, cfg.real("a_plus")}, std::pair{Side::minus, cfg.real("a_minus")}}) {
      if (a == 0.0) continue;
      const auto d = engine.partial(side, h, k, q.fd_step);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += a * d[i];
    }
    s.f = {engine.out_grid(), v};
    s.h = h;
  } else {
    throw ConfigError("signal", "unknown signal '" + name + "'");
  }
  return s;
}

double meta_or(const std::function<double(double)>& fn, double t, double fallback) {
  return fn ? fn(t) : fallback;
}

// Pointwise and local exponents, inf for smooth points.
std::pair<double, double> exponent_theory(const Signal& s, double t) {
  if (s.kind == "chirp") {
    if (t != 0.0) return {kInf, kInf};
    return {s.chirp.alpha, s.chirp.alpha / (1.0 + s.chirp.beta)};
  }
  if (s.kind == "mbm") {
    const double H = s.hurst->eval(t);
    const auto& m = s.hurst->meta();
    return {predict_pointwise_mbm(H, meta_or(m.pointwise_exp, t, kInf), 1),
            std::min(H, meta_or(m.local_exp, t, kInf))};
  }
  if (s.kind == "hurst") {
    const auto& m = s.hurst->meta();
    return {meta_or(m.pointwise_exp, t, kNaN), meta_or(m.local_exp, t, kNaN)};
  }
  return {s.h, s.h};
}

double frontier_theory(const Signal& s, double t, double sp) {
  if (s.kind == "chirp") return t == 0.0 ? s.chirp.frontier_at_zero(sp) : kInf;
  if (s.kind == "mbm") {
    const auto& m = s.hurst->meta();
    const double H = s.hurst->eval(t);
    const auto fH = [&](double x) { return m.frontier ? m.frontier(t, x) : kInf; };
    return predict_frontier_mbm(H, fH, 1, {sp}).lower.sigma[0];
  }
  if (s.kind == "hurst") {
    const auto& m = s.hurst->meta();
    return m.frontier ? m.frontier(t, sp) : kNaN;
  }
  return std::min(s.h + sp, s.h);
}

double boxdim_theory(const Signal& s, double t) {
  if (s.kind == "chirp") return t == 0.0 ? s.chirp.boxdim_at_zero() : 1.0;
  if (s.kind == "mbm") {
    const double gd = meta_or(s.hurst->meta().graph_boxdim, t, 1.0);
    return predict_boxdim_graph(s.hurst->eval(t), std::clamp(gd, 1.0, 2.0));
  }
  if (s.kind == "hurst") return meta_or(s.hurst->meta().graph_boxdim, t, kNaN);
  return 2.0 - std::min(s.h, 1.0);
}

double pboxdim_theory(const Signal& s, double t, double hm) {
  double alpha = s.h;
  if (s.kind == "hurst") alpha = meta_or(s.hurst->meta().pointwise_exp, t, kNaN);
  if (s.kind == "chirp" || s.kind == "mbm") return kNaN;
  if (std::isinf(alpha)) return 1.0 / hm;
  return std::max(1.0 / hm, 1.0 + (1.0 - std::min(alpha, 1.0)) / hm);
}

DyadicScales scales(const ExperimentConfig& cfg) {
  return {cfg.integer("scales.ball"), cfg.integer("scales.point_fine"), cfg.integer("scales.lag_coarse"),
          cfg.integer("scales.lag_fine")};
}

std::vector<double> sprime_grid(const ExperimentConfig& cfg) {
  auto g = cfg.reals("sprime");
  return g.empty() ? default_sprime_grid() : g;
}

json base_report(const ExperimentConfig& cfg) {
  return {{"command", cfg.text("command")},
          {"config", cfg.values},
          {"config_hash", hash_json(cfg.values)},
          {"seed", cfg.seed()}};
}

PipelineOutput simulate(const ExperimentConfig& cfg) {
  const Signal s = make_signal(cfg);
  const bool with_h = s.hurst.has_value();
  CsvTable csv(with_h ? std::vector<std::string>{"t", "x", "hurst"} : std::vector<std::string>{"t", "x"});
  for (std::size_t i = 0; i < s.f.grid.size(); ++i) {
    const double t = s.f.grid.at(i);
    if (with_h)
      csv.add({t, s.f.values[i], s.hurst->eval(t)});
    else
      csv.add({t, s.f.values[i]});
  }
  json rep = base_report(cfg);
  rep["summary"] = {{"points", s.f.grid.size()}};
  return {csv.str(), rep};
}

PipelineOutput exponents(const ExperimentConfig& cfg) {
  const Signal s = make_signal(cfg);
  CsvTable csv({"t", "pointwise", "local", "fit_r2", "pointwise_theory", "local_theory"});
  for (double t : cfg.reals("probes")) {
    const ExponentEstimate e = est_exponents(s.f, t, scales(cfg));
    const auto [pw, loc] = exponent_theory(s, t);
    csv.add({t, e.pointwise, e.local, e.fit_r2, pw, loc});
  }
  json rep = base_report(cfg);
  rep["summary"] = {{"probes", csv.size()}};
  return {csv.str(), rep};
}

PipelineOutput frontier(const ExperimentConfig& cfg) {
  const Signal s = make_signal(cfg);
  const auto probes = cfg.reals("probes");
  const bool single = probes.size() == 1;
  CsvTable csv(single ? std::vector<std::string>{"s_prime", "sigma_hat", "sigma_theory"}
                      : std::vector<std::string>{"t", "s_prime", "sigma_hat", "sigma_theory"});
  double worst = 0.0;
  for (double t : probes) {
    const FrontierCurve c = est_frontier(s.f, t, sprime_grid(cfg), scales(cfg));
    for (std::size_t k = 0; k < c.sprime.size(); ++k) {
      const double th = frontier_theory(s, t, c.sprime[k]);
      if (std::isfinite(th)) worst = std::max(worst, std::abs(c.sigma[k] - std::min(th, c.cap)));
      if (single)
        csv.add({c.sprime[k], c.sigma[k], th});
      else
        csv.add({t, c.sprime[k], c.sigma[k], th});
    }
  }
  json rep = base_report(cfg);
  rep["summary"] = {{"max_abs_error_vs_theory", worst}};
  return {csv.str(), rep};
}

PipelineOutput boxdim(const ExperimentConfig& cfg) {
  const Signal s = make_signal(cfg);
  CsvTable csv({"t", "estimate", "lower", "upper", "fit_r2", "theory"});
  const BoxScales bs{cfg.integer("box.coarse"), cfg.integer("box.fine")};
  for (double t : cfg.reals("probes")) {
    const DimEstimate d = est_boxdim_local(s.f, t, cfg.real("box.rho"), bs);
    csv.add({t, d.value, d.lower, d.upper, d.fit_r2, boxdim_theory(s, t)});
  }
  json rep = base_report(cfg);
  rep["summary"] = {{"probes", csv.size()}};
  return {csv.str(), rep};
}

PipelineOutput pboxdim(const ExperimentConfig& cfg) {
  const Signal s = make_signal(cfg);
  CsvTable csv({"t", "h_metric", "estimate", "lower", "upper", "theory"});
  const double hm = cfg.real("pbox.h_metric");
  for (double t : cfg.reals("probes")) {
    const DimEstimate d =
        est_pboxdim_local(s.f, t, cfg.real("pbox.rho"), hm, cfg.integer("pbox.count"), cfg.real("pbox.min_steps"));
    csv.add({t, hm, d.value, d.lower, d.upper, pboxdim_theory(s, t, hm)});
  }
  json rep = base_report(cfg);
  rep["summary"] = {{"probes", csv.size()}};
  return {csv.str(), rep};
}

PipelineOutput levelset(const ExperimentConfig& cfg) {
  const Signal s = make_signal(cfg);
  CsvTable csv({"t", "level", "estimate", "lower", "upper", "empty", "theory_lower", "theory_upper"});
  const BoxScales bs{cfg.integer("levelset.coarse"), cfg.integer("levelset.fine")};
  const double a = cfg.real("levelset.t_min"), b = cfg.real("levelset.t_max");
  const bool by_probe = cfg.text("levelset.mode") == "probe";
  for (double t : by_probe ? cfg.reals("probes") : std::vector<double>{kNaN}) {
    const double level = by_probe ? s.f.value_at(t) : cfg.real("levelset.value");
    const DimEstimate d = level_set_boxdim(s.f, level, a, b, bs);
    double lo = kNaN, hi = kNaN;
    if (s.kind == "mbm" && by_probe) {
      const double H = s.hurst->eval(t);
      lo = 1.0 - H;
      hi = 1.0 - std::min(H, meta_or(s.hurst->meta().local_exp, t, kInf));
    } else if (std::isfinite(s.h) && s.kind != "weierstrass") {
      lo = hi = 1.0 - s.h;
    }
    csv.add({t, level, d.value, d.lower, d.upper, d.empty ? 1.0 : 0.0, lo, hi});
  }
  json rep = base_report(cfg);
  rep["summary"] = {{"rows", csv.size()}};
  return {csv.str(), rep};
}

PipelineOutput gauss(const ExperimentConfig& cfg) {
  const HurstFunction H = parse_hurst(cfg.text("hurst"));
  EnsembleConfig ec;
  ec.master_seed = cfg.seed();
  ec.seeds = cfg.integer("gauss.seeds");
  ec.noise_step = cfg.real("gauss.noise_step");
  ec.noise_half_width = cfg.real("gauss.noise_half_width");
  ec.q = quadrature(cfg);
  ec.a_plus = cfg.real("a_plus");
  ec.a_minus = cfg.real("a_minus");
  ec.workers = cfg.integer("workers");
  const auto probes = cfg.reals("probes");
  const CovMatrix cov = empirical_cov(mbm_ensemble(H, probes, ec), probes);
  CsvTable csv({"t_i", "t_j", "cov"});
  for (std::size_t i = 0; i < probes.size(); ++i)
    for (std::size_t j = 0; j < probes.size(); ++j) csv.add({probes[i], probes[j], cov.entries(i, j)});
  json rep = base_report(cfg);
  rep["summary"] = {{"n_seeds", cov.n_seeds}, {"min_eigenvalue_raw", cov.min_eigen_raw}};
  return {csv.str(), rep};
}

}  // namespace

Samples weierstrass_graph(const TimeGrid& grid, double h, double lambda) {
  if (!(h > 0.0 && h < 1.0) || !(lambda > 1.0)) throw DomainError("Weierstrass needs 0 < h < 1 < lambda");
  const int n = weierstrass_terms(h, lambda);
  Samples s{grid, std::vector<double>(grid.size(), 0.0)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.at(i);
    double v = 0.0, amp = 1.0, freq = 1.0;
    for (int k = 0; k < n; ++k) {
      v += amp * std::cos(freq * t);
      amp *= std::pow(lambda, -h);
      freq *= lambda;
    }
    s.values[i] = v;
  }
  return s;
}

PipelineOutput run_pipeline(const ExperimentConfig& cfg) {
  const std::string cmd = cfg.text("command");
  if (cmd == "simulate") return simulate(cfg);
  if (cmd == "exponents") return exponents(cfg);
  if (cmd == "frontier") return frontier(cfg);
  if (cmd == "boxdim") return boxdim(cfg);
  if (cmd == "pboxdim") return pboxdim(cfg);
  if (cmd == "levelset") return levelset(cfg);
  if (cmd == "gauss") return gauss(cfg);
  throw ConfigError("command", "unknown pipeline '" + cmd + "'");
}

std::pair<std::string, std::string> run_experiment(const ExperimentConfig& cfg) {
  const PipelineOutput out = run_pipeline(cfg);
  const std::filesystem::path dir(cfg.text("out"));
  const std::string cmd = cfg.text("command");
  const std::string csv_path = (dir / (cmd + ".csv")).string();
  const std::string json_path = (dir / (cmd + ".json")).string();
  json rep = out.report;
  rep["csv"] = cmd + ".csv";
  write_text(csv_path, out.csv);
  write_text(json_path, dump_json(rep));
  return {csv_path, json_path};
}

}  // namespace mbm
