#include "mbm/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mbm/errors.hpp"
#include "mbm/noise.hpp"
#include "mbm/parallel.hpp"
#include "mbm/rng.hpp"

namespace mbm {

CovMatrix empirical_cov(const std::vector<std::vector<double>>& rows, const std::vector<double>& probe_times,
                        int min_seeds) {
  const int n = static_cast<int>(rows.size());
  if (n < min_seeds)
    throw StatisticsError("empirical covariance needs at least " + std::to_string(min_seeds) + " seeds, got " +
                          std::to_string(n));
  const std::size_t p = probe_times.size();
  for (const auto& r : rows)
    if (r.size() != p) throw StatisticsError("replicate length does not match probe count");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (const auto& r : rows)
    for (std::size_t j = 0; j < p; ++j) mean[j] += r[j];
  mean /= n;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (const auto& r : rows) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) d[j] = r[j] - mean[j];
    c.noalias() += d * d.transpose();
  }
  c /= (n - 1);
  c = 0.5 * (c + c.transpose()).eval();

  CovMatrix out;
  out.probe_times = probe_times;
  out.n_seeds = n;
  if (p == 0) {
    out.entries = c;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  Eigen::VectorXd ev = es.eigenvalues();
  out.min_eigen_raw = ev.minCoeff();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (out.min_eigen_raw < -1e-10 * scale)
    throw StatisticsError("sample covariance has eigenvalue " + std::to_string(out.min_eigen_raw));
  if (out.min_eigen_raw < 0.0) {
    ev = ev.cwiseMax(0.0);
    c = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    c = 0.5 * (c + c.transpose()).eval();
  }
  out.entries = c;
  return out;
}

CovMatrix empirical_cov(const std::vector<MbmPath>& paths, const std::vector<double>& probe_times,
                        int min_seeds) {
  std::vector<std::vector<double>> rows;
  rows.reserve(paths.size());
  for (const auto& path : paths) {
    const Samples s = path.samples();
    std::vector<double> r;
    r.reserve(probe_times.size());
    for (double t : probe_times) r.push_back(s.value_at(t));
    rows.push_back(std::move(r));
  }
  return empirical_cov(rows, probe_times, min_seeds);
}

double cond_var(const CovMatrix& cov, std::size_t target, const std::vector<std::size_t>& conditioners) {
  const auto p = static_cast<std::size_t>(cov.entries.rows());
  if (target >= p) throw DomainError("target probe index out of range");
  for (auto k : conditioners)
    if (k >= p) throw DomainError("conditioner probe index out of range");
  const double v = cov.entries(target, target);
  if (conditioners.empty()) return v;

  const auto m = static_cast<Eigen::Index>(conditioners.size());
  Eigen::MatrixXd K(m, m);
  Eigen::VectorXd c(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    c[a] = cov.entries(target, conditioners[a]);
    for (Eigen::Index b = 0; b < m; ++b) K(a, b) = cov.entries(conditioners[a], conditioners[b]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double cut = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min()) * 1e-12;
  const Eigen::VectorXd proj = es.eigenvectors().transpose() * c;
  double explained = 0.0;
  for (Eigen::Index a = 0; a < m; ++a)
    if (ev[a] > cut) explained += proj[a] * proj[a] / ev[a];
  return std::max(0.0, v - explained);
}

std::vector<std::vector<double>> mbm_ensemble(const HurstFunction& hurst, const std::vector<double>& probes,
                                              const EnsembleConfig& cfg) {
  if (cfg.seeds <= 0) throw StatisticsError("ensemble needs a positive seed count");
  const double U = cfg.noise_half_width;
  const TimeGrid noise_grid(-U, U, cfg.noise_step);
  QuadratureConfig q = cfg.q;
  q.truncation = U;
  std::vector<double> h(probes.size());
  for (std::size_t j = 0; j < probes.size(); ++j) h[j] = hurst.eval(probes[j]);

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(cfg.seeds));
  parallel_for(rows.size(), cfg.workers, [&](std::size_t k) {
    const BrownianPath bm = gen_brownian(noise_grid, stream_seed(cfg.master_seed, k));
    std::vector<double> r(probes.size());
    for (std::size_t j = 0; j < probes.size(); ++j) {
      double x = 0.0;
      if (cfg.a_plus != 0.0) x += cfg.a_plus * fbf_eval(Side::plus, probes[j], h[j], bm, q);
      if (cfg.a_minus != 0.0) x += cfg.a_minus * fbf_eval(Side::minus, probes[j], h[j], bm, q);
      r[j] = x;
    }
    rows[k] = std::move(r);
  });
  return rows;
}

namespace {

// Root of H(s) - H(t) inside [a, b] closest to target, or NaN.
double closest_root(const HurstFunction& hurst, double level, double a, double b, double target) {
  a = std::max(a, hurst.support_min());
  b = std::min(b, hurst.support_max());
  if (!(b > a)) return std::numeric_limits<double>::quiet_NaN();
  const int n = 200000;
  const double dx = (b - a) / n;
  double best = std::numeric_limits<double>::quiet_NaN();
  double x0 = a;
  double g0 = hurst.eval(x0) - level;
  for (int i = 1; i <= n; ++i) {
    const double x1 = a + i * dx;
    const double g1 = hurst.eval(x1) - level;
    double root = std::numeric_limits<double>::quiet_NaN();
    if (g0 == 0.0) {
      root = x0;
    } else if (g0 * g1 < 0.0) {
      double lo = x0, hi = x1, glo = g0;
      for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = hurst.eval(mid) - level;
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      root = 0.5 * (lo + hi);
    }
    if (!std::isnan(root) && (std::isnan(best) || std::abs(root - target) < std::abs(best - target))) best = root;
    x0 = x1;
    g0 = g1;
  }
  return best;
}

}  // namespace

double level_matching_point(const HurstFunction& hurst, double t, double r) {
  if (r <= 0.0) throw DomainError("level-matching radius must be positive");
  if (hurst.is_constant()) return t - r;
  const auto& lm = hurst.meta().level_matching;
  if (!lm || !lm(t)) throw ApplicabilityError("Hurst function has no level-matching sequence at t");
  const double level = hurst.eval(t);
  double s = closest_root(hurst, level, t - 2.0 * r, t - 0.5 * r, t - r);
  if (std::isnan(s)) s = closest_root(hurst, level, t + 0.5 * r, t + 2.0 * r, t + r);
  if (std::isnan(s)) throw ApplicabilityError("no level-matching point near radius " + std::to_string(r));
  return s;
}

LndResult lnd_slope(const HurstFunction& hurst, double t, const std::vector<double>& radii,
                    const EnsembleConfig& cfg) {
  if (radii.size() < 2) throw DomainError("lnd_slope needs at least two radii");
  LndResult out;
  std::vector<double> probes{t};
  for (double r : radii) {
    const double s = level_matching_point(hurst, t, r);
    out.points.push_back(s);
    out.distances.push_back(std::abs(t - s));
    probes.push_back(s);
  }
  const CovMatrix cov = empirical_cov(mbm_ensemble(hurst, probes, cfg), probes);
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    const double v = cond_var(cov, 0, {j + 1});
    out.cond_vars.push_back(v);
    if (v <= 0.0) throw EstimationError("conditional variance vanished at a radius", static_cast<int>(j));
    lx.push_back(std::log(out.distances[j]));
    ly.push_back(std::log(v));
  }
  out.fit = least_squares(lx, ly);
  out.slope = out.fit.slope;
  return out;
}

RatioInterval incr_var_check(const HurstFunction& hurst, double t, double rho, const EnsembleConfig& cfg,
                             int n_probes) {
  if (n_probes < 2 || n_probes > 20) throw DomainError("incr_var_check takes 2 to 20 probes");
  if (rho <= 0.0) throw DomainError("rho must be positive");
  std::vector<double> probes;
  for (int i = 0; i < n_probes; ++i) probes.push_back(t - rho + 2.0 * rho * i / (n_probes - 1));
  const CovMatrix cov = empirical_cov(mbm_ensemble(hurst, probes, cfg), probes);
  const double ht = hurst.eval(t);
  RatioInterval out{std::numeric_limits<double>::infinity(), 0.0};
  for (int u = 0; u < n_probes; ++u)
    for (int v = u + 1; v < n_probes; ++v) {
      const double s2 = cov.entries(u, u) + cov.entries(v, v) - 2.0 * cov.entries(u, v);
      const double dh = hurst.eval(probes[u]) - hurst.eval(probes[v]);
      const double ref = std::pow(std::abs(probes[u] - probes[v]), 2.0 * ht) + dh * dh;
      const double ratio = s2 / ref;
      out.min_ratio = std::min(out.min_ratio, ratio);
      out.max_ratio = std::max(out.max_ratio, ratio);
    }
  return out;
}

}  // namespace mbm
