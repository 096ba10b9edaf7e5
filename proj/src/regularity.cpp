#include "mbm/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mbm/errors.hpp"

namespace mbm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int resolution_exponent(double step) { return static_cast<int>(std::floor(std::log2(1.0 / step) + 1e-9)); }

}  // namespace

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

DyadicScales resolve_scales(const Samples& f, double t, const DyadicScales& s) {
  const double dist = std::min(t - f.grid.t_min(), f.grid.t_max() - t);
  if (!(dist > 0.0)) throw SupportError("estimation point must be interior to the samples");
  const int res = resolution_exponent(f.grid.step());
  DyadicScales r = s;
  if (r.ball == 0) r.ball = static_cast<int>(std::ceil(-std::log2(dist) - 1e-12));
  if (r.point_fine == 0) r.point_fine = res - 3;
  if (r.lag_fine == 0) r.lag_fine = res - 1;
  if (r.lag_coarse == 0) r.lag_coarse = std::max(r.ball + 1, r.lag_fine - 8);
  if (std::ldexp(1.0, -r.ball) > dist * (1.0 + 1e-12))
    throw SupportError("outer ball leaves the sample support");
  const int npoint = r.point_fine - r.ball + 1;
  if (npoint < 6) throw EstimationError("fewer than 6 pointwise scales", std::max(npoint, 0));
  const int nlag = r.lag_fine - r.lag_coarse + 1;
  if (nlag < 6) throw EstimationError("fewer than 6 lag scales", std::max(nlag, 0));
  if (std::ldexp(1.0, -r.point_fine) * 2.0 < 16.0 * f.grid.step() * (1.0 - 1e-12))
    throw EstimationError("smallest ball holds fewer than 16 samples", npoint);
  if (std::ldexp(1.0, -r.lag_fine) < f.grid.step() * (1.0 - 1e-9))
    throw EstimationError("finest lag below the sampling step", nlag);
  return r;
}

namespace {

// Largest increments per (distance shell i, lag j) inside the outer ball.
struct PairTable {
  int ball = 0;
  std::vector<int> lag_exp;
  std::vector<double> log_lag;  // -log2(actual lag)
  std::vector<std::vector<double>> m;  // m[j][i - ball]
};

PairTable pair_table(const Samples& f, double t, const DyadicScales& s) {
  PairTable pt;
  pt.ball = s.ball;
  const double h = f.grid.step();
  const double R = std::ldexp(1.0, -s.ball);
  const auto lo = static_cast<std::ptrdiff_t>(std::ceil((t - R - f.grid.t_min()) / h - 1e-9));
  const auto hi = static_cast<std::ptrdiff_t>(std::floor((t + R - f.grid.t_min()) / h + 1e-9));
  const std::vector<double>& y = f.values;
  for (int j = s.lag_coarse; j <= s.lag_fine; ++j) {
    const auto L = static_cast<std::ptrdiff_t>(std::llround(std::ldexp(1.0, -j) / h));
    if (L < 1) continue;
    std::vector<double> row(static_cast<std::size_t>(j - s.ball + 1), 0.0);
    for (std::ptrdiff_t u = lo; u + L <= hi; ++u) {
      const double d = std::abs(f.grid.at(u) - t) + std::abs(f.grid.at(u + L) - t);
      if (d > R * (1.0 + 1e-12)) continue;
      int i = d > 0.0 ? static_cast<int>(std::floor(-std::log2(d) + 1e-12)) : j;
      i = std::clamp(i, s.ball, j);
      double& cell = row[static_cast<std::size_t>(i - s.ball)];
      cell = std::max(cell, std::abs(y[u + L] - y[u]));
    }
    pt.lag_exp.push_back(j);
    pt.log_lag.push_back(-std::log2(static_cast<double>(L) * h));
    pt.m.push_back(std::move(row));
  }
  return pt;
}

// sigma_hat(s') before projection; +infinity when the function is flat.
double raw_frontier(const PairTable& pt, double sprime) {
  std::vector<double> x, z;
  for (std::size_t k = 0; k < pt.m.size(); ++k) {
    double best = -kInf;
    for (std::size_t ii = 0; ii < pt.m[k].size(); ++ii) {
      if (pt.m[k][ii] <= 0.0) continue;
      best = std::max(best, std::log2(pt.m[k][ii]) - sprime * (pt.ball + static_cast<double>(ii)));
    }
    if (best == -kInf) return kInf;
    x.push_back(pt.log_lag[k]);
    z.push_back(best);
  }
  return -least_squares(x, z).slope;
}

}  // namespace

ExponentEstimate est_exponents(const Samples& f, double t, const DyadicScales& scales, double cap) {
  const DyadicScales s = resolve_scales(f, t, scales);
  ExponentEstimate e;
  std::vector<double> x, y;
  bool flat = false;
  const double h = f.grid.step();
  for (int k = s.ball; k <= s.point_fine; ++k) {
    const double rho = std::ldexp(1.0, -k);
    const auto lo = static_cast<std::size_t>(std::ceil((t - rho - f.grid.t_min()) / h - 1e-9));
    const auto hi = static_cast<std::size_t>(std::floor((t + rho - f.grid.t_min()) / h + 1e-9));
    const auto [mn, mx] = std::minmax_element(f.values.begin() + lo, f.values.begin() + hi + 1);
    const double osc = *mx - *mn;
    if (osc <= 0.0) {
      flat = true;
      break;
    }
    x.push_back(std::log2(rho));
    y.push_back(std::log2(osc));
  }
  e.rho_max = std::ldexp(1.0, -s.ball);
  e.rho_min = std::ldexp(1.0, -s.point_fine);
  if (flat) {
    e.pointwise = cap;
    e.fit_r2 = 1.0;
  } else {
    const LinearFit fit = least_squares(x, y);
    e.pointwise = fit.slope;
    e.fit_r2 = fit.r2;
  }
  e.local = raw_frontier(pair_table(f, t, s), 0.0);
  if (e.pointwise >= cap - 1e-9) {
    e.pointwise = cap;
    e.pointwise_at_cap = true;
  }
  if (e.local >= cap - 1e-9) {
    e.local = cap;
    e.local_at_cap = true;
  }
  return e;
}

std::vector<double> default_sprime_grid() {
  std::vector<double> g;
  for (int k = -20; k <= 40; ++k) g.push_back(0.05 * k);
  return g;
}

double FrontierCurve::at(double s) const {
  if (s <= sprime.front()) return sigma.front();
  if (s >= sprime.back()) return sigma.back();
  const std::size_t k = std::upper_bound(sprime.begin(), sprime.end(), s) - sprime.begin();
  const double w = (s - sprime[k - 1]) / (sprime[k] - sprime[k - 1]);
  return sigma[k - 1] + w * (sigma[k] - sigma[k - 1]);
}

double FrontierCurve::pointwise() const {
  if (sigma.front() >= 0.0) return -sprime.front();
  for (std::size_t k = 1; k < sigma.size(); ++k) {
    if (sigma[k] >= 0.0) {
      const double w = -sigma[k - 1] / (sigma[k] - sigma[k - 1]);
      return -(sprime[k - 1] + w * (sprime[k] - sprime[k - 1]));
    }
  }
  return -sprime.back();
}

namespace {

// Euclidean projection onto {e >= 0, sum e <= 1}.
void project_capped_simplex(std::vector<double>& e) {
  double s = 0.0;
  for (double& v : e) {
    v = std::max(v, 0.0);
    s += v;
  }
  if (s <= 1.0) return;
  std::vector<double> u(e);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double th = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - th > 0.0) theta = th;
  }
  for (double& v : e) v = std::max(v - theta, 0.0);
}

}  // namespace

std::vector<double> project_frontier(const std::vector<double>& sprime, const std::vector<double>& y) {
  const std::size_t n = sprime.size();
  if (n < 2) return y;
  const std::size_t m = n - 1;
  // sigma_k = sigma_0 + sum_l e_l (s_min(k, l+1) - s_0), sigma_0 eliminated by centring.
  std::vector<double> C(n * m);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < m; ++l) C[k * m + l] = sprime[std::min(k, l + 1)] - sprime[0];
  for (std::size_t l = 0; l < m; ++l) {
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) mean += C[k * m + l];
    mean /= static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) C[k * m + l] -= mean;
  }
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> yc(n);
  for (std::size_t k = 0; k < n; ++k) yc[k] = y[k] - ym;

  auto apply = [&](const std::vector<double>& e, std::vector<double>& out) {
    out.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < m; ++l) out[k] += C[k * m + l] * e[l];
  };
  auto apply_t = [&](const std::vector<double>& r, std::vector<double>& out) {
    out.assign(m, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < m; ++l) out[l] += C[k * m + l] * r[k];
  };
  // Lipschitz constant by power iteration.
  std::vector<double> v(m, 1.0), tmp, w;
  double lip = 1.0;
  for (int it = 0; it < 100; ++it) {
    apply(v, tmp);
    apply_t(tmp, w);
    double nrm = 0.0;
    for (double x : w) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) break;
    lip = nrm;
    for (std::size_t l = 0; l < m; ++l) v[l] = w[l] / nrm;
  }
  lip *= 1.01;

  std::vector<double> e(m, 0.0), z(e), e_prev(e), r, g;
  double tk = 1.0;
  for (int it = 0; it < 50000; ++it) {
    apply(z, r);
    for (std::size_t k = 0; k < n; ++k) r[k] -= yc[k];
    apply_t(r, g);
    e_prev = e;
    for (std::size_t l = 0; l < m; ++l) e[l] = z[l] - g[l] / lip;
    project_capped_simplex(e);
    // adaptive restart when the momentum points uphill
    double uphill = 0.0;
    for (std::size_t l = 0; l < m; ++l) uphill += (z[l] - e[l]) * (e[l] - e_prev[l]);
    if (uphill > 0.0) tk = 1.0;
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    double change = 0.0;
    for (std::size_t l = 0; l < m; ++l) {
      z[l] = e[l] + ((tk - 1.0) / tn) * (e[l] - e_prev[l]);
      change = std::max(change, std::abs(e[l] - e_prev[l]));
    }
    tk = tn;
    if (change < 1e-13 && it > 10) break;
  }
  std::vector<double> fit;
  apply(e, fit);
  double off = 0.0;
  for (std::size_t k = 0; k < n; ++k) off += y[k] - fit[k];
  off /= static_cast<double>(n);
  // rebuild from slopes so the shape constraints hold exactly
  std::vector<double> out(n);
  double d = 0.0;
  for (double x : e) d += x;
  out[0] = off + fit[0];
  double rem = d;
  for (std::size_t k = 1; k < n; ++k) {
    out[k] = out[k - 1] + (sprime[k] - sprime[k - 1]) * std::clamp(rem, 0.0, 1.0);
    rem -= e[k - 1];
  }
  return out;
}

FrontierCurve est_frontier(const Samples& f, double t, const std::vector<double>& sprime,
                           const DyadicScales& scales, double cap) {
  const DyadicScales s = resolve_scales(f, t, scales);
  const PairTable pt = pair_table(f, t, s);
  FrontierCurve c;
  c.sprime = sprime;
  c.cap = cap;
  c.raw.resize(sprime.size());
  std::vector<double> y(sprime.size());
  for (std::size_t k = 0; k < sprime.size(); ++k) {
    c.raw[k] = raw_frontier(pt, sprime[k]);
    y[k] = std::min(c.raw[k], cap);
  }
  c.sigma = project_frontier(sprime, y);
  for (double& v : c.sigma) v = std::min(v, cap);
  return c;
}

FrontierPrediction predict_frontier_mbm(double H_t, const std::function<double(double)>& frontier_H,
                                        int m, const std::vector<double>& sprime) {
  FrontierPrediction p;
  p.exact = m == 1;
  p.lower.sprime = sprime;
  p.lower.cap = kInf;
  for (double s : sprime) {
    double v = std::min(s + H_t, H_t);
    if (m == 1) {
      v = std::min(v, frontier_H(s));
    } else {
      v = std::min(v, frontier_H(s + H_t));
      if (m != kMultiplicityInfinite) v = std::min(v, m * frontier_H(s / m));
    }
    p.lower.sigma.push_back(v);
  }
  p.lower.raw = p.lower.sigma;
  return p;
}

double predict_pointwise_mbm(double H_t, double alpha_H, int m) {
  if (m == kMultiplicityInfinite || std::isinf(alpha_H)) return H_t;
  return std::min(H_t, m * alpha_H);
}

int detect_multiplicity(const std::function<double(int)>& partial, double scale, double rel) {
  for (int k = 1; k <= 3; ++k)
    if (std::abs(partial(k)) > rel * scale) return k;
  return 4;
}

}  // namespace mbm
