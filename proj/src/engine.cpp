#include <algorithm>
#include <cmath>
#include <memory>

#include "fft.hpp"
#include "field_internal.hpp"
#include "mbm/errors.hpp"
#include "mbm/field.hpp"

namespace mbm {

struct FieldEngine::Impl {
  double h = 0.0;
  std::size_t nc = 0;       // cells in [-U, U]
  std::size_t j0 = 0;       // origin, truncated-grid index
  std::size_t j_lo = 0, j_hi = 0;
  std::unique_ptr<detail::Convolver> plus;   // increments
  std::unique_ptr<detail::Convolver> minus;  // reversed increments
  std::size_t plus_len = 0, minus_len = 0;
};

FieldEngine::FieldEngine(const BrownianPath& bm, const QuadratureConfig& q, double t_lo, double t_hi)
    : impl_(new Impl) {
  const double U = effective_truncation(q, std::max(std::abs(t_lo), std::abs(t_hi)));
  const auto ib_lo = bm.grid.index_of(-U);
  const auto ib_hi = bm.grid.index_of(U);
  if (!ib_lo || !ib_hi) {
    delete impl_;
    throw SupportError("Brownian path does not cover [-U, U] on grid nodes");
  }
  const auto o_lo = bm.grid.index_of(t_lo);
  const auto o_hi = bm.grid.index_of(t_hi);
  if (!o_lo || !o_hi || t_lo < -U || t_hi > U || !(t_hi > t_lo)) {
    delete impl_;
    throw GridError("engine output range must be grid-aligned inside [-U, U]");
  }
  Impl& m = *impl_;
  m.h = bm.grid.step();
  m.nc = *ib_hi - *ib_lo;
  m.j0 = bm.grid.origin_index() - *ib_lo;
  m.j_lo = *o_lo - *ib_lo;
  m.j_hi = *o_hi - *ib_lo;
  out_grid_ = TimeGrid(bm.grid.at(*o_lo), bm.grid.at(*o_hi), m.h);

  std::vector<double> d(m.nc), dr(m.nc);
  for (std::size_t i = 0; i < m.nc; ++i) d[i] = bm.values[*ib_lo + i + 1] - bm.values[*ib_lo + i];
  for (std::size_t i = 0; i < m.nc; ++i) dr[i] = d[m.nc - 1 - i];
  m.plus_len = std::max(m.j_hi, m.j0) + 1;
  m.minus_len = m.nc - std::min(m.j_lo, m.j0);
  m.plus = std::make_unique<detail::Convolver>(d, m.plus_len);
  m.minus = std::make_unique<detail::Convolver>(dr, m.minus_len);
}

FieldEngine::~FieldEngine() { delete impl_; }

namespace {

// Cell averages of w^a over [k h, (k+1) h].
std::vector<double> cell_kernel(double a, double h, std::size_t len, std::size_t shift) {
  std::vector<double> k(len, 0.0);
  const double ha = std::pow(h, a);
  for (std::size_t m = shift; m < len; ++m) {
    const auto kk = static_cast<double>(m - shift);
    k[m] = m == shift ? ha / (a + 1.0) : ha * detail::pow_diff(kk, kk + 1.0, a + 1.0);
  }
  return k;
}

}  // namespace

std::vector<double> FieldEngine::field(Side side, double hurst) const {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("H outside (0,1)");
  const Impl& m = *impl_;
  const double a = hurst - 0.5;
  const double g = std::tgamma(hurst + 0.5);
  const std::size_t n_out = m.j_hi - m.j_lo + 1;
  std::vector<double> out(n_out);
  if (side == Side::plus) {
    const auto kern = cell_kernel(a, m.h, m.plus_len, 1);
    const auto c = m.plus->apply(kern, m.plus_len);
    for (std::size_t j = 0; j < n_out; ++j) out[j] = (c[m.j_lo + j] - c[m.j0]) / g;
  } else {
    const auto kern = cell_kernel(a, m.h, m.minus_len, 0);
    const auto c = m.minus->apply(kern, m.nc);
    auto at = [&](std::size_t j) { return j >= m.nc ? 0.0 : c[m.nc - 1 - j]; };
    for (std::size_t j = 0; j < n_out; ++j) out[j] = (at(m.j_lo + j) - at(m.j0)) / g;
  }
  return out;
}

std::vector<double> FieldEngine::partial(Side side, double hurst, int k, double d) const {
  if (k == 0) return field(side, hurst);
  if (k < 0 || k > 3) throw DomainError("derivative order must be at most 3");
  if (!(hurst - 3 * d > 0.0 && hurst + 3 * d < 1.0)) throw StepError("stencil leaves (0,1)");
  auto stencil = [&](double dd) {
    std::vector<std::pair<double, double>> w;  // (offset, weight)
    if (k == 1) w = {{dd, 0.5 / dd}, {-dd, -0.5 / dd}};
    if (k == 2) w = {{dd, 1 / (dd * dd)}, {0.0, -2 / (dd * dd)}, {-dd, 1 / (dd * dd)}};
    if (k == 3) {
      const double c = 1.0 / (2 * dd * dd * dd);
      w = {{2 * dd, c}, {dd, -2 * c}, {-dd, 2 * c}, {-2 * dd, -c}};
    }
    std::vector<double> acc;
    for (auto [off, wt] : w) {
      const auto f = field(side, hurst + off);
      if (acc.empty()) acc.assign(f.size(), 0.0);
      for (std::size_t j = 0; j < f.size(); ++j) acc[j] += wt * f[j];
    }
    return acc;
  };
  const auto coarse = stencil(d);
  const auto fine = stencil(0.5 * d);
  std::vector<double> out(coarse.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = (4.0 * fine[j] - coarse[j]) / 3.0;
  return out;
}

std::vector<double> FieldEngine::mbm(const HurstFunction& hurst, double a_plus, double a_minus) const {
  const Impl& m = *impl_;
  const std::size_t n_out = m.j_hi - m.j_lo + 1;
  std::vector<double> hv(n_out);
  for (std::size_t j = 0; j < n_out; ++j) hv[j] = hurst.eval(out_grid_.t_min() + j * m.h);
  auto combo = [&](double H) {
    std::vector<double> f(n_out, 0.0);
    if (a_plus != 0.0) {
      const auto p = field(Side::plus, H);
      for (std::size_t j = 0; j < n_out; ++j) f[j] += a_plus * p[j];
    }
    if (a_minus != 0.0) {
      const auto q = field(Side::minus, H);
      for (std::size_t j = 0; j < n_out; ++j) f[j] += a_minus * q[j];
    }
    return f;
  };
  const auto [mn_it, mx_it] = std::minmax_element(hv.begin(), hv.end());
  const double lo = *mn_it, hi = *mx_it;
  if (hi - lo < 1e-14) return combo(lo);

  // Barycentric interpolation through Chebyshev points of the second kind.
  const int n = std::clamp(static_cast<int>(std::ceil(14.0 + 40.0 * (hi - lo))), 14, 48);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  std::vector<double> num(n_out, 0.0), den(n_out, 0.0), exact(n_out, NAN);
  for (int k = 0; k < n; ++k) {
    const double x = mid + half * std::cos(M_PI * k / (n - 1));
    double lam = (k % 2 == 0) ? 1.0 : -1.0;
    if (k == 0 || k == n - 1) lam *= 0.5;
    const auto f = combo(x);
    for (std::size_t j = 0; j < n_out; ++j) {
      const double dx = hv[j] - x;
      if (dx == 0.0) {
        exact[j] = f[j];
        continue;
      }
      const double w = lam / dx;
      num[j] += w * f[j];
      den[j] += w;
    }
  }
  std::vector<double> out(n_out);
  for (std::size_t j = 0; j < n_out; ++j) out[j] = std::isnan(exact[j]) ? num[j] / den[j] : exact[j];
  return out;
}

BrownianPath tilde_brownian(const BrownianPath& bm, int extend) {
  if (extend < 1) throw GridError("extension factor must be at least 1");
  const double h = bm.grid.step();
  const std::size_t nc = bm.values.size() - 1;
  const TimeGrid eg(bm.grid.t_min() * extend, bm.grid.t_max() * extend, h);
  const std::size_t ne = eg.size();
  const auto s = static_cast<std::ptrdiff_t>(std::llround((bm.grid.t_min() - eg.t_min()) / h));
  std::vector<double> d(nc);
  for (std::size_t i = 0; i < nc; ++i) d[i] = bm.values[i + 1] - bm.values[i];
  // C_j = sum_i d_i log|(j - i - s - 1/2) h|, kernel index m = j - i + nc - 1.
  std::vector<double> kern(nc - 1 + ne);
  for (std::size_t m = 0; m < kern.size(); ++m) {
    const double dd = static_cast<double>(static_cast<std::ptrdiff_t>(m) - static_cast<std::ptrdiff_t>(nc - 1) - s) - 0.5;
    kern[m] = std::log(std::abs(dd) * h);
  }
  const auto c = detail::convolve(d, kern, nc - 1 + ne);
  const std::size_t j0 = eg.origin_index();
  BrownianPath out{eg, std::vector<double>(ne), bm.seed};
  const double base = c[j0 + nc - 1];
  for (std::size_t j = 0; j < ne; ++j) out.values[j] = 0.5 * (c[j + nc - 1] - base);
  out.values[j0] = 0.0;
  return out;
}

namespace {

// Restriction of bm to the cells inside [-U, U].
BrownianPath restrict_path(const BrownianPath& bm, double U) {
  const auto lo = bm.grid.index_of(-U), hi = bm.grid.index_of(U);
  if (!lo || !hi) throw SupportError("Brownian path does not cover [-U, U] on grid nodes");
  BrownianPath r{TimeGrid(-U, U, bm.grid.step()),
                 std::vector<double>(bm.values.begin() + *lo, bm.values.begin() + *hi + 1), bm.seed};
  return r;
}

// Closed form of the tilde path beyond the extended grid via a multipole series.
struct TildeFar {
  std::vector<double> nu;  // sum_i d_i (m_i / V)^n
  double s0 = 0.0;         // sum_i d_i log|m_i|
  double V = 1.0;

  TildeFar(const BrownianPath& bm, double V_) : V(V_) {
    const int terms = 60;
    nu.assign(terms, 0.0);
    const std::size_t nc = bm.values.size() - 1;
    for (std::size_t i = 0; i < nc; ++i) {
      const double d = bm.values[i + 1] - bm.values[i];
      const double m = bm.grid.at(i) + 0.5 * bm.grid.step();
      s0 += d * std::log(std::abs(m));
      double r = 1.0;
      for (int n = 0; n < terms; ++n) {
        nu[n] += d * r;
        r *= m / V;
      }
    }
  }
  double operator()(double u) const {
    double acc = nu[0] * std::log(std::abs(u));
    double r = V / u, rn = r;
    for (std::size_t n = 1; n < nu.size(); ++n) {
      acc -= nu[n] * rn / static_cast<double>(n);
      rn *= r;
    }
    return 0.5 * (acc - s0);
  }
};

// C int_V^inf (f(v) - f(V)) [(v + s)^p - v^p] dv with geometric Gauss-Legendre panels.
template <class F>
double far_tail(F f, double V, double s, double p, double pref) {
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  const double fV = f(V);
  double acc = 0.0;
  double a = V;
  for (int k = 0; k < 200; ++k) {
    const double b = 2.0 * a;
    double panel = 0.0;
    for (int j = 0; j < 8; ++j) {
      const double v = 0.5 * (a + b) + 0.5 * (b - a) * gx[j];
      const double kd = std::pow(v, p) * std::expm1(p * std::log1p(s / v));
      panel += gw[j] * (f(v) - fV) * kd;
    }
    panel *= 0.5 * (b - a);
    acc += panel;
    if (k > 8 && std::abs(panel) < 1e-15 * std::max(1.0, std::abs(acc))) break;
    a = b;
  }
  return pref * acc;
}

}  // namespace

std::vector<WbRelation> verify_wb_relation(const std::vector<double>& times, double h,
                                           const BrownianPath& bm, const QuadratureConfig& q) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("H outside (0,1)");
  double tmax = 0.0;
  for (double t : times) tmax = std::max(tmax, std::abs(t));
  const double U = effective_truncation(q, tmax);
  const BrownianPath core = restrict_path(bm, U);
  const int extend = 4;
  const BrownianPath tilde = tilde_brownian(core, extend);
  const double V = U * extend;
  const TildeFar far(core, V);
  QuadratureConfig qt = q;
  qt.truncation = V;
  QuadratureConfig ql = q;
  ql.truncation = U;
  const double p = h - 1.5;
  const double pref = (h - 0.5) / std::tgamma(h + 0.5);
  const double norm = wb_normaliser(h);

  std::vector<WbRelation> out;
  for (double t : times) {
    const double lhs = fbf_wb(t, h, bm, ql);
    double bp = fbf_eval(Side::plus, t, h, tilde, qt);
    double bmn = fbf_eval(Side::minus, t, h, tilde, qt);
    if (h != 0.5) {
      bp += far_tail([&](double v) { return far(-v); }, V, t, p, pref);
      bmn += far_tail([&](double v) { return -far(v); }, V, -t, p, pref);
    }
    const double rhs = (bp - bmn) / norm;
    out.push_back({lhs, rhs, std::abs(lhs - rhs)});
  }
  return out;
}

WbRelation verify_wb_relation(double t, double h, const BrownianPath& bm, const QuadratureConfig& q) {
  return verify_wb_relation(std::vector<double>{t}, h, bm, q).front();
}

}  // namespace mbm
