#include "mbm/field.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "field_internal.hpp"
#include "mbm/errors.hpp"

namespace mbm {

namespace detail {

namespace {

inline double expm1_ratio(double q, double log_ratio) {
  return q == 0.0 ? log_ratio : std::expm1(q * log_ratio) / q;
}

// Per-cell tables for cells [k, k+1] in units of the grid step:
// a_k = int_k^{k+1} w^p dw, m_k = int_0^1 x (k + x)^p dx.
struct Tables {
  std::vector<double> a, m;
};

const Tables& tables_for(double p, std::size_t cells) {
  thread_local std::unordered_map<double, Tables> cache;
  if (cache.size() > 24 && cache.find(p) == cache.end()) cache.clear();
  Tables& t = cache[p];
  if (t.a.size() < cells) {
    std::size_t k = t.a.size();
    t.a.resize(cells);
    t.m.resize(cells);
    for (; k < cells; ++k) {
      const auto kd = static_cast<double>(k);
      t.a[k] = k == 0 ? (p + 1.0 > 0.0 ? 1.0 / (p + 1.0) : std::numeric_limits<double>::infinity())
                      : pow_diff(kd, kd + 1.0, p + 1.0);
      t.m[k] = first_moment(kd, 1.0, p);
    }
  }
  return t;
}

double piece(double w0, double w1, double g0, double g1, double p) {
  const double len = w1 - w0;
  double acc = 0.0;
  if (g0 != 0.0) {
    if (w0 == 0.0 && p <= -1.0)
      throw DomainError("non-integrable kernel singularity against a nonzero integrand");
    acc += g0 * pow_diff(w0, w1, p + 1.0);
  }
  if (g1 != g0) acc += (g1 - g0) / len * first_moment(w0, len, p);
  return acc;
}

bool is_multiple(double x, double h, std::size_t& k) {
  const double r = std::round(x / h);
  if (std::abs(x / h - r) > 1e-9 || r < 0.0) return false;
  k = static_cast<std::size_t>(r);
  return true;
}

}  // namespace

double pow_diff(double x0, double x1, double q) {
  if (x0 == 0.0) return std::pow(x1, q) / q;
  const double l = std::log1p((x1 - x0) / x0);
  return std::pow(x0, q) * expm1_ratio(q, l);
}

double first_moment(double w0, double len, double p) {
  if (w0 == 0.0) return std::pow(len, p + 2.0) / (p + 2.0);
  const double r = len / w0;
  const double scale = std::pow(w0, p + 2.0);
  if (r > 0.25) {
    const double l = std::log1p(r);
    return scale * (expm1_ratio(p + 2.0, l) - expm1_ratio(p + 1.0, l));
  }
  // sum_n binom(p, n) r^(n+2) / (n+2)
  double c = 1.0, rn = r * r, sum = 0.0;
  for (int n = 0; n < 200; ++n) {
    const double term = c * rn / (n + 2.0);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    c *= (p - n) / (n + 1.0);
    rn *= r;
  }
  return scale * sum;
}

double tail_diff(double x, double y, double p) {
  if (x == y) return 0.0;
  return x > y ? -pow_diff(y, x, p + 1.0) : pow_diff(x, y, p + 1.0);
}

double one_sided(const PathRef& L, double c, int dir, double wa, double wb, double p, double sub,
                 double ws) {
  if (!(wb > wa)) return 0.0;
  const bool has_sub = sub != 0.0 && ws > wa;
  std::size_t ic, ka, kb, ks = 0;
  const bool aligned = L.node_index(c, ic) && is_multiple(wa, L.h, ka) && is_multiple(wb, L.h, kb) &&
                       (!has_sub || is_multiple(ws, L.h, ks));
  if (aligned) {
    const auto span = static_cast<std::ptrdiff_t>(kb);
    const auto icd = static_cast<std::ptrdiff_t>(ic);
    if (icd + dir * span < 0 || icd + dir * span > static_cast<std::ptrdiff_t>(L.n - 1))
      throw SupportError("kernel integral leaves the path support");
    const Tables& tb = tables_for(p, kb);
    const double* y = L.y;
    double acc = 0.0;
    std::ptrdiff_t idx = icd + dir * static_cast<std::ptrdiff_t>(ka);
    for (std::size_t k = ka; k < kb; ++k, idx += dir) {
      const double s = (has_sub && k < ks) ? sub : 0.0;
      const double g0 = y[idx] - s;
      const double g1 = y[idx + dir] - s;
      if (k == 0) {
        if (g0 != 0.0) {
          if (p <= -1.0)
            throw DomainError("non-integrable kernel singularity against a nonzero integrand");
          acc += g0 * tb.a[0];
        }
      } else {
        acc += g0 * tb.a[k];
      }
      acc += (g1 - g0) * tb.m[k];
    }
    return acc * std::pow(L.h, p + 1.0);
  }

  // Unaligned: explicit breakpoint list.
  const double eps = 1e-12 * L.h;
  std::vector<double> bp;
  bp.push_back(wa);
  const double start = c + dir * wa;
  double kf = (start - L.u0) / L.h;
  std::ptrdiff_t i = dir < 0 ? static_cast<std::ptrdiff_t>(std::ceil(kf - 1e-9)) - 1
                             : static_cast<std::ptrdiff_t>(std::floor(kf + 1e-9)) + 1;
  bool sub_inserted = !has_sub || ws >= wb;
  for (;; i += dir) {
    if (i < 0 || i > static_cast<std::ptrdiff_t>(L.n - 1)) break;
    const double w = dir * (L.u(static_cast<std::size_t>(i)) - c);
    if (w >= wb - eps) break;
    if (!sub_inserted && ws <= w) {
      if (ws > bp.back() + eps && ws < w - eps) bp.push_back(ws);
      sub_inserted = true;
    }
    if (w > bp.back() + eps) bp.push_back(w);
  }
  if (!sub_inserted && ws > bp.back() + eps && ws < wb - eps) bp.push_back(ws);
  bp.push_back(wb);
  if (c + dir * wb < L.u0 - 1e-9 * L.h || c + dir * wb > L.u_end() + 1e-9 * L.h)
    throw SupportError("kernel integral leaves the path support");
  double acc = 0.0;
  double g_prev = L.value(c + dir * bp[0]);
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double w0 = bp[k], w1 = bp[k + 1];
    const double g1raw = L.value(c + dir * w1);
    const double s = (has_sub && 0.5 * (w0 + w1) < ws) ? sub : 0.0;
    acc += piece(w0, w1, g_prev - s, g1raw - s, p);
    g_prev = g1raw;
  }
  return acc;
}

double paired(const PathRef& L, double c, double delta, double p) {
  std::size_t ic, kd;
  if (L.node_index(c, ic) && is_multiple(delta, L.h, kd)) {
    if (ic < kd || ic + kd > L.n - 1) throw SupportError("paired window leaves the path support");
    const Tables& tb = tables_for(p, kd);
    double acc = 0.0;
    for (std::size_t k = 0; k < kd; ++k) {
      const double g0 = L.y[ic - k] - L.y[ic + k];
      const double g1 = L.y[ic - k - 1] - L.y[ic + k + 1];
      if (k > 0) acc += g0 * tb.a[k];
      acc += (g1 - g0) * tb.m[k];
    }
    return acc * std::pow(L.h, p + 1.0);
  }
  const double kf = (c - L.u0) / L.h;
  const double fl = c - L.u(static_cast<std::size_t>(std::floor(kf)));
  const double fr = L.h - fl;
  std::vector<double> bp{0.0};
  double a = fl, b = fr;
  const double eps = 1e-12 * L.h;
  while (true) {
    const double w = std::min(a, b);
    if (w >= delta - eps) break;
    if (w > bp.back() + eps) bp.push_back(w);
    if (a <= b) a += L.h; else b += L.h;
  }
  bp.push_back(delta);
  double acc = 0.0;
  double g_prev = 0.0;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double w1 = bp[k + 1];
    const double g1 = L.value(c - w1) - L.value(c + w1);
    acc += piece(bp[k], w1, g_prev, g1, p);
    g_prev = g1;
  }
  return acc;
}

double plus_field(const PathRef& L, double t, double h, double U, double delta) {
  const double p = h - 1.5;
  const double pref = (h - 0.5) / std::tgamma(h + 0.5);
  const double lt = L.value(t);
  const bool sub = h < 0.5;
  const double it = one_sided(L, t, -1, 0.0, t + U, p, sub ? lt : 0.0, sub ? delta : 0.0);
  const double i0 = one_sided(L, 0.0, -1, 0.0, U, p);
  const double tail = L.value(-U) * tail_diff(t + U, U, p);
  double out = pref * (it - i0 + tail);
  if (sub) out += lt * std::pow(delta, h - 0.5) / std::tgamma(h + 0.5);
  return out;
}

}  // namespace detail

using detail::PathRef;

double effective_truncation(const QuadratureConfig& q, double t_abs_max) {
  return q.truncation > 0.0 ? q.truncation : 20.0 + t_abs_max;
}

namespace {

void check_h(double h) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("H = " + std::to_string(h) + " outside (0,1)");
}

void check_support(const BrownianPath& bm, double t, double U, double delta) {
  const double slack = 1e-9 * bm.grid.step();
  if (bm.grid.t_min() > -U + slack || bm.grid.t_max() < U - slack)
    throw SupportError("Brownian path does not cover [-U, U] with U = " + std::to_string(U));
  if (std::abs(t) + delta > U + slack)
    throw SupportError("evaluation time |t| = " + std::to_string(std::abs(t)) +
                       " plus anchor offset exceeds U = " + std::to_string(U));
}

double side_eval(Side side, double t, double h, const PathRef& L, double U, double delta) {
  if (h == 0.5) return side == Side::plus ? L.value(t) : -L.value(t);
  if (side == Side::plus) return detail::plus_field(L, t, h, U, delta);
  detail::Reflected r(L);
  return detail::plus_field(r.ref, -t, h, U, delta);
}

}  // namespace

double fbf_eval(Side side, double t, double h, const BrownianPath& bm, const QuadratureConfig& q) {
  check_h(h);
  const double U = effective_truncation(q, std::abs(t));
  check_support(bm, t, U, q.anchor_offset);
  return side_eval(side, t, h, detail::view(bm), U, q.anchor_offset);
}

namespace {

double fd_derivative(const std::function<double(double)>& f, double h, int k, double d) {
  switch (k) {
    case 1: return (f(h + d) - f(h - d)) / (2.0 * d);
    case 2: return (f(h + d) - 2.0 * f(h) + f(h - d)) / (d * d);
    case 3: return (f(h + 2 * d) - 2.0 * f(h + d) + 2.0 * f(h - d) - f(h - 2 * d)) / (2.0 * d * d * d);
    default: throw DomainError("derivative order must be at most 3");
  }
}

}  // namespace

double fbf_partial(Side side, double t, double h, int k, const BrownianPath& bm,
                   const QuadratureConfig& q) {
  if (k < 0 || k > q.max_deriv || k > 3)
    throw DomainError("derivative order " + std::to_string(k) + " exceeds max_deriv");
  if (k == 0) return fbf_eval(side, t, h, bm, q);
  const double d = q.fd_step;
  const double reach = q.max_deriv * d;
  if (!(h - reach > 0.0 && h + reach < 1.0))
    throw StepError("finite-difference stencil around H = " + std::to_string(h) + " leaves (0,1)");
  const double U = effective_truncation(q, std::abs(t));
  check_support(bm, t, U, q.anchor_offset);
  const PathRef L = detail::view(bm);
  std::unordered_map<double, double> memo;
  auto f = [&](double hh) {
    auto it = memo.find(hh);
    if (it != memo.end()) return it->second;
    const double v = side_eval(side, t, hh, L, U, q.anchor_offset);
    memo.emplace(hh, v);
    return v;
  };
  const double coarse = fd_derivative(f, h, k, d);
  const double fine = fd_derivative(f, h, k, 0.5 * d);
  return (4.0 * fine - coarse) / 3.0;
}

namespace {

// int_{w0}^{w1} w^q log w dw
double log_moment_closed(double w0, double w1, double q) {
  auto F = [q](double w) {
    if (w == 0.0) return 0.0;
    const double e = q + 1.0;
    return std::pow(w, e) * (std::log(w) / e - 1.0 / (e * e));
  };
  return F(w1) - F(w0);
}

// int_wa^wb L(c - w) w^p log w dw over aligned cells.
double log_weighted(const PathRef& L, double c, double wb, double p) {
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  std::size_t ic;
  if (!L.node_index(c, ic)) throw GridError("analytic derivative requires a grid-aligned time");
  const auto kb = static_cast<std::size_t>(std::llround(wb / L.h));
  const double h = L.h;
  double acc = 0.0;
  for (std::size_t k = 0; k < kb; ++k) {
    const double w0 = k * h, w1 = w0 + h;
    const double g0 = L.y[ic - k], g1 = L.y[ic - k - 1];
    if (k < 4) {
      const double p0 = log_moment_closed(w0, w1, p);
      const double p1 = log_moment_closed(w0, w1, p + 1.0);
      acc += g0 * p0 + (g1 - g0) / h * (p1 - w0 * p0);
    } else {
      const double mid = 0.5 * (w0 + w1);
      double s = 0.0;
      for (int j = 0; j < 8; ++j) {
        const double w = mid + 0.5 * h * gx[j];
        const double g = g0 + (g1 - g0) * (w - w0) / h;
        s += gw[j] * g * std::pow(w, p) * std::log(w);
      }
      acc += 0.5 * h * s;
    }
  }
  return acc;
}

double plus_partial_analytic(const PathRef& L, double t, double h, double U) {
  const double p = h - 1.5;
  const double g = std::tgamma(h - 0.5);
  const double j = detail::one_sided(L, t, -1, 0.0, t + U, p) - detail::one_sided(L, 0.0, -1, 0.0, U, p) +
                   L.value(-U) * detail::tail_diff(t + U, U, p);
  // d/dp of the tail: -int_Y^X w^p log w (oriented)
  const double x = t + U, y = U;
  const double dtail = x > y ? -log_moment_closed(y, x, p) : log_moment_closed(x, y, p);
  const double jp = log_weighted(L, t, t + U, p) - log_weighted(L, 0.0, U, p) + L.value(-U) * dtail;
  return -boost::math::digamma(h - 0.5) / g * j + jp / g;
}

}  // namespace

double fbf_partial_analytic(Side side, double t, double h, const BrownianPath& bm,
                            const QuadratureConfig& q) {
  if (!(h > 0.5 && h < 1.0)) throw DomainError("analytic H-derivative requires 1/2 < H < 1");
  const double U = effective_truncation(q, std::abs(t));
  check_support(bm, t, U, 0.0);
  const PathRef L = detail::view(bm);
  if (side == Side::plus) return plus_partial_analytic(L, t, h, U);
  detail::Reflected r(L);
  return plus_partial_analytic(r.ref, -t, h, U);
}

double fbf_wb(double t, double h, const BrownianPath& bm, const QuadratureConfig& q) {
  check_h(h);
  const double U = effective_truncation(q, std::abs(t));
  check_support(bm, t, U, 0.0);
  const double delta = std::min(q.anchor_offset, U - std::abs(t));
  if (!(delta > 0.0)) throw SupportError("no room for the principal-value window");
  const PathRef L = detail::view(bm);
  const double p = h - 1.5;
  auto centre = [&](double c) {
    return detail::paired(L, c, delta, p) + detail::one_sided(L, c, -1, delta, c + U, p) -
           detail::one_sided(L, c, +1, delta, U - c, p);
  };
  const double tails = L.value(-U) * detail::tail_diff(t + U, U, p) -
                       L.value(U) * detail::tail_diff(U - t, U, p);
  return (centre(t) - centre(0.0) + tails) / std::tgamma(h + 0.5);
}

double tail_bound(Side side, double t, double h, const BrownianPath& bm, const QuadratureConfig& q) {
  check_h(h);
  const double U = effective_truncation(q, std::abs(t));
  check_support(bm, t, U, 0.0);
  if (h == 0.5) return 0.0;
  const double p = h - 1.5;
  const double pref = std::abs((h - 0.5) / std::tgamma(h + 0.5));
  const PathRef L = detail::view(bm);
  // + side sees u < -U, - side sees u > U (with kernel mirrored).
  const double sgn = side == Side::plus ? -1.0 : 1.0;
  const double edge = L.value(sgn * U);
  const double tt = side == Side::plus ? t : -t;
  double g = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < L.n; ++i) {
    const double u = sgn * L.u(i);  // reflected coordinate: u > U means outside
    if (u <= U) continue;
    const double w = 1.0 + u;
    g = std::max(g, std::abs(L.y[i] - edge) / std::pow(w, 0.6));
    mass += std::pow(w, 0.6) * std::abs(std::pow(u + tt, p) - std::pow(u, p)) * L.h;
  }
  return pref * g * mass;
}

MbmPath mbm_stochint_oracle(const TimeGrid& grid, const HurstFunction& hurst, double a_plus,
                            double a_minus, const BrownianPath& bm) {
  if (a_plus == 0.0 && a_minus == 0.0) throw DomainError("(a+, a-) must not both vanish");
  const std::size_t nc = bm.values.size() - 1;
  std::vector<double> mid(nc), db(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    mid[i] = bm.grid.at(i) + 0.5 * bm.grid.step();
    db[i] = bm.values[i + 1] - bm.values[i];
  }
  auto ppow = [](double x, double a) { return x > 0.0 ? std::pow(x, a) : 0.0; };
  MbmPath out{grid, std::vector<double>(grid.size()), hurst, a_plus, a_minus, bm.seed};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid.at(j);
    const double H = hurst.eval(t);
    const double a = H - 0.5;
    double sp = 0.0, sm = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
      const double m = mid[i];
      if (a_plus != 0.0) sp += (ppow(t - m, a) - ppow(-m, a)) * db[i];
      if (a_minus != 0.0) sm += (ppow(m - t, a) - ppow(m, a)) * db[i];
    }
    out.values[j] = (a_plus * sp + a_minus * sm) / std::tgamma(H + 0.5);
  }
  return out;
}

MbmPath mbm_sample(const TimeGrid& grid, const HurstFunction& hurst, double a_plus, double a_minus,
                   const BrownianPath& bm, const QuadratureConfig& q) {
  if (a_plus == 0.0 && a_minus == 0.0) throw DomainError("(a+, a-) must not both vanish");
  MbmPath out{grid, std::vector<double>(grid.size()), hurst, a_plus, a_minus, bm.seed};
  const double ratio = grid.step() / bm.grid.step();
  const long stride = std::lround(ratio);
  const bool aligned = std::abs(ratio - static_cast<double>(stride)) < 1e-9 && stride >= 1 &&
                       bm.grid.index_of(grid.t_min()).has_value();
  if (aligned && grid.size() >= 32) {
    QuadratureConfig qq = q;
    qq.truncation = effective_truncation(q, std::max(std::abs(grid.t_min()), std::abs(grid.t_max())));
    FieldEngine engine(bm, qq, grid.t_min(), grid.t_max());
    const std::vector<double> full = engine.mbm(hurst, a_plus, a_minus);
    for (std::size_t j = 0; j < grid.size(); ++j) out.values[j] = full[j * static_cast<std::size_t>(stride)];
    return out;
  }
  QuadratureConfig qq = q;
  qq.truncation = effective_truncation(q, std::max(std::abs(grid.t_min()), std::abs(grid.t_max())));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid.at(j);
    const double H = hurst.eval(t);
    double v = 0.0;
    if (a_plus != 0.0) v += a_plus * fbf_eval(Side::plus, t, H, bm, qq);
    if (a_minus != 0.0) v += a_minus * fbf_eval(Side::minus, t, H, bm, qq);
    out.values[j] = v;
  }
  return out;
}

double mbm_jump(double t, const HurstFunction& hurst, double a_plus, double a_minus,
                const BrownianPath& bm, const QuadratureConfig& q) {
  const double hr = hurst.eval(t), hl = hurst.left_limit(t);
  double v = 0.0;
  if (a_plus != 0.0) v += a_plus * (fbf_eval(Side::plus, t, hr, bm, q) - fbf_eval(Side::plus, t, hl, bm, q));
  if (a_minus != 0.0)
    v += a_minus * (fbf_eval(Side::minus, t, hr, bm, q) - fbf_eval(Side::minus, t, hl, bm, q));
  return v;
}

double wb_normaliser(double h) {
  const double x = (h - 0.5) * M_PI / 2.0;
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 3.0;
  return x / std::tan(x);
}

}  // namespace mbm
