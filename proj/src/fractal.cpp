#include "mbm/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mbm/errors.hpp"
#include "mbm/regularity.hpp"

namespace mbm {

namespace {

void check_window(const Samples& f, double a, double b) {
  if (!(b > a)) throw SupportError("empty window");
  if (!f.grid.covers(a, b)) throw SupportError("window leaves the sample support");
}

// min and max of the interpolated path over [x0, x1]
std::pair<double, double> column_range(const Samples& f, double x0, double x1) {
  const double h = f.grid.step();
  double mn = f.value_at(x0), mx = mn;
  const double v1 = f.value_at(x1);
  mn = std::min(mn, v1);
  mx = std::max(mx, v1);
  const auto lo = static_cast<std::ptrdiff_t>(std::ceil((x0 - f.grid.t_min()) / h - 1e-9));
  const auto hi = static_cast<std::ptrdiff_t>(std::floor((x1 - f.grid.t_min()) / h + 1e-9));
  for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(lo, 0);
       i <= std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(f.values.size()) - 1); ++i) {
    mn = std::min(mn, f.values[i]);
    mx = std::max(mx, f.values[i]);
  }
  return {mn, mx};
}

template <class PerColumn>
long sweep(const Samples& f, double a, double b, double width, PerColumn per_column) {
  const auto ncol = static_cast<long>(std::ceil((b - a) / width - 1e-9));
  long total = 0;
  for (long c = 0; c < ncol; ++c) {
    const double x0 = a + c * width;
    const double x1 = std::min(b, x0 + width);
    const auto [mn, mx] = column_range(f, x0, x1);
    total += per_column(mn, mx);
  }
  return total;
}

long cells(double osc, double delta) {
  return std::max(1L, static_cast<long>(std::ceil(osc / delta - 1e-9)));
}

}  // namespace

long box_count(const Samples& f, double a, double b, double delta) {
  check_window(f, a, b);
  if (delta < 2.0 * f.grid.step() * (1.0 - 1e-12)) throw ScaleError("box size below twice the sampling step");
  return sweep(f, a, b, delta, [delta](double mn, double mx) { return cells(mx - mn, delta); });
}

long pbox_count(const Samples& f, double a, double b, double h_metric, double delta) {
  if (!(h_metric > 0.0 && h_metric < 1.0 + 1e-12)) throw DomainError("parabolic exponent must lie in (0,1]");
  check_window(f, a, b);
  const double width = std::pow(delta, 1.0 / h_metric);
  if (width < 2.0 * f.grid.step() * (1.0 - 1e-12)) throw ScaleError("column width below twice the sampling step");
  return sweep(f, a, b, width, [delta](double mn, double mx) { return cells(mx - mn, delta); });
}

DimEstimate fit_scale_table(const ScaleTable& table) {
  const std::size_t n = table.deltas.size();
  std::vector<double> x(n), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = -std::log(table.deltas[k]);
    y[k] = std::log(static_cast<double>(table.counts[k]));
  }
  DimEstimate d;
  d.table = table;
  const LinearFit fit = least_squares(x, y);
  d.value = fit.slope;
  d.fit_r2 = fit.r2;
  d.lower = d.upper = d.value;
  for (std::size_t k = 0; k + 3 <= n; ++k) {
    const LinearFit w = least_squares({x.begin() + k, x.begin() + k + 3}, {y.begin() + k, y.begin() + k + 3});
    d.lower = std::min(d.lower, w.slope);
    d.upper = std::max(d.upper, w.slope);
  }
  return d;
}

DimEstimate est_boxdim_local(const Samples& f, double t, double rho, const BoxScales& scales) {
  const int n = scales.fine - scales.coarse + 1;
  if (n < 6) throw EstimationError("fewer than 6 box sizes", std::max(n, 0));
  if (std::ldexp(1.0, -scales.coarse) > 2.0 * rho * (1.0 + 1e-12))
    throw EstimationError("coarsest box wider than the window", n);
  ScaleTable tab;
  for (int j = scales.coarse; j <= scales.fine; ++j) {
    const double delta = std::ldexp(1.0, -j);
    tab.deltas.push_back(delta);
    tab.counts.push_back(box_count(f, t - rho, t + rho, delta));
  }
  return fit_scale_table(tab);
}

DimEstimate est_pboxdim_local(const Samples& f, double t, double rho, double h_metric, int count,
                              double min_steps) {
  if (count < 6) throw EstimationError("fewer than 6 box sizes", count);
  // widths 2^-k from the window down to min_steps samples
  const double wmax = 2.0 * rho, wmin = min_steps * f.grid.step();
  if (!(wmax > 4.0 * wmin)) throw EstimationError("window too narrow for parabolic counting", 0);
  const double kmin = std::log2(1.0 / wmax) + 1.0, kmax = std::log2(1.0 / wmin);
  ScaleTable tab;
  for (int c = 0; c < count; ++c) {
    const double k = kmin + (kmax - kmin) * c / (count - 1);
    const double delta = std::pow(std::exp2(-k), h_metric);
    tab.deltas.push_back(delta);
    tab.counts.push_back(pbox_count(f, t - rho, t + rho, h_metric, delta));
  }
  return fit_scale_table(tab);
}

DimEstimate level_set_boxdim(const Samples& f, double level, double a, double b, const BoxScales& scales) {
  check_window(f, a, b);
  const int n = scales.fine - scales.coarse + 1;
  if (n < 3) throw EstimationError("fewer than 3 box sizes", std::max(n, 0));
  ScaleTable tab;
  for (int j = scales.coarse; j <= scales.fine; ++j) {
    const double delta = std::ldexp(1.0, -j);
    if (delta < 2.0 * f.grid.step() * (1.0 - 1e-12)) throw ScaleError("box size below twice the sampling step");
    tab.deltas.push_back(delta);
    tab.counts.push_back(sweep(f, a, b, delta, [level](double mn, double mx) {
      return (mn <= level && level <= mx) ? 1L : 0L;
    }));
  }
  if (tab.counts.back() == 0) {
    DimEstimate d;
    d.empty = true;
    d.table = tab;
    return d;
  }
  return fit_scale_table(tab);
}

double predict_boxdim_graph(double H_t, double dim_grH) {
  if (!(dim_grH >= 1.0 && dim_grH <= 2.0)) throw DomainError("graph dimension of H must lie in [1,2]");
  return std::max(2.0 - H_t, dim_grH);
}

double predict_hausdim_graph(double H_t, double pdim_grH) {
  if (!(pdim_grH >= 1.0)) throw DomainError("parabolic dimension must be at least 1");
  return 1.0 + H_t * (pdim_grH - 1.0);
}

double predict_image_dim(double pdim_grHF) {
  if (!(pdim_grHF >= 0.0)) throw DomainError("dimension must be nonnegative");
  return std::min(1.0, pdim_grHF);
}

Bounds parabolic_transfer_bounds(double d2, double H1, double H2) {
  if (!(H1 > H2 && H2 > 0.0)) throw DomainError("requires H1 > H2 > 0");
  return {d2 + 1.0 / H1 - 1.0 / H2, 1.0 + (H2 / H1) * (d2 - 1.0)};
}

FrontierDimBounds dim_bounds_from_frontier(double sigma_at_1, double sigma_at_inf) {
  return {2.0 - std::min(sigma_at_1, 1.0), 2.0 - std::min(sigma_at_inf, 1.0)};
}

}  // namespace mbm
