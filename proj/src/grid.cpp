#include "mbm/grid.hpp"

#include <cmath>
#include <string>

#include "mbm/errors.hpp"

namespace mbm {

namespace {
constexpr double kAlignTol = 1e-9;
}

TimeGrid::TimeGrid(double t_min, double t_max, double step)
    : t_min_(t_min), t_max_(t_max), step_(step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw GridError("grid step must be positive");
  if (!(t_max > t_min)) throw GridError("grid requires t_min < t_max");
  const double cells = (t_max - t_min) / step;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > kAlignTol * std::max(1.0, rounded))
    throw GridError("grid span is not an integer number of steps");
  n_ = static_cast<std::size_t>(rounded) + 1;
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = at(i);
  return out;
}

bool TimeGrid::contains_origin() const { return index_of(0.0).has_value(); }

std::size_t TimeGrid::origin_index() const {
  auto i = index_of(0.0);
  if (!i) throw GridError("grid does not contain 0 as a grid point");
  return *i;
}

std::optional<std::size_t> TimeGrid::index_of(double t) const {
  const double k = (t - t_min_) / step_;
  const double r = std::round(k);
  if (r < 0.0 || r > static_cast<double>(n_ - 1)) return std::nullopt;
  if (std::abs(k - r) > kAlignTol) return std::nullopt;
  return static_cast<std::size_t>(r);
}

bool TimeGrid::covers(double lo, double hi) const {
  const double slack = kAlignTol * step_;
  return lo >= t_min_ - slack && hi <= t_max_ + slack;
}

double Samples::value_at(double t) const {
  if (!grid.covers(t, t))
    throw SupportError("t = " + std::to_string(t) + " outside sample support");
  const double k = (t - grid.t_min()) / grid.step();
  if (k <= 0.0) return values.front();
  auto i = static_cast<std::size_t>(std::floor(k));
  if (i >= grid.size() - 1) return values.back();
  const double w = k - static_cast<double>(i);
  if (w <= 0.0) return values[i];
  return values[i] + w * (values[i + 1] - values[i]);
}

}  // namespace mbm
