#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace mbm {

// Uniform grid t_min, t_min + step, ..., t_max.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(double t_min, double t_max, double step);

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  double step() const { return step_; }
  std::size_t size() const { return n_; }
  double at(std::size_t i) const { return t_min_ + static_cast<double>(i) * step_; }
  std::vector<double> times() const;

  bool contains_origin() const;
  // Throws GridError when 0 is not a grid point.
  std::size_t origin_index() const;
  // Index of an exact grid point (tolerance 1e-9 steps), if any.
  std::optional<std::size_t> index_of(double t) const;
  bool covers(double lo, double hi) const;

 private:
  double t_min_ = 0.0;
  double t_max_ = 0.0;
  double step_ = 1.0;
  std::size_t n_ = 1;
};

// Values on a uniform grid with linear interpolation in between.
struct Samples {
  TimeGrid grid;
  std::vector<double> values;

  double value_at(double t) const;
};

}  // namespace mbm
