#pragma once

#include <cstdint>
#include <vector>

#include "mbm/grid.hpp"

namespace mbm {

struct BrownianPath {
  TimeGrid grid;
  std::vector<double> values;
  std::uint64_t seed = 0;

  double value_at(double t) const { return Samples{grid, values}.value_at(t); }
  Samples samples() const { return {grid, values}; }
};

struct FbmPath {
  TimeGrid grid;
  std::vector<double> values;
  double hurst = 0.5;
  std::uint64_t seed = 0;

  double value_at(double t) const { return Samples{grid, values}.value_at(t); }
  Samples samples() const { return {grid, values}; }
};

enum class FbmMethod { automatic, circulant, cholesky };

// Two independent walks from the origin: stream 0 for u > 0, stream 1 for u < 0.
BrownianPath gen_brownian(const TimeGrid& grid, std::uint64_t seed);

FbmPath gen_fbm(const TimeGrid& grid, double hurst, std::uint64_t seed,
                FbmMethod method = FbmMethod::automatic);

// Keeps every factor-th point counted from the origin.
BrownianPath coarsen(const BrownianPath& bm, int factor);

// fBm covariance 0.5 (|s|^2H + |t|^2H - |t-s|^2H).
double fbm_cov(double s, double t, double hurst);

}  // namespace mbm
