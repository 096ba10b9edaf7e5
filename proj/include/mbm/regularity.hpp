#pragma once

#include <functional>
#include <vector>

#include "mbm/grid.hpp"

namespace mbm {

// Dyadic scale exponents; 0 picks a default from the sampling step and support.
struct DyadicScales {
  int ball = 0;        // outer radius 2^-ball
  int point_fine = 0;  // smallest pointwise ball 2^-point_fine
  int lag_coarse = 0;  // lags 2^-lag_coarse .. 2^-lag_fine
  int lag_fine = 0;
};

// Scales actually used after defaults are filled in.
DyadicScales resolve_scales(const Samples& f, double t, const DyadicScales& s);

struct ExponentEstimate {
  double pointwise = 0.0;
  bool pointwise_at_cap = false;
  double local = 0.0;
  bool local_at_cap = false;
  double fit_r2 = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
};

ExponentEstimate est_exponents(const Samples& f, double t, const DyadicScales& scales = {},
                               double cap = 1.0);

std::vector<double> default_sprime_grid();

struct FrontierCurve {
  std::vector<double> sprime;
  std::vector<double> sigma;
  std::vector<double> raw;  // before projection and capping
  double cap = 1.0;

  bool at_cap(std::size_t k) const { return sigma[k] >= cap; }
  double at(double s) const;  // linear interpolation
  // -inf{s': sigma(s') >= 0}
  double pointwise() const;
  double local() const { return at(0.0); }
};

FrontierCurve est_frontier(const Samples& f, double t, const std::vector<double>& sprime = default_sprime_grid(),
                           const DyadicScales& scales = {}, double cap = 1.0);

// Least-squares projection onto concave nondecreasing curves with slopes in [0,1].
std::vector<double> project_frontier(const std::vector<double>& sprime, const std::vector<double>& y);

constexpr int kMultiplicityInfinite = 0;

struct FrontierPrediction {
  FrontierCurve lower;
  bool exact = false;
};

// m = kMultiplicityInfinite for m = infinity.
FrontierPrediction predict_frontier_mbm(double H_t, const std::function<double(double)>& frontier_H,
                                        int m, const std::vector<double>& sprime = default_sprime_grid());

double predict_pointwise_mbm(double H_t, double alpha_H, int m);

// Smallest k <= 3 with |d^k/dH^k| above rel * scale, or 4 when none is.
int detect_multiplicity(const std::function<double(int)>& partial, double scale, double rel = 1e-3);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mbm
