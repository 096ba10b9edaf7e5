#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mbm/field.hpp"
#include "mbm/hurst.hpp"
#include "mbm/regularity.hpp"

namespace mbm {

struct CovMatrix {
  std::vector<double> probe_times;
  Eigen::MatrixXd entries;
  int n_seeds = 0;
  double min_eigen_raw = 0.0;  // before projection
};

// rows: one replicate per row, columns: probes.
CovMatrix empirical_cov(const std::vector<std::vector<double>>& rows, const std::vector<double>& probe_times,
                        int min_seeds = 100);
CovMatrix empirical_cov(const std::vector<MbmPath>& paths, const std::vector<double>& probe_times,
                        int min_seeds = 100);

double cond_var(const CovMatrix& cov, std::size_t target, const std::vector<std::size_t>& conditioners);

struct EnsembleConfig {
  std::uint64_t master_seed = 1;
  int seeds = 500;
  double noise_step = 1.0 / 1024.0;
  double noise_half_width = 21.0;  // also the truncation U
  QuadratureConfig q;
  double a_plus = 1.0;
  double a_minus = 0.0;
  int workers = 1;
};

// X at the probe times for each seed; seed k uses stream k of the master seed.
std::vector<std::vector<double>> mbm_ensemble(const HurstFunction& hurst, const std::vector<double>& probes,
                                              const EnsembleConfig& cfg);

// Point s at distance about r from t with H(s) = H(t); prefers the left side.
double level_matching_point(const HurstFunction& hurst, double t, double r);

struct LndResult {
  double slope = 0.0;
  LinearFit fit;
  std::vector<double> distances;
  std::vector<double> cond_vars;
  std::vector<double> points;
};

LndResult lnd_slope(const HurstFunction& hurst, double t, const std::vector<double>& radii,
                    const EnsembleConfig& cfg);

struct RatioInterval {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool pass() const { return max_ratio <= 10.0 * min_ratio; }
};

RatioInterval incr_var_check(const HurstFunction& hurst, double t, double rho, const EnsembleConfig& cfg,
                             int n_probes = 9);

}  // namespace mbm
