#pragma once

#include <cstdint>
#include <vector>

#include "mbm/grid.hpp"
#include "mbm/hurst.hpp"
#include "mbm/noise.hpp"

namespace mbm {

enum class Side { plus, minus };

struct QuadratureConfig {
  double truncation = 0.0;  // U; 0 selects 20 + max|t|
  double tail_tol = 1e-6;
  double anchor_offset = 1.0;  // Delta, T = t -+ Delta
  double fd_step = 1e-3;
  int max_deriv = 3;
};

// U used for evaluation times up to |t| = t_abs_max.
double effective_truncation(const QuadratureConfig& q, double t_abs_max);

double fbf_eval(Side side, double t, double h, const BrownianPath& bm, const QuadratureConfig& q);

// k-th H-derivative by Richardson-extrapolated central differences.
double fbf_partial(Side side, double t, double h, int k, const BrownianPath& bm,
                   const QuadratureConfig& q);

// First H-derivative from the log-weighted kernel; h > 1/2 only.
double fbf_partial_analytic(Side side, double t, double h, const BrownianPath& bm,
                            const QuadratureConfig& q);

// Well-balanced field, principal value around u = t and u = 0.
double fbf_wb(double t, double h, const BrownianPath& bm, const QuadratureConfig& q);

// Bound on the part of the path beyond |u| > U that the truncated integral replaces by
// the frozen edge value. Zero when U reaches the end of the path support.
double tail_bound(Side side, double t, double h, const BrownianPath& bm, const QuadratureConfig& q);

struct MbmPath {
  TimeGrid grid;
  std::vector<double> values;
  HurstFunction hurst;
  double a_plus = 1.0;
  double a_minus = 0.0;
  std::uint64_t noise_seed = 0;

  Samples samples() const { return {grid, values}; }
};

MbmPath mbm_sample(const TimeGrid& grid, const HurstFunction& hurst, double a_plus, double a_minus,
                   const BrownianPath& bm, const QuadratureConfig& q);

// Midpoint Riemann sum of the moving-average stochastic integral over the whole path.
MbmPath mbm_stochint_oracle(const TimeGrid& grid, const HurstFunction& hurst, double a_plus,
                            double a_minus, const BrownianPath& bm);

// X_t - X_{t-} at a jump time of a cadlag Hurst function.
double mbm_jump(double t, const HurstFunction& hurst, double a_plus, double a_minus,
                const BrownianPath& bm, const QuadratureConfig& q);

// Factor relating the well-balanced field to the tilde fields; equals 1 at h = 1/2.
double wb_normaliser(double h);

// (1/2) sum_i [log|t - m_i| - log|m_i|] dB_i over cell midpoints m_i, on the grid
// of bm extended by `extend` times its half-width.
BrownianPath tilde_brownian(const BrownianPath& bm, int extend = 1);

struct WbRelation {
  double lhs;
  double rhs;
  double gap;
};

WbRelation verify_wb_relation(double t, double h, const BrownianPath& bm, const QuadratureConfig& q);
std::vector<WbRelation> verify_wb_relation(const std::vector<double>& times, double h,
                                           const BrownianPath& bm, const QuadratureConfig& q);

// Whole-grid evaluation at fixed H by FFT convolution of the path increments with
// cell-averaged kernels. Output nodes are the bm grid nodes inside [t_lo, t_hi].
class FieldEngine {
 public:
  FieldEngine(const BrownianPath& bm, const QuadratureConfig& q, double t_lo, double t_hi);
  ~FieldEngine();
  FieldEngine(const FieldEngine&) = delete;
  FieldEngine& operator=(const FieldEngine&) = delete;

  const TimeGrid& out_grid() const { return out_grid_; }
  std::vector<double> field(Side side, double h) const;
  std::vector<double> partial(Side side, double h, int k, double fd_step) const;
  // a+ B+(t, H(t)) + a- B-(t, H(t)) on the output nodes.
  std::vector<double> mbm(const HurstFunction& hurst, double a_plus, double a_minus) const;

 private:
  struct Impl;
  Impl* impl_;
  TimeGrid out_grid_;
};

namespace detail {
// (x1^q - x0^q)/q for 0 <= x0 < x1, log(x1/x0) at q = 0.
double pow_diff(double x0, double x1, double q);
// int_0^len x (w0 + x)^p dx
double first_moment(double w0, double len, double p);
}  // namespace detail

}  // namespace mbm
