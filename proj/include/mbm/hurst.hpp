#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mbm/grid.hpp"
#include "mbm/noise.hpp"

namespace mbm {

enum class HurstKind { constant, smooth_sine, chirp_hurst, fbm_sample, weierstrass, generic_samples };

std::string to_string(HurstKind kind);

// Known regularity of a Hurst function. Empty callables mean "unknown";
// +infinity stands for smooth behaviour.
struct RegularityMeta {
  std::function<double(double t, double sprime)> frontier;
  std::function<double(double t)> pointwise_exp;
  std::function<double(double t)> local_exp;
  std::function<double(double t)> graph_boxdim;
  bool smooth = false;
  // True when H(t) is attained along a sequence s_i -> t, s_i != t.
  std::function<bool(double t)> level_matching;
};

using HurstParams = std::map<std::string, double>;

class HurstFunction {
 public:
  HurstKind kind() const { return kind_; }
  const HurstParams& params() const { return params_; }
  const RegularityMeta& meta() const { return meta_; }
  double support_min() const { return lo_; }
  double support_max() const { return hi_; }
  bool is_constant() const { return kind_ == HurstKind::constant; }

  double eval(double t) const;
  double operator()(double t) const { return eval(t); }
  // Differs from eval only at jump times of generic samples.
  double left_limit(double t) const;
  std::vector<double> jump_times() const;
  // Range of H over [a, b] (sampled on a fine grid for non-constant kinds).
  std::pair<double, double> range(double a, double b) const;

  // Generic samples: knots nondecreasing; a repeated knot encodes a jump.
  static HurstFunction from_samples(std::vector<double> knots, std::vector<double> values,
                                    RegularityMeta meta = {});

  friend HurstFunction build_hurst(HurstKind, const HurstParams&, const FbmPath*);

 private:
  HurstKind kind_ = HurstKind::constant;
  HurstParams params_;
  RegularityMeta meta_;
  double lo_ = -1e300;
  double hi_ = 1e300;
  std::function<double(double)> f_;
  std::function<double(double)> left_;
  std::vector<double> jumps_;
};

// Params by kind:
//   constant: h
//   smooth_sine: mid, amp, freq, phase (H = mid + amp sin(2 pi freq t + phase))
//   chirp_hurst: c (centre, default 0), r (support half-width, default 0.2)
//   fbm_sample: lo, hi (noise supplies a and the support)
//   weierstrass: h, lambda, lo, hi
HurstFunction build_hurst(HurstKind kind, const HurstParams& params, const FbmPath* noise = nullptr);

// "const:h=0.6", "sine:mid=0.5,amp=0.2,freq=1", "chirp:c=1", "weierstrass:h=0.4,lambda=2,lo=0.3,hi=0.7",
// "fbm:a=0.3,lo=0.5,hi=0.9,seed=7[,tmin=-1,tmax=2,step=2^-14]", "jump:t0=0.5,lo=0.45,hi=0.55".
HurstFunction parse_hurst(const std::string& spec);

// "name:k=v,k=v" into the name and its numeric parameters.
std::pair<std::string, HurstParams> parse_spec(const std::string& spec);

// f(x) = |x|^alpha sin(|x|^-beta), f(0) = 0.
struct ChirpFunction {
  double alpha;
  double beta;

  double operator()(double x) const;
  Samples sample(const TimeGrid& grid) const;
  double frontier_at_zero(double sprime) const { return (sprime + alpha) / (1.0 + beta); }
  double boxdim_at_zero() const;
  double hausdim() const { return 1.0; }
};

ChirpFunction build_chirp(double alpha, double beta);

// Number of Weierstrass terms so that the neglected tail is below tol.
int weierstrass_terms(double h, double lambda, double tol = 1e-10);

}  // namespace mbm
