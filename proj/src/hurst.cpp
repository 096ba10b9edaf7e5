#include "mbm/hurst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mbm/errors.hpp"

namespace mbm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double param(const HurstParams& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw DomainError("missing Hurst parameter '" + key + "'");
  return it->second;
}

double param_or(const HurstParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void require_unit_interval(double lo, double hi, const std::string& what) {
  if (!(lo > 0.0 && hi < 1.0 && lo <= hi))
    throw DomainError(what + ": range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "] not inside (0,1)");
}

RegularityMeta smooth_meta(bool level_matching) {
  RegularityMeta m;
  m.frontier = [](double, double) { return kInf; };
  m.pointwise_exp = [](double) { return kInf; };
  m.local_exp = [](double) { return kInf; };
  m.graph_boxdim = [](double) { return 1.0; };
  m.smooth = true;
  m.level_matching = [level_matching](double) { return level_matching; };
  return m;
}

RegularityMeta rough_meta(double a, bool level_matching) {
  RegularityMeta m;
  m.frontier = [a](double, double s) { return std::min(s + a, a); };
  m.pointwise_exp = [a](double) { return a; };
  m.local_exp = [a](double) { return a; };
  m.graph_boxdim = [a](double) { return 2.0 - a; };
  m.level_matching = [level_matching](double) { return level_matching; };
  return m;
}

double chirp_hurst_value(double x) {
  if (x == 0.0) return 0.75;
  return 0.75 + x * std::sin(1.0 / (x * x));
}

}  // namespace

std::string to_string(HurstKind kind) {
  switch (kind) {
    case HurstKind::constant: return "constant";
    case HurstKind::smooth_sine: return "smooth-sine";
    case HurstKind::chirp_hurst: return "chirp-hurst";
    case HurstKind::fbm_sample: return "fbm-sample";
    case HurstKind::weierstrass: return "weierstrass";
    case HurstKind::generic_samples: return "generic-samples";
  }
  return "unknown";
}

double HurstFunction::eval(double t) const {
  if (t < lo_ || t > hi_)
    throw SupportError("t = " + std::to_string(t) + " outside Hurst support [" +
                       std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
  return f_(t);
}

double HurstFunction::left_limit(double t) const {
  if (t < lo_ || t > hi_) throw SupportError("t outside Hurst support");
  return left_ ? left_(t) : f_(t);
}

std::vector<double> HurstFunction::jump_times() const { return jumps_; }

std::pair<double, double> HurstFunction::range(double a, double b) const {
  if (kind_ == HurstKind::constant) return {f_(0.0), f_(0.0)};
  a = std::max(a, lo_);
  b = std::min(b, hi_);
  double mn = kInf, mx = -kInf;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    const double t = a + (b - a) * i / n;
    const double v = f_(t);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
    if (left_) {
      const double l = left_(t);
      mn = std::min(mn, l);
      mx = std::max(mx, l);
    }
  }
  return {mn, mx};
}

int weierstrass_terms(double h, double lambda, double tol) {
  const double r = std::pow(lambda, -h);
  // tail after N terms: r^(N+1) / (1 - r)
  const double n = std::log(tol * (1.0 - r)) / std::log(r);
  return std::max(1, static_cast<int>(std::ceil(n)));
}

HurstFunction build_hurst(HurstKind kind, const HurstParams& params, const FbmPath* noise) {
  HurstFunction H;
  H.kind_ = kind;
  H.params_ = params;
  switch (kind) {
    case HurstKind::constant: {
      const double h = param(params, "h");
      require_unit_interval(h, h, "constant");
      H.f_ = [h](double) { return h; };
      H.meta_ = smooth_meta(true);
      break;
    }
    case HurstKind::smooth_sine: {
      const double mid = param(params, "mid");
      const double amp = std::abs(param(params, "amp"));
      const double freq = param_or(params, "freq", 1.0);
      const double phase = param_or(params, "phase", 0.0);
      require_unit_interval(mid - amp, mid + amp, "smooth-sine");
      H.f_ = [=](double t) { return mid + amp * std::sin(2.0 * M_PI * freq * t + phase); };
      H.meta_ = smooth_meta(false);
      break;
    }
    case HurstKind::chirp_hurst: {
      const double c = param_or(params, "c", 0.0);
      const double r = param_or(params, "r", 0.2);
      if (!(r > 0.0)) throw DomainError("chirp-hurst: support half-width must be positive");
      if (r >= 0.25) {
        double mn = kInf, mx = -kInf;
        const int n = 200000;
        for (int i = 0; i <= n; ++i) {
          const double v = chirp_hurst_value(-r + 2.0 * r * i / n);
          mn = std::min(mn, v);
          mx = std::max(mx, v);
        }
        // sup |x sin(1/x^2)| <= r
        require_unit_interval(std::min(mn, 0.75 - r), std::max(mx, 0.75 + r), "chirp-hurst");
      }
      H.lo_ = c - r;
      H.hi_ = c + r;
      H.f_ = [c](double t) { return chirp_hurst_value(t - c); };
      RegularityMeta m;
      m.frontier = [c](double t, double s) { return t == c ? (s + 1.0) / 3.0 : kInf; };
      m.pointwise_exp = [c](double t) { return t == c ? 1.0 : kInf; };
      m.local_exp = [c](double t) { return t == c ? 1.0 / 3.0 : kInf; };
      m.graph_boxdim = [c](double t) { return t == c ? 2.0 - 2.0 / 3.0 : 1.0; };
      m.level_matching = [c](double t) { return t == c; };
      H.meta_ = m;
      break;
    }
    case HurstKind::fbm_sample: {
      if (!noise) throw DomainError("fbm-sample requires an fBm path");
      const double lo = param(params, "lo");
      const double hi = param(params, "hi");
      require_unit_interval(lo, hi, "fbm-sample");
      if (!(hi > lo)) throw DomainError("fbm-sample: empty target range");
      const double a = noise->hurst;
      auto [mn_it, mx_it] = std::minmax_element(noise->values.begin(), noise->values.end());
      const double vmin = *mn_it, vmax = *mx_it;
      const double scale = (hi - lo) / (vmax - vmin);
      Samples s{noise->grid, noise->values};
      for (double& v : s.values) v = std::clamp(lo + (v - vmin) * scale, lo, hi);
      H.params_["a"] = a;
      H.lo_ = s.grid.t_min();
      H.hi_ = s.grid.t_max();
      auto shared = std::make_shared<Samples>(std::move(s));
      H.f_ = [shared](double t) { return shared->value_at(t); };
      H.meta_ = rough_meta(a, true);
      break;
    }
    case HurstKind::weierstrass: {
      const double h = param(params, "h");
      const double lambda = param(params, "lambda");
      const double lo = param(params, "lo");
      const double hi = param(params, "hi");
      if (!(h > 0.0 && h < 1.0)) throw DomainError("weierstrass: h must lie in (0,1)");
      if (!(lambda > 1.0)) throw DomainError("weierstrass: lambda must exceed 1");
      require_unit_interval(lo, hi, "weierstrass");
      const int nterms = weierstrass_terms(h, lambda);
      H.params_["terms"] = nterms;
      std::vector<double> amp(nterms + 1), freq(nterms + 1);
      double total = 0.0;
      for (int n = 0; n <= nterms; ++n) {
        amp[n] = std::pow(lambda, -n * h);
        freq[n] = std::pow(lambda, n);
        total += amp[n];
      }
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      H.f_ = [=](double t) {
        double w = 0.0;
        for (std::size_t n = 0; n < amp.size(); ++n) w += amp[n] * std::cos(freq[n] * t);
        return mid + half * w / total;
      };
      H.meta_ = rough_meta(h, false);
      break;
    }
    case HurstKind::generic_samples:
      throw DomainError("generic samples are built with HurstFunction::from_samples");
  }
  return H;
}

HurstFunction HurstFunction::from_samples(std::vector<double> knots, std::vector<double> values,
                                          RegularityMeta meta) {
  if (knots.size() != values.size() || knots.size() < 2)
    throw DomainError("generic samples need matching knots and values (at least two)");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i] < knots[i - 1]) throw DomainError("generic sample knots must be nondecreasing");
    if (i >= 2 && knots[i] == knots[i - 2]) throw DomainError("a knot may repeat at most once");
  }
  for (double v : values)
    if (!(v > 0.0 && v < 1.0)) throw DomainError("generic sample values must lie in (0,1)");

  HurstFunction H;
  H.kind_ = HurstKind::generic_samples;
  H.lo_ = knots.front();
  H.hi_ = knots.back();
  H.meta_ = std::move(meta);
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (knots[i] == knots[i - 1]) H.jumps_.push_back(knots[i]);
  auto k = std::make_shared<std::vector<double>>(std::move(knots));
  auto v = std::make_shared<std::vector<double>>(std::move(values));
  // right-continuous: index of the last knot <= t
  H.f_ = [k, v](double t) {
    const std::size_t j = std::upper_bound(k->begin(), k->end(), t) - k->begin();
    if (j == 0) return v->front();
    if (j == k->size()) return v->back();
    const double t0 = (*k)[j - 1], t1 = (*k)[j];
    const double w = (t - t0) / (t1 - t0);
    return (*v)[j - 1] + w * ((*v)[j] - (*v)[j - 1]);
  };
  H.left_ = [k, v](double t) {
    const std::size_t j = std::lower_bound(k->begin(), k->end(), t) - k->begin();
    if (j == 0) return v->front();
    if (j == k->size()) return v->back();
    const double t0 = (*k)[j - 1], t1 = (*k)[j];
    const double w = (t - t0) / (t1 - t0);
    return (*v)[j - 1] + w * ((*v)[j] - (*v)[j - 1]);
  };
  return H;
}

namespace {

double parse_number(const std::string& text) {
  const auto caret = text.find('^');
  try {
    if (caret != std::string::npos)
      return std::pow(std::stod(text.substr(0, caret)), std::stod(text.substr(caret + 1)));
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DomainError("cannot parse number '" + text + "'");
  }
}

}  // namespace

std::pair<std::string, HurstParams> parse_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  std::pair<std::string, HurstParams> out{spec.substr(0, colon), {}};
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw DomainError("parameter without '=': " + item);
      out.second[item.substr(0, eq)] = parse_number(item.substr(eq + 1));
    }
  }
  return out;
}

HurstFunction parse_hurst(const std::string& spec) {
  const auto [name, p] = parse_spec(spec);
  if (name == "const" || name == "constant") return build_hurst(HurstKind::constant, p);
  if (name == "sine" || name == "smooth-sine") return build_hurst(HurstKind::smooth_sine, p);
  if (name == "chirp" || name == "chirp-hurst") return build_hurst(HurstKind::chirp_hurst, p);
  if (name == "weierstrass") return build_hurst(HurstKind::weierstrass, p);
  if (name == "fbm" || name == "fbm-sample") {
    const double a = param(p, "a");
    const double tmin = param_or(p, "tmin", 0.0);
    const double tmax = param_or(p, "tmax", 1.0);
    const double step = param_or(p, "step", std::ldexp(1.0, -16));
    const auto seed = static_cast<std::uint64_t>(param_or(p, "seed", 0.0));
    const FbmPath path = gen_fbm(TimeGrid(tmin, tmax, step), a, seed);
    return build_hurst(HurstKind::fbm_sample, p, &path);
  }
  if (name == "jump") {
    const double t0 = param(p, "t0");
    const double lo = param(p, "lo");
    const double hi = param(p, "hi");
    const double a = param_or(p, "tmin", -1e6), b = param_or(p, "tmax", 1e6);
    return HurstFunction::from_samples({a, t0, t0, b}, {lo, lo, hi, hi});
  }
  throw DomainError("unknown Hurst kind '" + name + "'");
}

double ChirpFunction::operator()(double x) const {
  if (x == 0.0) return 0.0;
  const double a = std::abs(x);
  return std::pow(a, alpha) * std::sin(std::pow(a, -beta));
}

Samples ChirpFunction::sample(const TimeGrid& grid) const {
  Samples s{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) s.values[i] = (*this)(grid.at(i));
  return s;
}

double ChirpFunction::boxdim_at_zero() const {
  return 2.0 - std::min((1.0 + alpha) / (1.0 + beta), 1.0);
}

ChirpFunction build_chirp(double alpha, double beta) {
  if (!(alpha > 0.0 && beta > 0.0)) throw DomainError("chirp requires alpha, beta > 0");
  return {alpha, beta};
}

}  // namespace mbm
