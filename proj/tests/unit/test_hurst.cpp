#include <doctest.h>

#include <cmath>
#include <limits>

#include "mbm/errors.hpp"
#include "mbm/hurst.hpp"

using namespace mbm;

namespace {

std::vector<double> dense_sprime() {
  std::vector<double> s;
  for (int k = -200; k <= 400; ++k) s.push_back(k * 0.005);
  return s;
}

// -inf{s' : sigma(s') >= 0} and sigma(0) read off a frontier.
std::pair<double, double> exponents_from(const std::function<double(double)>& sigma) {
  double inf_s = std::numeric_limits<double>::infinity();
  for (double s : dense_sprime())
    if (sigma(s) >= -1e-12) inf_s = std::min(inf_s, s);
  return {-inf_s, sigma(0.0)};
}

}  // namespace

TEST_CASE("constant hurst") {
  const HurstFunction H = build_hurst(HurstKind::constant, {{"h", 0.6}});
  CHECK(H(0.0) == 0.6);
  CHECK(H(-3.5) == 0.6);
  CHECK(build_hurst(HurstKind::constant, {{"h", 0.3}})(7.0) == 0.3);
  CHECK(H.meta().smooth);
  CHECK_THROWS_AS(build_hurst(HurstKind::constant, {{"h", 1.2}}), DomainError);
}

TEST_CASE("chirp hurst") {
  const HurstFunction H = build_hurst(HurstKind::chirp_hurst, {});
  CHECK(H(0.0) == 0.75);
  CHECK(H.meta().frontier(0.0, 0.0) == doctest::Approx(1.0 / 3.0));
  CHECK(H.meta().frontier(0.0, 2.0) == doctest::Approx(1.0));
  // sin(1/t^2) = 1 at t = sqrt(2/pi), which sits outside the support
  CHECK_THROWS_AS(H(std::sqrt(2.0 / M_PI)), SupportError);
  const auto [lo, hi] = H.range(H.support_min(), H.support_max());
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK_THROWS_AS(build_hurst(HurstKind::chirp_hurst, {{"r", 0.9}}), DomainError);
}

TEST_CASE("fbm-sample hurst") {
  const FbmPath noise = gen_fbm(TimeGrid(0.0, 1.0, 1.0 / 4096), 0.375, 11);
  const HurstFunction H = build_hurst(HurstKind::fbm_sample, {{"lo", 0.5}, {"hi", 0.75}}, &noise);
  CHECK(H.meta().frontier(0.3, 0.0) == doctest::Approx(0.375));
  CHECK(H.meta().frontier(0.3, -0.2) == doctest::Approx(0.175));
  CHECK(H.meta().graph_boxdim(0.3) == doctest::Approx(2.0 - 0.375));
  double mn = 1.0, mx = 0.0;
  for (int i = 0; i <= 4096; ++i) {
    const double v = H(i / 4096.0);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  CHECK(mn >= 0.5);
  CHECK(mx <= 0.75);
  CHECK(mn == doctest::Approx(0.5));
  CHECK(mx == doctest::Approx(0.75));
  CHECK_THROWS_AS(build_hurst(HurstKind::fbm_sample, {{"lo", 0.5}, {"hi", 1.1}}, &noise), DomainError);
  CHECK_THROWS_AS(build_hurst(HurstKind::fbm_sample, {{"lo", 0.5}, {"hi", 0.7}}), DomainError);
  CHECK_THROWS_AS(H(1.5), SupportError);
}

TEST_CASE("sampled hurst interpolates linearly") {
  const HurstFunction H = HurstFunction::from_samples({0.0, 1.0, 2.0}, {0.2, 0.6, 0.4});
  CHECK(H(0.5) == doctest::Approx(0.4));
  CHECK(H(1.5) == doctest::Approx(0.5));
  const HurstFunction J = parse_hurst("jump:t0=0.5,lo=0.45,hi=0.55");
  CHECK(J(0.5) == doctest::Approx(0.55));
  CHECK(J.left_limit(0.5) == doctest::Approx(0.45));
  CHECK(J.jump_times().size() == 1);
}

TEST_CASE("catalog functions stay inside (0,1)") {
  const FbmPath noise = gen_fbm(TimeGrid(-1.0, 2.0, 1.0 / 1024), 0.3, 5);
  const std::vector<HurstFunction> catalog{
      build_hurst(HurstKind::constant, {{"h", 0.05}}),
      build_hurst(HurstKind::smooth_sine, {{"mid", 0.5}, {"amp", 0.45}, {"freq", 3.0}}),
      build_hurst(HurstKind::chirp_hurst, {{"c", 0.3}}),
      build_hurst(HurstKind::fbm_sample, {{"lo", 0.1}, {"hi", 0.9}}, &noise),
      build_hurst(HurstKind::weierstrass, {{"h", 0.4}, {"lambda", 2.0}, {"lo", 0.2}, {"hi", 0.8}}),
  };
  for (const auto& H : catalog) {
    const double a = std::max(H.support_min(), -1.0), b = std::min(H.support_max(), 2.0);
    for (int i = 0; i <= 3000; ++i) {
      const double v = H(a + (b - a) * i / 3000.0);
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("stored exponents are read off the stored frontier") {
  const FbmPath noise = gen_fbm(TimeGrid(0.0, 1.0, 1.0 / 1024), 0.3, 5);
  const HurstFunction F = build_hurst(HurstKind::fbm_sample, {{"lo", 0.5}, {"hi", 0.9}}, &noise);
  const HurstFunction W = build_hurst(HurstKind::weierstrass, {{"h", 0.4}, {"lambda", 2.0}, {"lo", 0.2}, {"hi", 0.8}});
  const HurstFunction C = build_hurst(HurstKind::chirp_hurst, {});
  for (const auto& [H, t] : std::vector<std::pair<HurstFunction, double>>{{F, 0.4}, {W, 0.1}, {C, 0.0}}) {
    const auto [alpha, local] =
        exponents_from([&, t = t](double s) { return H.meta().frontier(t, s); });
    CHECK(alpha == doctest::Approx(H.meta().pointwise_exp(t)).epsilon(0.02));
    CHECK(local == doctest::Approx(H.meta().local_exp(t)));
  }
}

TEST_CASE("weierstrass truncation is converged") {
  const int n = weierstrass_terms(0.4, 2.0);
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double t = -1.0 + i / 100.0;
    double a = 0.0, b = 0.0;
    for (int k = 0; k <= 2 * n; ++k) {
      const double term = std::pow(2.0, -0.4 * k) * std::cos(std::pow(2.0, k) * t);
      b += term;
      if (k <= n) a += term;
    }
    worst = std::max(worst, std::abs(a - b));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("chirp calibration target") {
  const ChirpFunction f = build_chirp(0.5, 1.0);
  CHECK(f(0.0) == 0.0);
  CHECK(f.frontier_at_zero(0.0) == doctest::Approx(0.25));
  CHECK(f.boxdim_at_zero() == doctest::Approx(1.25));
  CHECK(f(0.25) == doctest::Approx(0.5 * std::sin(4.0)));
  CHECK(f(-0.25) == doctest::Approx(f(0.25)));
  CHECK_THROWS_AS(build_chirp(0.0, 1.0), DomainError);
}

TEST_CASE("hurst specs parse") {
  CHECK(parse_hurst("const:h=0.6")(0.2) == 0.6);
  CHECK(parse_hurst("sine:mid=0.5,amp=0.2,freq=1")(0.25) == doctest::Approx(0.7));
  CHECK(parse_hurst("fbm:a=0.3,lo=0.5,hi=0.9,seed=7,step=0.001953125").params().at("a") == 0.3);
  CHECK_THROWS_AS(parse_hurst("nope:h=0.5"), DomainError);
  const auto [name, p] = parse_spec("weierstrass:h=0.4,lambda=2");
  CHECK(name == "weierstrass");
  CHECK(p.at("lambda") == 2.0);
}
