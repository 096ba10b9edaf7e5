#include <doctest.h>

#include <cmath>
#include <random>

#include "mbm/errors.hpp"
#include "mbm/hurst.hpp"
#include "mbm/noise.hpp"
#include "mbm/regularity.hpp"

using namespace mbm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_error(const FrontierCurve& c, const std::function<double(double)>& theory, double lo, double hi) {
  double w = 0.0;
  for (std::size_t k = 0; k < c.sprime.size(); ++k)
    if (c.sprime[k] >= lo - 1e-12 && c.sprime[k] <= hi + 1e-12)
      w = std::max(w, std::abs(c.sigma[k] - std::min(theory(c.sprime[k]), c.cap)));
  return w;
}

void check_shape(const std::vector<double>& s, const std::vector<double>& y) {
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double slope = (y[k + 1] - y[k]) / (s[k + 1] - s[k]);
    CHECK(slope >= -1e-9);
    CHECK(slope <= 1.0 + 1e-9);
    if (k + 2 < s.size()) CHECK((y[k + 2] - y[k + 1]) / (s[k + 2] - s[k + 1]) <= slope + 1e-9);
  }
}

const Samples& chirp_samples() {
  static const Samples f = build_chirp(0.5, 1.0).sample(TimeGrid(-1.0, 1.0, std::ldexp(1.0, -16)));
  return f;
}

}  // namespace

TEST_CASE("linear function sits at the cap") {
  const TimeGrid g(0.0, 1.0, std::ldexp(1.0, -14));
  Samples f{g, g.times()};
  const ExponentEstimate e = est_exponents(f, 0.5);
  CHECK(e.pointwise_at_cap);
  CHECK(e.local_at_cap);
  CHECK(e.pointwise == 1.0);
}

TEST_CASE("constant function has its whole frontier at the cap") {
  const TimeGrid g(0.0, 1.0, std::ldexp(1.0, -14));
  Samples f{g, std::vector<double>(g.size(), 3.0)};
  const FrontierCurve c = est_frontier(f, 0.5);
  for (std::size_t k = 0; k < c.sigma.size(); ++k) CHECK(c.at_cap(k));
}

TEST_CASE("too few scales are reported with the count") {
  const TimeGrid g(0.0, 1.0, std::ldexp(1.0, -8));
  Samples f{g, g.times()};
  try {
    est_exponents(f, 0.5);
    FAIL("expected EstimationError");
  } catch (const EstimationError& e) {
    CHECK(e.available() < 6);
  }
}

TEST_CASE("fbm exponents and frontier, h = 0.3") {
  const double h = 0.3;
  const TimeGrid g(0.0, 1.0, std::ldexp(1.0, -16));
  double pw = 0.0, loc = 0.0;
  const int n = 3;
  for (int s = 0; s < n; ++s) {
    const FbmPath p = gen_fbm(g, h, 100 + s);
    const ExponentEstimate e = est_exponents(p.samples(), 0.5);
    pw += e.pointwise / n;
    loc += e.local / n;
    CHECK(e.local <= e.pointwise + 0.1);
    const FrontierCurve c = est_frontier(p.samples(), 0.5);
    CHECK(max_error(c, [h](double sp) { return std::min(h + sp, h); }, -0.3, 1.0) <= 0.1);
    CHECK(std::abs(e.local - c.local()) <= 0.1);
    CHECK(std::abs(e.pointwise - c.pointwise()) <= 0.15);
  }
  CHECK(pw == doctest::Approx(h).epsilon(0.1 / h));
  CHECK(loc == doctest::Approx(h).epsilon(0.1 / h));
}

TEST_CASE("chirp exponents and frontier at 0") {
  const Samples& f = chirp_samples();
  const ExponentEstimate e = est_exponents(f, 0.0);
  CHECK(std::abs(e.pointwise - 0.5) <= 0.1);
  CHECK(std::abs(e.local - 0.25) <= 0.1);
  const FrontierCurve c = est_frontier(f, 0.0);
  CHECK(max_error(c, [](double s) { return (s + 0.5) / 2.0; }, -0.5, 1.0) <= 0.1);
  CHECK(std::abs(e.local - c.local()) <= 0.1);
  CHECK(std::abs(e.pointwise - c.pointwise()) <= 0.15);
  check_shape(c.sprime, c.sigma);
}

TEST_CASE("chirp frontier stays below the liminf of nearby local exponents") {
  const Samples& f = chirp_samples();
  const FrontierCurve c = est_frontier(f, 0.0);
  double liminf = kInf;
  for (int j = 2; j <= 4; ++j)
    for (double sign : {-1.0, 1.0}) {
      const double u = sign * std::ldexp(1.0, -j);
      liminf = std::min(liminf, est_exponents(f, u, {j + 1, 0, 0, 0}).local);
    }
  for (double s : c.sigma) CHECK(s <= liminf + 0.15);
}

TEST_CASE("frontier projection: concave, nondecreasing, slopes in [0,1]") {
  const std::vector<double> s = default_sprime_grid();
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> y(s.size());
    const double a = 0.2 + 0.05 * (trial % 10);
    for (std::size_t k = 0; k < s.size(); ++k) y[k] = std::min(a + s[k], a) + noise(rng) * (trial % 3);
    const std::vector<double> p = project_frontier(s, y);
    check_shape(s, p);
    // a projection is idempotent
    const std::vector<double> pp = project_frontier(s, p);
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(pp[k] == doctest::Approx(p[k]).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("admissible curves are left unchanged by the projection") {
  const std::vector<double> s = default_sprime_grid();
  std::vector<double> y;
  for (double v : s) y.push_back(std::min({v + 0.75, v / 3.0 + 7.0 / 12.0, 0.75}));
  const std::vector<double> p = project_frontier(s, y);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(p[k] == doctest::Approx(y[k]).epsilon(1e-6).scale(1.0));
}

TEST_CASE("frontier predictions for mBm") {
  const auto sigmaH = [](double s) { return std::min(s + 0.375, 0.375); };
  SUBCASE("m = 1 gives the exact curve of H") {
    const FrontierPrediction p = predict_frontier_mbm(0.6, sigmaH, 1);
    CHECK(p.exact);
    for (std::size_t k = 0; k < p.lower.sprime.size(); ++k)
      CHECK(p.lower.sigma[k] == doctest::Approx(sigmaH(p.lower.sprime[k])));
  }
  SUBCASE("m = 2") {
    const FrontierPrediction p = predict_frontier_mbm(0.6, sigmaH, 2);
    CHECK_FALSE(p.exact);
    for (std::size_t k = 0; k < p.lower.sprime.size(); ++k) {
      const double s = p.lower.sprime[k];
      CHECK(p.lower.sigma[k] == doctest::Approx(std::min(s + 0.6, 0.375)));
    }
  }
  SUBCASE("chirp Hurst at 0, m infinite") {
    const FrontierPrediction p =
        predict_frontier_mbm(0.75, [](double s) { return (s + 1.0) / 3.0; }, kMultiplicityInfinite);
    for (std::size_t k = 0; k < p.lower.sprime.size(); ++k) {
      const double s = p.lower.sprime[k];
      CHECK(p.lower.sigma[k] == doctest::Approx(std::min({s + 0.75, s / 3.0 + 7.0 / 12.0, 0.75})));
    }
  }
}

TEST_CASE("pointwise predictions for mBm") {
  CHECK(predict_pointwise_mbm(0.6, 0.375, 1) == doctest::Approx(0.375));
  CHECK(predict_pointwise_mbm(0.6, 0.375, 2) == doctest::Approx(0.6));
  CHECK(predict_pointwise_mbm(0.25, kInf, 1) == doctest::Approx(0.25));
  CHECK(predict_pointwise_mbm(0.6, 0.375, kMultiplicityInfinite) == doctest::Approx(0.6));
}

TEST_CASE("multiplicity detection") {
  CHECK(detect_multiplicity([](int) { return 1.0; }, 1.0) == 1);
  CHECK(detect_multiplicity([](int k) { return k == 1 ? 1e-6 : 1.0; }, 1.0) == 2);
  CHECK(detect_multiplicity([](int k) { return k == 3 ? 1.0 : 0.0; }, 1.0) == 3);
  CHECK(detect_multiplicity([](int) { return 0.0; }, 1.0) == 4);
}

TEST_CASE("least squares recovers a line") {
  const LinearFit f = least_squares({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
}
