#include <doctest.h>

#include <cmath>

#include "mbm/errors.hpp"
#include "mbm/noise.hpp"
#include "stats.hpp"

using namespace mbm;

namespace {

// Closed-form fBm covariance, written out independently of fbm_cov.
double fbm_law(double s, double t, double h) {
  return 0.5 * (std::pow(std::abs(s), 2 * h) + std::pow(std::abs(t), 2 * h) - std::pow(std::abs(t - s), 2 * h));
}

}  // namespace

TEST_CASE("brownian path is anchored at the origin") {
  const TimeGrid g(-2.0, 2.0, std::ldexp(1.0, -10));
  const BrownianPath bm = gen_brownian(g, 1);
  CHECK(bm.values[g.origin_index()] == 0.0);
  for (double v : bm.values) CHECK(std::isfinite(v));
}

TEST_CASE("brownian path is reproducible bit for bit") {
  const TimeGrid g(-1.0, 1.0, 1.0 / 256);
  CHECK(gen_brownian(g, 42).values == gen_brownian(g, 42).values);
  CHECK(gen_brownian(g, 42).values != gen_brownian(g, 43).values);
}

TEST_CASE("grid without the origin is rejected") {
  CHECK_THROWS_AS(gen_brownian(TimeGrid(0.1, 1.1, 0.25), 1), GridError);
  CHECK_THROWS_AS(gen_fbm(TimeGrid(0.1, 1.1, 0.25), 0.3, 1), GridError);
}

TEST_CASE("variance of B_1 over 1000 seeds") {
  const TimeGrid g(-1.0, 1.0, 1.0 / 64);
  const std::size_t i1 = *g.index_of(1.0), im = *g.index_of(-1.0);
  std::vector<double> x, y;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const BrownianPath bm = gen_brownian(g, s);
    x.push_back(bm.values[i1]);
    y.push_back(bm.values[im]);
  }
  CHECK(testing::variance(x) == doctest::Approx(1.0).epsilon(0.15));
  CHECK(testing::variance(y) == doctest::Approx(1.0).epsilon(0.15));
  // the two branches are independent walks
  CHECK(std::abs(testing::correlation(x, y)) <= 0.1);
}

TEST_CASE("increments over disjoint cells are uncorrelated") {
  const TimeGrid g(-1.0, 1.0, 1.0 / 64);
  const std::size_t i0 = g.origin_index();
  std::vector<double> a, b, c;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const BrownianPath bm = gen_brownian(g, s);
    a.push_back(bm.values[i0 + 1] - bm.values[i0]);
    b.push_back(bm.values[i0 + 2] - bm.values[i0 + 1]);
    c.push_back(bm.values[i0] - bm.values[i0 - 1]);
  }
  CHECK(std::abs(testing::correlation(a, b)) <= 0.1);
  CHECK(std::abs(testing::correlation(a, c)) <= 0.1);
  CHECK(testing::variance(a) == doctest::Approx(1.0 / 64).epsilon(0.15));
}

TEST_CASE("coarsened increments have twice the variance") {
  const double h = 1.0 / 128;
  const TimeGrid g(-1.0, 1.0, h);
  std::vector<double> inc;
  for (std::uint64_t s = 0; s < 800; ++s) {
    const BrownianPath c = coarsen(gen_brownian(g, s), 2);
    CHECK(c.grid.step() == 2 * h);
    const std::size_t i0 = c.grid.origin_index();
    inc.push_back(c.values[i0 + 3] - c.values[i0 + 2]);
  }
  CHECK(testing::variance(inc) == doctest::Approx(2 * h).epsilon(0.15));
}

TEST_CASE("fbm is anchored and reproducible") {
  const TimeGrid g(-1.0, 2.0, 1.0 / 128);
  for (double h : {0.2, 0.5, 0.8}) {
    const FbmPath p = gen_fbm(g, h, 3);
    CHECK(p.values[g.origin_index()] == 0.0);
    CHECK(p.values == gen_fbm(g, h, 3).values);
  }
}

TEST_CASE("fbm rejects hurst outside (0,1)") {
  const TimeGrid g(0.0, 1.0, 1.0 / 16);
  CHECK_THROWS_AS(gen_fbm(g, 0.0, 1), DomainError);
  CHECK_THROWS_AS(gen_fbm(g, 1.0, 1), DomainError);
  CHECK_THROWS_AS(gen_fbm(g, -0.2, 1), DomainError);
}

TEST_CASE("fbm covariance matches the closed form") {
  const TimeGrid g(0.0, 2.0, 1.0 / 64);
  const std::size_t ia = *g.index_of(0.5), ib = *g.index_of(1.0), ic = *g.index_of(2.0);

  SUBCASE("h = 0.5 is Brownian") {
    std::vector<double> x, y;
    for (std::uint64_t s = 0; s < 500; ++s) {
      const FbmPath p = gen_fbm(g, 0.5, s);
      x.push_back(p.values[ia]);
      y.push_back(p.values[ib]);
    }
    CHECK(std::abs(testing::covariance(x, y) - 0.5) <= 0.1);
  }
  SUBCASE("h = 0.3") {
    std::vector<double> x, y;
    for (std::uint64_t s = 0; s < 500; ++s) {
      const FbmPath p = gen_fbm(g, 0.3, s);
      x.push_back(p.values[ia]);
      y.push_back(p.values[ic]);
    }
    const double expected = fbm_law(0.5, 2.0, 0.3);
    CHECK(expected == doctest::Approx(0.450).epsilon(0.01));
    CHECK(std::abs(testing::covariance(x, y) - expected) <= 0.1);
  }
}

TEST_CASE("fbm_cov agrees with the closed form") {
  for (double h : {0.1, 0.3, 0.5, 0.9})
    for (double s : {-1.5, 0.25, 2.0})
      for (double t : {-0.5, 0.75, 3.0}) CHECK(fbm_cov(s, t, h) == doctest::Approx(fbm_law(s, t, h)));
}

TEST_CASE("cholesky fallback has the same law as circulant embedding") {
  const TimeGrid g(0.0, 1.0, 1.0 / 32);
  const std::size_t i = *g.index_of(1.0), j = *g.index_of(0.5);
  std::vector<double> x, y;
  for (std::uint64_t s = 0; s < 600; ++s) {
    const FbmPath p = gen_fbm(g, 0.7, s, FbmMethod::cholesky);
    x.push_back(p.values[i]);
    y.push_back(p.values[j]);
  }
  CHECK(testing::variance(x) == doctest::Approx(1.0).epsilon(0.15));
  CHECK(std::abs(testing::covariance(x, y) - fbm_law(1.0, 0.5, 0.7)) <= 0.1);
}

TEST_CASE("fbm self-similarity: Var(B_t)/t^2H is flat in t") {
  const double h = 0.3;
  const TimeGrid g(0.0, 2.0, 1.0 / 64);
  const std::vector<double> ts{0.25, 0.5, 1.0, 2.0};
  std::vector<std::vector<double>> cols(ts.size());
  for (std::uint64_t s = 0; s < 600; ++s) {
    const FbmPath p = gen_fbm(g, h, s);
    for (std::size_t k = 0; k < ts.size(); ++k) cols[k].push_back(p.values[*g.index_of(ts[k])]);
  }
  for (std::size_t k = 0; k < ts.size(); ++k)
    CHECK(testing::variance(cols[k]) / std::pow(ts[k], 2 * h) == doctest::Approx(1.0).epsilon(0.15));
}
