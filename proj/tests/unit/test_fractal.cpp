#include <doctest.h>

#include <cmath>

#include "mbm/errors.hpp"
#include "mbm/fractal.hpp"
#include "mbm/hurst.hpp"
#include "mbm/noise.hpp"
#include "mbm/pipelines.hpp"
#include "mbm/regularity.hpp"

using namespace mbm;

namespace {

double dyadic(int k) { return std::ldexp(1.0, -k); }

Samples tabulate(const TimeGrid& g, const std::function<double(double)>& f) {
  Samples s{g, {}};
  for (double t : g.times()) s.values.push_back(f(t));
  return s;
}

void check_envelope(const DimEstimate& d) {
  CHECK(d.lower <= d.value + 1e-12);
  CHECK(d.value <= d.upper + 1e-12);
}

}  // namespace

TEST_CASE("flat graph: one box per column") {
  const Samples f = tabulate(TimeGrid(0.0, 1.0, dyadic(12)), [](double) { return 0.0; });
  CHECK(box_count(f, 0.0, 1.0, dyadic(5)) == 32);
}

TEST_CASE("box size below the resolution is rejected") {
  const Samples f = tabulate(TimeGrid(0.0, 1.0, dyadic(8)), [](double t) { return t; });
  CHECK_THROWS_AS(box_count(f, 0.0, 1.0, dyadic(9)), ScaleError);
  CHECK_THROWS_AS(pbox_count(f, 0.0, 1.0, 0.5, dyadic(5)), ScaleError);
  CHECK_THROWS_AS(box_count(f, 0.5, 1.5, dyadic(4)), SupportError);
}

TEST_CASE("line has dimension 1") {
  const Samples f = tabulate(TimeGrid(0.0, 1.0, dyadic(12)), [](double t) { return t; });
  ScaleTable tab;
  for (int j = 4; j <= 10; ++j) {
    tab.deltas.push_back(dyadic(j));
    tab.counts.push_back(box_count(f, 0.0, 1.0, dyadic(j)));
  }
  const DimEstimate d = fit_scale_table(tab);
  CHECK(std::abs(d.value - 1.0) <= 0.05);
  check_envelope(d);
}

TEST_CASE("smooth function has local dimension 1") {
  const Samples f = tabulate(TimeGrid(0.0, 1.0, dyadic(14)), [](double t) { return std::sin(6.0 * t) + t * t; });
  const DimEstimate d = est_boxdim_local(f, 0.5);
  CHECK(std::abs(d.value - 1.0) <= 0.05);
  check_envelope(d);
}

TEST_CASE("Weierstrass graph, h = 0.4, lambda = 2") {
  const Samples f = weierstrass_graph(TimeGrid(0.0, 1.0, dyadic(20)), 0.4, 2.0);
  const DimEstimate d = est_boxdim_local(f, 0.5, 0.1, {4, 13});
  CHECK(std::abs(d.value - 1.6) <= 0.1);
  check_envelope(d);
}

TEST_CASE("fbm graph, h = 0.3") {
  const TimeGrid g(0.0, 1.0, dyadic(18));
  double mean = 0.0;
  const int n = 4;
  for (int s = 0; s < n; ++s) {
    const FbmPath p = gen_fbm(g, 0.3, 40 + s);
    const DimEstimate d = est_boxdim_local(p.samples(), 0.5, 0.1, {7, 13});
    check_envelope(d);
    CHECK(d.value >= 1.0);
    CHECK(d.value <= 2.0);
    mean += d.value / n;
  }
  CHECK(std::abs(mean - 1.7) <= 0.15);
}

TEST_CASE("chirp local box dimension at 0") {
  const Samples f = build_chirp(0.5, 1.0).sample(TimeGrid(-1.0, 1.0, dyadic(16)));
  const DimEstimate d = est_boxdim_local(f, 0.0, 0.5, {4, 14});
  CHECK(std::abs(d.value - 1.25) <= 0.1);
}

TEST_CASE("counts are nonincreasing in the box size") {
  const TimeGrid g(0.0, 1.0, dyadic(14));
  for (std::uint64_t s = 0; s < 5; ++s) {
    const FbmPath p = gen_fbm(g, 0.2 + 0.15 * static_cast<double>(s), s);
    long prev = 0, pprev = 0;
    for (int j = 1; j <= 13; ++j) {
      const long n = box_count(p.samples(), 0.0, 1.0, dyadic(j));
      CHECK(n >= prev);
      prev = n;
    }
    for (int j = 1; j <= 6; ++j) {
      const long n = pbox_count(p.samples(), 0.0, 1.0, 0.5, dyadic(j));
      CHECK(n >= pprev);
      pprev = n;
    }
  }
}

TEST_CASE("parabolic counting") {
  SUBCASE("horizontal segment under h = 0.5") {
    const Samples f = tabulate(TimeGrid(-1.0, 1.0, dyadic(16)), [](double) { return 0.0; });
    const DimEstimate d = est_pboxdim_local(f, 0.0, 0.5, 0.5);
    CHECK(std::abs(d.value - 2.0) <= 0.1);
  }
  SUBCASE("fbm graphs") {
    const TimeGrid g(0.0, 1.0, dyadic(16));
    double a = 0.0, b = 0.0;
    const int n = 4;
    for (int s = 0; s < n; ++s) {
      a += est_pboxdim_local(gen_fbm(g, 0.3, 70 + s).samples(), 0.5, 0.25, 0.6, 8, 16.0).value / n;
      b += est_pboxdim_local(gen_fbm(g, 0.7, 80 + s).samples(), 0.5, 0.25, 0.5, 8, 16.0).value / n;
    }
    CHECK(std::abs(a - (1.0 + 0.7 / 0.6)) <= 0.2);
    CHECK(std::abs(b - 2.0) <= 0.2);
  }
  CHECK_THROWS_AS(pbox_count(tabulate(TimeGrid(0.0, 1.0, dyadic(8)), [](double t) { return t; }), 0.0, 1.0, 1.5, 0.1),
                  DomainError);
}

TEST_CASE("level sets") {
  SUBCASE("monotone function crosses once") {
    const Samples f = tabulate(TimeGrid(0.0, 1.0, dyadic(14)), [](double t) { return t - 0.3; });
    const DimEstimate d = level_set_boxdim(f, 0.0, 0.0, 1.0);
    CHECK_FALSE(d.empty);
    CHECK(std::abs(d.value) <= 1e-9);
  }
  SUBCASE("level never attained") {
    const Samples f = tabulate(TimeGrid(0.0, 1.0, dyadic(14)), [](double t) { return t; });
    const DimEstimate d = level_set_boxdim(f, 5.0, 0.0, 1.0);
    CHECK(d.empty);
    CHECK(d.value == 0.0);
  }
  SUBCASE("Brownian zero set") {
    const TimeGrid g(-1.0, 1.0, dyadic(16));
    double mean = 0.0;
    const int n = 8;
    for (int s = 0; s < n; ++s) {
      const BrownianPath bm = gen_brownian(g, 500 + s);
      mean += level_set_boxdim(bm.samples(), 0.0, 0.0, 1.0, {4, 12}).value / n;
    }
    CHECK(std::abs(mean - 0.5) <= 0.15);
  }
}

TEST_CASE("graph dimension predictions") {
  CHECK(predict_boxdim_graph(0.6, 1.0) == doctest::Approx(1.4));
  CHECK(predict_boxdim_graph(0.6, 1.7) == doctest::Approx(1.7));
  CHECK(predict_boxdim_graph(1.0, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(predict_boxdim_graph(0.5, 2.5), DomainError);

  CHECK(predict_hausdim_graph(0.6, 1.0 / 0.6) == doctest::Approx(1.4));
  CHECK(predict_hausdim_graph(0.6, 1.0) == doctest::Approx(1.0));
  CHECK(predict_hausdim_graph(0.6, std::max(1.0 / 0.6, 1.0 + 0.7 / 0.6)) == doctest::Approx(1.7));

  CHECK(predict_image_dim(0.5 / 0.6) == doctest::Approx(0.8333).epsilon(1e-3));
  CHECK(predict_image_dim(0.2 / 0.3) == doctest::Approx(0.6667).epsilon(1e-3));
  CHECK(predict_image_dim(0.6 / 0.5) == doctest::Approx(1.0));
}

TEST_CASE("parabolic transfer bounds") {
  const Bounds seg = parabolic_transfer_bounds(2.0, 0.8, 0.5);
  CHECK(seg.lower == doctest::Approx(1.25));
  CHECK(seg.upper == doctest::Approx(1.625));
  CHECK(seg.lower <= 1.0 / 0.8 + 1e-12);
  CHECK(seg.upper >= 1.0 / 0.8);
  CHECK(parabolic_transfer_bounds(1.0, 0.8, 0.5).upper == doctest::Approx(1.0));
  const Bounds lim = parabolic_transfer_bounds(1.7, 0.6 + 1e-9, 0.6);
  CHECK(lim.lower == doctest::Approx(1.7));
  CHECK(lim.upper == doctest::Approx(1.7));
  CHECK_THROWS_AS(parabolic_transfer_bounds(1.5, 0.5, 0.6), DomainError);
}

TEST_CASE("dimension bounds from the frontier") {
  const FrontierDimBounds c = dim_bounds_from_frontier(0.75, std::numeric_limits<double>::infinity());
  CHECK(c.box_upper == doctest::Approx(1.25));
  CHECK(c.haus_upper == doctest::Approx(1.0));
  CHECK(dim_bounds_from_frontier(0.3, 0.3).box_upper == doctest::Approx(1.7));
}

TEST_CASE("box estimates respect the frontier bound on calibration targets") {
  const Samples chirp = build_chirp(0.5, 1.0).sample(TimeGrid(-1.0, 1.0, dyadic(16)));
  const FrontierCurve cc = est_frontier(chirp, 0.0);
  const DimEstimate d = est_boxdim_local(chirp, 0.0, 0.5, {4, 14});
  CHECK(d.value <= dim_bounds_from_frontier(cc.at(1.0), cc.sigma.back()).box_upper + 0.15);

  const Samples fbm = gen_fbm(TimeGrid(0.0, 1.0, dyadic(16)), 0.3, 9).samples();
  const FrontierCurve fc = est_frontier(fbm, 0.5);
  CHECK(est_boxdim_local(fbm, 0.5).value <= dim_bounds_from_frontier(fc.at(1.0), fc.sigma.back()).box_upper + 0.15);
}
