#include "mbm/suites.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mbm/errors.hpp"
#include "mbm/field.hpp"
#include "mbm/fractal.hpp"
#include "mbm/gauss.hpp"
#include "mbm/hurst.hpp"
#include "mbm/noise.hpp"
#include "mbm/parallel.hpp"
#include "mbm/pipelines.hpp"
#include "mbm/regularity.hpp"
#include "mbm/rng.hpp"

namespace mbm {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double dyadic(int k) { return std::ldexp(1.0, -k); }

QuadratureConfig with_truncation(double U) {
  QuadratureConfig q;
  q.truncation = U;
  return q;
}

ReportRecord record(const std::string& name, const SuiteContext& ctx, std::vector<Check> rows) {
  ReportRecord r;
  r.name = name;
  r.rows = std::move(rows);
  r.seed = ctx.seed;
  r.config = {{"suite", name}, {"seed", ctx.seed}};
  r.config_hash = hash_json(r.config);
  return r;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

// max |sigma_hat - theory| over s' in [lo, hi]
double frontier_error(const FrontierCurve& c, const std::function<double(double)>& theory, double lo, double hi) {
  double w = 0.0;
  for (std::size_t k = 0; k < c.sprime.size(); ++k)
    if (c.sprime[k] >= lo - 1e-12 && c.sprime[k] <= hi + 1e-12)
      w = std::max(w, std::abs(c.sigma[k] - std::min(theory(c.sprime[k]), c.cap)));
  return w;
}

// Fresh fBm-sample Hurst function on [0, 1].
HurstFunction fbm_hurst(double a, double lo, double hi, double step, std::uint64_t seed) {
  const FbmPath path = gen_fbm(TimeGrid(0.0, 1.0, step), a, seed);
  return build_hurst(HurstKind::fbm_sample, {{"lo", lo}, {"hi", hi}}, &path);
}

const std::vector<double> kProbes{0.2, 0.35, 0.5, 0.65, 0.8};

// ---------------------------------------------------------------------------

ReportRecord representation_equivalence(const SuiteContext& ctx) {
  const BrownianPath fine = gen_brownian(TimeGrid(-21.0, 21.0, dyadic(13)), stream_seed(ctx.seed, 0));
  const QuadratureConfig q = with_truncation(21.0);
  const TimeGrid probe(0.0, 1.0, dyadic(7));
  std::vector<Check> rows;
  for (double h : {0.3, 0.7}) {
    const HurstFunction H = build_hurst(HurstKind::constant, {{"h", h}});
    double err[2];
    for (int f : {2, 1}) {
      const BrownianPath bm = f == 1 ? fine : coarsen(fine, f);
      const MbmPath X = mbm_sample(TimeGrid(0.0, 1.0, bm.grid.step()), H, 1.0, 0.0, bm, q);
      const MbmPath O = mbm_stochint_oracle(probe, H, 1.0, 0.0, bm);
      double e = 0.0, m = 0.0;
      for (std::size_t i = 0; i < probe.size(); ++i) {
        e = std::max(e, std::abs(X.samples().value_at(probe.at(i)) - O.values[i]));
        m = std::max(m, std::abs(O.values[i]));
      }
      err[f - 1] = e / m;
    }
    rows.push_back(at_most("h=" + fmt(h) + " sup relative error at step 2^-13", 0.05, err[0]));
    rows.push_back(below("h=" + fmt(h) + " error at 2^-13 below error at 2^-12", err[1], err[0]));
  }
  return record("representation-equivalence", ctx, rows);
}

ReportRecord half_collapse(const SuiteContext& ctx) {
  const BrownianPath bm = gen_brownian(TimeGrid(-21.0, 21.0, dyadic(10)), stream_seed(ctx.seed, 0));
  const QuadratureConfig q = with_truncation(21.0);
  double ep = 0.0, em = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double t = -1.0 + 2.0 * (k + 0.5) / 100.0;
    const double b = bm.value_at(t);
    ep = std::max(ep, std::abs(fbf_eval(Side::plus, t, 0.5, bm, q) - b));
    em = std::max(em, std::abs(fbf_eval(Side::minus, t, 0.5, bm, q) + b));
  }
  return record("half-collapse", ctx,
                {near("max |B+(t,1/2) - B_t| over 100 points", 0.0, ep, 1e-10),
                 near("max |B-(t,1/2) + B_t| over 100 points", 0.0, em, 1e-10)});
}

ReportRecord anchor_independence(const SuiteContext& ctx) {
  const BrownianPath bm = gen_brownian(TimeGrid(-21.0, 21.0, dyadic(10)), stream_seed(ctx.seed, 0));
  QuadratureConfig q1 = with_truncation(21.0), q2 = q1;
  q2.anchor_offset = 2.0 * q1.anchor_offset;
  std::vector<Check> rows;
  for (double h : {0.2, 0.4}) {
    double worst = 0.0;
    for (Side side : {Side::plus, Side::minus})
      for (double t : {-0.5, 0.25, 0.5, 1.0}) {
        const double a = fbf_eval(side, t, h, bm, q1), b = fbf_eval(side, t, h, bm, q2);
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
      }
    rows.push_back(at_most("h=" + fmt(h) + " relative change when the anchor offset doubles", 1e-8, worst));
  }
  return record("anchor-independence", ctx, rows);
}

ReportRecord well_balanced(const SuiteContext& ctx) {
  std::vector<Check> rows;
  {
    const BrownianPath bm = gen_brownian(TimeGrid(-21.0, 21.0, dyadic(13)), stream_seed(ctx.seed, 0));
    const QuadratureConfig q = with_truncation(21.0);
    const std::vector<double> ts{0.25, 0.5, 0.75, 1.0};
    double e = 0.0, m = 0.0;
    for (double t : ts) {
      const double wb = fbf_wb(t, 0.7, bm, q);
      const double alt = (fbf_eval(Side::plus, t, 0.7, bm, q) + fbf_eval(Side::minus, t, 0.7, bm, q)) / 0.2;
      e = std::max(e, std::abs(wb - alt));
      m = std::max(m, std::abs(wb));
    }
    rows.push_back(at_most("h=0.7 wb vs (B+ + B-)/(h - 1/2), relative", 1e-8, e / m));
    const auto rel = verify_wb_relation(ts, 0.7, bm, q);
    double gap = 0.0, lhs = 0.0;
    for (const auto& r : rel) {
      gap = std::max(gap, r.gap);
      lhs = std::max(lhs, std::abs(r.lhs));
    }
    rows.push_back(at_most("h=0.7 tilde-field relation gap, relative", 0.1, gap / lhs));
  }
  {
    const std::vector<double> probes{0.5, 0.75, 1.0};
    const TimeGrid ng(-21.0, 21.0, dyadic(10));
    const QuadratureConfig q = with_truncation(21.0);
    std::vector<std::vector<double>> rows_x(500);
    parallel_for(rows_x.size(), ctx.workers, [&](std::size_t k) {
      const BrownianPath bm = gen_brownian(ng, stream_seed(ctx.seed, 100 + k));
      for (double t : probes) rows_x[k].push_back(fbf_wb(t, 0.5, bm, q));
    });
    const CovMatrix C = empirical_cov(rows_x, probes);
    std::vector<double> ratios;
    for (std::size_t i = 0; i < probes.size(); ++i)
      for (std::size_t j = i; j < probes.size(); ++j) ratios.push_back(C.entries(i, j) / std::min(probes[i], probes[j]));
    const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
    rows.push_back(at_most("h=1/2 spread of cov(s,t)/min(s,t), 500 seeds", 0.1, (*mx - *mn) / mean(ratios)));
  }
  return record("well-balanced", ctx, rows);
}

ReportRecord chirp_calibration(const SuiteContext& ctx) {
  const ChirpFunction ch = build_chirp(0.5, 1.0);
  const Samples f = ch.sample(TimeGrid(-1.0, 1.0, dyadic(16)));
  const FrontierCurve c = est_frontier(f, 0.0);
  const double err = frontier_error(c, [&](double s) { return ch.frontier_at_zero(s); }, -0.5, 1.0);
  const DimEstimate box = est_boxdim_local(f, 0.0, 0.5, {4, 14});
  const FrontierDimBounds b = dim_bounds_from_frontier(c.at(1.0), c.sigma.back());
  return record("chirp-calibration", ctx,
                {at_most("max |sigma_hat - (s'+0.5)/2| on [-0.5, 1]", 0.1, err),
                 near("local box dimension at 0", ch.boxdim_at_zero(), box.value, 0.1),
                 near("box-dimension bound from sigma_hat(1) vs estimate", box.value, b.box_upper, 0.1),
                 near("Hausdorff bound from sigma_hat(+inf) vs dim 1", ch.hausdim(), b.haus_upper, 0.1)});
}

ReportRecord fbm_regularity(const SuiteContext& ctx) {
  const int n = 5;
  const double h = 0.3, t = 0.5;
  const TimeGrid grid(0.0, 1.0, dyadic(16));
  const auto theory = [h](double s) { return std::min(h + s, h); };
  std::vector<double> pw(n), loc(n), dpw(n), dloc(n);
  std::vector<std::vector<double>> sig(n), dsig(n);
  std::vector<double> sprime;
  parallel_for(n, ctx.workers, [&](std::size_t k) {
    const FbmPath f = gen_fbm(grid, h, stream_seed(ctx.seed, k));
    const ExponentEstimate e = est_exponents(f.samples(), t);
    pw[k] = e.pointwise;
    loc[k] = e.local;
    sig[k] = est_frontier(f.samples(), t).sigma;

    const BrownianPath bm = gen_brownian(TimeGrid(-2.0, 2.0, dyadic(16)), stream_seed(ctx.seed, 100 + k));
    const QuadratureConfig q = with_truncation(2.0);
    const FieldEngine engine(bm, q, 0.0, 1.0);
    const Samples d{engine.out_grid(), engine.partial(Side::plus, h, 1, q.fd_step)};
    const ExponentEstimate de = est_exponents(d, t);
    dpw[k] = de.pointwise;
    dloc[k] = de.local;
    dsig[k] = est_frontier(d, t).sigma;
  });
  FrontierCurve mc, md;
  mc.sprime = md.sprime = default_sprime_grid();
  for (std::size_t j = 0; j < mc.sprime.size(); ++j) {
    double a = 0.0, b = 0.0;
    for (int k = 0; k < n; ++k) {
      a += sig[k][j] / n;
      b += dsig[k][j] / n;
    }
    mc.sigma.push_back(a);
    md.sigma.push_back(b);
  }
  return record("fbm-regularity", ctx,
                {near("fBm pointwise exponent", h, mean(pw), 0.1), near("fBm local exponent", h, mean(loc), 0.1),
                 at_most("fBm frontier max error on [-0.5, 1]", 0.1, frontier_error(mc, theory, -0.5, 1.0)),
                 near("dB/dH pointwise exponent", h, mean(dpw), 0.1),
                 near("dB/dH local exponent", h, mean(dloc), 0.1),
                 at_most("dB/dH frontier max error on [-0.5, 1]", 0.1, frontier_error(md, theory, -0.5, 1.0))});
}

ReportRecord irregular_frontier(const SuiteContext& ctx) {
  const int n = 10;
  const double a = 0.375;
  const TimeGrid grid(0.0, 1.0, dyadic(16));
  const std::size_t P = kProbes.size();
  std::vector<std::vector<double>> ferr(n, std::vector<double>(P)), pw(n, std::vector<double>(P)),
      mult(n, std::vector<double>(P));
  parallel_for(n, ctx.workers, [&](std::size_t k) {
    const HurstFunction H = fbm_hurst(a, 0.5, 0.75, dyadic(16), stream_seed(ctx.seed, 1000 + k));
    const BrownianPath bm = gen_brownian(TimeGrid(-2.0, 2.0, dyadic(16)), stream_seed(ctx.seed, k));
    const QuadratureConfig q = with_truncation(2.0);
    const MbmPath X = mbm_sample(grid, H, 1.0, 0.0, bm, q);
    for (std::size_t j = 0; j < P; ++j) {
      const double t = kProbes[j], Ht = H(t);
      mult[k][j] = detect_multiplicity(
          [&](int order) { return fbf_partial(Side::plus, t, Ht, order, bm, q); }, 1.0);
      const FrontierCurve c = est_frontier(X.samples(), t);
      const auto pred = predict_frontier_mbm(Ht, [&](double s) { return H.meta().frontier(t, s); },
                                             static_cast<int>(mult[k][j]), c.sprime);
      double w = 0.0;
      for (std::size_t i = 0; i < c.sprime.size(); ++i) w = std::max(w, std::abs(c.sigma[i] - pred.lower.sigma[i]));
      ferr[k][j] = w;
      pw[k][j] = est_exponents(X.samples(), t).pointwise;
    }
  });
  std::vector<Check> rows;
  for (std::size_t j = 0; j < P; ++j) {
    std::vector<double> fe, pe, me;
    for (int k = 0; k < n; ++k) {
      fe.push_back(ferr[k][j]);
      pe.push_back(pw[k][j]);
      me.push_back(mult[k][j]);
    }
    const std::string at = "t=" + fmt(kProbes[j]);
    rows.push_back(near(at + " mean estimated multiplicity", 1.0, mean(me), 0.0));
    rows.push_back(at_most(at + " mean max frontier error", 0.15, mean(fe)));
    rows.push_back(near(at + " mean pointwise exponent", a, mean(pe), 0.1));
  }
  return record("irregular-frontier", ctx, rows);
}

// mBm with fBm-sample Hurst function (a = 0.3, range [0.5, 0.9]) on [0, 1].
struct Example4 {
  Samples X;
  HurstFunction H;
};

Example4 example4(std::uint64_t seed, std::size_t k, int res) {
  HurstFunction H = fbm_hurst(0.3, 0.5, 0.9, dyadic(res), stream_seed(seed, 2000 + k));
  const BrownianPath bm = gen_brownian(TimeGrid(-2.0, 2.0, dyadic(res)), stream_seed(seed, 3000 + k));
  const MbmPath X = mbm_sample(TimeGrid(0.0, 1.0, dyadic(res)), H, 1.0, 0.0, bm, with_truncation(2.0));
  return {X.samples(), std::move(H)};
}

ReportRecord graph_boxdim(const SuiteContext& ctx) {
  const int n = 10, res = 18;
  const std::size_t P = kProbes.size();
  std::vector<std::vector<double>> est(n, std::vector<double>(P)), pred(n, std::vector<double>(P));
  parallel_for(n, ctx.workers, [&](std::size_t k) {
    const Example4 ex = example4(ctx.seed, k, res);
    for (std::size_t j = 0; j < P; ++j) {
      est[k][j] = est_boxdim_local(ex.X, kProbes[j], 0.1, {7, 13}).value;
      pred[k][j] = predict_boxdim_graph(ex.H(kProbes[j]), 2.0 - 0.3);
    }
  });
  std::vector<Check> rows;
  for (std::size_t j = 0; j < P; ++j) {
    double e = 0.0, p = 0.0;
    for (int k = 0; k < n; ++k) {
      e += est[k][j] / n;
      p += pred[k][j] / n;
    }
    rows.push_back(near("t=" + fmt(kProbes[j]) + " local box dimension", p, e, 0.15));
  }
  return record("graph-boxdim", ctx, rows);
}

ReportRecord parabolic(const SuiteContext& ctx) {
  std::vector<Check> rows;
  const TimeGrid grid(0.0, 1.0, dyadic(16));
  const Samples segment{grid, std::vector<double>(grid.size(), 0.0)};
  for (double h : {0.3, 0.5, 0.7})
    rows.push_back(near("segment slope under h=" + fmt(h), 1.0 / h, est_pboxdim_local(segment, 0.5, 0.25, h).value, 0.1));

  struct Case {
    double alpha, h;
  };
  for (Case c : {Case{0.3, 0.6}, Case{0.7, 0.5}}) {
    const int n = 8;
    std::vector<double> v(n);
    parallel_for(n, ctx.workers, [&](std::size_t k) {
      const FbmPath f = gen_fbm(grid, c.alpha, stream_seed(ctx.seed, 4000 + k));
      v[k] = est_pboxdim_local(f.samples(), 0.5, 0.25, c.h, 8, 16.0).value;
    });
    rows.push_back(near("fBm(" + fmt(c.alpha) + ") graph under h=" + fmt(c.h), std::max(1.0 / c.h, 1.0 + (1.0 - c.alpha) / c.h),
                        mean(v), 0.2));
  }

  Samples line{grid, grid.times()};
  const Samples weier = weierstrass_graph(grid, 0.4, 2.0);
  const double H1 = 0.8, H2 = 0.5;
  for (const auto& [name, f] : {std::pair<std::string, const Samples*>{"segment", &segment},
                                {"line", &line},
                                {"Weierstrass", &weier}}) {
    const double d2 = est_pboxdim_local(*f, 0.5, 0.25, H2).value;
    const double d1 = est_pboxdim_local(*f, 0.5, 0.25, H1).value;
    const Bounds b = parabolic_transfer_bounds(d2, H1, H2);
    rows.push_back(within(name + " transfer sandwich", b.lower - 0.1, b.upper + 0.1, d1));
  }

  const int n = 5;
  const std::size_t P = kProbes.size();
  std::vector<std::vector<double>> haus(n, std::vector<double>(P)), box(n, std::vector<double>(P));
  parallel_for(n, ctx.workers, [&](std::size_t k) {
    const Example4 ex = example4(ctx.seed, k, 16);
    Samples hg{ex.X.grid, std::vector<double>(ex.X.grid.size())};
    for (std::size_t i = 0; i < hg.values.size(); ++i) hg.values[i] = ex.H(hg.grid.at(i));
    for (std::size_t j = 0; j < P; ++j) {
      const double t = kProbes[j], Ht = ex.H(t);
      haus[k][j] = predict_hausdim_graph(Ht, est_pboxdim_local(hg, t, 0.1, Ht).value);
      box[k][j] = est_boxdim_local(ex.X, t, 0.1, {6, 13}).value;
    }
  });
  for (std::size_t j = 0; j < P; ++j) {
    double hsum = 0.0, bsum = 0.0;
    for (int k = 0; k < n; ++k) {
      hsum += haus[k][j] / n;
      bsum += box[k][j] / n;
    }
    rows.push_back(near("t=" + fmt(kProbes[j]) + " Hausdorff prediction vs box estimate", bsum, hsum, 0.2));
  }
  return record("parabolic", ctx, rows);
}

ReportRecord jump_law(const SuiteContext& ctx) {
  const int n = 500;
  const std::vector<double> dh{0.05, 0.1, 0.2};
  const TimeGrid ng(-21.0, 21.0, dyadic(10));
  const QuadratureConfig q = with_truncation(21.0);
  std::vector<HurstFunction> hs;
  for (double d : dh)
    hs.push_back(HurstFunction::from_samples({-1e6, 0.5, 0.5, 1e6}, {0.5 - d / 2, 0.5 - d / 2, 0.5 + d / 2, 0.5 + d / 2}));
  std::vector<std::vector<double>> jumps(n, std::vector<double>(dh.size()));
  parallel_for(n, ctx.workers, [&](std::size_t k) {
    const BrownianPath bm = gen_brownian(ng, stream_seed(ctx.seed, k));
    for (std::size_t j = 0; j < dh.size(); ++j) jumps[k][j] = mbm_jump(0.5, hs[j], 1.0, 0.0, bm, q);
  });
  const CovMatrix C = empirical_cov(jumps, dh);
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < dh.size(); ++j) {
    lx.push_back(std::log(dh[j]));
    ly.push_back(std::log(C.entries(j, j)));
  }
  return record("jump-law", ctx, {near("log Var(jump) vs log dH slope", 2.0, least_squares(lx, ly).slope, 0.2)});
}

ReportRecord lnd_optimality(const SuiteContext& ctx) {
  EnsembleConfig cfg;
  cfg.master_seed = ctx.seed;
  cfg.seeds = 1000;
  cfg.noise_half_width = 4.0;
  cfg.noise_step = dyadic(10);
  cfg.workers = ctx.workers;
  std::vector<double> radii, radii_chirp;
  for (int k = 2; k <= 7; ++k) radii.push_back(dyadic(k));
  for (int k = 3; k <= 7; ++k) radii_chirp.push_back(dyadic(k));
  std::vector<Check> rows;
  for (double h : {0.3, 0.7}) {
    const LndResult r = lnd_slope(build_hurst(HurstKind::constant, {{"h", h}}), 1.0, radii, cfg);
    rows.push_back(near("constant h=" + fmt(h) + " conditional variance slope", 2.0 * h, r.slope, 0.3));
  }
  const HurstFunction H = build_hurst(HurstKind::chirp_hurst, {{"c", 1.0}});
  const LndResult r = lnd_slope(H, 1.0, radii_chirp, cfg);
  rows.push_back(at_most("oscillating H, level-matching slope vs 2H(t)", 2.0 * H(1.0), r.slope, 0.3));
  return record("lnd-optimality", ctx, rows);
}

ReportRecord level_sets(const SuiteContext& ctx) {
  const int n = 10;
  const double h = 0.3, t = 0.5;
  const TimeGrid grid(0.0, 1.0, dyadic(16));
  std::vector<double> bz(n), mz(n);
  const HurstFunction H = build_hurst(HurstKind::constant, {{"h", h}});
  parallel_for(n, ctx.workers, [&](std::size_t k) {
    const BrownianPath b = gen_brownian(grid, stream_seed(ctx.seed, k));
    bz[k] = level_set_boxdim(b.samples(), 0.0, 0.0, 1.0).value;
    const BrownianPath bm = gen_brownian(TimeGrid(-2.0, 2.0, dyadic(16)), stream_seed(ctx.seed, 500 + k));
    const MbmPath X = mbm_sample(grid, H, 1.0, 0.0, bm, with_truncation(2.0));
    mz[k] = level_set_boxdim(X.samples(), X.samples().value_at(t), 0.0, 1.0).value;
  });
  const double alpha_tilde = std::numeric_limits<double>::infinity();
  return record("level-sets", ctx,
                {near("Brownian zero set", 0.5, mean(bz), 0.15),
                 within("constant-H mBm level set through X_t", 1.0 - h - 0.15, 1.0 - std::min(h, alpha_tilde) + 0.15,
                        mean(mz))});
}

}  // namespace

const std::vector<SuiteInfo>& suite_registry() {
  static const std::vector<SuiteInfo> reg{
      {"representation-equivalence", 1, "quadrature vs stochastic-integral oracle", representation_equivalence},
      {"half-collapse", 2, "H = 1/2 fields reduce to the Brownian path", half_collapse},
      {"anchor-independence", 3, "results do not depend on the split point", anchor_independence},
      {"well-balanced", 4, "well-balanced field identities", well_balanced},
      {"chirp-calibration", 5, "deterministic chirp frontier and dimension", chirp_calibration},
      {"fbm-regularity", 6, "fBm and dB/dH exponents and frontier", fbm_regularity},
      {"irregular-frontier", 7, "mBm with rough Hurst function", irregular_frontier},
      {"graph-boxdim", 8, "graph box dimension of mBm", graph_boxdim},
      {"parabolic", 9, "parabolic box counting and transfer bounds", parabolic},
      {"jump-law", 10, "jump variance scales like the squared Hurst jump", jump_law},
      {"lnd-optimality", 11, "conditional variance exponents", lnd_optimality},
      {"level-sets", 12, "level-set dimensions", level_sets},
  };
  return reg;
}

ReportRecord verify_suite(const std::string& name, const SuiteContext& ctx) {
  for (const auto& s : suite_registry())
    if (s.name == name) return s.run(ctx);
  std::string list;
  for (const auto& s : suite_registry()) list += (list.empty() ? "" : ", ") + s.name;
  throw ConfigError("suite", "unknown suite '" + name + "'; available: " + list);
}

}  // namespace mbm
