#include "mbm/noise.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "mbm/errors.hpp"
#include "mbm/rng.hpp"

namespace mbm {

BrownianPath gen_brownian(const TimeGrid& grid, std::uint64_t seed) {
  const std::size_t i0 = grid.origin_index();
  const std::size_t n = grid.size();
  const double sd = std::sqrt(grid.step());
  BrownianPath bm{grid, std::vector<double>(n, 0.0), seed};
  NormalStream up(seed, 0), down(seed, 1);
  for (std::size_t i = i0 + 1; i < n; ++i) bm.values[i] = bm.values[i - 1] + sd * up();
  for (std::size_t i = i0; i-- > 0;) bm.values[i] = bm.values[i + 1] + sd * down();
  return bm;
}

double fbm_cov(double s, double t, double hurst) {
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(s), e) + std::pow(std::abs(t), e) - std::pow(std::abs(t - s), e));
}

namespace {

double fgn_autocov(std::size_t k, double hurst, double step) {
  const double e = 2.0 * hurst;
  const double kk = static_cast<double>(k);
  const double g = std::pow(kk + 1.0, e) - 2.0 * std::pow(kk, e) + std::pow(std::abs(kk - 1.0), e);
  return 0.5 * std::pow(step, e) * g;
}

// Davies-Harte; false when the embedding has significantly negative eigenvalues.
bool circulant_increments(std::size_t m_inc, double hurst, double step, std::uint64_t seed,
                          std::vector<double>& out) {
  const std::size_t m = 2 * m_inc;
  std::vector<double> row(m);
  for (std::size_t k = 0; k <= m_inc; ++k) row[k] = fgn_autocov(k, hurst, step);
  for (std::size_t k = m_inc + 1; k < m; ++k) row[k] = row[m - k];

  std::vector<std::complex<double>> spec(m / 2 + 1);
  fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(m), row.data(),
                                     reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);

  double lmax = 0.0;
  for (const auto& z : spec) lmax = std::max(lmax, z.real());
  std::vector<double> lam(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double l = spec[j <= m / 2 ? j : m - j].real();
    if (l < -1e-10 * lmax) return false;
    lam[j] = std::max(l, 0.0);
  }

  NormalStream z(seed, 0);
  std::vector<std::complex<double>> w(m), x(m);
  const double md = static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double a = z();
    const double b = z();
    w[j] = std::sqrt(lam[j] / md) * std::complex<double>(a, b);
  }
  fftw_plan q = fftw_plan_dft_1d(static_cast<int>(m), reinterpret_cast<fftw_complex*>(w.data()),
                                 reinterpret_cast<fftw_complex*>(x.data()), FFTW_FORWARD,
                                 FFTW_ESTIMATE);
  fftw_execute(q);
  fftw_destroy_plan(q);
  out.resize(m_inc);
  for (std::size_t k = 0; k < m_inc; ++k) out[k] = x[k].real();
  return true;
}

void cholesky_increments(std::size_t m_inc, double hurst, double step, std::uint64_t seed,
                         std::vector<double>& out) {
  const auto n = static_cast<Eigen::Index>(m_inc);
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      c(i, j) = fgn_autocov(static_cast<std::size_t>(std::abs(i - j)), hurst, step);
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) throw SynthesisError("fBm covariance is not positive definite");
  NormalStream z(seed, 0);
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g(i) = z();
  Eigen::VectorXd x = llt.matrixL() * g;
  out.assign(x.data(), x.data() + n);
}

}  // namespace

FbmPath gen_fbm(const TimeGrid& grid, double hurst, std::uint64_t seed, FbmMethod method) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("fBm hurst must lie in (0,1)");
  const std::size_t i0 = grid.origin_index();
  const std::size_t n = grid.size();
  std::vector<double> inc;
  bool done = false;
  if (method != FbmMethod::cholesky)
    done = circulant_increments(n - 1, hurst, grid.step(), seed, inc);
  if (!done) {
    if (method == FbmMethod::circulant) throw SynthesisError("circulant embedding failed");
    cholesky_increments(n - 1, hurst, grid.step(), seed, inc);
  }
  FbmPath path{grid, std::vector<double>(n, 0.0), hurst, seed};
  for (std::size_t i = 1; i < n; ++i) path.values[i] = path.values[i - 1] + inc[i - 1];
  const double shift = path.values[i0];
  for (double& v : path.values) v -= shift;
  path.values[i0] = 0.0;
  return path;
}

BrownianPath coarsen(const BrownianPath& bm, int factor) {
  if (factor < 1) throw GridError("coarsening factor must be positive");
  const std::size_t i0 = bm.grid.origin_index();
  const std::size_t f = static_cast<std::size_t>(factor);
  const std::size_t first = i0 % f;
  const std::size_t count = (bm.grid.size() - 1 - first) / f + 1;
  if (count < 2) throw GridError("coarsened grid has fewer than two points");
  const double step = bm.grid.step() * factor;
  const double t0 = bm.grid.at(first);
  TimeGrid g(t0, t0 + step * static_cast<double>(count - 1), step);
  BrownianPath out{g, std::vector<double>(count), bm.seed};
  for (std::size_t k = 0; k < count; ++k) out.values[k] = bm.values[first + k * f];
  return out;
}

}  // namespace mbm
