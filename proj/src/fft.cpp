#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>

#include "mbm/errors.hpp"

namespace mbm::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void forward(std::size_t n, std::vector<double>& in, std::vector<std::complex<double>>& out) {
  fftw_plan p;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                             reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(p);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(p);
}

void backward(std::size_t n, std::vector<std::complex<double>>& in, std::vector<double>& out) {
  fftw_plan p;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    p = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                             out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(p);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(p);
}

}  // namespace

std::size_t good_fft_size(std::size_t n) {
  std::size_t best = 1;
  while (best < n) best <<= 1;
  for (std::size_t p5 = 1; p5 <= best; p5 *= 5)
    for (std::size_t p3 = p5; p3 <= best; p3 *= 3) {
      std::size_t v = p3;
      while (v < n) v <<= 1;
      best = std::min(best, v);
    }
  return best;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t out_len) {
  Convolver c(a, b.size());
  return c.apply(b, out_len);
}

Convolver::Convolver(const std::vector<double>& a, std::size_t max_b_len)
    : size_(good_fft_size(a.size() + max_b_len)), max_b_(max_b_len) {
  std::vector<double> buf(size_, 0.0);
  std::copy(a.begin(), a.end(), buf.begin());
  std::vector<std::complex<double>> s(size_ / 2 + 1);
  forward(size_, buf, s);
  spec_.resize(2 * s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    spec_[2 * k] = s[k].real();
    spec_[2 * k + 1] = s[k].imag();
  }
}

Convolver::~Convolver() = default;

std::vector<double> Convolver::apply(const std::vector<double>& b, std::size_t out_len) const {
  if (b.size() > max_b_) throw Error("convolution operand longer than planned");
  std::vector<double> buf(size_, 0.0);
  std::copy(b.begin(), b.end(), buf.begin());
  std::vector<std::complex<double>> s(size_ / 2 + 1);
  forward(size_, buf, s);
  for (std::size_t k = 0; k < s.size(); ++k)
    s[k] *= std::complex<double>(spec_[2 * k], spec_[2 * k + 1]);
  backward(size_, s, buf);
  const double inv = 1.0 / static_cast<double>(size_);
  out_len = std::min(out_len, size_);
  std::vector<double> out(out_len);
  for (std::size_t k = 0; k < out_len; ++k) out[k] = buf[k] * inv;
  return out;
}

}  // namespace mbm::detail
