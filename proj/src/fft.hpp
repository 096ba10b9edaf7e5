#pragma once

#include <cstddef>
#include <vector>

namespace mbm::detail {

// Smallest 2^a 3^b 5^c >= n.
std::size_t good_fft_size(std::size_t n);

// Linear convolution of a and b, first out_len entries.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t out_len);

// Real sequence with cached forward transform for repeated convolutions.
class Convolver {
 public:
  Convolver(const std::vector<double>& a, std::size_t max_b_len);
  ~Convolver();
  Convolver(const Convolver&) = delete;
  Convolver& operator=(const Convolver&) = delete;
  std::vector<double> apply(const std::vector<double>& b, std::size_t out_len) const;

 private:
  std::size_t size_;
  std::size_t max_b_;
  std::vector<double> spec_;  // interleaved complex
};

}  // namespace mbm::detail
