#pragma once

#include <cstdint>
#include <random>

namespace mbm {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of the index-th independent stream under a master seed.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

class NormalStream {
 public:
  NormalStream(std::uint64_t master, std::uint64_t index) : eng_(stream_seed(master, index)) {}
  double operator()() { return dist_(eng_); }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> dist_;
};

}  // namespace mbm
