#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mbm/field.hpp"

namespace mbm::detail {

// Read-only view of a path on a uniform grid, linearly interpolated.
struct PathRef {
  const double* y = nullptr;
  std::size_t n = 0;
  double u0 = 0.0;
  double h = 1.0;

  double u(std::size_t i) const { return u0 + static_cast<double>(i) * h; }
  double u_end() const { return u(n - 1); }
  // Index of u when u is a grid node.
  bool node_index(double u, std::size_t& i) const {
    const double k = (u - u0) / h;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-9 || r < 0.0 || r > static_cast<double>(n - 1)) return false;
    i = static_cast<std::size_t>(r);
    return true;
  }
  double value(double u) const {
    std::size_t i;
    if (node_index(u, i)) return y[i];
    const double k = (u - u0) / h;
    if (k <= 0.0) return y[0];
    auto j = static_cast<std::size_t>(std::floor(k));
    if (j >= n - 1) return y[n - 1];
    const double w = k - static_cast<double>(j);
    return y[j] + w * (y[j + 1] - y[j]);
  }
};

// u -> -L(-u) on the mirrored grid.
struct Reflected {
  std::vector<double> y;
  PathRef ref;
  explicit Reflected(const PathRef& p) : y(p.n) {
    for (std::size_t k = 0; k < p.n; ++k) y[k] = -p.y[p.n - 1 - k];
    ref = PathRef{y.data(), p.n, -p.u_end(), p.h};
  }
};

inline PathRef view(const BrownianPath& bm) {
  return PathRef{bm.values.data(), bm.values.size(), bm.grid.t_min(), bm.grid.step()};
}

// int_wa^wb (L(c + dir w) - s(w)) w^p dw with s = sub for w < ws, 0 beyond.
double one_sided(const PathRef& L, double c, int dir, double wa, double wb, double p,
                 double sub = 0.0, double ws = 0.0);
// int_0^delta (L(c - w) - L(c + w)) w^p dw
double paired(const PathRef& L, double c, double delta, double p);

// int_X^inf w^p - int_Y^inf w^p
double tail_diff(double x, double y, double p);

double plus_field(const PathRef& L, double t, double h, double U, double delta);

}  // namespace mbm::detail
