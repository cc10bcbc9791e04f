#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gplab/common.hpp"

namespace gplab {

// Exponentially decaying pair cutoff h(x) = exp(-sqrt(x^2 + l^2)/l) and the
// cumulative cutoffs Theta_k^(n) = exp(-(2^n / l^eps) sum_{i<=k} sum_{j!=i}
// h(x_i - x_j)); Theta = 1 for k <= 0 by convention.
struct CutoffParams {
  double ell = 0.1;
  double eps = 0.5;

  void validate() const {
    if (!(ell > 0.0)) throw std::invalid_argument("CutoffParams: ell must be positive");
    if (!(eps > 0.0) || eps >= 1.0)
      throw std::invalid_argument("CutoffParams: eps must be in (0, 1)");
  }
};

using Point3 = std::array<double, 3>;

inline double cutoff_h(const Point3& a, const Point3& b, double ell) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  const double r2 = dx * dx + dy * dy + dz * dz;
  return std::exp(-std::sqrt(r2 + ell * ell) / ell);
}

// sum_{i<=k} sum_{j!=i} h(x_i - x_j)
inline double cutoff_pair_sum(const std::vector<Point3>& config,
                              const CutoffParams& params, int k) {
  params.validate();
  const int count = int(config.size());
  if (k > count) throw std::invalid_argument("cutoff_pair_sum: k exceeds particle count");
  double s = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < count; ++j)
      if (j != i) s += cutoff_h(config[i], config[j], params.ell);
  return s;
}

inline double cutoff_theta(const std::vector<Point3>& config,
                           const CutoffParams& params, int k, int n_level) {
  if (k <= 0) return 1.0;
  const double s = cutoff_pair_sum(config, params, k);
  const double scale = std::pow(2.0, n_level) / std::pow(params.ell, params.eps);
  return std::exp(-scale * s);
}

}  // namespace gplab
