#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "msa/metrics/judgments.hpp"

namespace msa::metrics {

struct DegenerateVarianceError : std::runtime_error {
  DegenerateVarianceError()
      : std::runtime_error("mean_r2 needs >= 3 points with nonzero variance on both axes") {}
};

// Ten equal buckets over [0, 100]; bucket i covers [10i, 10(i+1)), with 100
// assigned to bucket 9.
struct Histogram10 {
  std::array<std::uint64_t, 10> counts{};
  std::uint64_t total = 0;

  std::array<double, 10> normalized() const {
    std::array<double, 10> out{};
    for (int i = 0; i < 10; ++i) out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return out;
  }
};

inline Histogram10 bucketize(const std::vector<double>& samples) {
  Histogram10 h;
  for (double s : samples) {
    if (!(s >= 0.0 && s <= 100.0)) throw OutOfRangeError(s);
    int bucket = s >= 100.0 ? 9 : static_cast<int>(s / 10.0);
    ++h.counts[bucket];
    ++h.total;
  }
  return h;
}

// W1 between normalized histograms with bucket centers 5, 15, ..., 95:
// 10 * sum_i |CDF_a(i) - CDF_b(i)|.
inline double wasserstein(const Histogram10& a, const Histogram10& b) {
  if (a.total == 0 || b.total == 0) throw std::runtime_error("wasserstein needs non-empty histograms");
  auto pa = a.normalized();
  auto pb = b.normalized();
  double cdf_a = 0, cdf_b = 0, distance = 0;
  for (int i = 0; i < 10; ++i) {
    cdf_a += pa[i];
    cdf_b += pb[i];
    distance += std::abs(cdf_a - cdf_b);
  }
  return 10.0 * distance;
}

// 0.5 * L1 between normalized histograms.
inline double tvd(const Histogram10& a, const Histogram10& b) {
  if (a.total == 0 || b.total == 0) throw std::runtime_error("tvd needs non-empty histograms");
  auto pa = a.normalized();
  auto pb = b.normalized();
  double total = 0;
  for (int i = 0; i < 10; ++i) total += std::abs(pa[i] - pb[i]);
  return 0.5 * total;
}

// Squared Pearson correlation between two equal-length lists of means.
inline double mean_r2(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw DegenerateVarianceError();
  double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0 || syy == 0) throw DegenerateVarianceError();
  double r = sxy / std::sqrt(sxx * syy);
  return r * r;
}

inline double mean_of(const std::vector<double>& xs) {
  double total = 0;
  for (double x : xs) total += x;
  return xs.empty() ? 0.0 : total / static_cast<double>(xs.size());
}

}  // namespace msa::metrics
