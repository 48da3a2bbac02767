#pragma once

// Internal numerical helpers shared across translation units.

#include <cmath>
#include <cstddef>
#include <span>

namespace heatmass::detail {

/// Composite Simpson on uniform samples (3/8 block on the last three panels
/// when the panel count is odd). Requires at least 3 samples.
inline double simpson(std::span<const double> f, double h) {
  const std::size_t m = f.size() - 1;  // panel count
  double s = 0.0;
  std::size_t even_end = m;            // panels handled by plain Simpson
  if (m % 2 != 0) even_end = m - 3;
  if (even_end > 0) {
    double acc = f[0] + f[even_end];
    for (std::size_t i = 1; i < even_end; ++i) acc += f[i] * (i % 2 == 1 ? 4.0 : 2.0);
    s += acc * h / 3.0;
  }
  if (even_end != m) {
    s += 3.0 * h / 8.0 *
         (f[m - 3] + 3.0 * f[m - 2] + 3.0 * f[m - 1] + f[m]);
  }
  return s;
}

/// Dot product with Neumaier-compensated accumulation and exact FMA products;
/// effective working precision is roughly double-double.
inline double dot_compensated(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double p = a[i] * b[i];
    const double perr = std::fma(a[i], b[i], -p);
    double t = sum + p;
    if (std::abs(sum) >= std::abs(p)) comp += (sum - t) + p;
    else comp += (p - t) + sum;
    sum = t;
    comp += perr;
  }
  return sum + comp;
}

/// (exp(s*T) - 1) / s, accurate for s < 0.
inline double exp_integral(double s, double T) { return std::expm1(s * T) / s; }

}  // namespace heatmass::detail
