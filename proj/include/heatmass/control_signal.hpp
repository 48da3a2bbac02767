#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "heatmass/common.hpp"

namespace heatmass::moment {
class ExtendedCoeffs;  // high-precision coefficient block, defined in moment.hpp
}

namespace heatmass {

/// Boundary control f on [0, T].
///
/// Representations, in priority order when several are present:
///  - exponential sum in reversed time, f(T - tau) = sum_j c_j exp(lambda_j tau)
///    (synthesis output; `ext` carries the coefficients at full precision when
///    the solve ran in extended mode),
///  - polynomial f(t) = sum_i poly[i] t^i (verification inputs),
///  - uniform samples of f(t) on [0, T].
struct ControlSignal {
  double T = 0.0;
  std::vector<std::pair<double, double>> coeffs;  // (lambda_j, c_j)
  std::vector<double> poly;
  std::vector<double> samples;
  std::shared_ptr<const moment::ExtendedCoeffs> ext;

  int sample_n() const { return static_cast<int>(samples.size()); }
  bool has_coeffs() const { return !coeffs.empty(); }
  bool has_poly() const { return !poly.empty(); }

  double eval(double t) const;

  /// int_0^T f(T - tau) exp(lambda tau) dtau, which also equals the Duhamel
  /// integral int_0^T exp(lambda (T - s)) f(s) ds. Closed form for the
  /// exponential-sum and polynomial representations; composite Simpson on
  /// the sample grid otherwise.
  double moment_integral(double lambda) const;

  /// L2(0, T) norm.
  double l2_norm() const;

  static ControlSignal zero(double T, int sample_n);
  static ControlSignal from_poly(double T, std::vector<double> poly, int sample_n);
  static ControlSignal from_samples(double T, std::vector<double> samples);

  /// Fills `samples` from the evaluated representation.
  void resample(int sample_n);
};

}  // namespace heatmass
