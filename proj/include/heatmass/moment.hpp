#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "heatmass/common.hpp"
#include "heatmass/control_signal.hpp"
#include "heatmass/state.hpp"

namespace heatmass::moment {

/// Exponential-sum coefficients kept in software high-precision floats
/// (>= 50 significant digits). Produced by extended-mode synthesis, where
/// double-rounded coefficients could not reproduce the signal pointwise.
class ExtendedCoeffs {
public:
  ExtendedCoeffs(const ExtendedCoeffs&) = delete;
  ExtendedCoeffs& operator=(const ExtendedCoeffs&) = delete;
  ~ExtendedCoeffs();

  int size() const;
  double eval(double T, double t) const;
  double moment_integral(double T, double lambda) const;
  double l2_norm(double T) const;
  std::string coeff_string(int j, int digits) const;

private:
  friend struct ExtBackend;
  ExtendedCoeffs();
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Moment problem for one boundary case: find f on [0, T] with
///   int_0^T f(T - tau) exp(lambda_n tau) dtau = targets_n,
/// where targets_n = (a_n / b_n) exp(lambda_n T).
struct MomentSystem {
  BoundaryCase bc = BoundaryCase::Dirichlet;
  double T = 0.0;
  std::vector<double> lambdas;
  std::vector<double> b;
  std::vector<double> a;
  std::vector<double> targets;

  int count() const { return static_cast<int>(lambdas.size()); }
};

/// Builds the moment system from projected initial data. flip_b_sign is a
/// deliberate sabotage hook for verification tooling.
MomentSystem assemble(BoundaryCase bc, const state::SpectralCoeffs& coeffs, double T,
                      bool flip_b_sign = false);

/// Row-major Gram matrix G_jn = int_0^T exp((lambda_j + lambda_n) tau) dtau
///                          = (exp((lambda_j + lambda_n) T) - 1) / (lambda_j + lambda_n).
std::vector<double> gram_matrix(std::span<const double> lambdas, double T);

// Condition-estimate thresholds for the Gram solve (estimated from diagonal
// growth during the factorization).
inline constexpr double kDegradedCondition = 1e10;
inline constexpr double kConditionHardCapDouble = 1e14;
inline constexpr double kConditionHardCapExtended = 1e45;

struct BiorthogonalResult {
  std::vector<double> coeffs;  // theta_j(tau) = sum_n coeffs[n] exp(lambda_n tau)
  double residual = 0.0;       // max_n |int theta_j exp(lambda_n tau) dtau - delta_jn|
  double condition = 0.0;
  bool degraded = false;
};

/// Min-L2-norm element of span{exp(lambda_n tau)} that is biorthogonal to the
/// first N exponentials: the j-th column of G^{-1} (1-based j).
BiorthogonalResult biorthogonal(std::span<const double> lambdas, double T, int j,
                                PrecisionMode mode = PrecisionMode::Double);

struct SynthesisResult {
  ControlSignal signal;
  double condition = 0.0;
  bool degraded = false;
  std::vector<double> residuals;  // achieved moment minus target, per mode
};

/// Solves G c = targets and sets f(T - tau) = sum_j c_j exp(lambda_j tau).
/// Throws Errc::IllConditioned above the hard cap, advising a smaller N or
/// the extended precision mode.
SynthesisResult solve_min_norm(const MomentSystem& sys,
                               PrecisionMode mode = PrecisionMode::Double,
                               int sample_n = 2001);

struct DecayFit {
  double K = 0.0;
  double delta = 0.0;
  bool ok = false;
  bool degenerate = false;  // fewer than two usable magnitudes
  int used = 0;
};

/// Least-squares fit of log|targets_n| against -n^2; ok when delta > 0.
DecayFit decay_check(const MomentSystem& sys);

}  // namespace heatmass::moment
