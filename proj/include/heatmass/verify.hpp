#pragma once

#include <cstdint>
#include <vector>

#include "heatmass/common.hpp"
#include "heatmass/control_signal.hpp"
#include "heatmass/moment.hpp"
#include "heatmass/pde.hpp"
#include "heatmass/state.hpp"

namespace heatmass::verify {

struct DualityGapResult {
  double lhs = 0.0;   // <y(T), yT> with y(T) from the modal Duhamel route
  double rhs = 0.0;   // <y0, S_T yT> plus the boundary-trace work integral
  double gap = 0.0;   // |lhs - rhs| / (1 + |lhs|)
};

/// Both sides of the control/observation duality identity, computed by
/// independent routes: the left side pairs the modal Duhamel solution with
/// the terminal test data; the right side evolves the test data freely and
/// integrates f against the closed-form boundary eigentraces by composite
/// Gauss-Legendre panels. This is the calibration gate for every sign and
/// constant convention.
DualityGapResult duality_gap(BoundaryCase bc, const state::SpectralCoeffs& y0,
                             const ControlSignal& f, const state::SpectralCoeffs& yT_test,
                             double T, bool flip_b_sign = false);

struct VerifyOptions {
  double T = 0.5;
  int N = 10;               // reported/cancelled mode count
  int syn_n = 0;            // synthesis truncation; 0 means N
  int mesh_n = 256;
  double dt = 2.5e-4;
  Scheme scheme = Scheme::CrankNicolson;
  PrecisionMode precision = PrecisionMode::Double;
  std::uint32_t seed = 20240601;
  bool flip_b_sign = false;  // sabotage hook: breaks the duality calibration
  double tol_modal = 1e-6;   // relative to the initial H-norm
  double tol_fd = 1e-3;      // relative to the initial H-norm
  int sample_n = 4001;
};

struct NullControlReport {
  BoundaryCase bc = BoundaryCase::Dirichlet;
  double T = 0.0;
  int N = 0;
  int syn_n = 0;
  int mesh_n = 0;
  double dt = 0.0;
  Scheme scheme = Scheme::CrankNicolson;
  PrecisionMode precision = PrecisionMode::Double;
  std::uint32_t seed = 0;
  int duhamel_sign = -1;
  double initial_norm = 0.0;
  double final_norm_fd = 0.0;
  std::vector<double> final_modal;       // first-N pairings of the FD final state
  std::vector<double> moment_residuals;
  double gram_condition = 0.0;
  bool gram_degraded = false;
  double control_norm = 0.0;
  double duality_gap = 0.0;              // gate value for the synthesized control
  double tol_modal = 0.0;
  double tol_fd = 0.0;
  bool pass = false;
};

/// Full pipeline: project -> assemble -> solve_min_norm -> solve_pointmass
/// with the synthesized control -> report.
NullControlReport null_control_verify(BoundaryCase bc, const state::HybridState& y0,
                                      const VerifyOptions& opt);

struct ObservabilityEstimate {
  double constant = 0.0;
  int samples = 0;
};

/// Empirical observability constant: max over seeded random unit-norm terminal
/// data (first N modes; W-norm for Dirichlet, H-norm for Neumann) of the
/// L2(0,T) norm of the boundary eigentrace series.
ObservabilityEstimate observability_constant(BoundaryCase bc, int N, double T,
                                             int n_samples = 200,
                                             std::uint32_t seed = 20240601);

}  // namespace heatmass::verify
