#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "heatmass/common.hpp"

namespace heatmass::spectrum {

enum class ModeKind { DirichletEven, DirichletOdd, NeumannOdd, NeumannEven };

const char* to_string(ModeKind k);

/// One eigenvalue of the hybrid operator with its eigenvector metadata.
///
/// Modes are indexed globally by decreasing eigenvalue. In the Dirichlet
/// case the sequence interlaces the transcendental family -mu_k^2 (odd
/// global indices) with the closed-form family -(k*pi)^2 (even global
/// indices); in the Neumann case every mode is transcendental.
struct EigenPair {
  int n = 0;                  // 1-based global index
  ModeKind kind = ModeKind::DirichletOdd;
  int k = 0;                  // index within the family
  std::optional<double> mu;   // transcendental root; empty when mu == k*pi exactly
  double lambda = 0.0;
  double norm_sq = 0.0;       // squared H-norm of the eigenvector
  double b = 0.0;             // boundary input coefficient

  /// Effective frequency: the stored root, or k*pi for the closed-form family.
  double frequency() const;
};

/// F(mu) = 2 cot(mu) - mu (Dirichlet) or 2 cot(2 mu) - mu (Neumann).
/// Throws Errc::PoleProximity too close to a cotangent pole.
double characteristic_value(BoundaryCase bc, double mu);

/// Open interval containing exactly one root of F: ((k-1)pi, k pi) for
/// Dirichlet, ((k-1)pi/2, k pi/2) for Neumann.
std::pair<double, double> root_bracket(BoundaryCase bc, int k);

/// The k-th positive characteristic root, via bisection plus a safeguarded
/// Newton polish inside the bracket. Deterministic.
double find_root(BoundaryCase bc, int k, double tol = 1e-14);

EigenPair eigenpair(BoundaryCase bc, int n);

/// First n_max eigenpairs, sorted by decreasing eigenvalue.
std::vector<EigenPair> eigenpairs(BoundaryCase bc, int n_max);

struct EigenvectorValue {
  double u;  // meaningful for x in [-1, 0]
  double v;  // meaningful for x in [0, 1]
  double z;
};

EigenvectorValue eval_eigenfunction(const EigenPair& pair, double x);

/// Spatial derivative of the v-component, used for boundary-trace checks.
double eigenfunction_v_derivative(const EigenPair& pair, double x);

/// mu_k minus its leading asymptotic expression. The Neumann correction
/// constant is 2/(k pi); see the resolution note in asymptotic_correction().
double asymptotic_deviation(BoundaryCase bc, int k);

/// Leading asymptotic expression for mu_k.
double asymptotic_mu(BoundaryCase bc, int k);

/// Consecutive gaps |lambda_{n+1} - lambda_n| of the sorted sequence,
/// returned as (n, gap) for n = 1 .. n_max-1. All gaps are positive.
std::vector<std::pair<int, double>> gap_table(BoundaryCase bc, int n_max);

struct TableRow {
  EigenPair pair;
  double gap_to_next;      // NaN on the last row
  double asym_deviation;   // NaN for the closed-form Dirichlet even family
};

std::vector<TableRow> table(BoundaryCase bc, int n_max);

}  // namespace heatmass::spectrum
