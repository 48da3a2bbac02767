#pragma once

#include <span>
#include <utility>
#include <vector>

#include "heatmass/common.hpp"
#include "heatmass/control_signal.hpp"
#include "heatmass/spectrum.hpp"

namespace heatmass::state {

/// Grid-sampled element of H = L2(-1,0) x L2(0,1) x R. Both meshes are
/// uniform with spacing 1/mesh_n and include their endpoints, so u has
/// mesh_n+1 samples on [-1,0] and v has mesh_n+1 samples on [0,1].
struct HybridState {
  std::vector<double> u;
  std::vector<double> v;
  double z = 0.0;
  int mesh_n = 0;

  double dx() const { return 1.0 / mesh_n; }
};

HybridState zero_state(int mesh_n);

HybridState sample_eigenfunction(const spectrum::EigenPair& pair, int mesh_n);

/// sum coeff_i * phi_{n_i} sampled on the mesh; modes are 1-based global indices.
HybridState modal_state(BoundaryCase bc,
                        std::span<const std::pair<int, double>> modes, int mesh_n);

/// H inner product by composite Simpson over both intervals plus z1*z2.
double inner_product(const HybridState& a, const HybridState& b);

double norm_h(const HybridState& y);

struct WNormResult {
  double value = 0.0;
  bool bc_ok = true;  // essential boundary/coupling conditions held at the mesh tolerance
};

/// Squared W-norm |u'|^2 + |v'|^2 via 2nd-order difference derivatives.
WNormResult w_norm_sq(const HybridState& y, BoundaryCase bc);

/// Un-normalized eigen pairings a_n = <y, phi_n>_H, n = 1..N.
struct SpectralCoeffs {
  BoundaryCase bc = BoundaryCase::Dirichlet;
  std::vector<double> a;

  int count() const { return static_cast<int>(a.size()); }
};

SpectralCoeffs project(const HybridState& y, BoundaryCase bc, int N);

/// Sampled sum (a_n / |phi_n|^2) phi_n.
HybridState reconstruct(const SpectralCoeffs& c, int mesh_n);

/// Semigroup in modal form: a_n -> a_n exp(lambda_n t).
SpectralCoeffs evolve_free(const SpectralCoeffs& c, double t);

/// Modal Duhamel solution
///   a_n(T) = exp(lambda_n T) a_n(0) - b_n int_0^T exp(lambda_n (T-s)) f(s) ds.
/// The minus sign is the calibrated convention for both boundary cases.
SpectralCoeffs evolve_controlled(const SpectralCoeffs& c, const ControlSignal& f, double T);

/// H norm of modal data: sqrt(sum a_n^2 / |phi_n|^2).
double modal_norm_h(const SpectralCoeffs& c);

/// Modal H pairing <y1, y2> = sum a1_n a2_n / |phi_n|^2.
double modal_pairing(const SpectralCoeffs& c1, const SpectralCoeffs& c2);

/// Squared W-norm of modal data: sum |lambda_n| a_n^2 / |phi_n|^2.
double modal_w_norm_sq(const SpectralCoeffs& c);

}  // namespace heatmass::state
