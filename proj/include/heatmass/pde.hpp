#pragma once

#include <vector>

#include "heatmass/common.hpp"
#include "heatmass/control_signal.hpp"
#include "heatmass/state.hpp"

namespace heatmass::pde {

struct FdConfig {
  int mesh_n = 128;   // points per unit interval
  double dt = 1e-3;   // adjusted down so the step count divides T evenly
  Scheme scheme = Scheme::CrankNicolson;
  double T = 1.0;
};

struct Trajectory {
  BoundaryCase bc = BoundaryCase::Dirichlet;
  std::vector<double> times;
  std::vector<state::HybridState> states;
  std::vector<double> boundary_trace;  // v'(t,1) (Dirichlet) or v(t,1) (Neumann)

  const state::HybridState& final_state() const { return states.back(); }
};

/// Implicit time stepping of the coupled two-rod/point-mass system, with the
/// shared unknown z at x = 0 updated by the discretized flux-jump ODE
/// z' = v'(0+) - u'(0-). Heat stencils inside both rods, one-sided 2nd-order
/// stencils at the interface, Dirichlet control imposed as the boundary value
/// at x = 1, Neumann control through a ghost-point closure. Pass f = nullptr
/// for the homogeneous problem.
Trajectory solve_pointmass(BoundaryCase bc, const state::HybridState& y0,
                           const ControlSignal* f, const FdConfig& cfg);

/// Boundary observation series of a computed trajectory.
std::vector<double> observe_boundary(const Trajectory& traj, BoundaryCase bc);

struct EpsilonTrajectory {
  double eps = 0.0;
  std::vector<double> times;
  std::vector<state::HybridState> states;  // H-restriction; z is the mid-cell average
  std::vector<double> energy;              // discrete int rho w^2 per step
  std::vector<double> w_final;             // full profile on [-1, 1]
};

/// Variable-density heat equation on (-1, 1): density 1/(2 eps) on (-eps, eps)
/// and 1 outside, homogeneous Dirichlet ends, conservative discretization.
/// eps must align with the mesh and contain at least 4 interior points.
EpsilonTrajectory solve_epsilon(double eps, const state::HybridState& y0, const FdConfig& cfg);

}  // namespace heatmass::pde
