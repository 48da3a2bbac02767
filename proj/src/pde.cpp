#include "heatmass/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Sparse>

namespace heatmass::pde {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct StepCount {
  int steps;
  double dt;
};

StepCount resolve_steps(const FdConfig& cfg) {
  if (cfg.mesh_n < 16) throw Error(Errc::InvalidArgument, "FdConfig: mesh_n must be >= 16");
  if (!(cfg.dt > 0.0) || cfg.dt > 0.1) {
    throw Error(Errc::InvalidArgument, "FdConfig: dt must be in (0, 0.1]");
  }
  if (!(cfg.T > 0.0)) throw Error(Errc::InvalidArgument, "FdConfig: T must be positive");
  const int steps = std::max(1, static_cast<int>(std::ceil(cfg.T / cfg.dt - 1e-9)));
  return {steps, cfg.T / steps};
}

void check_initial(const state::HybridState& y0, const FdConfig& cfg) {
  if (y0.mesh_n != cfg.mesh_n) {
    throw Error(Errc::MeshMismatch, "solve: initial state mesh does not match FdConfig");
  }
  double scale = std::abs(y0.z);
  for (double s : y0.u) scale = std::max(scale, std::abs(s));
  for (double s : y0.v) scale = std::max(scale, std::abs(s));
  const double tol = 1e-8 * (1.0 + scale);
  if (std::abs(y0.u.front()) > tol || std::abs(y0.u.back() - y0.z) > tol ||
      std::abs(y0.v.front() - y0.z) > tol) {
    throw Error(Errc::InvalidArgument,
                "solve: initial state violates u(-1)=0 or coupling u(0)=v(0)=z");
  }
}

double theta_of(Scheme s) { return s == Scheme::BackwardEuler ? 1.0 : 0.5; }

}  // namespace

Trajectory solve_pointmass(BoundaryCase bc, const state::HybridState& y0,
                           const ControlSignal* f, const FdConfig& cfg) {
  const auto [steps, dt] = resolve_steps(cfg);
  check_initial(y0, cfg);
  const int m = cfg.mesh_n;
  const double dx = 1.0 / m;
  const double ih2 = 1.0 / (dx * dx);
  const double ih1 = 1.0 / (2.0 * dx);
  const bool neumann = bc == BoundaryCase::Neumann;

  // Unknowns: u_1..u_{m-1}, z, v_1..v_{m-1} (+ v_m in the Neumann case).
  const int iu0 = 0;
  const int iz = m - 1;
  const int iv0 = m;  // index of v_1
  const int n_unk = neumann ? 2 * m : 2 * m - 1;
  auto iu = [&](int i) { return iu0 + i - 1; };
  auto iv = [&](int j) { return iv0 + j - 1; };
  const int ivm = iv(m);  // valid only in the Neumann case

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(4) * n_unk);
  // u interior rows; u_0 = 0, u_m = z
  for (int i = 1; i <= m - 1; ++i) {
    trips.emplace_back(iu(i), iu(i), -2.0 * ih2);
    if (i > 1) trips.emplace_back(iu(i), iu(i - 1), ih2);
    if (i < m - 1) trips.emplace_back(iu(i), iu(i + 1), ih2);
    else trips.emplace_back(iu(i), iz, ih2);
  }
  // flux-jump row: z' = v'(0+) - u'(0-), one-sided 2nd-order stencils
  trips.emplace_back(iz, iz, -6.0 * ih1);
  trips.emplace_back(iz, iv(1), 4.0 * ih1);
  trips.emplace_back(iz, iv(2), -1.0 * ih1);
  trips.emplace_back(iz, iu(m - 1), 4.0 * ih1);
  trips.emplace_back(iz, iu(m - 2), -1.0 * ih1);
  // v interior rows; v_0 = z, v_m is data (Dirichlet) or unknown (Neumann)
  for (int j = 1; j <= m - 1; ++j) {
    trips.emplace_back(iv(j), iv(j), -2.0 * ih2);
    if (j > 1) trips.emplace_back(iv(j), iv(j - 1), ih2);
    else trips.emplace_back(iv(j), iz, ih2);
    if (j < m - 1) trips.emplace_back(iv(j), iv(j + 1), ih2);
    else if (neumann) trips.emplace_back(iv(j), ivm, ih2);
  }
  if (neumann) {
    // ghost closure at x = 1: v_{m+1} = v_{m-1} + 2 dx f
    trips.emplace_back(ivm, ivm, -2.0 * ih2);
    trips.emplace_back(ivm, iv(m - 1), 2.0 * ih2);
  }
  SpMat A(n_unk, n_unk);
  A.setFromTriplets(trips.begin(), trips.end());

  const double th = theta_of(cfg.scheme);
  SpMat identity(n_unk, n_unk);
  identity.setIdentity();
  SpMat lhs = identity - (th * dt) * A;
  SpMat rhs_mat = identity + ((1.0 - th) * dt) * A;
  Eigen::SparseLU<SpMat> lu;
  lu.compute(lhs);
  if (lu.info() != Eigen::Success) {
    throw Error(Errc::Internal, "solve_pointmass: time-step factorization failed");
  }

  Eigen::VectorXd y(n_unk);
  for (int i = 1; i <= m - 1; ++i) y[iu(i)] = y0.u[i];
  y[iz] = y0.z;
  for (int j = 1; j <= m - 1; ++j) y[iv(j)] = y0.v[j];
  if (neumann) y[ivm] = y0.v[m];

  auto control_at = [&](double t) { return f ? f->eval(t) : 0.0; };
  // Injection slot and weight for the boundary control.
  const int ctl_row = neumann ? ivm : iv(m - 1);
  const double ctl_w = neumann ? 2.0 / dx : ih2;

  Trajectory traj;
  traj.bc = bc;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.boundary_trace.reserve(steps + 1);

  auto record = [&](double t) {
    state::HybridState s = state::zero_state(m);
    s.u[0] = 0.0;
    for (int i = 1; i <= m - 1; ++i) s.u[i] = y[iu(i)];
    s.z = y[iz];
    s.u[m] = s.z;
    s.v[0] = s.z;
    for (int j = 1; j <= m - 1; ++j) s.v[j] = y[iv(j)];
    s.v[m] = neumann ? y[ivm] : control_at(t);
    traj.times.push_back(t);
    double trace;
    if (neumann) {
      trace = s.v[m];
    } else {
      trace = (3.0 * s.v[m] - 4.0 * s.v[m - 1] + s.v[m - 2]) * ih1;
    }
    traj.boundary_trace.push_back(trace);
    traj.states.push_back(std::move(s));
  };

  record(0.0);
  Eigen::VectorXd rhs(n_unk);
  for (int k = 0; k < steps; ++k) {
    const double t0 = k * dt;
    const double t1 = (k + 1) * dt;
    rhs.noalias() = rhs_mat * y;
    rhs[ctl_row] += dt * ctl_w * (th * control_at(t1) + (1.0 - th) * control_at(t0));
    y = lu.solve(rhs);
    if (lu.info() != Eigen::Success) {
      std::ostringstream os;
      os << "solve_pointmass: linear solve failed at step " << k + 1;
      throw Error(Errc::Internal, os.str());
    }
    record(t1);
  }
  return traj;
}

std::vector<double> observe_boundary(const Trajectory& traj, BoundaryCase bc) {
  if (bc == traj.bc) return traj.boundary_trace;
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const auto& s : traj.states) {
    const int m = s.mesh_n;
    if (bc == BoundaryCase::Dirichlet) {
      out.push_back((3.0 * s.v[m] - 4.0 * s.v[m - 1] + s.v[m - 2]) * (0.5 * m));
    } else {
      out.push_back(s.v[m]);
    }
  }
  return out;
}

EpsilonTrajectory solve_epsilon(double eps, const state::HybridState& y0, const FdConfig& cfg) {
  const auto [steps, dt] = resolve_steps(cfg);
  if (!(eps > 0.0 && eps < 0.5)) {
    throw Error(Errc::InvalidArgument, "solve_epsilon: eps must lie in (0, 0.5)");
  }
  if (y0.mesh_n != cfg.mesh_n) {
    throw Error(Errc::MeshMismatch, "solve_epsilon: initial state mesh does not match FdConfig");
  }
  const int m = cfg.mesh_n;
  const double dx = 1.0 / m;
  const double r_exact = eps * m;
  const int r = static_cast<int>(std::lround(r_exact));
  if (std::abs(r_exact - r) > 1e-9) {
    throw Error(Errc::InvalidArgument, "solve_epsilon: eps must be a whole number of mesh cells");
  }
  if (2 * r - 1 < 4) {
    throw Error(Errc::InvalidArgument,
                "solve_epsilon: fewer than 4 interior points in (-eps, eps); refine the mesh");
  }
  {
    double scale = std::abs(y0.z);
    for (double s : y0.u) scale = std::max(scale, std::abs(s));
    for (double s : y0.v) scale = std::max(scale, std::abs(s));
    const double tol = 1e-8 * (1.0 + scale);
    if (std::abs(y0.u.front()) > tol || std::abs(y0.v.back()) > tol) {
      throw Error(Errc::InvalidArgument,
                  "solve_epsilon: datum must satisfy the homogeneous conditions u(-1)=v(1)=0");
    }
  }

  // Grid over [-1, 1]: node i at -1 + i dx, i = 0..2m; ends are pinned to 0.
  const int total = 2 * m + 1;
  const int n_unk = total - 2;
  auto node_density = [&](int i) {
    const int d = std::abs(i - m);  // distance from x = 0 in cells
    if (d < r) return 1.0 / (2.0 * eps);
    if (d == r) return 0.5 * (1.0 + 1.0 / (2.0 * eps));
    return 1.0;
  };

  // Conservative form: D_rho w' = L w, both sides symmetric.
  const double ih2 = 1.0 / (dx * dx);
  std::vector<Triplet> tl, trho;
  for (int i = 1; i <= total - 2; ++i) {
    const int row = i - 1;
    tl.emplace_back(row, row, -2.0 * ih2);
    if (i > 1) tl.emplace_back(row, row - 1, ih2);
    if (i < total - 2) tl.emplace_back(row, row + 1, ih2);
    trho.emplace_back(row, row, node_density(i));
  }
  SpMat L(n_unk, n_unk), Rho(n_unk, n_unk);
  L.setFromTriplets(tl.begin(), tl.end());
  Rho.setFromTriplets(trho.begin(), trho.end());

  const double th = theta_of(cfg.scheme);
  SpMat lhs = Rho - (th * dt) * L;
  SpMat rhs_mat = Rho + ((1.0 - th) * dt) * L;
  Eigen::SparseLU<SpMat> lu;
  lu.compute(lhs);
  if (lu.info() != Eigen::Success) {
    throw Error(Errc::Internal, "solve_epsilon: time-step factorization failed");
  }

  Eigen::VectorXd w(n_unk);
  for (int i = 1; i <= total - 2; ++i) {
    double val;
    if (std::abs(i - m) < r) val = y0.z;           // mass at uniform temperature
    else if (i <= m) val = y0.u[i];
    else val = y0.v[i - m];
    w[i - 1] = val;
  }

  EpsilonTrajectory traj;
  traj.eps = eps;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.energy.reserve(steps + 1);

  auto full_profile = [&]() {
    std::vector<double> p(total, 0.0);
    for (int i = 1; i <= total - 2; ++i) p[i] = w[i - 1];
    return p;
  };
  auto record = [&](double t) {
    const auto p = full_profile();
    state::HybridState s = state::zero_state(m);
    for (int i = 0; i <= m; ++i) s.u[i] = p[i];
    for (int j = 0; j <= m; ++j) s.v[j] = p[m + j];
    // mid-cell average over (-eps, eps), trapezoid weights
    double acc = 0.5 * (p[m - r] + p[m + r]);
    for (int i = m - r + 1; i <= m + r - 1; ++i) acc += p[i];
    s.z = acc * dx / (2.0 * eps);
    double en = 0.0;
    for (int i = 0; i < total; ++i) {
      const double wgt = (i == 0 || i == total - 1) ? 0.5 : 1.0;
      en += wgt * node_density(std::clamp(i, 1, total - 2)) * p[i] * p[i] * dx;
    }
    traj.times.push_back(t);
    traj.states.push_back(std::move(s));
    traj.energy.push_back(en);
  };

  record(0.0);
  Eigen::VectorXd rhs(n_unk);
  for (int k = 0; k < steps; ++k) {
    rhs.noalias() = rhs_mat * w;
    w = lu.solve(rhs);
    if (lu.info() != Eigen::Success) {
      std::ostringstream os;
      os << "solve_epsilon: linear solve failed at step " << k + 1;
      throw Error(Errc::Internal, os.str());
    }
    record((k + 1) * dt);
  }
  traj.w_final = full_profile();
  return traj;
}

}  // namespace heatmass::pde
