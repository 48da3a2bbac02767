#include "heatmass/state.hpp"

#include <cmath>
#include <sstream>

#include "numutil.hpp"

namespace heatmass::state {

namespace {

void check_mesh(int mesh_n) {
  if (mesh_n < 4) throw Error(Errc::InvalidArgument, "mesh_n must be >= 4");
}

void check_match(const HybridState& a, const HybridState& b) {
  if (a.mesh_n != b.mesh_n || a.u.size() != b.u.size() || a.v.size() != b.v.size()) {
    std::ostringstream os;
    os << "mesh mismatch: " << a.mesh_n << " vs " << b.mesh_n;
    throw Error(Errc::MeshMismatch, os.str());
  }
}

std::vector<double> product(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
  return p;
}

/// Sampled derivative, 2nd order: centered inside, one-sided at the ends.
std::vector<double> derivative(const std::vector<double>& f, double h) {
  const std::size_t m = f.size() - 1;
  std::vector<double> d(f.size());
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t i = 1; i < m; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[m] = (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]) / (2.0 * h);
  return d;
}

}  // namespace

HybridState zero_state(int mesh_n) {
  check_mesh(mesh_n);
  HybridState y;
  y.mesh_n = mesh_n;
  y.u.assign(mesh_n + 1, 0.0);
  y.v.assign(mesh_n + 1, 0.0);
  y.z = 0.0;
  return y;
}

HybridState sample_eigenfunction(const spectrum::EigenPair& pair, int mesh_n) {
  HybridState y = zero_state(mesh_n);
  const double h = y.dx();
  for (int i = 0; i <= mesh_n; ++i) {
    y.u[i] = spectrum::eval_eigenfunction(pair, -1.0 + i * h).u;
    y.v[i] = spectrum::eval_eigenfunction(pair, i * h).v;
  }
  y.z = spectrum::eval_eigenfunction(pair, 0.0).z;
  // Interface and pinned boundary samples are exact by construction.
  y.u[mesh_n] = y.z;
  y.v[0] = y.z;
  y.u[0] = 0.0;
  if (pair.kind == spectrum::ModeKind::DirichletEven ||
      pair.kind == spectrum::ModeKind::DirichletOdd) {
    y.v[mesh_n] = 0.0;
  }
  return y;
}

HybridState modal_state(BoundaryCase bc,
                        std::span<const std::pair<int, double>> modes, int mesh_n) {
  HybridState y = zero_state(mesh_n);
  for (const auto& [n, coeff] : modes) {
    const HybridState phi = sample_eigenfunction(spectrum::eigenpair(bc, n), mesh_n);
    for (int i = 0; i <= mesh_n; ++i) {
      y.u[i] += coeff * phi.u[i];
      y.v[i] += coeff * phi.v[i];
    }
    y.z += coeff * phi.z;
  }
  return y;
}

double inner_product(const HybridState& a, const HybridState& b) {
  check_match(a, b);
  const double h = a.dx();
  return detail::simpson(product(a.u, b.u), h) + detail::simpson(product(a.v, b.v), h) +
         a.z * b.z;
}

double norm_h(const HybridState& y) { return std::sqrt(inner_product(y, y)); }

WNormResult w_norm_sq(const HybridState& y, BoundaryCase bc) {
  const double h = y.dx();
  double scale = std::abs(y.z);
  for (double s : y.u) scale = std::max(scale, std::abs(s));
  for (double s : y.v) scale = std::max(scale, std::abs(s));

  WNormResult r;
  const double vtol = 1e-9 * (1.0 + scale);
  if (std::abs(y.u.front()) > vtol) r.bc_ok = false;
  if (std::abs(y.u.back() - y.z) > vtol || std::abs(y.v.front() - y.z) > vtol) r.bc_ok = false;
  if (bc == BoundaryCase::Dirichlet) {
    if (std::abs(y.v.back()) > vtol) r.bc_ok = false;
  } else {
    // Derivative condition is advisory: checked at stencil accuracy only.
    const std::size_t m = y.v.size() - 1;
    const double dv1 = (3.0 * y.v[m] - 4.0 * y.v[m - 1] + y.v[m - 2]) / (2.0 * h);
    if (std::abs(dv1) > 1e-2 * (1.0 + scale)) r.bc_ok = false;
  }

  const auto du = derivative(y.u, h);
  const auto dv = derivative(y.v, h);
  r.value = detail::simpson(product(du, du), h) + detail::simpson(product(dv, dv), h);
  return r;
}

SpectralCoeffs project(const HybridState& y, BoundaryCase bc, int N) {
  if (N < 1) throw Error(Errc::InvalidArgument, "project: N must be >= 1");
  SpectralCoeffs c;
  c.bc = bc;
  c.a.resize(N);
  for (int n = 1; n <= N; ++n) {
    c.a[n - 1] = inner_product(y, sample_eigenfunction(spectrum::eigenpair(bc, n), y.mesh_n));
  }
  return c;
}

HybridState reconstruct(const SpectralCoeffs& c, int mesh_n) {
  HybridState y = zero_state(mesh_n);
  for (int n = 1; n <= c.count(); ++n) {
    const auto pair = spectrum::eigenpair(c.bc, n);
    const double w = c.a[n - 1] / pair.norm_sq;
    const HybridState phi = sample_eigenfunction(pair, mesh_n);
    for (int i = 0; i <= mesh_n; ++i) {
      y.u[i] += w * phi.u[i];
      y.v[i] += w * phi.v[i];
    }
    y.z += w * phi.z;
  }
  return y;
}

SpectralCoeffs evolve_free(const SpectralCoeffs& c, double t) {
  if (t < 0.0) throw Error(Errc::InvalidArgument, "evolve_free: t must be >= 0");
  SpectralCoeffs out = c;
  for (int n = 1; n <= c.count(); ++n) {
    out.a[n - 1] = c.a[n - 1] * std::exp(spectrum::eigenpair(c.bc, n).lambda * t);
  }
  return out;
}

SpectralCoeffs evolve_controlled(const SpectralCoeffs& c, const ControlSignal& f, double T) {
  SpectralCoeffs out = c;
  for (int n = 1; n <= c.count(); ++n) {
    const auto pair = spectrum::eigenpair(c.bc, n);
    out.a[n - 1] =
        c.a[n - 1] * std::exp(pair.lambda * T) - pair.b * f.moment_integral(pair.lambda);
  }
  return out;
}

double modal_norm_h(const SpectralCoeffs& c) {
  double s = 0.0;
  for (int n = 1; n <= c.count(); ++n) {
    s += c.a[n - 1] * c.a[n - 1] / spectrum::eigenpair(c.bc, n).norm_sq;
  }
  return std::sqrt(s);
}

double modal_pairing(const SpectralCoeffs& c1, const SpectralCoeffs& c2) {
  if (c1.bc != c2.bc || c1.count() != c2.count()) {
    throw Error(Errc::InvalidArgument, "modal_pairing: incompatible coefficient lists");
  }
  double s = 0.0;
  for (int n = 1; n <= c1.count(); ++n) {
    s += c1.a[n - 1] * c2.a[n - 1] / spectrum::eigenpair(c1.bc, n).norm_sq;
  }
  return s;
}

double modal_w_norm_sq(const SpectralCoeffs& c) {
  double s = 0.0;
  for (int n = 1; n <= c.count(); ++n) {
    const auto pair = spectrum::eigenpair(c.bc, n);
    s += std::abs(pair.lambda) * c.a[n - 1] * c.a[n - 1] / pair.norm_sq;
  }
  return s;
}

}  // namespace heatmass::state
