#include "heatmass/heatmass.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "heatmass/io.hpp"
#include "heatmass/moment.hpp"
#include "heatmass/pde.hpp"
#include "heatmass/spectrum.hpp"
#include "heatmass/state.hpp"
#include "heatmass/verify.hpp"

using namespace heatmass;

namespace {

thread_local std::string g_last_error;

hm_status code_of(const Error& e) {
  switch (e.code()) {
    case Errc::InvalidArgument: return HM_EINVAL;
    case Errc::MeshMismatch: return HM_EMESH;
    case Errc::PoleProximity: return HM_EPOLE;
    case Errc::NonConverged: return HM_ENOCONV;
    case Errc::IllConditioned: return HM_ECOND;
    case Errc::Io: return HM_EIO;
    case Errc::Internal: return HM_EINTERNAL;
  }
  return HM_EINTERNAL;
}

template <class F>
hm_status guarded(F&& fn) {
  try {
    fn();
    return HM_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return code_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HM_EINTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HM_EINTERNAL;
  }
}

BoundaryCase to_case(hm_case bc) {
  return bc == HM_DIRICHLET ? BoundaryCase::Dirichlet : BoundaryCase::Neumann;
}

std::ofstream open_output(const char* path) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::Io, std::string("cannot write '") + path + "'");
  return os;
}
Scheme to_scheme(hm_scheme s) {
  return s == HM_BACKWARD_EULER ? Scheme::BackwardEuler : Scheme::CrankNicolson;
}
PrecisionMode to_precision(hm_precision p) {
  return p == HM_PREC_DOUBLE ? PrecisionMode::Double : PrecisionMode::Extended;
}

}  // namespace

struct hm_spectrum {
  std::vector<spectrum::TableRow> rows;
};

struct hm_state {
  state::HybridState y;
};

struct hm_control {
  BoundaryCase bc;
  moment::SynthesisResult sol;
  PrecisionMode mode;
  std::string json_cache;
};

struct hm_report {
  verify::NullControlReport rep;
  std::string json;
};

struct hm_trajectory {
  pde::Trajectory traj;
};

extern "C" {

const char* hm_last_error(void) { return g_last_error.c_str(); }

hm_status hm_spectrum_create(hm_case bc, int n_max, hm_spectrum** out) {
  return guarded([&] {
    auto s = std::make_unique<hm_spectrum>();
    s->rows = spectrum::table(to_case(bc), n_max);
    *out = s.release();
  });
}

hm_status hm_spectrum_row(const hm_spectrum* s, int i, hm_eigen_row* out) {
  return guarded([&] {
    const auto& row = s->rows.at(i);
    const auto& p = row.pair;
    out->n = p.n;
    out->kind = spectrum::to_string(p.kind);
    out->k = p.k;
    out->has_mu = p.mu.has_value() ? 1 : 0;
    out->mu = p.frequency();
    out->lambda = p.lambda;
    out->norm_sq = p.norm_sq;
    out->b = p.b;
    out->gap_to_next = row.gap_to_next;
    out->asym_deviation = row.asym_deviation;
  });
}

int hm_spectrum_size(const hm_spectrum* s) { return static_cast<int>(s->rows.size()); }

hm_status hm_spectrum_write_csv(const hm_spectrum* s, const char* path) {
  return guarded([&] {
    auto os = open_output(path);
    io::write_spectrum_csv(os, s->rows);
  });
}

hm_status hm_spectrum_write_json(const hm_spectrum* s, const char* path) {
  return guarded([&] { open_output(path) << io::spectrum_json(s->rows); });
}

void hm_spectrum_destroy(hm_spectrum* s) { delete s; }

hm_status hm_state_from_modes(hm_case bc, int count, const int* mode_n, const double* coeff,
                              int mesh_n, hm_state** out) {
  return guarded([&] {
    std::vector<std::pair<int, double>> modes;
    modes.reserve(count);
    for (int i = 0; i < count; ++i) modes.emplace_back(mode_n[i], coeff[i]);
    auto y = std::make_unique<hm_state>();
    y->y = state::modal_state(to_case(bc), modes, mesh_n);
    *out = y.release();
  });
}

hm_status hm_state_from_samples(const double* u, const double* v, double z, int mesh_n,
                                hm_state** out) {
  return guarded([&] {
    auto y = std::make_unique<hm_state>();
    y->y = state::zero_state(mesh_n);
    y->y.u.assign(u, u + mesh_n + 1);
    y->y.v.assign(v, v + mesh_n + 1);
    y->y.z = z;
    *out = y.release();
  });
}

int hm_state_mesh_n(const hm_state* y) { return y->y.mesh_n; }

hm_status hm_state_get(const hm_state* y, double* u, double* v, double* z) {
  return guarded([&] {
    std::memcpy(u, y->y.u.data(), y->y.u.size() * sizeof(double));
    std::memcpy(v, y->y.v.data(), y->y.v.size() * sizeof(double));
    *z = y->y.z;
  });
}

hm_status hm_state_norm(const hm_state* y, double* out) {
  return guarded([&] { *out = state::norm_h(y->y); });
}

hm_status hm_state_write_csv(const hm_state* y, const char* path) {
  return guarded([&] {
    auto os = open_output(path);
    io::write_state_csv(os, y->y);
  });
}

hm_status hm_state_read_csv(const char* path, hm_state** out) {
  return guarded([&] {
    std::ifstream is(path);
    if (!is) throw Error(Errc::Io, std::string("cannot open '") + path + "'");
    auto y = std::make_unique<hm_state>();
    y->y = io::read_state_csv(is);
    *out = y.release();
  });
}

void hm_state_destroy(hm_state* y) { delete y; }

hm_status hm_control_synthesize(hm_case bc, const hm_state* y0, double T, int n_modes,
                                hm_precision prec, int sample_n, hm_control** out) {
  return guarded([&] {
    auto c = std::make_unique<hm_control>();
    c->bc = to_case(bc);
    c->mode = to_precision(prec);
    const auto a = state::project(y0->y, c->bc, n_modes);
    const auto sys = moment::assemble(c->bc, a, T);
    c->sol = moment::solve_min_norm(sys, c->mode, sample_n);
    *out = c.release();
  });
}

hm_status hm_control_info_get(const hm_control* c, hm_control_info* out) {
  return guarded([&] {
    out->T = c->sol.signal.T;
    out->n_modes = static_cast<int>(c->sol.signal.coeffs.size());
    out->condition = c->sol.condition;
    out->degraded = c->sol.degraded ? 1 : 0;
    double mr = 0.0;
    for (double r : c->sol.residuals) mr = std::max(mr, std::abs(r));
    out->max_residual = mr;
    out->l2_norm = c->sol.signal.l2_norm();
    out->sample_n = c->sol.signal.sample_n();
  });
}

hm_status hm_control_coeff(const hm_control* c, int j, double* lambda, double* coeff) {
  return guarded([&] {
    const auto& [lam, co] = c->sol.signal.coeffs.at(j);
    *lambda = lam;
    *coeff = co;
  });
}

hm_status hm_control_residual(const hm_control* c, int j, double* out) {
  return guarded([&] { *out = c->sol.residuals.at(j); });
}

hm_status hm_control_samples(const hm_control* c, double* t, double* f) {
  return guarded([&] {
    const auto& sig = c->sol.signal;
    const int n = sig.sample_n();
    const double h = sig.T / (n - 1);
    for (int i = 0; i < n; ++i) {
      t[i] = i * h;
      f[i] = sig.samples[i];
    }
  });
}

hm_status hm_control_write_csv(const hm_control* c, const char* path) {
  return guarded([&] {
    auto os = open_output(path);
    io::write_control_csv(os, c->sol.signal);
  });
}

const char* hm_control_json(hm_control* c, hm_case bc) {
  c->json_cache = io::control_json(to_case(bc), c->sol, c->mode);
  return c->json_cache.c_str();
}

void hm_control_destroy(hm_control* c) { delete c; }

void hm_verify_opts_default(hm_verify_opts* out) {
  const verify::VerifyOptions d;
  out->T = d.T;
  out->N = d.N;
  out->syn_n = d.syn_n;
  out->mesh_n = d.mesh_n;
  out->dt = d.dt;
  out->scheme = HM_CRANK_NICOLSON;
  out->precision = HM_PREC_DOUBLE;
  out->seed = d.seed;
  out->flip_b_sign = 0;
  out->tol_modal = d.tol_modal;
  out->tol_fd = d.tol_fd;
  out->sample_n = d.sample_n;
}

hm_status hm_verify_run(hm_case bc, const hm_state* y0, const hm_verify_opts* opts,
                        hm_report** out) {
  return guarded([&] {
    verify::VerifyOptions o;
    o.T = opts->T;
    o.N = opts->N;
    o.syn_n = opts->syn_n;
    o.mesh_n = opts->mesh_n;
    o.dt = opts->dt;
    o.scheme = to_scheme(opts->scheme);
    o.precision = to_precision(opts->precision);
    o.seed = opts->seed;
    o.flip_b_sign = opts->flip_b_sign != 0;
    o.tol_modal = opts->tol_modal;
    o.tol_fd = opts->tol_fd;
    o.sample_n = opts->sample_n;
    auto r = std::make_unique<hm_report>();
    r->rep = verify::null_control_verify(to_case(bc), y0->y, o);
    r->json = io::report_json(r->rep);
    *out = r.release();
  });
}

const char* hm_report_json(const hm_report* r) { return r->json.c_str(); }

int hm_report_pass(const hm_report* r) { return r->rep.pass ? 1 : 0; }

hm_status hm_report_value(const hm_report* r, const char* key, double* out) {
  return guarded([&] {
    const std::string k = key;
    const auto& rep = r->rep;
    if (k == "initial_norm") *out = rep.initial_norm;
    else if (k == "final_norm_fd") *out = rep.final_norm_fd;
    else if (k == "max_final_modal") {
      double m = 0.0;
      for (double a : rep.final_modal) m = std::max(m, std::abs(a));
      *out = m;
    } else if (k == "gram_condition") *out = rep.gram_condition;
    else if (k == "control_norm") *out = rep.control_norm;
    else if (k == "duality_gap") *out = rep.duality_gap;
    else throw Error(Errc::InvalidArgument, "hm_report_value: unknown key '" + k + "'");
  });
}

void hm_report_destroy(hm_report* r) { delete r; }

hm_status hm_trajectory_run(hm_case bc, const hm_state* y0, const hm_control* f, int mesh_n,
                            double dt, hm_scheme scheme, double T, hm_trajectory** out) {
  return guarded([&] {
    pde::FdConfig cfg{mesh_n, dt, to_scheme(scheme), T};
    auto t = std::make_unique<hm_trajectory>();
    t->traj = pde::solve_pointmass(to_case(bc), y0->y, f ? &f->sol.signal : nullptr, cfg);
    *out = t.release();
  });
}

int hm_trajectory_steps(const hm_trajectory* t) {
  return static_cast<int>(t->traj.times.size());
}

hm_status hm_trajectory_row(const hm_trajectory* t, int i, double* time, double* norm_h,
                            double* z, double* trace) {
  return guarded([&] {
    *time = t->traj.times.at(i);
    *norm_h = state::norm_h(t->traj.states.at(i));
    *z = t->traj.states.at(i).z;
    *trace = t->traj.boundary_trace.at(i);
  });
}

hm_status hm_trajectory_write_csv(const hm_trajectory* t, const char* path) {
  return guarded([&] {
    auto os = open_output(path);
    io::write_trajectory_csv(os, t->traj);
  });
}

void hm_trajectory_destroy(hm_trajectory* t) { delete t; }

hm_status hm_epsilon_error(const hm_state* y0, double eps, int mesh_n, double dt,
                           hm_scheme scheme, double t_star, double* error_h) {
  return guarded([&] {
    pde::FdConfig cfg{mesh_n, dt, to_scheme(scheme), t_star};
    const auto eps_traj = pde::solve_epsilon(eps, y0->y, cfg);
    const auto pm_traj = pde::solve_pointmass(BoundaryCase::Dirichlet, y0->y, nullptr, cfg);
    const auto& a = eps_traj.states.back();
    const auto& b = pm_traj.final_state();
    state::HybridState diff = a;
    for (int i = 0; i <= diff.mesh_n; ++i) {
      diff.u[i] -= b.u[i];
      diff.v[i] -= b.v[i];
    }
    diff.z -= b.z;
    *error_h = state::norm_h(diff);
  });
}

hm_status hm_duality_gap_eigen(hm_case bc, int n, int m, double T, double* lhs, double* rhs,
                               double* gap) {
  return guarded([&] {
    const auto c = to_case(bc);
    state::SpectralCoeffs y0, yT;
    y0.bc = yT.bc = c;
    y0.a.assign(n, 0.0);
    y0.a[n - 1] = spectrum::eigenpair(c, n).norm_sq;
    yT.a.assign(m, 0.0);
    yT.a[m - 1] = spectrum::eigenpair(c, m).norm_sq;
    const auto f = ControlSignal::zero(T, 17);
    const auto r = verify::duality_gap(c, y0, f, yT, T);
    *lhs = r.lhs;
    *rhs = r.rhs;
    *gap = r.gap;
  });
}

}  // extern "C"
