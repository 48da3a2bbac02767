/*
 * C interface to the point-mass heat controllability library.
 *
 * All functions return hm_status; on failure hm_last_error() holds a
 * thread-local message. Objects are opaque handles released with the
 * matching _destroy call.
 */
#ifndef HEATMASS_H
#define HEATMASS_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  HM_OK = 0,
  HM_EINVAL = 1,    /* invalid argument */
  HM_EMESH = 2,     /* mesh mismatch / unresolvable */
  HM_EPOLE = 3,     /* characteristic function pole */
  HM_ENOCONV = 4,   /* iteration did not converge */
  HM_ECOND = 5,     /* Gram conditioning above the hard cap */
  HM_EIO = 6,       /* serialization */
  HM_EINTERNAL = 7
} hm_status;

typedef enum { HM_DIRICHLET = 0, HM_NEUMANN = 1 } hm_case;
typedef enum { HM_BACKWARD_EULER = 0, HM_CRANK_NICOLSON = 1 } hm_scheme;
typedef enum { HM_PREC_DOUBLE = 0, HM_PREC_EXTENDED = 1 } hm_precision;

const char* hm_last_error(void);

/* ---- spectrum ---- */

typedef struct hm_spectrum hm_spectrum;

typedef struct {
  int n;                /* 1-based global index, eigenvalues decreasing */
  const char* kind;     /* DirichletEven/DirichletOdd/NeumannOdd/NeumannEven */
  int k;                /* family index */
  int has_mu;           /* 0 when mu is the exact k*pi of the closed-form family */
  double mu;            /* transcendental root, or k*pi */
  double lambda;
  double norm_sq;
  double b;             /* boundary input coefficient */
  double gap_to_next;   /* NaN on the last row */
  double asym_deviation;/* NaN for the closed-form family */
} hm_eigen_row;

hm_status hm_spectrum_create(hm_case bc, int n_max, hm_spectrum** out);
hm_status hm_spectrum_row(const hm_spectrum* s, int i /* 0-based */, hm_eigen_row* out);
int hm_spectrum_size(const hm_spectrum* s);
/* columns: n, kind, mu, lambda, norm_sq, b, gap_to_next, asymptotic_deviation */
hm_status hm_spectrum_write_csv(const hm_spectrum* s, const char* path);
hm_status hm_spectrum_write_json(const hm_spectrum* s, const char* path);
void hm_spectrum_destroy(hm_spectrum* s);

/* ---- grid states ---- */

typedef struct hm_state hm_state;

/* sum of coeff[i] * phi_{mode_n[i]} sampled at mesh_n points per unit interval */
hm_status hm_state_from_modes(hm_case bc, int count, const int* mode_n, const double* coeff,
                              int mesh_n, hm_state** out);
/* u and v are arrays of mesh_n+1 samples on [-1,0] and [0,1] */
hm_status hm_state_from_samples(const double* u, const double* v, double z, int mesh_n,
                                hm_state** out);
int hm_state_mesh_n(const hm_state* y);
hm_status hm_state_get(const hm_state* y, double* u, double* v, double* z);
hm_status hm_state_norm(const hm_state* y, double* out);
/* columns: x, value, region with region in {u, v}, plus one z record */
hm_status hm_state_write_csv(const hm_state* y, const char* path);
hm_status hm_state_read_csv(const char* path, hm_state** out);
void hm_state_destroy(hm_state* y);

/* ---- control synthesis ---- */

typedef struct hm_control hm_control;

typedef struct {
  double T;
  int n_modes;
  double condition;
  int degraded;
  double max_residual;  /* largest |achieved moment - target| */
  double l2_norm;
  int sample_n;
} hm_control_info;

hm_status hm_control_synthesize(hm_case bc, const hm_state* y0, double T, int n_modes,
                                hm_precision prec, int sample_n, hm_control** out);
hm_status hm_control_info_get(const hm_control* c, hm_control_info* out);
hm_status hm_control_coeff(const hm_control* c, int j, double* lambda, double* coeff);
hm_status hm_control_residual(const hm_control* c, int j, double* out);
/* t and f are arrays of sample_n entries */
hm_status hm_control_samples(const hm_control* c, double* t, double* f);
/* columns: t, f */
hm_status hm_control_write_csv(const hm_control* c, const char* path);
const char* hm_control_json(hm_control* c, hm_case bc);
void hm_control_destroy(hm_control* c);

/* ---- verification ---- */

typedef struct {
  double T;
  int N;
  int syn_n;          /* synthesis truncation; 0 means N */
  int mesh_n;
  double dt;
  hm_scheme scheme;
  hm_precision precision;
  unsigned seed;
  int flip_b_sign;    /* sabotage hook for the duality gate */
  double tol_modal;
  double tol_fd;
  int sample_n;
} hm_verify_opts;

void hm_verify_opts_default(hm_verify_opts* out);

typedef struct hm_report hm_report;

hm_status hm_verify_run(hm_case bc, const hm_state* y0, const hm_verify_opts* opts,
                        hm_report** out);
const char* hm_report_json(const hm_report* r);
int hm_report_pass(const hm_report* r);
/* keys: initial_norm, final_norm_fd, max_final_modal, gram_condition,
 *       control_norm, duality_gap */
hm_status hm_report_value(const hm_report* r, const char* key, double* out);
void hm_report_destroy(hm_report* r);

/* ---- finite-difference trajectories ---- */

typedef struct hm_trajectory hm_trajectory;

hm_status hm_trajectory_run(hm_case bc, const hm_state* y0, const hm_control* f /* nullable */,
                            int mesh_n, double dt, hm_scheme scheme, double T,
                            hm_trajectory** out);
int hm_trajectory_steps(const hm_trajectory* t);
hm_status hm_trajectory_row(const hm_trajectory* t, int i, double* time, double* norm_h,
                            double* z, double* trace);
/* columns: t, norm_H, z, trace */
hm_status hm_trajectory_write_csv(const hm_trajectory* t, const char* path);
void hm_trajectory_destroy(hm_trajectory* t);

/* ---- density-approximation study ---- */

/* H-distance at t_star between the eps-density solution (restricted) and the
 * point-mass solution, homogeneous Dirichlet-type datum. */
hm_status hm_epsilon_error(const hm_state* y0, double eps, int mesh_n, double dt,
                           hm_scheme scheme, double t_star, double* error_h);

/* ---- duality gate (convention check) ---- */

hm_status hm_duality_gap_eigen(hm_case bc, int n, int m, double T, double* lhs, double* rhs,
                               double* gap);

#ifdef __cplusplus
}
#endif

#endif /* HEATMASS_H */
