#include "heatmass/moment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "numutil.hpp"

namespace heatmass::moment {

using Ext = boost::multiprecision::cpp_bin_float_50;

namespace {

template <class R>
R exp_integral(R s, R T) {
  // All lambda < 0 keeps s*T away from 0; no cancellation concern.
  return (exp(s * T) - R(1)) / s;
}

template <>
double exp_integral<double>(double s, double T) { return detail::exp_integral(s, T); }

template <class R>
std::vector<R> build_gram(const std::vector<R>& lam, R T) {
  const int n = static_cast<int>(lam.size());
  std::vector<R> g(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const R v = exp_integral<R>(lam[i] + lam[j], T);
      g[i * n + j] = v;
      g[j * n + i] = v;
    }
  }
  return g;
}

template <class R>
struct Factorization {
  std::vector<R> L;  // lower triangle, row-major
  R condition{};
  bool spd = true;
};

/// Plain LLT with a condition estimate from diagonal growth:
/// max_i G_ii over min_k L_kk^2.
template <class R>
Factorization<R> cholesky(const std::vector<R>& g, int n) {
  Factorization<R> f;
  f.L.assign(static_cast<std::size_t>(n) * n, R(0));
  R gmax(0), pivmin(0);
  for (int i = 0; i < n; ++i) gmax = std::max(gmax, g[i * n + i], std::less<R>{});
  for (int j = 0; j < n; ++j) {
    R d = g[j * n + j];
    for (int k = 0; k < j; ++k) d -= f.L[j * n + k] * f.L[j * n + k];
    if (!(d > R(0))) {
      f.spd = false;
      f.condition = std::numeric_limits<double>::infinity();
      return f;
    }
    f.L[j * n + j] = sqrt(d);
    if (j == 0 || d < pivmin) pivmin = d;
    for (int i = j + 1; i < n; ++i) {
      R s = g[i * n + j];
      for (int k = 0; k < j; ++k) s -= f.L[i * n + k] * f.L[j * n + k];
      f.L[i * n + j] = s / f.L[j * n + j];
    }
  }
  f.condition = gmax / pivmin;
  return f;
}

template <class R>
void solve_inplace(const Factorization<R>& f, int n, std::vector<R>& x) {
  for (int i = 0; i < n; ++i) {
    R s = x[i];
    for (int k = 0; k < i; ++k) s -= f.L[i * n + k] * x[k];
    x[i] = s / f.L[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    R s = x[i];
    for (int k = i + 1; k < n; ++k) s -= f.L[k * n + i] * x[k];
    x[i] = s / f.L[i * n + i];
  }
}

/// Exact 1-norm condition number from the factorization. The matrices here
/// are small enough that forming G^{-1} column by column is cheap, and the
/// diagonal-growth ratio underestimates these Gram matrices by orders of
/// magnitude.
template <class R>
R condition_1norm(const std::vector<R>& g, const Factorization<R>& f, int n) {
  using std::abs;
  R norm_g(0);
  for (int j = 0; j < n; ++j) {
    R col(0);
    for (int i = 0; i < n; ++i) col += abs(g[i * n + j]);
    norm_g = std::max(norm_g, col, std::less<R>{});
  }
  R norm_inv(0);
  std::vector<R> x(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) x[i] = R(i == j ? 1 : 0);
    solve_inplace(f, n, x);
    R col(0);
    for (int i = 0; i < n; ++i) col += abs(x[i]);
    norm_inv = std::max(norm_inv, col, std::less<R>{});
  }
  return norm_g * norm_inv;
}

struct DoubleSolve {
  std::vector<double> x;
  std::vector<double> residual;
  double condition = 0.0;
};

/// Cholesky with iterative refinement; residuals accumulated compensated so
/// the refined solution reaches exact-rounding quality.
DoubleSolve solve_spd_double(const std::vector<double>& g, int n,
                             const std::vector<double>& rhs) {
  auto f = cholesky<double>(g, n);
  if (!f.spd) {
    throw Error(Errc::IllConditioned, "Gram solve: factorization broke down (matrix not SPD "
                                      "at working precision); reduce N or use the extended "
                                      "precision mode");
  }
  DoubleSolve out;
  out.condition = condition_1norm(g, f, n);
  out.x = rhs;
  solve_inplace(f, n, out.x);
  auto residual_of = [&](const std::vector<double>& x) {
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) {
      std::span<const double> row(g.data() + static_cast<std::size_t>(i) * n, n);
      r[i] = detail::dot_compensated(row, x) - rhs[i];
    }
    return r;
  };
  auto norm_inf = [](const std::vector<double>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
  };
  std::vector<double> r = residual_of(out.x);
  for (int pass = 0; pass < 4; ++pass) {
    std::vector<double> corr = r;
    solve_inplace(f, n, corr);
    std::vector<double> next = out.x;
    for (int i = 0; i < n; ++i) next[i] -= corr[i];
    std::vector<double> rn = residual_of(next);
    if (norm_inf(rn) >= norm_inf(r)) break;
    out.x = std::move(next);
    r = std::move(rn);
  }
  out.residual = std::move(r);
  return out;
}

struct ExtSolve {
  std::vector<Ext> x;
  std::vector<double> residual;
  double condition = 0.0;
};

ExtSolve solve_spd_ext(const std::vector<Ext>& g, int n, const std::vector<Ext>& rhs) {
  auto f = cholesky<Ext>(g, n);
  if (!f.spd) {
    throw Error(Errc::IllConditioned,
                "Gram solve: factorization broke down in extended precision; reduce N");
  }
  ExtSolve out;
  out.condition = static_cast<double>(condition_1norm(g, f, n));
  out.x = rhs;
  solve_inplace(f, n, out.x);
  out.residual.resize(n);
  for (int i = 0; i < n; ++i) {
    Ext s(0);
    for (int j = 0; j < n; ++j) s += g[i * n + j] * out.x[j];
    out.residual[i] = static_cast<double>(s - rhs[i]);
  }
  return out;
}

std::vector<Ext> to_ext(std::span<const double> v) {
  std::vector<Ext> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Ext(v[i]);
  return out;
}

void check_hard_cap(double condition, PrecisionMode mode) {
  const double cap = mode == PrecisionMode::Double ? kConditionHardCapDouble
                                                   : kConditionHardCapExtended;
  if (condition > cap) {
    std::ostringstream os;
    os << "Gram solve: condition estimate " << condition << " exceeds the hard cap " << cap
       << "; reduce N" << (mode == PrecisionMode::Double ? " or use the extended precision mode"
                                                         : "");
    throw Error(Errc::IllConditioned, os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ExtendedCoeffs

struct ExtendedCoeffs::Impl {
  std::vector<Ext> lam;
  std::vector<Ext> c;
};

struct ExtBackend {
  static std::shared_ptr<ExtendedCoeffs> make(std::vector<Ext> lam, std::vector<Ext> c) {
    auto p = std::shared_ptr<ExtendedCoeffs>(new ExtendedCoeffs());
    p->impl_->lam = std::move(lam);
    p->impl_->c = std::move(c);
    return p;
  }
};

ExtendedCoeffs::ExtendedCoeffs() : impl_(std::make_unique<Impl>()) {}
ExtendedCoeffs::~ExtendedCoeffs() = default;

int ExtendedCoeffs::size() const { return static_cast<int>(impl_->c.size()); }

double ExtendedCoeffs::eval(double T, double t) const {
  Ext s(0);
  for (std::size_t j = 0; j < impl_->c.size(); ++j) {
    s += impl_->c[j] * exp(impl_->lam[j] * Ext(T - t));
  }
  return static_cast<double>(s);
}

double ExtendedCoeffs::moment_integral(double T, double lambda) const {
  Ext s(0);
  for (std::size_t j = 0; j < impl_->c.size(); ++j) {
    s += impl_->c[j] * exp_integral<Ext>(Ext(lambda) + impl_->lam[j], Ext(T));
  }
  return static_cast<double>(s);
}

double ExtendedCoeffs::l2_norm(double T) const {
  Ext s(0);
  const auto& c = impl_->c;
  const auto& lam = impl_->lam;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      s += c[i] * c[j] * exp_integral<Ext>(lam[i] + lam[j], Ext(T));
    }
  }
  return static_cast<double>(sqrt(s));
}

std::string ExtendedCoeffs::coeff_string(int j, int digits) const {
  return impl_->c.at(j).str(digits);
}

}  // namespace heatmass::moment

// ---------------------------------------------------------------------------
// ControlSignal

namespace heatmass {

double ControlSignal::eval(double t) const {
  if (ext) return ext->eval(T, t);
  if (has_coeffs()) {
    double s = 0.0;
    for (const auto& [lam, c] : coeffs) s += c * std::exp(lam * (T - t));
    return s;
  }
  if (has_poly()) {
    double s = 0.0;
    for (std::size_t i = poly.size(); i-- > 0;) s = s * t + poly[i];
    return s;
  }
  if (samples.size() < 2) return 0.0;
  const double h = T / (samples.size() - 1);
  const double pos = std::clamp(t / h, 0.0, static_cast<double>(samples.size() - 1));
  const std::size_t i = std::min(static_cast<std::size_t>(pos), samples.size() - 2);
  const double w = pos - i;
  return samples[i] * (1.0 - w) + samples[i + 1] * w;
}

double ControlSignal::moment_integral(double lambda) const {
  if (ext) return ext->moment_integral(T, lambda);
  if (has_coeffs()) {
    std::vector<double> phi(coeffs.size()), c(coeffs.size());
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      phi[j] = detail::exp_integral(lambda + coeffs[j].first, T);
      c[j] = coeffs[j].second;
    }
    return detail::dot_compensated(c, phi);
  }
  if (has_poly()) {
    // D_j = int_0^T s^j exp(lambda (T-s)) ds, via the stable downward-in-j
    // recurrence D_j = (j D_{j-1} - T^j) / lambda.
    double d = detail::exp_integral(lambda, T);
    double s = poly[0] * d;
    double tj = 1.0;
    for (std::size_t j = 1; j < poly.size(); ++j) {
      tj *= T;
      d = (static_cast<double>(j) * d - tj) / lambda;
      s += poly[j] * d;
    }
    return s;
  }
  if (samples.size() < 3) return 0.0;
  const std::size_t m = samples.size() - 1;
  const double h = T / m;
  std::vector<double> integrand(samples.size());
  for (std::size_t i = 0; i <= m; ++i) {
    integrand[i] = samples[m - i] * std::exp(lambda * (i * h));  // f(T - tau) e^{lambda tau}
  }
  return detail::simpson(integrand, h);
}

double ControlSignal::l2_norm() const {
  if (ext) return ext->l2_norm(T);
  if (has_coeffs()) {
    double s = 0.0;
    for (const auto& [li, ci] : coeffs) {
      for (const auto& [lj, cj] : coeffs) s += ci * cj * detail::exp_integral(li + lj, T);
    }
    return std::sqrt(std::max(s, 0.0));
  }
  if (has_poly()) {
    // int p(t)^2 dt with exact monomial integrals
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      for (std::size_t j = 0; j < poly.size(); ++j) {
        s += poly[i] * poly[j] * std::pow(T, static_cast<double>(i + j + 1)) / (i + j + 1);
      }
    }
    return std::sqrt(std::max(s, 0.0));
  }
  if (samples.size() < 3) return 0.0;
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = samples[i] * samples[i];
  return std::sqrt(std::max(detail::simpson(sq, T / (samples.size() - 1)), 0.0));
}

ControlSignal ControlSignal::zero(double T, int sample_n) {
  ControlSignal f;
  f.T = T;
  f.samples.assign(std::max(sample_n, 2), 0.0);
  return f;
}

ControlSignal ControlSignal::from_poly(double T, std::vector<double> poly, int sample_n) {
  ControlSignal f;
  f.T = T;
  f.poly = std::move(poly);
  f.resample(sample_n);
  return f;
}

ControlSignal ControlSignal::from_samples(double T, std::vector<double> samples) {
  if (samples.size() < 2) throw Error(Errc::InvalidArgument, "need at least 2 samples");
  ControlSignal f;
  f.T = T;
  f.samples = std::move(samples);
  return f;
}

void ControlSignal::resample(int sample_n) {
  if (sample_n < 2) throw Error(Errc::InvalidArgument, "sample_n must be >= 2");
  std::vector<double> s(sample_n);
  const double h = T / (sample_n - 1);
  for (int i = 0; i < sample_n; ++i) s[i] = eval(i * h);
  samples = std::move(s);
}

}  // namespace heatmass

// ---------------------------------------------------------------------------
// Moment problem

namespace heatmass::moment {

MomentSystem assemble(BoundaryCase bc, const state::SpectralCoeffs& coeffs, double T,
                      bool flip_b_sign) {
  if (!(T > 0.0)) throw Error(Errc::InvalidArgument, "assemble: T must be positive");
  MomentSystem sys;
  sys.bc = bc;
  sys.T = T;
  const int n = coeffs.count();
  sys.lambdas.resize(n);
  sys.b.resize(n);
  sys.a = coeffs.a;
  sys.targets.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto pair = spectrum::eigenpair(bc, i + 1);
    sys.lambdas[i] = pair.lambda;
    sys.b[i] = flip_b_sign ? -pair.b : pair.b;
    sys.targets[i] = sys.a[i] / sys.b[i] * std::exp(pair.lambda * T);
  }
  return sys;
}

std::vector<double> gram_matrix(std::span<const double> lambdas, double T) {
  std::vector<double> lam(lambdas.begin(), lambdas.end());
  return build_gram<double>(lam, T);
}

BiorthogonalResult biorthogonal(std::span<const double> lambdas, double T, int j,
                                PrecisionMode mode) {
  const int n = static_cast<int>(lambdas.size());
  if (j < 1 || j > n) throw Error(Errc::InvalidArgument, "biorthogonal: j out of range");
  BiorthogonalResult out;
  if (mode == PrecisionMode::Double) {
    const auto g = gram_matrix(lambdas, T);
    std::vector<double> rhs(n, 0.0);
    rhs[j - 1] = 1.0;
    auto sol = solve_spd_double(g, n, rhs);
    check_hard_cap(sol.condition, mode);
    out.coeffs = std::move(sol.x);
    out.condition = sol.condition;
    for (double r : sol.residual) out.residual = std::max(out.residual, std::abs(r));
  } else {
    auto lam = to_ext(lambdas);
    const auto g = build_gram<Ext>(lam, Ext(T));
    std::vector<Ext> rhs(n, Ext(0));
    rhs[j - 1] = Ext(1);
    auto sol = solve_spd_ext(g, n, rhs);
    check_hard_cap(sol.condition, mode);
    out.condition = sol.condition;
    out.coeffs.resize(n);
    for (int i = 0; i < n; ++i) out.coeffs[i] = static_cast<double>(sol.x[i]);
    for (double r : sol.residual) out.residual = std::max(out.residual, std::abs(r));
  }
  out.degraded = out.condition > kDegradedCondition;
  return out;
}

SynthesisResult solve_min_norm(const MomentSystem& sys, PrecisionMode mode, int sample_n) {
  const int n = sys.count();
  if (n < 1) throw Error(Errc::InvalidArgument, "solve_min_norm: empty system");
  SynthesisResult out;
  out.signal.T = sys.T;
  if (mode == PrecisionMode::Double) {
    const auto g = gram_matrix(sys.lambdas, sys.T);
    auto sol = solve_spd_double(g, n, sys.targets);
    check_hard_cap(sol.condition, mode);
    out.condition = sol.condition;
    out.residuals = std::move(sol.residual);
    out.signal.coeffs.resize(n);
    for (int i = 0; i < n; ++i) out.signal.coeffs[i] = {sys.lambdas[i], sol.x[i]};
  } else {
    auto lam = to_ext(sys.lambdas);
    const auto g = build_gram<Ext>(lam, Ext(sys.T));
    auto sol = solve_spd_ext(g, n, to_ext(sys.targets));
    check_hard_cap(sol.condition, mode);
    out.condition = sol.condition;
    out.residuals = std::move(sol.residual);
    out.signal.coeffs.resize(n);
    for (int i = 0; i < n; ++i) {
      out.signal.coeffs[i] = {sys.lambdas[i], static_cast<double>(sol.x[i])};
    }
    out.signal.ext = ExtBackend::make(std::move(lam), std::move(sol.x));
  }
  out.degraded = out.condition > kDegradedCondition;
  out.signal.resample(sample_n);
  return out;
}

DecayFit decay_check(const MomentSystem& sys) {
  if (sys.count() < 4) throw Error(Errc::InvalidArgument, "decay_check: need N >= 4");
  DecayFit fit;
  // log|m_n| = log K - delta n^2 over the nonzero targets
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < sys.count(); ++i) {
    const double mag = std::abs(sys.targets[i]);
    if (!(mag > 0.0) || !std::isfinite(mag)) continue;
    const double x = -static_cast<double>((i + 1)) * (i + 1);
    const double y = std::log(mag);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++fit.used;
  }
  if (fit.used < 2) {
    fit.degenerate = true;
    fit.ok = true;
    return fit;
  }
  const double denom = fit.used * sxx - sx * sx;
  const double slope = (fit.used * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / fit.used;
  fit.delta = slope;  // y = intercept + slope * (-n^2)
  fit.K = std::exp(intercept);
  fit.ok = fit.delta > 0.0;
  return fit;
}

}  // namespace heatmass::moment
