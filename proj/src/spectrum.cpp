#include "heatmass/spectrum.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

namespace heatmass {

const char* to_string(BoundaryCase c) {
  return c == BoundaryCase::Dirichlet ? "dirichlet" : "neumann";
}
const char* to_string(Scheme s) {
  return s == Scheme::BackwardEuler ? "backward-euler" : "crank-nicolson";
}
const char* to_string(PrecisionMode p) {
  return p == PrecisionMode::Double ? "double" : "extended";
}

}  // namespace heatmass

namespace heatmass::spectrum {

namespace {

constexpr double kPi = std::numbers::pi;
// Endpoint offset keeping bisection away from the cotangent poles.
constexpr double kBracketShrink = 1e-9;

double char_fn(BoundaryCase bc, double mu) {
  const double arg = bc == BoundaryCase::Dirichlet ? mu : 2.0 * mu;
  return 2.0 * std::cos(arg) / std::sin(arg) - mu;
}

double char_fn_derivative(BoundaryCase bc, double mu) {
  if (bc == BoundaryCase::Dirichlet) {
    const double s = std::sin(mu);
    return -2.0 / (s * s) - 1.0;
  }
  const double s = std::sin(2.0 * mu);
  return -4.0 / (s * s) - 1.0;
}

}  // namespace

const char* to_string(ModeKind k) {
  switch (k) {
    case ModeKind::DirichletEven: return "DirichletEven";
    case ModeKind::DirichletOdd: return "DirichletOdd";
    case ModeKind::NeumannOdd: return "NeumannOdd";
    case ModeKind::NeumannEven: return "NeumannEven";
  }
  return "?";
}

double EigenPair::frequency() const { return mu ? *mu : k * kPi; }

double characteristic_value(BoundaryCase bc, double mu) {
  if (!(mu > 0.0)) throw Error(Errc::InvalidArgument, "characteristic_value: mu must be positive");
  const double arg = bc == BoundaryCase::Dirichlet ? mu : 2.0 * mu;
  if (std::abs(std::sin(arg)) < 1e-12 * (1.0 + mu)) {
    throw Error(Errc::PoleProximity,
                "characteristic_value: cotangent pole; evaluate inside an open bracket only");
  }
  return char_fn(bc, mu);
}

std::pair<double, double> root_bracket(BoundaryCase bc, int k) {
  if (k < 1) throw Error(Errc::InvalidArgument, "root_bracket: k must be >= 1");
  const double half = bc == BoundaryCase::Dirichlet ? kPi : kPi / 2.0;
  return {(k - 1) * half, k * half};
}

double find_root(BoundaryCase bc, int k, double tol) {
  if (k < 1) throw Error(Errc::InvalidArgument, "find_root: k must be >= 1");
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "find_root: tol must be positive");

  auto [blo, bhi] = root_bracket(bc, k);
  double lo = blo + kBracketShrink;
  double hi = bhi - kBracketShrink;
  // F decreases from +inf to -inf across the bracket.
  double flo = char_fn(bc, lo);
  double fhi = char_fn(bc, hi);
  if (!(flo > 0.0) || !(fhi < 0.0)) {
    std::ostringstream os;
    os << "find_root: no sign change in shrunk bracket (" << lo << ", " << hi << ") for k=" << k;
    throw Error(Errc::NonConverged, os.str());
  }

  // Bisection to a coarse interval, then safeguarded Newton. Newton steps
  // that leave the bracket fall back to bisection.
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = char_fn(bc, mid);
    if (fm > 0.0) lo = mid; else hi = mid;
  }
  double x = 0.5 * (lo + hi);
  const int cap = 100;
  for (int i = 0; i < cap; ++i) {
    const double fx = char_fn(bc, x);
    if (fx > 0.0) lo = x; else hi = x;
    const double step = fx / char_fn_derivative(bc, x);
    double next = x - step;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 0.5 * std::numeric_limits<double>::epsilon() * (1.0 + x)) {
      x = next;
      break;
    }
    x = next;
    if (i == cap - 1) {
      std::ostringstream os;
      os << "find_root: no convergence in " << cap << " iterations; bracket (" << lo << ", " << hi
         << "), last iterate " << x;
      throw Error(Errc::NonConverged, os.str());
    }
  }
  if (std::abs(char_fn(bc, x)) > tol * (1.0 + x) && std::abs(char_fn(bc, x)) > 1e-10 * (1.0 + x)) {
    std::ostringstream os;
    os << "find_root: residual above tolerance at mu=" << x;
    throw Error(Errc::NonConverged, os.str());
  }
  return x;
}

namespace {

EigenPair dirichlet_even(int k) {
  EigenPair p;
  p.kind = ModeKind::DirichletEven;
  p.k = k;
  p.n = 2 * k;
  p.lambda = -(k * kPi) * (k * kPi);
  p.norm_sq = 1.0;  // int sin^2(k pi x) over each unit interval = 1/2
  p.b = (k % 2 == 0 ? 1.0 : -1.0) * k * kPi;
  return p;
}

EigenPair dirichlet_odd(int k) {
  EigenPair p;
  p.kind = ModeKind::DirichletOdd;
  p.k = k;
  p.n = 2 * k - 1;
  const double mu = find_root(BoundaryCase::Dirichlet, k);
  p.mu = mu;
  p.lambda = -mu * mu;
  const double s = std::sin(mu);
  p.norm_sq = 1.0 - std::sin(2.0 * mu) / (2.0 * mu) + s * s;
  p.b = -mu;  // v-component derivative at x = 1
  return p;
}

EigenPair neumann_mode(int n) {
  EigenPair p;
  p.n = n;
  p.k = (n + 1) / 2;
  const double mu = find_root(BoundaryCase::Neumann, n);
  p.mu = mu;
  p.lambda = -mu * mu;
  const double sc = std::sin(2.0 * mu) / (4.0 * mu);
  if (n % 2 == 1) {
    p.kind = ModeKind::NeumannOdd;
    const double t = std::tan(mu);
    p.norm_sq = 2.0 * (0.5 - sc + t * t * (0.5 + sc) + std::sin(mu) * std::sin(mu));
    p.b = -std::numbers::sqrt2 * t;  // -v-trace at x = 1
  } else {
    p.kind = ModeKind::NeumannEven;
    const double c = 1.0 / std::tan(mu);
    p.norm_sq = 2.0 * (c * c * (0.5 - sc) + 0.5 + sc + std::cos(mu) * std::cos(mu));
    p.b = -std::numbers::sqrt2;
  }
  return p;
}

}  // namespace

namespace {

EigenPair compute_eigenpair(BoundaryCase bc, int n) {
  if (bc == BoundaryCase::Dirichlet) {
    // Interlacing (k-1)pi < mu_k < k pi makes the global order the explicit
    // alternation odd/even; no numerical sort.
    return n % 2 == 1 ? dirichlet_odd((n + 1) / 2) : dirichlet_even(n / 2);
  }
  return neumann_mode(n);
}

// Root-finding is deterministic, so caching changes nothing observable.
std::mutex cache_mutex;
std::vector<EigenPair> cache[2];

}  // namespace

EigenPair eigenpair(BoundaryCase bc, int n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "eigenpair: n must be >= 1");
  std::lock_guard lock(cache_mutex);
  auto& modes = cache[bc == BoundaryCase::Dirichlet ? 0 : 1];
  while (static_cast<int>(modes.size()) < n) {
    modes.push_back(compute_eigenpair(bc, static_cast<int>(modes.size()) + 1));
  }
  return modes[n - 1];
}

std::vector<EigenPair> eigenpairs(BoundaryCase bc, int n_max) {
  std::vector<EigenPair> out;
  out.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) out.push_back(eigenpair(bc, n));
  return out;
}

EigenvectorValue eval_eigenfunction(const EigenPair& pair, double x) {
  switch (pair.kind) {
    case ModeKind::DirichletEven: {
      const double w = pair.k * kPi;
      return {std::sin(w * x), std::sin(w * x), 0.0};
    }
    case ModeKind::DirichletOdd: {
      const double mu = *pair.mu;
      return {std::sin((1.0 + x) * mu), std::sin((1.0 - x) * mu), std::sin(mu)};
    }
    case ModeKind::NeumannOdd: {
      const double mu = *pair.mu;
      const double r = std::numbers::sqrt2;
      return {r * std::sin(mu * (x + 1.0)), r * std::tan(mu) * std::cos(mu * (x - 1.0)),
              r * std::sin(mu)};
    }
    case ModeKind::NeumannEven: {
      const double mu = *pair.mu;
      const double r = std::numbers::sqrt2;
      return {r / std::tan(mu) * std::sin(mu * (x + 1.0)),
              r * std::cos(mu * (x - 1.0)), r * std::cos(mu)};
    }
  }
  throw Error(Errc::Internal, "eval_eigenfunction: bad kind");
}

double eigenfunction_v_derivative(const EigenPair& pair, double x) {
  switch (pair.kind) {
    case ModeKind::DirichletEven: {
      const double w = pair.k * kPi;
      return w * std::cos(w * x);
    }
    case ModeKind::DirichletOdd: {
      const double mu = *pair.mu;
      return -mu * std::cos((1.0 - x) * mu);
    }
    case ModeKind::NeumannOdd: {
      const double mu = *pair.mu;
      return -std::numbers::sqrt2 * std::tan(mu) * mu * std::sin(mu * (x - 1.0));
    }
    case ModeKind::NeumannEven: {
      const double mu = *pair.mu;
      return -std::numbers::sqrt2 * mu * std::sin(mu * (x - 1.0));
    }
  }
  throw Error(Errc::Internal, "eigenfunction_v_derivative: bad kind");
}

double asymptotic_mu(BoundaryCase bc, int k) {
  if (bc == BoundaryCase::Dirichlet) return (k - 1) * kPi + 2.0 / (k * kPi);
  // The leading correction resolves numerically to 2/(k pi); the direct
  // expansion of mu = 2 cot 2mu at (k-1)pi/2 gives 2/((k-1)pi) = 2/(k pi) + O(k^-2).
  return (k - 1) * kPi / 2.0 + 2.0 / (k * kPi);
}

double asymptotic_deviation(BoundaryCase bc, int k) {
  return find_root(bc, k) - asymptotic_mu(bc, k);
}

std::vector<TableRow> table(BoundaryCase bc, int n_max) {
  if (n_max < 1) throw Error(Errc::InvalidArgument, "table: n_max must be >= 1");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto pairs = eigenpairs(bc, n_max);
  std::vector<TableRow> rows;
  rows.reserve(n_max);
  for (int i = 0; i < n_max; ++i) {
    TableRow r;
    r.pair = pairs[i];
    r.gap_to_next = i + 1 < n_max ? pairs[i].lambda - pairs[i + 1].lambda : nan;
    r.asym_deviation = pairs[i].mu ? *pairs[i].mu - asymptotic_mu(bc, pairs[i].k) : nan;
    rows.push_back(r);
  }
  return rows;
}

std::vector<std::pair<int, double>> gap_table(BoundaryCase bc, int n_max) {
  if (n_max < 2) throw Error(Errc::InvalidArgument, "gap_table: n_max must be >= 2");
  auto pairs = eigenpairs(bc, n_max);
  std::vector<std::pair<int, double>> gaps;
  gaps.reserve(n_max - 1);
  for (int n = 0; n + 1 < n_max; ++n) {
    gaps.emplace_back(n + 1, pairs[n].lambda - pairs[n + 1].lambda);
  }
  return gaps;
}

}  // namespace heatmass::spectrum
