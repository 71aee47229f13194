#include "ksrobin/regime.hpp"

#include <algorithm>
#include <cmath>

#include "ksrobin/operators.hpp"

namespace ksr {

TraceConstantEstimate TraceConstantEstimate::user(double value, int p) {
  return {p, value, TraceConstantKind::UserSupplied};
}

const char* to_string(Condition c) {
  switch (c) {
  case Condition::EstimateB: return "Estimate_b";
  case Condition::Bag0: return "Estimate_Bag0";
  case Condition::Bag1: return "Estimate_Bag1";
  }
  return "?";
}

const char* to_string(TraceConstantKind k) {
  return k == TraceConstantKind::UserSupplied ? "user-supplied"
                                              : "numerically-estimated-lower-bound";
}

bool RegimeVerdict::satisfies(Condition c) const {
  return std::find(satisfied_conditions.begin(), satisfied_conditions.end(), c) !=
         satisfied_conditions.end();
}

namespace {

// chi^2 alpha^2 h C
double boundary_strength(const ModelParams& p, double trace_c) {
  const double ca = p.chi * p.alpha;
  return ca * ca * p.h * trace_c;
}

void check_trace_constant(double trace_c) {
  if (!(trace_c > 0.0) || !std::isfinite(trace_c))
    throw ValidationError("trace constant must be positive, got " + std::to_string(trace_c));
}

} // namespace

bool witness_is_valid(const ModelParams& params, const SourceSpec& source, double trace_c,
                      const EpsilonWitness& w) {
  if (!(w.eps1 > 0.0) || !(w.eps2 > 0.0)) return false;
  const double k = boundary_strength(params, trace_c) / (4.0 * w.eps1);
  return k + w.eps2 - source.b < 0.0 && k - source.c <= 0.0 && 1.0 - w.eps1 / (4.0 * w.eps2) > 0.0;
}

bool estimate_b_holds(const ModelParams& params, const SourceSpec& source, double trace_c) {
  const double b = source.b;
  const double c = source.c;
  const double ca = params.chi * params.alpha;
  const double root = std::sqrt(params.h * trace_c);
  const double split = 0.25 * ca * root;
  if (c > 0.0 && c < split) return b > c + ca * ca * params.h * trace_c / (16.0 * c);
  if (c >= split) {
    if (params.alpha == 0.0 && !(c > 0.0)) return false;
    return b > 0.5 * ca * root;
  }
  return false;
}

std::optional<EpsilonWitness> find_epsilon_witness(const ModelParams& params,
                                                   const SourceSpec& source, double trace_c) {
  check_trace_constant(trace_c);
  const double b = source.b;
  if (params.alpha == 0.0) {
    // boundary terms vanish: any eps1 > 0 with eps2 in (eps1/4, b)
    if (!(b > 0.0)) return std::nullopt;
    EpsilonWitness w{b, 0.5 * b};
    return witness_is_valid(params, source, trace_c, w) ? std::optional{w} : std::nullopt;
  }

  const double q = boundary_strength(params, trace_c);
  const double disc = 4.0 * b * b - q;
  if (!(disc > 0.0)) return std::nullopt;
  if (!(source.c > 0.0)) return std::nullopt;

  const double s = std::sqrt(disc);
  const double lo = std::max(2.0 * b - s, q / (4.0 * source.c));
  const double hi = 2.0 * b + s;
  if (!(lo < hi)) return std::nullopt;

  EpsilonWitness w;
  w.eps1 = 0.5 * (lo + hi);
  const double e2_lo = 0.25 * w.eps1;
  const double e2_hi = b - q / (4.0 * w.eps1);
  if (!(e2_lo < e2_hi)) return std::nullopt;
  w.eps2 = 0.5 * (e2_lo + e2_hi);

  if (!witness_is_valid(params, source, trace_c, w)) return std::nullopt;
  return w;
}

namespace {

RegimeVerdict classify_common(const ModelParams& params, const SourceSpec& source,
                              const TraceConstantEstimate& c, Condition extra, bool extra_holds) {
  params.validate();
  source.validate();
  check_trace_constant(c.value);

  RegimeVerdict out;
  out.trace_kind = c.kind;
  if (estimate_b_holds(params, source, c.value)) {
    out.witness = find_epsilon_witness(params, source, c.value);
    if (out.witness) {
      out.satisfied_conditions.push_back(Condition::EstimateB);
    } else {
      out.notes += "Estimate_b holds but no witness could be constructed (rounding at the "
                   "boundary of the admissible set); condition not counted. ";
    }
  }
  if (extra_holds) out.satisfied_conditions.push_back(extra);
  out.bounded = !out.satisfied_conditions.empty();

  if (c.kind == TraceConstantKind::EstimatedLowerBound && out.satisfies(Condition::EstimateB))
    out.notes += "Estimate_b evaluated with a numerically estimated lower bound on the trace "
                 "constant; sufficiency is not certified. ";
  if (!out.bounded) out.notes += "no listed sufficient condition holds. ";
  return out;
}

} // namespace

RegimeVerdict classify_tau0(const ModelParams& params, const SourceSpec& source,
                            const TraceConstantEstimate& c) {
  if (params.tau != 0) throw ValidationError("classify_tau0 requires tau = 0");
  const bool bag0 = params.alpha * params.chi < std::min(source.b, 4.0 * source.c);
  return classify_common(params, source, c, Condition::Bag0, bag0);
}

RegimeVerdict classify_tau1(const ModelParams& params, const SourceSpec& source,
                            const TraceConstantEstimate& c) {
  if (params.tau != 1) throw ValidationError("classify_tau1 requires tau = 1");
  return classify_common(params, source, c, Condition::Bag1, source.b > params.chi);
}

RegimeVerdict classify(const ModelParams& params, const SourceSpec& source,
                       const TraceConstantEstimate& c) {
  return params.tau == 0 ? classify_tau0(params, source, c) : classify_tau1(params, source, c);
}

std::vector<TraceTestFunction> default_trace_family(double radius) {
  std::vector<TraceTestFunction> fam;
  for (int k = 0; k <= 6; ++k) {
    fam.push_back({"r^" + std::to_string(k), [k](double r) { return std::pow(r, k); },
                   [k](double r) { return k == 0 ? 0.0 : k * std::pow(r, k - 1); }});
  }
  for (int k : {1, 2, 4, 8, 16}) {
    const double kk = k;
    fam.push_back({"exp(" + std::to_string(k) + "(r-R))",
                   [kk, radius](double r) { return std::exp(kk * (r - radius)); },
                   [kk, radius](double r) { return kk * std::exp(kk * (r - radius)); }});
  }
  return fam;
}

double trace_ratio(const RadialGrid& grid, int p, const TraceTestFunction& psi) {
  if (p != 1 && p != 2) throw ValidationError("trace exponent must be 1 or 2");
  const auto r = grid.centers();
  const auto w = grid.cell_weights();
  double bulk = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    bulk += w[i] * (std::pow(std::abs(psi.value(r[i])), p) +
                    std::pow(std::abs(psi.derivative(r[i])), p));
  }
  const double R = grid.radius();
  const double surface =
      grid.omega() * std::pow(R, grid.dim() - 1) * std::pow(std::abs(psi.value(R)), p);
  return surface / bulk;
}

TraceConstantEstimate estimate_trace_constant(const RadialGrid& grid, int p) {
  return estimate_trace_constant(grid, p, default_trace_family(grid.radius()));
}

TraceConstantEstimate estimate_trace_constant(const RadialGrid& grid, int p,
                                              const std::vector<TraceTestFunction>& family) {
  if (family.empty()) throw ValidationError("trace test family is empty");
  double best = 0.0;
  for (const auto& psi : family) best = std::max(best, trace_ratio(grid, p, psi));
  return {p, best, TraceConstantKind::EstimatedLowerBound};
}

double principal_robin_eigenvalue(const RadialGrid& grid, double h) {
  if (!(h >= 0.0)) throw ValidationError("Robin coefficient must be nonnegative");
  constexpr int max_iterations = 10000;
  constexpr double tolerance = 1e-10;

  const auto K = robin_stiffness(grid, h);
  const auto w = grid.cell_weights();
  const auto N = grid.cells();

  Tridiagonal shifted = K;
  for (std::size_t i = 0; i < N; ++i) shifted.diag[i] += w[i];

  auto rayleigh = [&](const std::vector<double>& z) {
    const auto kz = K.apply(z);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      num += z[i] * kz[i];
      den += w[i] * z[i] * z[i];
    }
    return num / den;
  };

  std::vector<double> z(N, 1.0);
  double mu = rayleigh(z);
  std::vector<double> rhs(N);
  for (int it = 0; it < max_iterations; ++it) {
    for (std::size_t i = 0; i < N; ++i) rhs[i] = w[i] * z[i];
    z = solve_tridiagonal(shifted, rhs);
    double norm = 0.0;
    for (std::size_t i = 0; i < N; ++i) norm += w[i] * z[i] * z[i];
    norm = std::sqrt(norm);
    for (auto& x : z) x /= norm;
    const double next = rayleigh(z);
    if (std::abs(next - mu) < tolerance) return next;
    mu = next;
  }
  throw ComputeError("principal_robin_eigenvalue: no convergence after 10000 iterations");
}

} // namespace ksr
