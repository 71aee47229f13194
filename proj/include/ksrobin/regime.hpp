#pragma once

// Sufficient conditions for global boundedness under positive boundary flux,
// the (eps1, eps2) pair that makes the mass estimate close, and numerical
// estimates of the trace constant and the principal Robin eigenvalue.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ksrobin/core.hpp"

namespace ksr {

enum class TraceConstantKind { UserSupplied, EstimatedLowerBound };

struct TraceConstantEstimate {
  int p{2};
  double value{1.0};
  TraceConstantKind kind{TraceConstantKind::UserSupplied};

  static TraceConstantEstimate user(double value, int p = 2);
};

struct EpsilonWitness {
  double eps1{0.0};
  double eps2{0.0};
};

enum class Condition { EstimateB, Bag0, Bag1 };

const char* to_string(Condition c);
const char* to_string(TraceConstantKind k);

struct RegimeVerdict {
  bool bounded{false};
  std::vector<Condition> satisfied_conditions;
  std::optional<EpsilonWitness> witness;
  TraceConstantKind trace_kind{TraceConstantKind::UserSupplied};
  std::string notes;

  bool satisfies(Condition c) const;
};

/// The three inequalities a witness must satisfy, checked by substitution:
///   K/eps1 + eps2 - b < 0,   K/eps1 - c <= 0,   1 - eps1/(4 eps2) > 0,
/// with K = chi^2 alpha^2 h C / 4.
bool witness_is_valid(const ModelParams& params, const SourceSpec& source, double trace_c,
                      const EpsilonWitness& w);

/// The piecewise condition on (b, c) that combines the trace constant with
/// the gradient damping.
bool estimate_b_holds(const ModelParams& params, const SourceSpec& source, double trace_c);

/// Midpoint construction of (eps1, eps2). std::nullopt when the admissible
/// set is empty (estimate_b_holds is then false as well).
std::optional<EpsilonWitness> find_epsilon_witness(const ModelParams& params,
                                                   const SourceSpec& source, double trace_c);

RegimeVerdict classify_tau0(const ModelParams& params, const SourceSpec& source,
                            const TraceConstantEstimate& c);
RegimeVerdict classify_tau1(const ModelParams& params, const SourceSpec& source,
                            const TraceConstantEstimate& c);
/// Dispatches on params.tau.
RegimeVerdict classify(const ModelParams& params, const SourceSpec& source,
                       const TraceConstantEstimate& c);

/// A radial test function with its derivative, used for the trace ratio.
struct TraceTestFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// {r^k : k = 0..6} and {exp(k (r - R)) : k = 1, 2, 4, 8, 16}.
std::vector<TraceTestFunction> default_trace_family(double radius);

/// omega_n R^{n-1} psi(R)^p / (int psi^p + int |psi'|^p) for one test function.
double trace_ratio(const RadialGrid& grid, int p, const TraceTestFunction& psi);

/// Maximum trace ratio over the family. The result bounds the optimal
/// constant from below.
TraceConstantEstimate estimate_trace_constant(const RadialGrid& grid, int p);
TraceConstantEstimate estimate_trace_constant(const RadialGrid& grid, int p,
                                              const std::vector<TraceTestFunction>& family);

/// Smallest eigenvalue of the discrete radial Robin Laplacian by inverse
/// power iteration on K + W (K stiffness, W cell weights).
double principal_robin_eigenvalue(const RadialGrid& grid, double h);

} // namespace ksr
