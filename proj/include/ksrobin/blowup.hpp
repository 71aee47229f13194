#pragma once

// Finite-time blow-up apparatus for the sourceless zero-flux system on a
// ball: comparison functions for the radial moment M_n, the moment
// differential inequality monitor, the two-dimensional critical mass and a
// trajectory-level assessment.

#include <optional>
#include <string>
#include <vector>

#include "ksrobin/core.hpp"

namespace ksr {

struct Trajectory;
struct RunConfig;

class MomentBound {
public:
  /// theta > 0 and n >= 2.
  MomentBound(double theta, double chi, double radius, int n);

  double theta() const { return theta_; }
  double chi() const { return chi_; }
  double radius() const { return radius_; }
  int n() const { return n_; }

private:
  double theta_;
  double chi_;
  double radius_;
  int n_;
};

/// (1/e) theta^{3/2} s^{1/2} for n = 2, n/(2(n-2)) theta^{(2n-2)/n} s^{2/n} for n >= 3.
double j_theta(double s, double theta, int n);

/// 2n(n-1) theta^{2/n} s^{(n-2)/n} - (n/2) chi theta^2 + chi n R^{-n} theta s + chi J(s).
/// The first term is 4 theta at n = 2 for every s >= 0.
double e_theta(double s, const MomentBound& bound);

/// 8 pi / chi for n = 2; std::nullopt for n >= 3 (no mass condition).
std::optional<double> blowup_mass_threshold(int n, double chi);

/// 1 / (1 + n / ((2n + 4) kappa)); needs kappa > 2 at n = 2, kappa > n - 2 at n >= 3.
double theta_exponent(int n, double kappa);

struct OdiResidual {
  std::vector<double> t;     ///< left end point of each interval
  std::vector<double> delta; ///< (M(t+dt) - M(t))/dt - E(M(t))
  double tolerance{0.0};
  /// Indices into t/delta with delta > tolerance.
  std::vector<std::size_t> violations;
};

/// Default allowance: 10 x the largest energy-residual magnitude of the run.
double default_odi_tolerance(const Trajectory& trajectory);

/// Moment inequality residual along a tau = 0 run with n >= 2. theta is
/// taken from the initial mass. A negative tolerance selects the default.
OdiResidual moment_odi_residual(const Trajectory& trajectory, double tolerance = -1.0);

enum class BlowupVerdict { BlewUp, BoundedOnHorizon, Inconclusive };

const char* to_string(BlowupVerdict v);

struct BlowupCriteria {
  bool supercritical_mass_n2{false};
  /// Zero tolerance-exceeding violations outside the final 10 samples.
  /// Not applicable (nullopt) unless tau = 0 and n >= 2.
  std::optional<bool> odi_respected;
  bool lyapunov_diverging{false};
};

struct BlowupAssessment {
  BlowupVerdict verdict{BlowupVerdict::Inconclusive};
  std::optional<double> t_blowup;
  BlowupCriteria criteria;
  double kappa{0.0};
  /// 1/(1 + n/((2n+4) kappa)) at the kappa used, always in (1/2, 1).
  double theta_exponent{0.0};
};

/// Number of trailing samples before the blow-up flag that are exempt from
/// the moment inequality check.
inline constexpr std::size_t odi_exempt_tail = 10;

BlowupAssessment assess(const Trajectory& trajectory);

/// Narrow Gaussian exp(-r^2/width^2) for u rescaled to the given mass; v
/// follows u (or the elliptic solve when tau = 0).
struct ConcentratedData {
  double mass;
  double width;
};
void apply_concentrated_initial(RunConfig& config, const ConcentratedData& data);

/// M_n of the initial state described by config, the quantity that has to
/// be small for blow-up.
double initial_moment(const RunConfig& config);

} // namespace ksr
