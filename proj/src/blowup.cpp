#include "ksrobin/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ksrobin/diagnostics.hpp"
#include "ksrobin/solver.hpp"

namespace ksr {

namespace {

void require_dim(int n) {
  if (n < 2) throw ValidationError("blow-up comparison functions need n >= 2, got " + std::to_string(n));
}

// Exponent default per regime: the fully parabolic theory needs kappa > 2 at
// n = 2 and kappa > n - 2 beyond; the parabolic-elliptic bound uses kappa = 2.
double default_kappa(int n, int tau) {
  if (n == 1) return 1.0;
  if (n == 2) return tau == 1 ? 3.0 : 2.0;
  return static_cast<double>(n - 1);
}

double raw_theta_exponent(int n, double kappa) {
  return 1.0 / (1.0 + n / ((2.0 * n + 4.0) * kappa));
}

} // namespace

MomentBound::MomentBound(double theta, double chi, double radius, int n)
    : theta_(theta), chi_(chi), radius_(radius), n_(n) {
  require_dim(n);
  if (!(theta > 0.0)) throw ValidationError("normalized mass theta must be positive");
  if (!(chi > 0.0)) throw ValidationError("chi must be positive");
  if (!(radius > 0.0)) throw ValidationError("radius must be positive");
}

double j_theta(double s, double theta, int n) {
  require_dim(n);
  if (!(s >= 0.0)) throw ValidationError("j_theta: moment value must be nonnegative");
  if (!(theta > 0.0)) throw ValidationError("j_theta: theta must be positive");
  if (n == 2) return std::pow(theta, 1.5) * std::sqrt(s) / std::numbers::e;
  const double nd = n;
  return nd / (2.0 * (nd - 2.0)) * std::pow(theta, (2.0 * nd - 2.0) / nd) * std::pow(s, 2.0 / nd);
}

double e_theta(double s, const MomentBound& b) {
  if (!(s >= 0.0)) throw ValidationError("e_theta: moment value must be nonnegative");
  const int n = b.n();
  const double nd = n;
  const double th = b.theta();
  const double lead = n == 2 ? 4.0 * th
                             : 2.0 * nd * (nd - 1.0) * std::pow(th, 2.0 / nd) *
                                   std::pow(s, (nd - 2.0) / nd);
  return lead - 0.5 * nd * b.chi() * th * th + b.chi() * nd * std::pow(b.radius(), -nd) * th * s +
         b.chi() * j_theta(s, th, n);
}

std::optional<double> blowup_mass_threshold(int n, double chi) {
  require_dim(n);
  if (!(chi > 0.0)) throw ValidationError("chi must be positive");
  if (n == 2) return 8.0 * std::numbers::pi / chi;
  return std::nullopt;
}

double theta_exponent(int n, double kappa) {
  require_dim(n);
  const double lo = n == 2 ? 2.0 : n - 2.0;
  if (!(kappa > lo) || !std::isfinite(kappa))
    throw ValidationError("theta_exponent: kappa must exceed " + std::to_string(lo) +
                          " at n = " + std::to_string(n));
  return raw_theta_exponent(n, kappa);
}

double default_odi_tolerance(const Trajectory& trajectory) {
  return 10.0 * energy_residual_any_tau(trajectory).max_abs();
}

OdiResidual moment_odi_residual(const Trajectory& trajectory, double tolerance) {
  const auto& cfg = trajectory.config;
  if (cfg.params.tau != 0)
    throw ValidationError("moment inequality is derived for tau = 0 trajectories only");
  require_dim(cfg.domain.n);
  if (trajectory.samples.empty()) throw ValidationError("empty trajectory");

  const double theta = trajectory.samples.front().record.theta;
  const MomentBound bound(theta, cfg.params.chi, cfg.domain.radius, cfg.domain.n);

  OdiResidual out;
  out.tolerance = tolerance < 0.0 ? default_odi_tolerance(trajectory) : tolerance;
  const auto& s = trajectory.samples;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const auto& a = s[k].record;
    const auto& b = s[k + 1].record;
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) continue;
    const double d = (b.moment - a.moment) / dt - e_theta(a.moment, bound);
    if (d > out.tolerance) out.violations.push_back(out.t.size());
    out.t.push_back(a.t);
    out.delta.push_back(d);
  }
  return out;
}

const char* to_string(BlowupVerdict v) {
  switch (v) {
  case BlowupVerdict::BlewUp: return "blew_up";
  case BlowupVerdict::BoundedOnHorizon: return "bounded_on_horizon";
  case BlowupVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

bool lyapunov_diverging(const Trajectory& traj) {
  const auto& s = traj.samples;
  if (s.size() < 8) return false;
  const std::size_t start = s.size() - std::max<std::size_t>(2, s.size() / 4);
  for (std::size_t k = start; k + 1 < s.size(); ++k)
    if (s[k + 1].record.lyapunov > s[k].record.lyapunov) return false;
  const double f0 = s[start].record.lyapunov;
  const double f1 = s.back().record.lyapunov;
  return -f1 > 10.0 * std::abs(f0);
}

} // namespace

BlowupAssessment assess(const Trajectory& traj) {
  const auto& cfg = traj.config;
  const int n = cfg.domain.n;
  BlowupAssessment out;

  switch (traj.status.kind) {
  case TerminationKind::BlowUp:
    out.verdict = BlowupVerdict::BlewUp;
    out.t_blowup = traj.status.estimated_blowup_time;
    break;
  case TerminationKind::Completed: out.verdict = BlowupVerdict::BoundedOnHorizon; break;
  case TerminationKind::Stalled: out.verdict = BlowupVerdict::Inconclusive; break;
  }

  out.kappa = default_kappa(n, cfg.params.tau);
  out.theta_exponent = raw_theta_exponent(n, out.kappa);

  if (n == 2 && !traj.samples.empty()) {
    const double m0 = traj.samples.front().record.mass_u;
    out.criteria.supercritical_mass_n2 = m0 > *blowup_mass_threshold(2, cfg.params.chi);
  }

  if (cfg.params.tau == 0 && n >= 2 && traj.samples.size() >= 2) {
    const auto odi = moment_odi_residual(traj);
    std::size_t limit = odi.t.size();
    if (traj.status.kind == TerminationKind::BlowUp)
      limit = limit > odi_exempt_tail ? limit - odi_exempt_tail : 0;
    out.criteria.odi_respected =
        std::none_of(odi.violations.begin(), odi.violations.end(),
                     [limit](std::size_t i) { return i < limit; });
  }

  if (cfg.params.tau == 1) out.criteria.lyapunov_diverging = lyapunov_diverging(traj);
  return out;
}

void apply_concentrated_initial(RunConfig& config, const ConcentratedData& data) {
  if (!(data.mass > 0.0)) throw ValidationError("concentrated data: mass must be positive");
  if (!(data.width > 0.0)) throw ValidationError("concentrated data: width must be positive");
  config.initial.u = FieldProfile{Profile::Gaussian, 1.0, data.width, data.mass};
  config.initial.v.reset();
}

double initial_moment(const RunConfig& config) {
  const auto grid = config.make_grid();
  return moment(make_initial_state(config.initial, grid), grid).m_n;
}

} // namespace ksr
