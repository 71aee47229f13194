#pragma once

// Functionals monitored along a run: masses, norms, the boundary flux, the
// Lyapunov functional F_h and its dissipation rate D, radial moments, the
// exponentially weighted mass, and identity residuals built from them.

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ksrobin/core.hpp"

namespace ksr {

/// Floor below which a face is dropped from the singular dissipation integrand.
inline constexpr double dissipation_density_floor = 1e-30;

struct DiagnosticsRecord {
  double t{0.0};
  double mass_u{0.0};
  double mass_v{0.0};
  double linf_u{0.0};
  std::map<int, double> lp_u; ///< keys 2 and 4
  double boundary_flux{0.0};  ///< alpha chi h omega_n R^{n-1} u(R) v(R)
  double lyapunov{0.0};
  std::optional<double> dissipation; ///< needs the state one step earlier
  double moment{0.0};                ///< M_n
  double theta{0.0};                 ///< mass_u / omega_n
  std::optional<double> weighted_mass;
  double clipped_mass{0.0}; ///< cumulative positivity correction
};

/// Parameters of int (u + mu) exp(m v). Constructible only when
/// chi <= m < b and mu >= 1/c with c > 0.
class WeightedMassSpec {
public:
  static WeightedMassSpec make(double m, double mu, const ModelParams& params,
                               const SourceSpec& source);
  double m() const { return m_; }
  double mu() const { return mu_; }

private:
  WeightedMassSpec(double m, double mu) : m_(m), mu_(mu) {}
  double m_;
  double mu_;
};

/// Boundary values entering the flux: u(R) by clamped linear extrapolation,
/// v(R) by the Robin-consistent trace.
double boundary_u(const RadialGrid& grid, const RadialState& s);
double boundary_v(const RadialGrid& grid, const RadialState& s, const ModelParams& params);

/// Mass inflow rate through r = R: alpha chi h omega_n R^{n-1} u(R) v(R).
double boundary_flux(const RadialState& s, const RadialGrid& grid, const ModelParams& params);

double lp_norm(const RadialGrid& grid, std::span<const double> field, double p);

/// F_h = chi/2 int|v_r|^2 + chi/2 int v^2 - chi int u v + int u ln u + chi h/2 int_dO v^2.
/// The gradient and boundary terms use the same face quadrature and Robin
/// closure as the solver, so that the discrete energy identity is exact in the
/// semi-discrete limit. 0 ln 0 := 0.
double lyapunov(const RadialState& s, const RadialGrid& grid, const ModelParams& params);

/// D = tau chi int v_t^2 + int u |u_r/u - chi v_r|^2 with v_t = (v - v_prev)/dt.
/// The second integrand is evaluated at faces as J^2 / u_face with J the
/// exponentially fitted face flux; faces with a neighbouring density below
/// dissipation_density_floor are dropped. For tau = 1 this is exactly the
/// dissipation of the fully parabolic system; for tau = 0 the v_t term is
/// absent because the signal equation holds as a constraint.
double dissipation(const RadialState& s, const RadialState& prev, double dt,
                   const RadialGrid& grid, const ModelParams& params);

struct Moments {
  double m_n{0.0};
  double theta{0.0};
};

/// M_n = int_0^R u r^{2n-1} dr (integrated exactly per cell), theta = mass/omega_n.
Moments moment(const RadialState& s, const RadialGrid& grid);

double weighted_mass(const RadialState& s, const RadialGrid& grid, const WeightedMassSpec& spec);

/// (int f^2 + int |f_r|^2)^{1/2}; gradients at faces, integrated over dual cells.
double w12_norm(std::span<const double> field, const RadialGrid& grid);

DiagnosticsRecord evaluate(const RadialState& s, const RadialState* prev, double dt,
                           const RadialGrid& grid, const ModelParams& params,
                           const std::optional<WeightedMassSpec>& weighted, double clipped_mass);

struct Trajectory;

struct ResidualSeries {
  std::vector<double> t;   ///< right end point of each interval
  std::vector<double> rho; ///< (F(t_k+1) - F(t_k)) / dt + D(t_k+1)
  double dr{0.0};
  double max_dt{0.0};

  double max_abs() const;
};

/// Energy identity residual for the fully parabolic sourceless system.
/// Rejects tau = 0 trajectories, nonzero sources and alpha > 0.
ResidualSeries energy_identity_residual(const Trajectory& trajectory);

/// Same residual without the tau restriction (tau = 0 uses the reduced
/// dissipation). Used to size discretisation allowances.
ResidualSeries energy_residual_any_tau(const Trajectory& trajectory);

} // namespace ksr
