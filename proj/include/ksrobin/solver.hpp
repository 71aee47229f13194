#pragma once

// Conservative finite-volume time integrator for the radial reduction of the
// chemotaxis system with Robin signal condition and positive total flux:
//
//   u_t = Delta u - chi div(u grad v) + a u - b u^2 - c |grad u|^2
//   tau v_t = Delta v - v + u
//   u_nu - chi u v_nu = alpha chi h u v,   v_nu = -h v   on r = R.

#include <optional>
#include <string>
#include <vector>

#include "ksrobin/core.hpp"
#include "ksrobin/diagnostics.hpp"

namespace ksr {

enum class Profile { Gaussian, Constant };

struct FieldProfile {
  Profile kind{Profile::Gaussian};
  double amplitude{13.0};
  double width{1.0};
  /// When set, the profile is rescaled so its discrete integral equals this.
  std::optional<double> mass;
};

struct InitialData {
  FieldProfile u{};
  /// std::nullopt means v0 = u0. Ignored for tau = 0 (v solves the elliptic problem).
  std::optional<FieldProfile> v;
};

RadialState make_initial_state(const InitialData& init, const RadialGrid& grid);

struct RunConfig {
  ModelParams params{};
  SourceSpec source{};
  DomainSpec domain{};
  std::size_t cells{256};

  double t_end{1.0};
  double dt_init{1e-4};
  double dt_min{1e-12};
  double dt_max{1e-2};
  double cfl_target{0.4}; ///< <= 0 disables the advective limit
  double growth_cap{0.1};
  double u_max_threshold{1e8};
  double sample_interval{1e-2};
  std::size_t max_steps{50'000'000};
  std::vector<double> snapshot_times; ///< extra sample times (landed exactly)

  InitialData initial{};
  std::optional<double> weighted_m;
  std::optional<double> weighted_mu;

  RadialGrid make_grid() const;
  std::optional<WeightedMassSpec> weighted_spec() const;
  /// Checks every invariant, including the threshold against the initial data.
  void validate() const;
};

/// Halving/doubling step controller confined to [dt_min, dt_max].
class StepController {
public:
  StepController(double dt_init, double dt_min, double dt_max, double cfl_target,
                 double growth_cap);

  double dt() const { return dt_; }
  double dt_min() const { return dt_min_; }
  double dt_max() const { return dt_max_; }
  double cfl_target() const { return cfl_target_; }
  double growth_cap() const { return growth_cap_; }

  /// Step to attempt given the largest advective speed max |chi v_r|.
  double propose(double max_speed, double dr) const;
  /// Returns false when already at dt_min (cannot halve further).
  bool reject(double attempted);
  void accept(double relative_growth);

private:
  double dt_;
  double dt_min_;
  double dt_max_;
  double cfl_target_;
  double growth_cap_;
};

/// A run stops as stalled once this fraction of the mass sits in the
/// innermost cell: the grid can no longer resolve the profile.
inline constexpr double saturation_fraction = 0.9;

enum class TerminationKind { Completed, BlowUp, Stalled };

const char* to_string(TerminationKind k);

struct TerminationStatus {
  TerminationKind kind{TerminationKind::Completed};
  double t_final{0.0};
  std::string reason;
  std::optional<double> estimated_blowup_time;
};

struct Sample {
  RadialState state;
  DiagnosticsRecord record;
};

struct Trajectory {
  std::vector<Sample> samples;
  TerminationStatus status;
  RunConfig config;
  std::size_t steps{0};
  std::size_t rejected_steps{0};
};

/// Solves -(r^{n-1} v_r)_r / r^{n-1} + v = u with v_r(0) = 0 and the Robin
/// closure at R. Throws ComputeError if the relative residual exceeds 1e-12.
std::vector<double> solve_elliptic_v(std::span<const double> u, const RadialGrid& grid, double h);

/// Face fluxes F_f = r_f^{n-1} (u_r - chi u v_r) for f = 0..N. F_0 = 0 by
/// symmetry, interior faces use the exponentially fitted flux, and F_N is
/// the prescribed total flux R^{n-1} alpha chi h u(R) v(R).
std::vector<double> chemotactic_flux(const RadialState& s, const RadialGrid& grid,
                                     const ModelParams& params);

struct StepResult {
  RadialState state;
  double clipped_mass{0.0};  ///< mass added back by clipping negative undershoots
  double boundary_rate{0.0}; ///< omega_n F_N used in this step
};

/// One IMEX step of length dt. The u update is linearly implicit (fitted
/// flux with frozen v, b u_old u_new, c |u_r|^2 u_new / u_old); the boundary
/// flux and a u are explicit. v follows by backward Euler with source u_old
/// (tau = 1) or by the elliptic solve on u_new (tau = 0).
StepResult step(const RadialState& s, const RadialGrid& grid, const ModelParams& params,
                const SourceSpec& source, double dt);

/// Adaptive run from config.initial to config.t_end.
Trajectory advance(const RunConfig& config);

struct Image2D {
  std::size_t resolution{0};
  double x_min{0}, x_max{0}, y_min{0}, y_max{0};
  std::vector<double> values; ///< row-major, row j at y_min + (j + 1/2) * pixel
};

/// Samples the radial profile of u onto a square pixel grid over [-R, R]^2,
/// NaN outside the disk. Requires n = 2.
Image2D reconstruct_2d(const RadialState& s, const RadialGrid& grid, std::size_t resolution);

} // namespace ksr
