#include "ksrobin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ksrobin/operators.hpp"

namespace ksr {

namespace {

std::vector<double> build_profile(const FieldProfile& p, const RadialGrid& grid) {
  std::vector<double> f(grid.cells());
  if (p.kind == Profile::Constant) {
    if (!(p.amplitude >= 0.0)) throw ValidationError("constant profile must be nonnegative");
    std::fill(f.begin(), f.end(), p.amplitude);
  } else {
    f = gaussian_initial(grid, p.amplitude, p.width).u;
  }
  if (p.mass) {
    if (!(*p.mass > 0.0)) throw ValidationError("prescribed initial mass must be positive");
    const double m = integrate(grid, f);
    if (!(m > 0.0)) throw ValidationError("cannot rescale a profile with zero mass");
    for (auto& x : f) x *= *p.mass / m;
  }
  return f;
}

double max_speed(const RadialState& s, const RadialGrid& grid, double chi) {
  double m = 0.0;
  for (std::size_t f = 1; f < s.v.size(); ++f)
    m = std::max(m, std::abs(chi * (s.v[f] - s.v[f - 1]) / grid.dr()));
  return m;
}

double max_of(const std::vector<double>& x) {
  return x.empty() ? 0.0 : *std::max_element(x.begin(), x.end());
}

bool all_finite(const RadialState& s) {
  auto ok = [](const std::vector<double>& x) {
    return std::all_of(x.begin(), x.end(), [](double y) { return std::isfinite(y); });
  };
  return ok(s.u) && ok(s.v);
}

} // namespace

RadialState make_initial_state(const InitialData& init, const RadialGrid& grid) {
  RadialState s;
  s.u = build_profile(init.u, grid);
  s.v = init.v ? build_profile(*init.v, grid) : s.u;
  return s;
}

RadialGrid RunConfig::make_grid() const { return build_grid(domain, cells); }

std::optional<WeightedMassSpec> RunConfig::weighted_spec() const {
  if (!weighted_m && !weighted_mu) return std::nullopt;
  if (!weighted_m || !weighted_mu)
    throw ValidationError("weighted mass needs both diagnostics.weighted_m and weighted_mu");
  return WeightedMassSpec::make(*weighted_m, *weighted_mu, params, source);
}

void RunConfig::validate() const {
  params.validate();
  source.validate();
  domain.validate();
  if (!(t_end > 0.0)) throw ValidationError("time.t_end must be positive");
  if (!(dt_min > 0.0)) throw ValidationError("time.dt_min must be positive");
  if (!(dt_min <= dt_init)) throw ValidationError("time.dt_min must not exceed time.dt_init");
  if (!(dt_init <= dt_max)) throw ValidationError("time.dt_init must not exceed time.dt_max");
  if (!(sample_interval > 0.0)) throw ValidationError("time.sample_interval must be positive");
  if (!(growth_cap > 0.0)) throw ValidationError("control.growth_cap must be positive");
  if (!std::isfinite(cfl_target)) throw ValidationError("control.cfl_target must be finite");
  if (max_steps == 0) throw ValidationError("control.max_steps must be positive");
  for (double t : snapshot_times)
    if (!(t >= 0.0 && t <= t_end))
      throw ValidationError("output.snapshot_times must lie in [0, t_end]");
  const auto grid = make_grid();
  (void)weighted_spec();
  const auto s0 = make_initial_state(initial, grid);
  if (!(u_max_threshold > max_of(s0.u)))
    throw ValidationError("control.u_max_threshold must exceed the initial maximum of u");
  for (double x : s0.u)
    if (!(x >= 0.0)) throw ValidationError("initial u must be nonnegative");
  for (double x : s0.v)
    if (!(x >= 0.0)) throw ValidationError("initial v must be nonnegative");
}

StepController::StepController(double dt_init, double dt_min, double dt_max, double cfl_target,
                               double growth_cap)
    : dt_(dt_init), dt_min_(dt_min), dt_max_(dt_max), cfl_target_(cfl_target),
      growth_cap_(growth_cap) {
  if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
    throw ValidationError("step controller needs 0 < dt_min <= dt_init <= dt_max");
}

double StepController::propose(double speed, double dr) const {
  double dt = dt_;
  if (cfl_target_ > 0.0 && speed > 0.0) dt = std::min(dt, cfl_target_ * dr / speed);
  return std::clamp(dt, dt_min_, dt_max_);
}

bool StepController::reject(double attempted) {
  if (attempted <= dt_min_) return false;
  dt_ = std::clamp(0.5 * attempted, dt_min_, dt_max_);
  return true;
}

void StepController::accept(double relative_growth) {
  if (relative_growth < 0.25 * growth_cap_) dt_ = std::min(2.0 * dt_, dt_max_);
}

const char* to_string(TerminationKind k) {
  switch (k) {
  case TerminationKind::Completed: return "completed";
  case TerminationKind::BlowUp: return "blow_up";
  case TerminationKind::Stalled: return "stalled";
  }
  return "?";
}

std::vector<double> solve_elliptic_v(std::span<const double> u, const RadialGrid& grid,
                                     double h) {
  if (u.size() != grid.cells()) throw ValidationError("solve_elliptic_v: field/grid mismatch");
  const auto w = grid.cell_weights();
  auto A = robin_stiffness(grid, h);
  std::vector<double> rhs(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    A.diag[i] += w[i];
    rhs[i] = w[i] * u[i];
  }
  auto v = solve_tridiagonal(A, rhs);

  // backward-error check: |A v - rhs| against |A| |v| + |rhs|
  const auto av = A.apply(v);
  double res = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double mag = std::abs(A.diag[i] * v[i]) + std::abs(rhs[i]);
    if (i > 0) mag += std::abs(A.lower[i] * v[i - 1]);
    if (i + 1 < v.size()) mag += std::abs(A.upper[i] * v[i + 1]);
    res = std::max(res, std::abs(av[i] - rhs[i]));
    scale = std::max(scale, mag);
  }
  if (scale > 0.0 && res > 1e-12 * scale)
    throw ComputeError("solve_elliptic_v: relative residual " + std::to_string(res / scale));
  return v;
}

std::vector<double> chemotactic_flux(const RadialState& s, const RadialGrid& grid,
                                     const ModelParams& params) {
  const auto N = grid.cells();
  const auto S = grid.face_areas();
  std::vector<double> F(N + 1, 0.0);
  for (std::size_t f = 1; f < N; ++f) {
    const double pe = params.chi * (s.v[f] - s.v[f - 1]);
    F[f] = S[f] * sg_flux_density(s.u[f - 1], s.u[f], pe, grid.dr());
  }
  F[N] = boundary_flux(s, grid, params) / grid.omega();
  return F;
}

StepResult step(const RadialState& s, const RadialGrid& grid, const ModelParams& params,
                const SourceSpec& source, double dt) {
  if (!(dt > 0.0)) throw ValidationError("step: dt must be positive");
  const auto N = grid.cells();
  if (s.u.size() != N || s.v.size() != N) throw ValidationError("step: state/grid mismatch");

  const auto w = grid.cell_weights();
  const auto S = grid.face_areas();
  const double om = grid.omega();
  const double dr = grid.dr();
  const auto& u = s.u;
  const auto& v = s.v;

  StepResult out;
  const auto F = chemotactic_flux(s, grid, params);
  out.boundary_rate = om * F[N];

  // squared face gradients of u; the wall gradient follows from
  // u_nu = (alpha - 1) chi h u v
  std::vector<double> g2(N + 1, 0.0);
  if (source.c > 0.0) {
    for (std::size_t f = 1; f < N; ++f) {
      const double g = (u[f] - u[f - 1]) / dr;
      g2[f] = g * g;
    }
    const double gw = (params.alpha - 1.0) * params.chi * params.h * boundary_u(grid, s) *
                      boundary_v(grid, s, params);
    g2[N] = gw * gw;
  }

  // Increment form: A du = dt * (divergence of old fluxes + explicit sources).
  Tridiagonal A(N);
  std::vector<double> rhs(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double grad2 = 0.5 * (g2[i] + g2[i + 1]);
    double react = 1.0 + dt * source.b * u[i];
    if (source.c > 0.0 && u[i] > 1e-200) react += dt * source.c * grad2 / u[i];
    A.diag[i] = w[i] * react;
    rhs[i] = dt * (om * (F[i + 1] - F[i]) +
                   w[i] * (source.a * u[i] - source.b * u[i] * u[i] -
                           (u[i] > 1e-200 ? source.c * grad2 : 0.0)));
  }
  for (std::size_t f = 1; f < N; ++f) {
    const double pe = params.chi * (v[f] - v[f - 1]);
    const double k = dt * om * S[f] / dr;
    const double cp = k * bernoulli(pe);  // coefficient of the outer cell
    const double cm = k * bernoulli(-pe); // coefficient of the inner cell
    A.diag[f - 1] += cm;
    A.upper[f - 1] -= cp;
    A.diag[f] += cp;
    A.lower[f] -= cm;
  }
  const auto du = solve_tridiagonal(A, rhs);

  out.state.time = s.time + dt;
  out.state.u.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    double x = u[i] + du[i];
    if (x < 0.0) {
      out.clipped_mass += -x * w[i];
      x = 0.0;
    }
    out.state.u[i] = x;
  }

  if (params.tau == 0) {
    out.state.v = solve_elliptic_v(out.state.u, grid, params.h);
  } else {
    auto B = robin_stiffness(grid, params.h);
    const auto kv = B.apply(v);
    std::vector<double> r(N);
    for (std::size_t i = 0; i < N; ++i) {
      r[i] = dt * (w[i] * (u[i] - v[i]) - kv[i]);
      B.lower[i] *= dt;
      B.upper[i] *= dt;
      B.diag[i] = B.diag[i] * dt + w[i] * (1.0 + dt);
    }
    const auto dv = solve_tridiagonal(B, r);
    out.state.v.resize(N);
    for (std::size_t i = 0; i < N; ++i) out.state.v[i] = std::max(0.0, v[i] + dv[i]);
  }
  return out;
}

namespace {

class SampleSchedule {
public:
  SampleSchedule(double interval, std::vector<double> extra, double t_end)
      : interval_(interval), extra_(std::move(extra)), t_end_(t_end) {
    std::sort(extra_.begin(), extra_.end());
  }

  /// Smallest scheduled time strictly after t.
  double next_after(double t) const {
    auto k = static_cast<double>(std::floor(t / interval_)) + 1.0;
    double next = k * interval_;
    while (next <= t) next += interval_; // guards rounding in floor()
    for (double e : extra_) {
      if (e > t) {
        next = std::min(next, e);
        break;
      }
    }
    return std::min(next, t_end_);
  }

private:
  double interval_;
  std::vector<double> extra_;
  double t_end_;
};

} // namespace

Trajectory advance(const RunConfig& config) {
  config.validate();
  const auto grid = config.make_grid();
  const auto weighted = config.weighted_spec();
  const auto& params = config.params;

  Trajectory traj;
  traj.config = config;

  RadialState state = make_initial_state(config.initial, grid);
  if (params.tau == 0) state.v = solve_elliptic_v(state.u, grid, params.h);
  state.time = 0.0;

  double clipped = 0.0;
  traj.samples.push_back({state, evaluate(state, nullptr, 0.0, grid, params, weighted, clipped)});

  StepController ctl(config.dt_init, config.dt_min, config.dt_max, config.cfl_target,
                     config.growth_cap);
  const SampleSchedule schedule(config.sample_interval, config.snapshot_times, config.t_end);

  RadialState prev = state;
  double last_dt = 0.0;
  double t = 0.0;
  double target = schedule.next_after(t);
  auto& status = traj.status;

  auto record = [&](const RadialState& s) {
    traj.samples.push_back({s, evaluate(s, &prev, last_dt, grid, params, weighted, clipped)});
  };

  while (true) {
    if (t >= config.t_end) {
      status.kind = TerminationKind::Completed;
      status.reason = "reached t_end";
      break;
    }
    if (traj.steps >= config.max_steps) {
      status.kind = TerminationKind::Stalled;
      status.reason = "step budget exhausted";
      if (traj.samples.back().state.time < t) record(state);
      break;
    }

    double dt = ctl.propose(max_speed(state, grid, params.chi), grid.dr());
    bool landing = false;
    if (target - (t + dt) < config.dt_min) {
      dt = target - t;
      landing = true;
    }

    const double u_max_old = max_of(state.u);
    StepResult res;
    double growth = 0.0;
    bool collapsed = false;
    while (true) {
      res = step(state, grid, params, config.source, dt);
      if (!all_finite(res.state)) break;
      const double u_max_new = max_of(res.state.u);
      growth = u_max_old > 0.0 ? u_max_new / u_max_old - 1.0 : 0.0;
      if (growth <= ctl.growth_cap()) break;
      if (!ctl.reject(dt)) {
        collapsed = true;
        break;
      }
      ++traj.rejected_steps;
      dt = ctl.dt();
      landing = false;
    }

    if (!all_finite(res.state)) {
      status.kind = TerminationKind::Stalled;
      status.reason = "non-finite values at t = " + std::to_string(t + dt);
      if (traj.samples.back().state.time < t) record(state);
      break;
    }

    prev = std::move(state);
    state = std::move(res.state);
    t = landing ? target : t + dt;
    state.time = t;
    last_dt = dt;
    clipped += res.clipped_mass;
    ++traj.steps;
    ctl.accept(growth);

    const double u_max = max_of(state.u);
    if (u_max > config.u_max_threshold || collapsed) {
      status.kind = TerminationKind::BlowUp;
      status.reason = collapsed ? "step size collapsed to dt_min with growth cap still violated"
                                : "max u exceeded u_max_threshold";
      status.estimated_blowup_time = t;
      record(state);
      break;
    }
    const auto w = grid.cell_weights();
    const double central = w[0] * state.u[0];
    if (central > saturation_fraction * integrate(grid, state.u)) {
      status.kind = TerminationKind::Stalled;
      status.reason = "mass concentrated in the innermost cell; grid resolution exhausted at max u = " +
                      std::to_string(u_max);
      record(state);
      break;
    }
    if (landing) {
      record(state);
      target = schedule.next_after(t);
    }
  }
  status.t_final = t;
  return traj;
}

Image2D reconstruct_2d(const RadialState& s, const RadialGrid& grid, std::size_t resolution) {
  if (grid.dim() != 2) throw ValidationError("reconstruct_2d requires n = 2");
  if (resolution == 0) throw ValidationError("reconstruct_2d: resolution must be positive");
  const double R = grid.radius();
  Image2D img;
  img.resolution = resolution;
  img.x_min = img.y_min = -R;
  img.x_max = img.y_max = R;
  img.values.resize(resolution * resolution);
  const double px = 2.0 * R / static_cast<double>(resolution);
  for (std::size_t j = 0; j < resolution; ++j) {
    const double y = -R + (static_cast<double>(j) + 0.5) * px;
    for (std::size_t i = 0; i < resolution; ++i) {
      const double x = -R + (static_cast<double>(i) + 0.5) * px;
      const double r = std::hypot(x, y);
      img.values[j * resolution + i] = r <= R ? sample_radial(grid, s.u, r)
                                              : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return img;
}

} // namespace ksr
