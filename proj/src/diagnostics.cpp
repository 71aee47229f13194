#include "ksrobin/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "ksrobin/operators.hpp"
#include "ksrobin/solver.hpp"

namespace ksr {

WeightedMassSpec WeightedMassSpec::make(double m, double mu, const ModelParams& params,
                                        const SourceSpec& source) {
  if (!(source.c > 0.0)) throw ValidationError("weighted mass needs c > 0");
  if (!(params.chi <= m && m < source.b))
    throw ValidationError("weighted mass exponent must satisfy chi <= m < b");
  if (!(mu >= 1.0 / source.c)) throw ValidationError("weighted mass offset must satisfy mu >= 1/c");
  return {m, mu};
}

double boundary_u(const RadialGrid& grid, const RadialState& s) {
  return std::max(0.0, boundary_value(grid, s.u));
}

double boundary_v(const RadialGrid& grid, const RadialState& s, const ModelParams& params) {
  return std::max(0.0, robin_trace(grid, s.v, params.h));
}

double boundary_flux(const RadialState& s, const RadialGrid& grid, const ModelParams& params) {
  if (params.alpha == 0.0 || params.h == 0.0) return 0.0;
  const double area = grid.omega() * grid.face_areas().back();
  return area * params.alpha * params.chi * params.h * boundary_u(grid, s) *
         boundary_v(grid, s, params);
}

double lp_norm(const RadialGrid& grid, std::span<const double> field, double p) {
  const auto w = grid.cell_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) sum += w[i] * std::pow(std::abs(field[i]), p);
  return std::pow(sum, 1.0 / p);
}

double lyapunov(const RadialState& s, const RadialGrid& grid, const ModelParams& params) {
  const auto N = grid.cells();
  const auto w = grid.cell_weights();
  const auto S = grid.face_areas();
  const double om = grid.omega();
  const double dr = grid.dr();
  const double chi = params.chi;
  const auto& u = s.u;
  const auto& v = s.v;

  double grad = 0.0;
  for (std::size_t f = 1; f < N; ++f) {
    const double g = (v[f] - v[f - 1]) / dr;
    grad += om * S[f] * dr * g * g;
  }
  const double vb = robin_trace(grid, v, params.h);
  // half cell between the last centre and the wall
  grad += om * S[N] * 2.0 / dr * (vb - v[N - 1]) * (vb - v[N - 1]);

  double v2 = 0.0, uv = 0.0, entropy = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    v2 += w[i] * v[i] * v[i];
    uv += w[i] * u[i] * v[i];
    if (u[i] > 0.0) entropy += w[i] * u[i] * std::log(u[i]);
  }
  const double wall = om * S[N] * vb * vb;
  return 0.5 * chi * grad + 0.5 * chi * v2 - chi * uv + entropy + 0.5 * chi * params.h * wall;
}

double dissipation(const RadialState& s, const RadialState& prev, double dt,
                   const RadialGrid& grid, const ModelParams& params) {
  if (!(dt > 0.0)) throw ValidationError("dissipation: dt must be positive");
  const auto N = grid.cells();
  const auto w = grid.cell_weights();
  const auto S = grid.face_areas();
  const double om = grid.omega();
  const double dr = grid.dr();
  const auto& u = s.u;
  const auto& v = s.v;

  double signal = 0.0;
  if (params.tau == 1) {
    for (std::size_t i = 0; i < N; ++i) {
      const double vt = (v[i] - prev.v[i]) / dt;
      signal += w[i] * vt * vt;
    }
    signal *= params.chi;
  }

  double taxis = 0.0;
  for (std::size_t f = 1; f < N; ++f) {
    const double ul = u[f - 1];
    const double ur = u[f];
    if (ul < dissipation_density_floor || ur < dissipation_density_floor) continue;
    const double pe = params.chi * (v[f] - v[f - 1]);
    const double j = sg_flux_density(ul, ur, pe, dr);
    // J^2 / u_face with u_face = J dr / g reduces to J g / dr; weight om S dr
    const double g = std::log(ur) - std::log(ul) - pe;
    taxis += om * S[f] * j * g;
  }
  return signal + taxis;
}

Moments moment(const RadialState& s, const RadialGrid& grid) {
  const int n = grid.dim();
  const auto faces = grid.faces();
  double m = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    m += s.u[i] * (std::pow(faces[i + 1], 2 * n) - std::pow(faces[i], 2 * n)) / (2.0 * n);
  }
  return {m, integrate(grid, s.u) / grid.omega()};
}

double weighted_mass(const RadialState& s, const RadialGrid& grid, const WeightedMassSpec& spec) {
  const auto w = grid.cell_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i)
    sum += w[i] * (s.u[i] + spec.mu()) * std::exp(spec.m() * s.v[i]);
  return sum;
}

double w12_norm(std::span<const double> field, const RadialGrid& grid) {
  if (field.size() != grid.cells()) throw ValidationError("w12_norm: field/grid mismatch");
  const auto N = grid.cells();
  const auto c = grid.centers();
  const double om = grid.omega();
  const int n = grid.dim();
  const double dr = grid.dr();

  double l2 = 0.0;
  const auto w = grid.cell_weights();
  for (std::size_t i = 0; i < N; ++i) l2 += w[i] * field[i] * field[i];

  auto shell = [&](double r0, double r1) { return om * (std::pow(r1, n) - std::pow(r0, n)) / n; };
  double grad = 0.0;
  for (std::size_t f = 1; f < N; ++f) {
    const double g = (field[f] - field[f - 1]) / dr;
    double lo = c[f - 1], hi = c[f];
    if (f == 1) lo = 0.0;
    if (f == N - 1) hi = grid.radius();
    grad += shell(lo, hi) * g * g;
  }
  return std::sqrt(l2 + grad);
}

DiagnosticsRecord evaluate(const RadialState& s, const RadialState* prev, double dt,
                           const RadialGrid& grid, const ModelParams& params,
                           const std::optional<WeightedMassSpec>& weighted, double clipped_mass) {
  DiagnosticsRecord r;
  r.t = s.time;
  r.mass_u = integrate(grid, s.u);
  r.mass_v = integrate(grid, s.v);
  r.linf_u = s.u.empty() ? 0.0 : *std::max_element(s.u.begin(), s.u.end());
  r.lp_u[2] = lp_norm(grid, s.u, 2.0);
  r.lp_u[4] = lp_norm(grid, s.u, 4.0);
  r.boundary_flux = boundary_flux(s, grid, params);
  r.lyapunov = lyapunov(s, grid, params);
  if (prev != nullptr && dt > 0.0) r.dissipation = dissipation(s, *prev, dt, grid, params);
  const auto mo = moment(s, grid);
  r.moment = mo.m_n;
  r.theta = r.mass_u / grid.omega();
  if (weighted) r.weighted_mass = weighted_mass(s, grid, *weighted);
  r.clipped_mass = clipped_mass;
  return r;
}

double ResidualSeries::max_abs() const {
  double m = 0.0;
  for (double x : rho) m = std::max(m, std::abs(x));
  return m;
}

ResidualSeries energy_residual_any_tau(const Trajectory& traj) {
  ResidualSeries out;
  const auto& samples = traj.samples;
  out.dr = traj.config.domain.radius / static_cast<double>(traj.config.cells);
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const auto& a = samples[k].record;
    const auto& b = samples[k + 1].record;
    if (!b.dissipation) continue;
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) continue;
    out.t.push_back(b.t);
    out.rho.push_back((b.lyapunov - a.lyapunov) / dt + *b.dissipation);
    out.max_dt = std::max(out.max_dt, dt);
  }
  return out;
}

ResidualSeries energy_identity_residual(const Trajectory& traj) {
  const auto& cfg = traj.config;
  if (cfg.params.tau != 1)
    throw ValidationError("energy identity residual is defined for tau = 1 trajectories only");
  if (!cfg.source.is_zero() || cfg.params.alpha != 0.0)
    throw ValidationError("energy identity residual requires a = b = c = 0 and alpha = 0");
  return energy_residual_any_tau(traj);
}

} // namespace ksr
