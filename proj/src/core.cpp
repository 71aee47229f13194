#include "ksrobin/core.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ksr {

void ModelParams::validate() const {
  if (!(chi > 0.0) || !std::isfinite(chi))
    throw ValidationError("params.chi must be positive, got " + std::to_string(chi));
  if (!(h >= 0.0) || !std::isfinite(h))
    throw ValidationError("params.h must be nonnegative, got " + std::to_string(h));
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ValidationError("params.alpha must lie in [0,1], got " + std::to_string(alpha));
  if (tau != 0 && tau != 1)
    throw ValidationError("params.tau must be 0 or 1, got " + std::to_string(tau));
}

void SourceSpec::validate() const {
  if (!(a >= 0.0) || !(b >= 0.0) || !(c >= 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
      !std::isfinite(c))
    throw ValidationError("source coefficients a, b, c must be finite and nonnegative");
}

void DomainSpec::validate() const {
  if (n < 1) throw ValidationError("domain.n must be >= 1, got " + std::to_string(n));
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw ValidationError("domain.radius must be positive, got " + std::to_string(radius));
}

double omega_n(int n) {
  using std::numbers::pi;
  switch (n) {
  case 1: return 2.0;
  case 2: return 2.0 * pi;
  case 3: return 4.0 * pi;
  default: break;
  }
  if (n < 1) throw ValidationError("omega_n: invalid dimension " + std::to_string(n));
  const double half = 0.5 * n;
  return 2.0 * std::pow(pi, half) / std::tgamma(half);
}

RadialGrid build_grid(const DomainSpec& spec, std::size_t cell_count) {
  spec.validate();
  if (cell_count < RadialGrid::min_cells)
    throw ValidationError("grid needs at least " + std::to_string(RadialGrid::min_cells) +
                          " cells, got " + std::to_string(cell_count));

  RadialGrid g;
  g.spec_ = spec;
  g.omega_ = omega_n(spec.n);
  const auto N = cell_count;
  const double R = spec.radius;
  g.dr_ = R / static_cast<double>(N);

  g.faces_.resize(N + 1);
  g.face_areas_.resize(N + 1);
  for (std::size_t f = 0; f <= N; ++f) {
    g.faces_[f] = static_cast<double>(f) * g.dr_;
    g.face_areas_[f] = std::pow(g.faces_[f], spec.n - 1);
  }
  g.faces_[N] = R;
  g.face_areas_[N] = std::pow(R, spec.n - 1);

  g.centers_.resize(N);
  g.weights_.resize(N);
  const double n = spec.n;
  for (std::size_t i = 0; i < N; ++i) {
    g.centers_[i] = (static_cast<double>(i) + 0.5) * g.dr_;
    g.weights_[i] = g.omega_ * (std::pow(g.faces_[i + 1], n) - std::pow(g.faces_[i], n)) / n;
  }
  return g;
}

double RadialGrid::measure() const { return omega_ * std::pow(spec_.radius, spec_.n) / spec_.n; }

RadialState gaussian_initial(const RadialGrid& grid, double amplitude, double width) {
  if (!(amplitude > 0.0)) throw ValidationError("gaussian amplitude must be positive");
  if (!(width > 0.0)) throw ValidationError("gaussian width must be positive");
  RadialState s;
  s.u.resize(grid.cells());
  const auto r = grid.centers();
  for (std::size_t i = 0; i < r.size(); ++i)
    s.u[i] = amplitude * std::exp(-(r[i] * r[i]) / (width * width));
  s.v = s.u;
  return s;
}

double integrate(const RadialGrid& grid, std::span<const double> field) {
  if (field.size() != grid.cells())
    throw ValidationError("integrate: field has " + std::to_string(field.size()) +
                          " values, grid has " + std::to_string(grid.cells()) + " cells");
  const auto w = grid.cell_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) sum += field[i] * w[i];
  return sum;
}

double boundary_value(const RadialGrid& grid, std::span<const double> field) {
  const auto N = field.size();
  if (N < 2 || N != grid.cells()) throw ValidationError("boundary_value: field/grid mismatch");
  // centres sit at R - dr/2 and R - 3dr/2
  return 1.5 * field[N - 1] - 0.5 * field[N - 2];
}

double robin_trace(const RadialGrid& grid, std::span<const double> v, double h) {
  if (v.size() != grid.cells()) throw ValidationError("robin_trace: field/grid mismatch");
  return v.back() / (1.0 + 0.5 * h * grid.dr());
}

double sample_radial(const RadialGrid& grid, std::span<const double> field, double r) {
  if (field.size() != grid.cells()) throw ValidationError("sample_radial: field/grid mismatch");
  const auto c = grid.centers();
  const auto N = c.size();
  if (r <= c[0]) return field[0];
  if (r >= c[N - 1]) {
    const double slope = (field[N - 1] - field[N - 2]) / grid.dr();
    return field[N - 1] + slope * (r - c[N - 1]);
  }
  auto i = static_cast<std::size_t>((r - c[0]) / grid.dr());
  if (i >= N - 1) i = N - 2;
  const double w = (r - c[i]) / grid.dr();
  return (1.0 - w) * field[i] + w * field[i + 1];
}

} // namespace ksr
