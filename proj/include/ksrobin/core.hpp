#pragma once

// Shared domain types for radially symmetric chemotaxis runs on a ball B_R in
// R^n: parameters, the cell-centred radial grid, states, quadrature.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksr {

/// Invalid input: bad parameters, malformed configuration, violated
/// preconditions. Maps to exit code 1 at the process boundary.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Failure while computing: singular solve, non-convergence, I/O.
/// Maps to exit code 2.
class ComputeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ModelParams {
  double chi{1.0};   ///< chemosensitivity, > 0
  double h{1.0};     ///< Robin coefficient, >= 0 (h = 0 is the Neumann limit)
  double alpha{0.0}; ///< fraction of the boundary flux let through, in [0,1]
  int tau{1};        ///< 0 = parabolic-elliptic, 1 = fully parabolic

  void validate() const;
};

/// Source a*u - b*u^2 - c*|grad u|^2. All zero selects the sourceless system.
struct SourceSpec {
  double a{0.0};
  double b{0.0};
  double c{0.0};

  bool is_zero() const { return a == 0.0 && b == 0.0 && c == 0.0; }
  void validate() const;
};

struct DomainSpec {
  int n{2};
  double radius{1.0};

  void validate() const;
};

/// Area of the unit sphere in R^n (omega_1 = 2 counts both endpoints).
double omega_n(int n);

/// Uniform cell-centred radial grid on [0, R]. Cell i spans
/// [i*dr, (i+1)*dr]; its weight is the exact shell measure
/// omega_n (r_{i+1}^n - r_i^n) / n, so sum(weights) == |B_R|.
class RadialGrid {
public:
  static constexpr std::size_t min_cells = 8;

  RadialGrid() = default;

  const DomainSpec& spec() const { return spec_; }
  int dim() const { return spec_.n; }
  double radius() const { return spec_.radius; }
  std::size_t cells() const { return centers_.size(); }
  double dr() const { return dr_; }
  double omega() const { return omega_; }

  std::span<const double> centers() const { return centers_; }
  /// N+1 face radii; faces()[0] == 0, faces()[N] == R.
  std::span<const double> faces() const { return faces_; }
  /// r_f^{n-1} for each face (without the omega_n factor).
  std::span<const double> face_areas() const { return face_areas_; }
  std::span<const double> cell_weights() const { return weights_; }

  double measure() const;

private:
  friend RadialGrid build_grid(const DomainSpec& spec, std::size_t cell_count);

  DomainSpec spec_{};
  double dr_{0.0};
  double omega_{0.0};
  std::vector<double> centers_;
  std::vector<double> faces_;
  std::vector<double> face_areas_;
  std::vector<double> weights_;
};

RadialGrid build_grid(const DomainSpec& spec, std::size_t cell_count);

struct RadialState {
  double time{0.0};
  std::vector<double> u;
  std::vector<double> v;
};

/// u_i = v_i = amplitude * exp(-r_i^2 / width^2).
RadialState gaussian_initial(const RadialGrid& grid, double amplitude, double width);

/// Sum of field_i * weight_i, i.e. the integral over the ball.
double integrate(const RadialGrid& grid, std::span<const double> field);

/// Linear extrapolation from the two outermost centres to r = R.
double boundary_value(const RadialGrid& grid, std::span<const double> field);

/// Boundary trace of the signal consistent with the discrete Robin closure
/// (v(R) - v_{N-1}) / (dr/2) = -h v(R).
double robin_trace(const RadialGrid& grid, std::span<const double> v, double h);

/// Piecewise-linear sampling of a cell-centred profile at radius r in [0, R].
/// Flat inside the first centre (radial symmetry), extrapolated beyond the
/// last one so that sample_radial(R) == boundary_value.
double sample_radial(const RadialGrid& grid, std::span<const double> field, double r);

} // namespace ksr
