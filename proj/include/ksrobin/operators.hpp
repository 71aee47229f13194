#pragma once

#include <span>
#include <vector>

#include "ksrobin/core.hpp"

namespace ksr {

/// Tridiagonal system: lower[i] couples row i to i-1 (lower[0] unused),
/// upper[i] couples row i to i+1 (upper[N-1] unused).
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
  std::size_t size() const { return diag.size(); }

  /// y = A x
  std::vector<double> apply(std::span<const double> x) const;
};

/// Thomas algorithm. Throws ComputeError on a vanishing pivot.
std::vector<double> solve_tridiagonal(const Tridiagonal& a, std::span<const double> rhs);

/// Stiffness matrix K of -div(grad) on the grid with zero flux at r = 0 and
/// the half-cell Robin closure at r = R:
///   (K z)_i = -omega [S_{i+1} g_{i+1} - S_i g_i],  g_f = (z_f - z_{f-1}) / dr,
///   g_N = -h * robin_trace(z).
/// K is symmetric and positive semidefinite (definite for h > 0).
Tridiagonal robin_stiffness(const RadialGrid& grid, double h);

/// B(x) = x / (e^x - 1), B(0) = 1.
double bernoulli(double x);

/// Exponentially fitted (Scharfetter-Gummel) approximation of u_r - chi u v_r
/// on the face between an inner cell and an outer cell, where
/// peclet = chi (v_outer - v_inner). Reduces to the centred difference for
/// peclet -> 0 and to upwinding of the advected density for |peclet| >> 1;
/// vanishes exactly on u proportional to exp(chi v).
inline double sg_flux_density(double u_inner, double u_outer, double peclet, double dr) {
  return (bernoulli(peclet) * u_outer - bernoulli(-peclet) * u_inner) / dr;
}

} // namespace ksr
