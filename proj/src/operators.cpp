#include "ksrobin/operators.hpp"

#include <cmath>

namespace ksr {

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
  const auto n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += lower[i] * x[i - 1];
    if (i + 1 < n) s += upper[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

std::vector<double> solve_tridiagonal(const Tridiagonal& a, std::span<const double> rhs) {
  const auto n = a.size();
  if (rhs.size() != n) throw ValidationError("solve_tridiagonal: size mismatch");
  std::vector<double> c(n), d(n);
  double pivot = a.diag[0];
  if (pivot == 0.0 || !std::isfinite(pivot)) throw ComputeError("solve_tridiagonal: zero pivot");
  c[0] = n > 1 ? a.upper[0] / pivot : 0.0;
  d[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = a.diag[i] - a.lower[i] * c[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot))
      throw ComputeError("solve_tridiagonal: zero pivot at row " + std::to_string(i));
    c[i] = i + 1 < n ? a.upper[i] / pivot : 0.0;
    d[i] = (rhs[i] - a.lower[i] * d[i - 1]) / pivot;
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

Tridiagonal robin_stiffness(const RadialGrid& grid, double h) {
  const auto N = grid.cells();
  const auto S = grid.face_areas();
  const double k = grid.omega() / grid.dr();
  Tridiagonal K(N);
  for (std::size_t f = 1; f < N; ++f) {
    const double g = k * S[f];
    K.diag[f - 1] += g;
    K.diag[f] += g;
    K.upper[f - 1] -= g;
    K.lower[f] -= g;
  }
  K.diag[N - 1] += grid.omega() * S[N] * h / (1.0 + 0.5 * h * grid.dr());
  return K;
}

double bernoulli(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - 0.5 * x;
  if (x > 700.0) return x * std::exp(-x);
  return x / std::expm1(x);
}

} // namespace ksr
