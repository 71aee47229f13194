#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ksrobin/diagnostics.hpp"
#include "ksrobin/solver.hpp"
#include "oracle_values.hpp"

using namespace ksr;
using std::numbers::pi;

namespace {

RadialState constant_state(const RadialGrid& g, double u, double v) {
  return {0.0, std::vector<double>(g.cells(), u), std::vector<double>(g.cells(), v)};
}

} // namespace

TEST_CASE("Lyapunov functional") {
  const auto g = build_grid({2, 1.0}, 256);
  CHECK(std::abs(lyapunov(constant_state(g, 1.0, 0.0), g, {1.0, 1.0, 0.0, 1})) < 1e-14);
  // the boundary term uses the discrete Robin trace, hence O(dr)
  CHECK(lyapunov(constant_state(g, 1.0, 1.0), g, {1.0, 1.0, 0.0, 1}) ==
        doctest::Approx(pi / 2).epsilon(2.0 * g.dr()));
  const auto gauss = gaussian_initial(g, 13.0, 1.0);
  CHECK(std::isfinite(lyapunov(gauss, g, {0.14, 60.0, 0.0, 1})));
}

TEST_CASE("dissipation") {
  const auto g = build_grid({2, 1.0}, 64);
  const ModelParams p{1.3, 1.0, 0.0, 1};
  const auto flat = constant_state(g, 2.0, 0.7);
  CHECK(dissipation(flat, flat, 0.1, g, p) == 0.0);

  RadialState boltz = flat;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    boltz.v[i] = std::cos(g.centers()[i]);
    boltz.u[i] = 3.0 * std::exp(p.chi * boltz.v[i]);
  }
  CHECK(std::abs(dissipation(boltz, boltz, 0.1, g, p)) < 1e-20);

  const auto gauss = gaussian_initial(g, 13.0, 1.0);
  auto next = gauss;
  for (auto& x : next.v) x *= 0.99;
  CHECK(dissipation(next, gauss, 0.01, g, p) > 0.0);
}

TEST_CASE("moments") {
  const auto g2 = build_grid({2, 1.0}, 64);
  const auto m2 = moment(constant_state(g2, 1.0, 0.0), g2);
  CHECK(m2.m_n == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(m2.theta == doctest::Approx(0.5).epsilon(1e-14));
  const auto g3 = build_grid({3, 1.0}, 64);
  const auto m3 = moment(constant_state(g3, 1.0, 0.0), g3);
  CHECK(m3.m_n == doctest::Approx(1.0 / 6).epsilon(1e-14));
  CHECK(m3.theta == doctest::Approx(1.0 / 3).epsilon(1e-14));
  const auto g = build_grid({2, 1.0}, 1024);
  CHECK(moment(gaussian_initial(g, 13.0, 1.0), g).m_n ==
        doctest::Approx(oracle::gaussian_moment_n2).epsilon(1e-5));
}

TEST_CASE("weighted mass") {
  const ModelParams p{1.0, 1.0, 0.0, 1};
  const SourceSpec src{0.0, 2.0, 1.0};
  const auto spec = WeightedMassSpec::make(1.0, 1.0, p, src);
  const auto g = build_grid({2, 1.0}, 64);
  CHECK(weighted_mass(constant_state(g, 0.0, 0.0), g, spec) == doctest::Approx(pi));
  CHECK(weighted_mass(constant_state(g, 1.0, 0.0), g, spec) == doctest::Approx(2 * pi));
  CHECK_THROWS_AS(WeightedMassSpec::make(0.5, 1.0, p, src), ValidationError);
  CHECK_THROWS_AS(WeightedMassSpec::make(2.0, 1.0, p, src), ValidationError);
  CHECK_THROWS_AS(WeightedMassSpec::make(1.0, 0.5, p, src), ValidationError);
  CHECK_THROWS_AS(WeightedMassSpec::make(1.0, 1.0, p, SourceSpec{0.0, 2.0, 0.0}), ValidationError);
}

TEST_CASE("W12 norm") {
  const auto g2 = build_grid({2, 1.0}, 64);
  CHECK(w12_norm(std::vector<double>(64, 1.0), g2) == doctest::Approx(std::sqrt(pi)));
  CHECK(w12_norm(std::vector<double>(64, 0.0), g2) == 0.0);
  const auto g1 = build_grid({1, 1.0}, 512);
  std::vector<double> r(g1.centers().begin(), g1.centers().end());
  CHECK(w12_norm(r, g1) == doctest::Approx(oracle::w12_r_1d).epsilon(1e-4));
}

TEST_CASE("boundary flux sign") {
  const auto g = build_grid({2, 1.0}, 64);
  const auto s = gaussian_initial(g, 13.0, 1.0);
  CHECK(boundary_flux(s, g, {1.0, 1.0, 0.0, 1}) == 0.0);
  for (double a : {0.1, 0.5, 1.0}) CHECK(boundary_flux(s, g, {1.0, 1.0, a, 1}) > 0.0);
}

TEST_CASE("records along a run") {
  RunConfig c;
  c.params = {1.0, 1.0, 0.0, 1};
  c.cells = 64;
  c.t_end = 0.5;
  c.sample_interval = 0.02;
  c.initial.u = {Profile::Gaussian, 4.0, 0.5, std::nullopt};
  const auto tr = advance(c);
  const double theta0 = tr.samples.front().record.theta;
  for (const auto& s : tr.samples) {
    const auto& r = s.record;
    CHECK(r.mass_u >= 0.0);
    CHECK(r.linf_u >= 0.0);
    CHECK(r.lp_u.at(2) * r.lp_u.at(2) <= r.mass_u * r.linf_u * (1 + 1e-12));
    CHECK(r.theta == doctest::Approx(theta0).epsilon(1e-10));
    if (r.dissipation) CHECK(*r.dissipation >= 0.0);
  }

  SUBCASE("energy residual") {
    const auto res = energy_identity_residual(tr);
    CHECK(res.rho.size() + 1 == tr.samples.size());
    const double slack = 10.0 * res.max_abs() * res.max_dt;
    for (std::size_t i = 1; i < tr.samples.size(); ++i)
      CHECK(tr.samples[i].record.lyapunov <= tr.samples[i - 1].record.lyapunov + slack + 1e-12);
  }
}

TEST_CASE("energy residual restrictions") {
  RunConfig c;
  c.cells = 32;
  c.t_end = 0.05;
  c.params = {1.0, 1.0, 0.0, 0};
  CHECK_THROWS_AS(energy_identity_residual(advance(c)), ValidationError);
  c.params = {1.0, 1.0, 0.5, 1};
  CHECK_THROWS_AS(energy_identity_residual(advance(c)), ValidationError);
  c.params = {1.0, 1.0, 0.0, 1};
  c.source = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(energy_identity_residual(advance(c)), ValidationError);
}

TEST_CASE("steady constant state has zero residual") {
  RunConfig c;
  c.cells = 32;
  c.t_end = 0.1;
  c.params = {1.0, 0.0, 0.0, 1};
  c.initial.u = {Profile::Constant, 1.0, 1.0, std::nullopt};
  const auto res = energy_identity_residual(advance(c));
  CHECK(res.max_abs() < 1e-10);
}
