#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ksrobin/core.hpp"
#include "oracle_values.hpp"

using namespace ksr;
using std::numbers::pi;

TEST_CASE("omega_n closed forms and the gamma formula") {
  CHECK(omega_n(1) == 2.0);
  CHECK(omega_n(2) == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(omega_n(3) == doctest::Approx(4 * pi).epsilon(1e-15));
  CHECK(omega_n(4) == doctest::Approx(2 * pi * pi).epsilon(1e-14));
  CHECK_THROWS_AS(omega_n(0), ValidationError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((ModelParams{0.0, 1, 0, 1}.validate()), ValidationError);
  CHECK_THROWS_AS((ModelParams{1, -1, 0, 1}.validate()), ValidationError);
  CHECK_THROWS_AS((ModelParams{1, 1, 1.5, 1}.validate()), ValidationError);
  CHECK_THROWS_AS((ModelParams{1, 1, 0, 2}.validate()), ValidationError);
  CHECK_NOTHROW((ModelParams{1, 0, 1, 0}.validate()));
  CHECK_THROWS_AS((SourceSpec{-1, 0, 0}.validate()), ValidationError);
  CHECK_THROWS_AS((DomainSpec{0, 1}.validate()), ValidationError);
  CHECK_THROWS_AS((DomainSpec{2, 0}.validate()), ValidationError);
  CHECK(SourceSpec{}.is_zero());
}

TEST_CASE("build_grid") {
  CHECK_THROWS_AS(build_grid({2, 1.0}, 4), ValidationError);

  const auto g = build_grid({1, 1.0}, 8);
  CHECK(g.dr() == 0.125);
  CHECK(g.faces().back() == 1.0);
  CHECK(g.centers().front() == 0.0625);

  SUBCASE("face-volume weights sum to the ball measure") {
    for (int n : {1, 2, 3}) {
      for (std::size_t N : {8u, 37u, 512u, 4096u}) {
        for (double R : {1.0, 0.3, 2.5}) {
          const auto grid = build_grid({n, R}, N);
          const double ball = omega_n(n) * std::pow(R, n) / n;
          double sum = 0.0;
          for (double w : grid.cell_weights()) sum += w;
          CHECK(sum == doctest::Approx(ball).epsilon(1e-12));
          CHECK(grid.measure() == doctest::Approx(ball).epsilon(1e-15));
          CHECK(grid.faces().back() == R);
        }
      }
    }
  }

  SUBCASE("centres strictly increasing inside (0, R)") {
    const auto grid = build_grid({3, 2.0}, 100);
    const auto c = grid.centers();
    CHECK(c.front() > 0.0);
    CHECK(c.back() < 2.0);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] > c[i - 1]);
  }
}

TEST_CASE("gaussian_initial") {
  const auto g = build_grid({2, 1.0}, 512);
  const auto s = gaussian_initial(g, 13.0, 1.0);
  CHECK(s.time == 0.0);
  CHECK(s.u == s.v);
  CHECK(s.u.front() == doctest::Approx(13.0).epsilon(1e-5));
  CHECK(boundary_value(g, s.u) == doctest::Approx(13.0 / std::exp(1.0)).epsilon(1e-5));
  CHECK(integrate(g, s.u) == doctest::Approx(oracle::gaussian_disk_mass).epsilon(1e-4));
  CHECK_THROWS_AS(gaussian_initial(g, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(gaussian_initial(g, 1.0, 0.0), ValidationError);
}

TEST_CASE("integrate") {
  const std::vector<double> ones2(64, 1.0);
  CHECK(integrate(build_grid({2, 1.0}, 64), ones2) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(integrate(build_grid({3, 1.0}, 64), ones2) == doctest::Approx(4 * pi / 3).epsilon(1e-14));
  CHECK_THROWS_AS(integrate(build_grid({2, 1.0}, 32), ones2), ValidationError);

  SUBCASE("linearity") {
    const auto g = build_grid({2, 1.5}, 200);
    std::vector<double> f(200), h(200), mix(200);
    for (std::size_t i = 0; i < 200; ++i) {
      f[i] = std::sin(3.0 * i);
      h[i] = std::exp(-0.01 * i);
      mix[i] = 2.5 * f[i] - 0.75 * h[i];
    }
    const double lhs = integrate(g, mix);
    const double rhs = 2.5 * integrate(g, f) - 0.75 * integrate(g, h);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  }
}

TEST_CASE("boundary_value") {
  const auto g = build_grid({2, 1.0}, 64);
  std::vector<double> c(64, 5.0);
  CHECK(boundary_value(g, c) == doctest::Approx(5.0).epsilon(1e-15));
  std::vector<double> lin(g.centers().begin(), g.centers().end());
  CHECK(boundary_value(g, lin) == doctest::Approx(1.0).epsilon(1e-14));

  SUBCASE("second-order on smooth fields") {
    std::vector<double> errs;
    for (std::size_t N : {64u, 128u, 256u, 512u}) {
      const auto grid = build_grid({2, 1.0}, N);
      std::vector<double> f(N);
      for (std::size_t i = 0; i < N; ++i) f[i] = std::exp(-grid.centers()[i] * grid.centers()[i]);
      errs.push_back(std::abs(boundary_value(grid, f) - std::exp(-1.0)));
    }
    for (std::size_t k = 0; k + 1 < errs.size(); ++k) CHECK(std::log2(errs[k] / errs[k + 1]) >= 1.9);
  }
}

TEST_CASE("robin_trace and sample_radial") {
  const auto g = build_grid({2, 1.0}, 16);
  std::vector<double> v(16, 2.0);
  CHECK(robin_trace(g, v, 0.0) == 2.0);
  CHECK(robin_trace(g, v, 4.0) == doctest::Approx(2.0 / (1.0 + 4.0 * g.dr() / 2.0)));

  std::vector<double> f(g.centers().begin(), g.centers().end());
  CHECK(sample_radial(g, f, 0.0) == doctest::Approx(f.front()));
  CHECK(sample_radial(g, f, 0.5) == doctest::Approx(0.5));
  CHECK(sample_radial(g, f, 1.0) == doctest::Approx(boundary_value(g, f)));
}
