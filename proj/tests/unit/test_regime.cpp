#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ksrobin/regime.hpp"
#include "oracle_values.hpp"

using namespace ksr;

namespace {

ModelParams P(double chi, double h, double alpha, int tau) { return {chi, h, alpha, tau}; }
SourceSpec S(double b, double c) { return {0.0, b, c}; }
const auto C1 = TraceConstantEstimate::user(1.0);

} // namespace

TEST_CASE("tau = 0 verdicts") {
  SUBCASE("Estimate_b, second branch, with witness") {
    const auto v = classify_tau0(P(1, 1, 1, 0), S(1, 1), C1);
    CHECK(v.bounded);
    CHECK(v.satisfies(Condition::EstimateB));
    REQUIRE(v.witness);
    CHECK(v.witness->eps1 == doctest::Approx(2.0));
    CHECK(v.witness->eps2 == doctest::Approx(0.6875));
  }
  SUBCASE("Bag0 only") {
    const auto v = classify_tau0(P(0.3, 1, 1, 0), S(0.5, 0.1), C1);
    CHECK(v.bounded);
    CHECK(v.satisfies(Condition::Bag0));
  }
  SUBCASE("nothing holds") {
    const auto v = classify_tau0(P(2, 1, 1, 0), S(0.5, 1), C1);
    CHECK_FALSE(v.bounded);
    CHECK(v.satisfied_conditions.empty());
    CHECK_FALSE(v.witness);
  }
}

TEST_CASE("tau = 1 verdicts") {
  CHECK(classify_tau1(P(1, 1, 1, 1), S(1.5, 0), C1).satisfies(Condition::Bag1));
  const auto none = classify_tau1(P(1, 1, 1, 1), S(1, 0), C1);
  CHECK_FALSE(none.bounded);
  const auto eb = classify_tau1(P(1, 1, 1, 1), S(1, 1), C1);
  CHECK(eb.satisfies(Condition::EstimateB));
  CHECK_FALSE(eb.satisfies(Condition::Bag0));
  REQUIRE(eb.witness);
  CHECK(witness_is_valid(P(1, 1, 1, 1), S(1, 1), 1.0, *eb.witness));
  CHECK(classify(P(1, 1, 1, 1), S(1.5, 0), C1).satisfies(Condition::Bag1));
}

TEST_CASE("zero flux gives the vacuous witness") {
  const auto w = find_epsilon_witness(P(1, 1, 0, 0), S(1, 1), 1.0);
  REQUIRE(w);
  CHECK(w->eps1 == 1.0);
  CHECK(w->eps2 == 0.5);
}

TEST_CASE("witness existence matches Estimate_b and every witness is valid") {
  for (double chi : {0.3, 1.0, 2.0})
    for (double alpha : {0.0, 0.5, 1.0})
      for (double h : {0.5, 1.0, 4.0})
        for (double b : {0.1, 0.5, 1.0, 3.0})
          for (double c : {0.0, 0.05, 0.3, 1.0, 5.0}) {
            const auto p = P(chi, h, alpha, 0);
            const auto s = S(b, c);
            const auto w = find_epsilon_witness(p, s, 1.3);
            if (alpha == 0.0 && c == 0.0)
              CHECK_FALSE(estimate_b_holds(p, s, 1.3)); // zero flux still needs c > 0
            else
              CHECK(w.has_value() == estimate_b_holds(p, s, 1.3));
            if (w) CHECK(witness_is_valid(p, s, 1.3, *w));
          }
}

TEST_CASE("verdicts are monotone in b") {
  for (int tau : {0, 1})
    for (double c : {0.05, 0.2, 0.5, 1.0, 2.0}) {
      bool seen = false;
      for (double b = 0.05; b < 4.0; b += 0.05) {
        const auto v = classify(P(1, 1, 1, tau), S(b, c), C1);
        if (seen) CHECK(v.satisfies(Condition::EstimateB));
        seen = seen || v.satisfies(Condition::EstimateB);
      }
      CHECK(seen);
    }
}

TEST_CASE("bounded iff some condition holds") {
  for (int tau : {0, 1})
    for (double b : {0.2, 0.9, 1.6})
      for (double c : {0.0, 0.1, 1.0}) {
        const auto v = classify(P(1, 1, 1, tau), S(b, c), C1);
        CHECK(v.bounded == !v.satisfied_conditions.empty());
      }
}

TEST_CASE("trace constant estimate") {
  const auto g2 = build_grid({2, 1.0}, 1024);
  const auto fam = default_trace_family(1.0);
  REQUIRE(fam.size() == 12);
  CHECK(trace_ratio(g2, 2, fam.front()) == doctest::Approx(2.0).epsilon(1e-12));
  const auto steep = std::find_if(fam.begin(), fam.end(), [](const auto& f) {
    return f.name.find("16") != std::string::npos;
  });
  REQUIRE(steep != fam.end());
  // a boundary layer is penalised by its gradient: 1 / (257 (1/32 - 1/1024))
  CHECK(trace_ratio(g2, 2, *steep) == doctest::Approx(1.0 / (257.0 * (1.0 / 32 - 1.0 / 1024))).epsilon(1e-4));

  const auto est = estimate_trace_constant(g2, 2);
  CHECK(est.kind == TraceConstantKind::EstimatedLowerBound);
  CHECK(est.value >= 2.0 - 1e-12);
  CHECK(est.value <= oracle::optimal_trace_disk * (1 + 1e-6));

  const auto g1 = build_grid({1, 1.0}, 1024);
  CHECK(estimate_trace_constant(g1, 1).value >= 1.0 - 1e-12);
  CHECK(trace_ratio(g1, 2, fam.front()) == doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("enlarging the family never lowers the estimate") {
    std::vector<TraceTestFunction> sub;
    double prev = 0.0;
    for (const auto& f : fam) {
      sub.push_back(f);
      const double now = estimate_trace_constant(g2, 2, sub).value;
      CHECK(now >= prev);
      prev = now;
    }
  }
}

TEST_CASE("principal Robin eigenvalue") {
  const auto g = build_grid({1, 1.0}, 512);
  CHECK(std::abs(principal_robin_eigenvalue(g, 0.0)) < 1e-9);
  CHECK(principal_robin_eigenvalue(g, 1.0) == doctest::Approx(oracle::robin_mu_1d_h1).epsilon(1e-4));
  CHECK(std::abs(principal_robin_eigenvalue(g, 1e6) - oracle::dirichlet_mu_1d) < 1e-3);
  CHECK(oracle::robin_mu_1d_h1e6 < oracle::dirichlet_mu_1d);

  double prev = -1.0;
  const auto g2 = build_grid({2, 1.0}, 128);
  for (double h : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    const double mu = principal_robin_eigenvalue(g2, h);
    CHECK(mu > prev);
    prev = mu;
  }
  CHECK_THROWS_AS(principal_robin_eigenvalue(g2, -1.0), ValidationError);
}
