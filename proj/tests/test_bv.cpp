#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bko/analysis.hpp"
#include "bko/bv.hpp"

using namespace bko;

namespace {

const FunctionSpec& fn(const char* id) { return builtin_catalog().get(id); }

PiecewiseMonotone continuous(std::function<double(double)> g, std::vector<double> turns) {
  PiecewiseMonotone p;
  p.value = g;
  p.splits = [turns](double c, double d) {
    std::vector<double> s;
    for (double t : turns)
      if (t > c && t < d) s.push_back(t);
    return s;
  };
  p.limits = [g](double t) { return std::pair{g(t), g(t)}; };
  return p;
}

}  // namespace

TEST_CASE("total variation") {
  const auto lin = continuous([](double t) { return 3.0 * t; }, {});
  CHECK(total_variation(lin, 1.0, 2.5) == doctest::Approx(4.5));
  const double pi = std::numbers::pi;
  const auto s = continuous([](double t) { return std::sin(t); }, {pi / 2, 3 * pi / 2});
  CHECK(total_variation(s, 0.0, 2 * pi) == doctest::Approx(4.0));
  CHECK(refinement_variation(s, 0.0, 2 * pi) == doctest::Approx(4.0).epsilon(1e-5));

  PiecewiseMonotone step;
  step.value = [](double t) { return t < 1.0 ? 0.0 : 2.5; };
  step.splits = [](double c, double d) { return c < 1.0 && 1.0 < d ? std::vector<double>{1.0} : std::vector<double>{}; };
  step.limits = [&](double t) { return std::pair{t <= 1.0 ? 0.0 : 2.5, t < 1.0 ? 0.0 : 2.5}; };
  CHECK(total_variation(step, 0.0, 2.0) == doctest::Approx(2.5));
}

TEST_CASE("derivative variation of catalog functions") {
  // multikink slopes 1, -1, 0.5, 0
  const PiecewiseMonotone g = derivative_signal(fn("multikink"));
  CHECK(total_variation(g, 0.0, 3.0) == doctest::Approx(2.0 + 1.5 + 0.5));
  CHECK(total_variation(g, 0.7, 1.2) == doctest::Approx(0.0));
  // f = sin, f' = cos, on [0, 2 pi]
  const PiecewiseMonotone c = derivative_signal(fn("sin"));
  CHECK(total_variation(c, 0.0, 2 * std::numbers::pi) == doctest::Approx(4.0).epsilon(1e-9));
  FunctionSpec bare;
  bare.id = "bare";
  bare.value = [](double t) { return t; };
  CHECK_THROWS_AS(derivative_signal(bare), UnknownMonotonicity);
}

TEST_CASE("f minus its one-sided limits") {
  const FxSignal s = build_fx(fn("exp_neg"), 1.0);
  CHECK(s.fprime_minus == doctest::Approx(s.fprime_plus));
  CHECK(s.value_minus == doctest::Approx(s.value_plus));
  CHECK(s(1.0) == 0.0);

  const FxSignal k = build_fx(fn("abs1"), 1.0);
  CHECK(k.fprime_plus == doctest::Approx(1.0));
  CHECK(k.fprime_minus == doctest::Approx(-1.0));
  for (double t : {0.0, 0.4, 1.7, 3.0}) CHECK(k(t) == doctest::Approx(fn("abs1")(t)));

  const FxSignal q = build_fx(fn("t2"), 2.0);
  for (double t : {0.5, 1.9, 2.1, 5.0}) CHECK(q(t) == doctest::Approx(t * t - 4.0));
}

TEST_CASE("validity threshold") {
  for (double a : {0.0, 1.0, 4.0})
    for (double x : {0.1, 1.0, 5.0}) {
      const long n0 = validity_threshold(a, x, 2.0);
      CHECK(n0 >= 1);
      CHECK(validity_holds({n0, a}, x, 2.0));
      if (n0 > 1) CHECK_FALSE(validity_holds({n0 - 1, a}, x, 2.0));
      for (long n : {n0 + 1, 2 * n0 + 5, 10 * n0}) CHECK(validity_holds({n, a}, x, 2.0));
    }
  const long n0 = validity_threshold(4.0, 0.1, 1.05);
  REQUIRE(n0 > 2);
  try {
    bv_bound(fn("abs1"), {n0 - 1, 4.0}, {1.05, n0 - 1, 0.1});
    FAIL("expected BelowValidityThreshold");
  } catch (const BelowValidityThreshold& e) {
    CHECK(e.min_valid_n() == n0);
  }
  CHECK_THROWS_AS(BVBoundParams({1.0, 5, 1.0}).validate(), ConfigError);
}

TEST_CASE("bound for f = t is the first moment") {
  const BVBoundTerms b = bv_bound(fn("t1"), {99, 0.0}, {2.0, 99, 1.0});
  CHECK(b.without_k0() == doctest::Approx(0.005));
  CHECK(b.with_k0() == doctest::Approx(0.005));
  const BVRecord r = bv_check(fn("t1"), {99, 0.0}, {2.0, 99, 1.0});
  CHECK(r.lhs == doctest::Approx(r.bound_without_k0).epsilon(1e-9));
  CHECK_FALSE(r.violated());
}

TEST_CASE("equality case at large n is not flagged") {
  const BVRecord r = bv_check(fn("t1"), {4096, 0.0}, {2.0, 4096, 1.5});
  CHECK(r.lhs == doctest::Approx(r.bound_without_k0).epsilon(1e-8));
  CHECK(r.roundoff > 0.0);
  CHECK_FALSE(r.violated());
}

TEST_CASE("a kink beyond 2x is invisible to the bound") {
  // |t - 1| is linear on [0, 2x] = [0, 1], so every variation term is 0,
  // while mass past t = 1 makes the error positive
  const BVRecord r = bv_check(fn("abs1"), {64, 0.0}, {2.0, 64, 0.5});
  CHECK(r.bound_without_k0 == 0.0);
  CHECK(r.bound_with_k0 == 0.0);
  CHECK(r.lhs > 1e-6);
  CHECK(r.violated());
}

TEST_CASE("kinked functions stay under the bound") {
  const BVRecord a = bv_check(fn("abs1"), {256, 0.0}, {2.0, 256, 1.0});
  CHECK(a.lhs < a.bound_without_k0);
  CHECK(a.lhs < a.bound_with_k0);
  const BVRecord m = bv_check(fn("multikink"), {1024, 0.0}, {2.0, 1024, 1.0});
  CHECK(m.lhs < m.bound_without_k0);
  CHECK(m.bound_without_k0 <= m.bound_with_k0);
}

TEST_CASE("bound decays at least like n^{-1/2} for smooth f") {
  std::vector<std::pair<double, double>> pts;
  for (long n : {256L, 1024L, 4096L, 16384L})
    pts.emplace_back(static_cast<double>(n), bv_bound(fn("exp_neg"), {n, 1.0}, {2.0, n, 1.0}).without_k0());
  CHECK(rate_fit(pts).exponent >= 0.45);
}

TEST_CASE("kernel tail inequalities") {
  const auto checks = kernel_tail_checks({256, 1.0}, {2.0, 256, 1.0}, {0.2, 0.5, 0.8, 1.2, 1.5, 3.0});
  REQUIRE(checks.size() == 6);
  for (const auto& c : checks) {
    CHECK(c.holds());
    CHECK(c.left == (c.point < 1.0));
  }
}
