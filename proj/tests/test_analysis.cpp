#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bko/analysis.hpp"

using namespace bko;

namespace {

const FunctionSpec& fn(const char* id) { return builtin_catalog().get(id); }

}  // namespace

TEST_CASE("grids") {
  const Eigen::ArrayXd u = GridSpec{0.0, 2.0, 5, Spacing::uniform}.nodes();
  CHECK(u.size() == 5);
  CHECK(u[1] == doctest::Approx(0.5));
  const Eigen::ArrayXd l = GridSpec{0.01, 100.0, 5, Spacing::log}.nodes();
  CHECK(l[0] == 0.01);
  CHECK(l[2] == doctest::Approx(1.0));
  CHECK(l[4] == 100.0);
  CHECK_THROWS_AS(GridSpec({0.0, 1.0, 5, Spacing::log}).validate(), ConfigError);
  CHECK_THROWS_AS(GridSpec({2.0, 1.0, 5, Spacing::uniform}).validate(), ConfigError);
  CHECK_THROWS_AS(GridSpec({0.0, 1.0, 1, Spacing::uniform}).validate(), ConfigError);
}

TEST_CASE("moduli") {
  CHECK(modulus_on_interval(fn("t2"), 0.1, 2.0) == doctest::Approx(0.39).epsilon(1e-12));
  const ModulusOptions opt{5.0, 1e-3};
  CHECK(modulus(fn("t1"), 0.2, ModulusOrder::first, opt) == doctest::Approx(0.2));
  CHECK(modulus(fn("t1"), 0.2, ModulusOrder::second, opt) == doctest::Approx(0.0).epsilon(1e-12));
  // t^2: second difference is 2h^2 everywhere
  CHECK(modulus(fn("t2"), 0.1, ModulusOrder::second, opt) == doctest::Approx(0.02).epsilon(1e-9));
  // |t - 1|: the kink gives 2h
  CHECK(modulus(fn("abs1"), 0.1, ModulusOrder::second, opt) == doctest::Approx(0.2).epsilon(1e-9));
  double prev = 0.0;
  for (double d : {0.001, 0.01, 0.05, 0.1, 0.3}) {
    const double w = modulus(fn("sin"), d, ModulusOrder::first, opt);
    CHECK(w >= prev);
    prev = w;
  }
  CHECK(modulus(fn("sin"), 1e-6, ModulusOrder::first) < 2e-6);
  const ModulusReport r = modulus_report(fn("exp_neg"), 0.05);
  CHECK(r.omega == doctest::Approx(1.0 - std::exp(-0.05)).epsilon(1e-9));
  CHECK(r.omega_weighted <= r.omega);
}

TEST_CASE("rate fit") {
  std::vector<std::pair<double, double>> e;
  for (double n : {10.0, 20.0, 40.0, 80.0}) e.emplace_back(n, 3.0 / n);
  const RateFit f = rate_fit(e);
  CHECK(f.exponent == doctest::Approx(1.0));
  CHECK(f.constant == doctest::Approx(3.0));
  CHECK(f.residual < 1e-12);
  CHECK_THROWS_AS(rate_fit({{1.0, 1.0}, {2.0, 0.5}}), ConfigError);
  CHECK_THROWS_AS(rate_fit({{1.0, 1.0}, {2.0, 0.0}, {4.0, 0.1}}), NonPositiveError);
}

TEST_CASE("sup error") {
  const GridSpec g{0.0, 4.0, 41, Spacing::uniform};
  CHECK(sup_error(fn("t0"), {20, 1.0}, g) < 1e-12);
  CHECK(sup_error(fn("t1"), {10, 0.0}, g) == doctest::Approx(3.5 / 11.0).epsilon(1e-12));
  std::vector<std::pair<double, double>> e;
  for (long n : {64L, 128L, 256L, 512L, 1024L}) e.emplace_back(n, sup_error(fn("exp_neg"), {n, 0.0}, g));
  CHECK(rate_fit(e).exponent == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("bound records") {
  BoundRecord r{"c", "f", 1, 0.0, 1.0, 1.0, 1.0};
  CHECK_FALSE(r.violated());
  r.actual = 1.0 + 1e-13;
  CHECK_FALSE(r.violated());
  r.actual = 1.0 + 1e-9;
  CHECK(r.violated());
  CHECK(r.slack() == doctest::Approx(-1e-9));
}

TEST_CASE("local direct estimate") {
  const LocalDirectTerms z = local_direct_terms(fn("t0"), {16, 1.0}, 1.0);
  CHECK(z.actual < 1e-13);
  CHECK(z.omega2_term == 0.0);
  CHECK(z.omega_term == 0.0);
  CHECK_FALSE(check_local_direct(fn("exp_neg"), {64, 1.0}, 1.0, 10.0).violated());
  CHECK_FALSE(check_local_direct(fn("sin"), {256, 0.0}, 2.0, 10.0).violated());
  std::vector<LocalDirectTerms> cal{local_direct_terms(fn("sin"), {32, 1.0}, 1.0),
                                    local_direct_terms(fn("sin"), {128, 2.0}, 3.0)};
  const double C = fit_local_direct_constant(cal);
  for (const auto& t : cal) CHECK(t.actual <= C * t.omega2_term + t.omega_term + 1e-15);
}

TEST_CASE("Lipschitz-type estimates") {
  const std::vector<double> xs{1.0};
  const LipschitzData c = certify_lipschitz(fn("t0"), 1.0, 1.0, 1.0, xs, 20.0);
  CHECK(c.M == 0.0);
  const LipschitzData s = certify_lipschitz(fn("sqrt"), 0.5, 1.0, 1.0, xs, 22.0);
  CHECK(s.M > 0.0);
  const auto [two, maximal] = check_lipschitz(fn("sqrt"), {256, 1.0}, 1.0, s, 22.0);
  CHECK_FALSE(two.violated());
  CHECK_FALSE(maximal.violated());
  // |t - x| over |t - x|^1 is 1
  CHECK(local_holder_quotient(fn("t1"), 2.0, 1.0, 10.0) == doctest::Approx(1.0));
}

TEST_CASE("weighted majorants") {
  CHECK(weighted_majorant(1, {99, 1.0}) == doctest::Approx(0.035));
  CHECK(weighted_majorant(2, {99, 0.0}) == doctest::Approx(0.03 + 13.0 / 30000.0));
  CHECK(weighted_majorant(0, {5, 1.0}) == 0.0);
  for (int i : {1, 2})
    for (long n : {1L, 10L, 300L})
      for (double a : {0.0, 2.0}) {
        const WeightedNorm w = weighted_moment_error_norm(i, {n, a}, {});
        CHECK(w.norm <= weighted_majorant(i, {n, a}));
        CHECK(w.last_change < 1e-6);
      }
}

TEST_CASE("weighted norm: table against series") {
  for (int i : {1, 2})
    for (long n : {16L, 256L}) {
      const double series = weighted_moment_error_norm_series(i, {n, 1.0}, 2.0, 50.0);
      WeightedNormSpec spec;
      const WeightedNorm table = weighted_moment_error_norm(i, {n, 1.0}, spec);
      CHECK(series <= table.norm * (1 + 1e-9));
      if (i == 1) CHECK(series == doctest::Approx(table.norm).epsilon(1e-3));
    }
}

TEST_CASE("weighted interval and weighted modulus") {
  const double M = certify_growth_constant(fn("t2"), 1000.0);
  CHECK(M == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_FALSE(check_weighted_interval(fn("t2"), {64, 1.0}, 1.5, 2.0, M).violated());
  const WeightedModulusTerms w = weighted_modulus_terms(fn("sin"), {64, 1.0}, {0.0, 5.0, 11, Spacing::uniform});
  CHECK(w.lhs > 0.0);
  CHECK(w.omega > 0.0);
}

TEST_CASE("statistical density") {
  std::vector<double> inv;
  for (int k = 1; k <= 1000; ++k) inv.push_back(1.0 / k);
  const auto d = stat_density(inv, 0.1);
  for (std::size_t n = 10; n < d.size(); ++n) CHECK(d[n] <= 10.0 / static_cast<double>(n + 1));
  const auto ones = stat_density(std::vector<double>(50, 1.0), 0.5);
  for (double v : ones) CHECK(v == 1.0);
  CHECK(majorant_threshold(1, 1.0, 0.01) == 349);
  CHECK(weighted_majorant(1, {349, 1.0}) >= 0.01);
  CHECK(weighted_majorant(1, {350, 1.0}) < 0.01);
  CHECK_THROWS_AS(stat_density(inv, 0.0), ConfigError);
}

TEST_CASE("asymptotic limits") {
  for (double a : {0.0, 1.0, 3.0})
    for (double x : {0.5, 2.0}) {
      const double lim = a * x / (1 + x) + 0.5 - x;
      CHECK(voronovskaja_limit(fn("t1"), a, x, 0) == doctest::Approx(lim));
      for (const auto& row : voronovskaja_check(fn("t1"), a, x, 0, {8, 64, 512}))
        CHECK(row.scaled == doctest::Approx(row.n / (row.n + 1.0) * lim).epsilon(1e-9));
    }
  CHECK(voronovskaja_limit(fn("t2"), 0.0, 1.0, 0) == doctest::Approx(1.0));
  for (const auto& row : voronovskaja_check(fn("t0"), 1.0, 1.0, 1, {16, 64})) {
    CHECK(std::fabs(row.scaled) < 1e-6);
    CHECK(row.limit == 0.0);
  }
  CHECK_THROWS_AS(voronovskaja_limit(fn("abs1"), 1.0, 1.0, 0), ConfigError);
}

TEST_CASE("exact asymptotic identity") {
  for (int p : {1, 2})
    for (const BigRational& a : {BigRational(0), BigRational(1), BigRational(7, 3)}) {
      const VoronovskajaSymbolic s = voronovskaja_symbolic(p, a);
      CHECK(s.structure_ok);
      CHECK(s.limit == s.formula);
    }
}
