#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bko/moments.hpp"
#include "bko/operator.hpp"

using namespace bko;

namespace {

const FunctionCatalog& cat() { return builtin_catalog(); }

// K_n^a(t^r; x) from single weights and exact cell integrals of t^r
double monomial_series(int r, long n, double a, double x) {
  const double h = 1.0 / static_cast<double>(n + 1);
  double sum = 0.0;
  for (long k = 0; k < 100000; ++k) {
    const double w = weight(k, {n, a}, x);
    const double cell = (std::pow(k + 1.0, r + 1) - std::pow(static_cast<double>(k), r + 1)) *
                        std::pow(h, r) / (r + 1.0);
    sum += w * cell;
    if (k > 10 * (n + 1) * (x + 1) && w * cell < 1e-20) break;
  }
  return sum;
}

FunctionSpec shifted_identity(double x) {
  FunctionSpec f;
  f.id = "t_minus_x";
  f.value = [x](double t) { return t - x; };
  f.derivatives[0] = [](double) { return 1.0; };
  f.growth_gamma = 1.0;
  return f;
}

}  // namespace

TEST_CASE("Gauss-Legendre rule") {
  const QuadratureRule& q = default_rule();
  CHECK(q.order == 16);
  CHECK(q.weights.sum() == doctest::Approx(2.0).epsilon(1e-15));
  for (int p = 0; p <= 31; ++p)
    CHECK(q.integrate([p](double t) { return std::pow(t, p); }, 0.0, 1.0) ==
          doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
  const QuadratureRule g3 = QuadratureRule::gauss_legendre(3);
  CHECK(g3.nodes[2] == doctest::Approx(std::sqrt(0.6)));
}

TEST_CASE("catalog") {
  for (const char* id : {"t0", "t1", "t6", "exp_neg", "sin", "sqrt", "inv1p", "abs1", "multikink"})
    CHECK(cat().contains(id));
  CHECK_THROWS_AS(cat().get("t7"), ConfigError);
  for (const auto& id : cat().ids()) {
    const FunctionCheck c = validate_function(cat().get(id));
    CHECK_MESSAGE(c.one_sided_consistent, id);
    CHECK_MESSAGE(std::isfinite(c.growth_constant), id);
  }
  const FunctionSpec& mk = cat().get("multikink");
  CHECK(mk.breakpoints == std::vector<double>{0.5, 1.5, 2.5});
  CHECK(mk(1.0) == doctest::Approx(0.0));
  const OneSided at = mk.limits(1.5);
  CHECK(at.deriv_minus == doctest::Approx(-1.0));
  CHECK(at.deriv_plus == doctest::Approx(0.5));
}

TEST_CASE("user functions from key = value pairs") {
  FunctionCatalog c;
  c.add_from_config({{"function.hat.kind", "piecewise_linear"},
                     {"function.hat.knots", "0:0, 1:1, 2:0"},
                     {"function.cube.kind", "monomial"},
                     {"function.cube.power", "3"},
                     {"function.v.kind", "abs"},
                     {"function.v.center", "2.5"}});
  CHECK(c.get("hat")(0.5) == doctest::Approx(0.5));
  CHECK(c.get("hat")(3.0) == doctest::Approx(0.0));
  CHECK(c.get("hat").breakpoints == std::vector<double>{1.0, 2.0});
  CHECK(c.get("cube")(2.0) == doctest::Approx(8.0));
  CHECK(c.get("v")(0.0) == doctest::Approx(2.5));
  CHECK_THROWS_AS(c.add_from_config({{"function.bad.kind", "spline"}}), ConfigError);
  CHECK_THROWS_AS(c.add_from_config({{"function.bad.kind", "abs"}}), ConfigError);
  CHECK_THROWS_AS(c.add_from_config({{"function.bad.kind", "piecewise_linear"}, {"function.bad.knots", "1:0, 2:1"}}),
                  ConfigError);
}

TEST_CASE("cell integrals") {
  for (long n : {0L, 3L, 20L}) CHECK(cell_integral(cat().get("t0"), 2, n) == doctest::Approx(1.0 / (n + 1)));
  CHECK(cell_integral(cat().get("t1"), 0, 0) == doctest::Approx(0.5));
  CHECK(cell_integral(cat().get("t2"), 1, 1) == doctest::Approx(7.0 / 24.0));
  CHECK(cell_integral(cat().get("abs1"), 2, 4) == doctest::Approx(0.1).epsilon(1e-14));
  // kink of multikink at 1/2 inside [1/3, 2/3]
  CHECK(cell_integral(cat().get("multikink"), 1, 2) == doctest::Approx(5.0 / 36.0).epsilon(1e-14));
}

TEST_CASE("Kantorovich values") {
  for (long n : {1L, 7L, 100L})
    for (double a : {0.0, 2.0})
      for (double x : {0.0, 0.3, 6.0}) CHECK(kantorovich(cat().get("t0"), {n, a}, x) == doctest::Approx(1.0));
  CHECK(kantorovich(cat().get("t1"), {4, 1.0}, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(kantorovich(cat().get("t1"), {9, 0.0}, 2.0) == doctest::Approx(1.85).epsilon(1e-13));
  CHECK(kantorovich_mean({4, 1.0}, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("Kantorovich against the single-weight series") {
  for (int r : {2, 3, 5})
    for (long n : {3L, 40L})
      for (double a : {0.0, 1.5})
        for (double x : {0.4, 3.0}) {
          const double v = kantorovich(cat().get("t" + std::to_string(r)), {n, a}, x);
          CHECK(v == doctest::Approx(monomial_series(r, n, a, x)).epsilon(1e-11));
        }
}

TEST_CASE("Kantorovich against exact moments") {
  const ExactParams p{BigRational(12), BigRational(3, 2)};
  const MomentTable T = kantorovich_moment_sym(4, p);
  for (int r = 0; r <= 4; ++r)
    for (double x : {0.25, 1.0, 9.0})
      CHECK(kantorovich(cat().get("t" + std::to_string(r)), {12, 1.5}, x) ==
            doctest::Approx(T[static_cast<std::size_t>(r)](x)).epsilon(1e-12));
}

TEST_CASE("Baskakov-type values") {
  CHECK(baskakov_eval(cat().get("t0"), {5, 1.0}, 2.0).value == doctest::Approx(1.0));
  CHECK(baskakov_eval(cat().get("t1"), {4, 1.0}, 1.0).value == doctest::Approx(0.9));
  CHECK(baskakov_eval(cat().get("t1"), {3, 0.0}, 1.0).value == doctest::Approx(0.75));
}

TEST_CASE("auxiliary operator") {
  for (double x : {0.5, 1.0, 3.0})
    CHECK(std::fabs(auxiliary_eval(shifted_identity(x), {16, 1.0}, x)) < 1e-10);
  CHECK(auxiliary_eval(cat().get("t0"), {8, 2.0}, 1.0) == doctest::Approx(1.0));
  CHECK(auxiliary_eval(cat().get("t1"), {4, 1.0}, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("kernel") {
  const OperatorParams p{256, 1.0};
  CHECK(kernel_cdf(p, 1.0, 0.0) == 0.0);
  CHECK(kernel_cdf(p, 1.0, 50.0) == doctest::Approx(1.0).epsilon(1e-13));
  const double lhs = kernel_cdf(p, 1.0, 0.5);
  CHECK(lhs <= 2.0 * 1.0 * 2.0 / (0.25 * 257.0));
  CHECK(kernel_cdf(p, 1.0, 1.3) + kernel_survival(p, 1.0, 1.3) == doctest::Approx(1.0).epsilon(1e-12));
  // density is constant on cells: J = (n+1) W_k
  CHECK(kernel_density({4, 0.5}, 1.0, 0.3) == doctest::Approx(5.0 * weight(1, {4, 0.5}, 1.0)));
  // cdf at a cell boundary is the partial weight sum
  double partial = 0.0;
  for (long k = 0; k < 3; ++k) partial += weight(k, {4, 0.5}, 1.0);
  CHECK(kernel_cdf({4, 0.5}, 1.0, 0.6) == doctest::Approx(partial).epsilon(1e-13));
}

TEST_CASE("derivatives of the operator") {
  CHECK(operator_derivative(cat().get("t1"), {9, 0.0}, 1.3, 1).value == doctest::Approx(0.9).epsilon(1e-8));
  CHECK(std::fabs(operator_derivative(cat().get("t0"), {9, 2.0}, 1.3, 1).value) < 1e-9);
  const double n = 100.0;
  CHECK(operator_derivative(cat().get("t2"), {100, 0.0}, 1.0, 1).value ==
        doctest::Approx((2 * n * n + 4 * n) / ((n + 1) * (n + 1))).epsilon(1e-8));
  const MomentTable T = kantorovich_moment_sym(3, {BigRational(20), BigRational(1)});
  const RatFunc d1 = rf_derive(T[3]), d2 = rf_derive(d1), d3 = rf_derive(d2);
  CHECK(operator_derivative(cat().get("t3"), {20, 1.0}, 0.7, 1).value == doctest::Approx(d1(0.7)).epsilon(1e-8));
  CHECK(operator_derivative(cat().get("t3"), {20, 1.0}, 0.7, 2).value == doctest::Approx(d2(0.7)).epsilon(1e-6));
  CHECK(operator_derivative(cat().get("t3"), {20, 1.0}, 0.7, 3).value == doctest::Approx(d3(0.7)).epsilon(1e-4));
  CHECK_THROWS_AS(operator_derivative(cat().get("t3"), {20, 1.0}, 0.7, 4), ConfigError);
}
