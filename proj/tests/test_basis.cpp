#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bko/basis.hpp"

using namespace bko;

namespace {

// Weight law as a convolution: negative binomial (n, x/(1+x)) plus an
// independent Poisson(ax/(1+x)).
long double weight_oracle(long k, long n, double a, double x) {
  const long double q = static_cast<long double>(x) / (1.0L + x);
  const long double lam = static_cast<long double>(a) * q;
  long double sum = 0.0L;
  for (long i = 0; i <= k; ++i) {
    const long double nb =
        std::exp(std::lgamma(static_cast<long double>(n + i)) - std::lgamma(static_cast<long double>(n)) -
                 std::lgamma(static_cast<long double>(i + 1)) + n * std::log1p(-q) + (i ? i * std::log(q) : 0.0L));
    const long j = k - i;
    const long double po =
        lam == 0.0L ? (j == 0 ? 1.0L : 0.0L)
                    : std::exp(-lam + j * std::log(lam) - std::lgamma(static_cast<long double>(j + 1)));
    sum += nb * po;
  }
  return sum;
}

}  // namespace

TEST_CASE("rising factorial") {
  CHECK(rising_factorial(7, 0) == 1);
  CHECK(rising_factorial(3, 2) == 12);
  CHECK(rising_factorial(5, 3) == 210);
  CHECK(rising_factorial(BigRational(1, 2), 2) == BigRational(3, 4));
}

TEST_CASE("P_k direct sum") {
  const ExactParams p{4, 1};
  CHECK(pk_direct(0, p) == 1);
  CHECK(pk_direct(1, p) == 5);
  CHECK(pk_direct(2, p) == 29);
  const ExactParams q{BigRational(7, 3), BigRational(5, 2)};
  CHECK(pk_direct(1, q) == q.a + q.n);
}

TEST_CASE("P_k recurrence matches the direct sum") {
  for (const ExactParams& p : {ExactParams{4, 1}, ExactParams{1, 0}, ExactParams{BigRational(9, 2), BigRational(1, 3)},
                               ExactParams{37, 11}}) {
    const auto rec = pk_recurrence(30, p);
    REQUIRE(rec.size() == 31);
    for (unsigned k = 0; k <= 30; ++k) CHECK(rec[k] == pk_direct(k, p));
  }
}

TEST_CASE("single weights") {
  CHECK(weight(0, {1, 0.0}, 1.0) == doctest::Approx(0.5));
  for (double a : {0.0, 0.7, 3.0})
    for (double x : {0.2, 1.0, 4.5})
      CHECK(weight(0, {6, a}, x) == doctest::Approx(std::exp(-a * x / (1 + x)) / std::pow(1 + x, 6)).epsilon(1e-13));
}

TEST_CASE("weights against the convolution oracle") {
  for (long n : {1L, 5L, 64L})
    for (double a : {0.0, 0.5, 3.0})
      for (double x : {0.1, 1.0, 7.0})
        for (long k : {0L, 1L, 3L, 10L, 40L}) {
          const double w = weight(k, {n, a}, x);
          const double o = static_cast<double>(weight_oracle(k, n, a, x));
          CHECK(w == doctest::Approx(o).epsilon(1e-11));
        }
}

TEST_CASE("weight row at x = 0") {
  const WeightRow row = weight_row({10, 2.0}, 0.0);
  REQUIRE(row.size() == 1);
  CHECK(row.values[0] == 1.0);
  CHECK(row.tail_mass == 0.0);
}

TEST_CASE("weight rows: entries, mass and certified tail") {
  for (long n : {1L, 16L, 300L})
    for (double a : {0.0, 1.0, 4.0})
      for (double x : {0.05, 1.0, 12.0}) {
        const WeightRow row = weight_row({n, a}, x);
        CHECK(row.tail_mass <= 1e-14);
        CHECK(std::fabs(row.mass() - 1.0) < 1e-12);
        for (std::size_t k = 0; k < row.size(); k += std::max<std::size_t>(1, row.size() / 7)) {
          const double w = weight(static_cast<long>(k), {n, a}, x);
          if (w > 1e-300) CHECK(row.values[static_cast<Eigen::Index>(k)] == doctest::Approx(w).epsilon(1e-10));
        }
      }
}

TEST_CASE("looser tolerance gives a shorter row") {
  TruncationPolicy loose;
  loose.tail_mass_tol = 1e-6;
  const WeightRow a = weight_row({32, 1.0}, 2.0, loose);
  const WeightRow b = weight_row({32, 1.0}, 2.0);
  CHECK(a.size() < b.size());
  CHECK(a.tail_mass <= 1e-6);
  CHECK(1.0 - a.mass() <= a.tail_mass + 1e-15);
}

TEST_CASE("growth-aware rows run longer") {
  const WeightRow plain = weight_row({1, 0.0}, 20.0, {.tail_mass_tol = 1e-14, .max_terms = 20000});
  const WeightRow grown = weight_row({1, 0.0}, 20.0, {.tail_mass_tol = 1e-14, .max_terms = 20000}, 6.0);
  CHECK(grown.size() > plain.size());
  CHECK_THROWS_AS(weight_row({1, 0.0}, 1.0, {}, -1.0), ConfigError);
}

TEST_CASE("truncation failure") {
  TruncationPolicy tight;
  tight.max_terms = 3;
  try {
    weight_row({4, 1.0}, 10.0, tight);
    FAIL("expected TruncationFailure");
  } catch (const TruncationFailure& e) {
    CHECK(e.terms() == 3);
  }
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(OperatorParams({0, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(OperatorParams({3, -0.5}).validate(), ConfigError);
  CHECK_THROWS_AS(weight_row({3, 1.0}, -1.0), ConfigError);
  TruncationPolicy bad;
  bad.tail_mass_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("derivative identity") {
  auto rel = [](long k, OperatorParams p, double x) {
    return weight_log_derivative_residual(k, p, x) / weight(k, p, x);
  };
  CHECK(rel(2, {5, 0.0}, 1.0) < 1e-8);
  CHECK(rel(0, {5, 1.0}, 0.5) < 1e-8);
  CHECK(rel(10, {5, 0.0}, 2.0) < 1e-8);  // mode: k = n x
  CHECK(rel(7, {20, 2.5}, 0.3) < 1e-8);
}

TEST_CASE("row csv") {
  std::ostringstream os;
  weight_row({2, 0.0}, 0.5).write_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("k,", 0) == 0);
  CHECK(s.find("\r\n") != std::string::npos);
}
