#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "bko/moments.hpp"

using namespace bko;

namespace {

RatFunc X() { return RatFunc::monomial(1); }
RatFunc Q(const BigRational& c) { return RatFunc::constant(c); }
// x/(1+x)
RatFunc H() { return RatFunc({0, 1}, 1); }

// sum_k W_k g(k) with single weights, in long double
long double weighted_sum(long n, double a, double x, const std::function<long double(long)>& g) {
  long double sum = 0.0L;
  for (long k = 0; k < 200000; ++k) {
    const long double w = weight(k, {n, a}, x);
    sum += w * g(k);
    if (k > 20 * (n + 1) * (x + 1) && w < 1e-40L) break;
  }
  return sum;
}

long double series(MomentFamily fam, int r, long n, double a, double x) {
  const long double h = 1.0L / (n + 1);
  const long double X = x;
  switch (fam) {
    case MomentFamily::upsilon:
      return weighted_sum(n, a, x, [&](long k) { return std::pow(k * h, r); });
    case MomentFamily::mu:
      return weighted_sum(n, a, x, [&](long k) { return std::pow(k * h - X, r); });
    case MomentFamily::mu_star:
      return weighted_sum(n, a, x, [&](long k) { return std::pow(static_cast<long double>(k) / n - X, r); });
    case MomentFamily::T:
      return weighted_sum(n, a, x, [&](long k) {
        return (std::pow((k + 1) * h, r + 1) - std::pow(k * h, r + 1)) / ((r + 1) * h);
      });
    case MomentFamily::u:
      return weighted_sum(n, a, x, [&](long k) {
        return (std::pow((k + 1) * h - X, r + 1) - std::pow(k * h - X, r + 1)) / ((r + 1) * h);
      });
  }
  return 0.0L;
}

}  // namespace

TEST_CASE("family names") {
  for (auto f : {MomentFamily::upsilon, MomentFamily::mu, MomentFamily::mu_star, MomentFamily::T, MomentFamily::u})
    CHECK(parse_family(to_string(f)) == f);
  CHECK_THROWS_AS(parse_family("nu"), ConfigError);
}

TEST_CASE("Baskakov-type moments in closed form") {
  const ExactParams p{BigRational(7), BigRational(5, 3)};
  const MomentTable u = upsilon_sym(2, p);
  CHECK(u[0] == Q(1));
  CHECK(u[1] == (p.n * X() + p.a * H()) / (p.n + 1));
  CHECK(u[1] == closed_form::upsilon1(p));

  const ExactParams z{BigRational(7), BigRational(0)};
  const RatFunc x2 = RatFunc::monomial(2);
  CHECK(upsilon_sym(2, z)[2] == (z.n * z.n * x2 + z.n * x2 + z.n * X()) / ((z.n + 1) * (z.n + 1)));
}

TEST_CASE("central moments in closed form") {
  const ExactParams p{BigRational(9), BigRational(2)};
  const MomentTable m = mu_sym(2, p);
  CHECK(m[0] == Q(1));
  CHECK(m[1] == (p.a * H() - X()) / (p.n + 1));
  CHECK(m[1] == closed_form::mu1(p));
  CHECK(mu_sym(1, {1, 0})[1](BigRational(1)) == BigRational(-1, 2));
}

TEST_CASE("Kantorovich moments in closed form") {
  for (const ExactParams& p : {ExactParams{4, 1}, ExactParams{BigRational(7, 2), BigRational(1, 3)}, ExactParams{50, 0}}) {
    const MomentTable T = kantorovich_moment_sym(2, p);
    CHECK(T[0] == Q(1));
    CHECK(T[1] == (p.n * X() + p.a * H() + Q(BigRational(1, 2))) / (p.n + 1));
    CHECK(T[1] == closed_form::T1(p));
    CHECK(T[2] == closed_form::T2(p));
    const MomentTable u = kantorovich_central_sym(2, p);
    CHECK(u[1] == (p.a * H() - X() + Q(BigRational(1, 2))) / (p.n + 1));
    CHECK(u[1] == closed_form::u1(p));
    CHECK(u[2] == closed_form::u2(p));
    CHECK(gamma_sym(p) == closed_form::gamma(p));
  }
  // (4x + x/(1+x) + 1/2)/5
  CHECK(kantorovich_moment_sym(1, {4, 1})[1] == (4 * X() + H() + Q(BigRational(1, 2))) / BigRational(5));
  CHECK(kantorovich_central_sym(2, {1, 0})[2](BigRational(1)) == BigRational(7, 12));
  for (long n : {1L, 8L, 30L})
    CHECK(gamma_sym({n, 0})(BigRational(0)) == BigRational(7, 12) / ((n + 1) * (n + 1)));
}

TEST_CASE("every family matches the direct weighted sum") {
  for (auto fam : {MomentFamily::upsilon, MomentFamily::mu, MomentFamily::mu_star, MomentFamily::T, MomentFamily::u})
    for (long n : {3L, 25L})
      for (double a : {0.0, 1.0, 3.5}) {
        const MomentTable t = moment_table(fam, 6, ExactParams::from({n, a}));
        for (double x : {0.3, 1.0, 4.0})
          for (int r = 0; r <= 6; ++r) {
            const long double want = series(fam, r, n, a, x);
            const long double got = t[static_cast<std::size_t>(r)].evaluate<long double>(x);
            const long double scale = std::max(1.0L, std::pow(1.0L + x, r));
            CHECK_MESSAGE(std::fabs(static_cast<double>(got - want)) < 1e-13 * static_cast<double>(scale),
                          to_string(fam), " r=", r, " n=", n, " a=", a, " x=", x);
          }
      }
}

TEST_CASE("orders in n") {
  auto order = [](auto table_fn, int r, double a, double x0) {
    std::vector<std::pair<long, RatFunc>> seq;
    for (long n : {64L, 128L, 256L, 512L}) seq.emplace_back(n, table_fn(r, ExactParams::from({n, a}))[static_cast<std::size_t>(r)]);
    return rf_leading_order(seq, x0).exponent;
  };
  CHECK(order(mu_sym, 2, 1.0, 1.0) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(order(mu_sym, 2, 0.0, 1.0) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(order(mu_sym, 4, 0.0, 1.0) == doctest::Approx(2.0).epsilon(0.02));
  CHECK(order(mu_star_sym, 2, 1.0, 1.0) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(order(kantorovich_central_sym, 3, 1.0, 1.0) == doctest::Approx(2.0).epsilon(0.02));
  CHECK(order(kantorovich_central_sym, 1, 1.0, 2.0) == doctest::Approx(1.0).epsilon(0.02));
  // u_{n,1} vanishes identically at a = 1, x = 1
  CHECK_THROWS_AS(order(kantorovich_central_sym, 1, 1.0, 1.0), OrderUndefined);
}

TEST_CASE("second central moment: leading coefficient") {
  for (double x : {0.5, 2.0, 7.0}) {
    const long n = 1 << 16;
    const double u2 = kantorovich_central_sym(2, ExactParams::from({n, 1.5}))[2](x);
    const double scaled = u2 * (n + 1.0) * (n + 1.0) / n;
    CHECK(scaled == doctest::Approx(x * (1 + x)).epsilon(1e-3));
  }
}

TEST_CASE("table JSON") {
  const nlohmann::json j = kantorovich_moment_sym(1, {4, 1}).to_json();
  CHECK(j["family"] == "T");
  CHECK(j["n"] == "4/1");
  CHECK(RatFunc::from_json(j["entries"][1]["value"]) == closed_form::T1({4, 1}));
}

TEST_CASE("cache") {
  MomentCache& c = moment_cache();
  c.clear();
  const ExactParams p{10, 2};
  auto a = c.get(MomentFamily::T, 3, p);
  CHECK(c.get(MomentFamily::T, 2, p) == a);
  auto b = c.get(MomentFamily::T, 5, p);
  CHECK(b != a);
  CHECK(b->r_max() == 5);
  CHECK((*b)[3] == (*a)[3]);
  CHECK(c.get(MomentFamily::u, 3, p) != b);
}
