#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bko/errors.hpp"

namespace bko {

// GMP keeps mpq_class canonical (gcd 1, positive denominator) after every
// arithmetic operation.
using BigRational = mpq_class;
using BigInteger = mpz_class;

BigRational parse_rational(std::string_view text);
// Always "p/q", including q = 1.
std::string to_string(const BigRational& q);
// Exact binary value of a finite double.
BigRational exact_rational(double v);

template <typename Scalar>
Scalar rational_cast(const BigRational& q);

template <>
inline double rational_cast<double>(const BigRational& q) {
  return q.get_d();
}

template <>
inline long double rational_cast<long double>(const BigRational& q) {
  // Split off the double part so the remainder keeps the extra bits.
  const double hi = q.get_d();
  const BigRational rest = q - exact_rational(hi);
  return static_cast<long double>(hi) + static_cast<long double>(rest.get_d());
}

template <>
inline BigRational rational_cast<BigRational>(const BigRational& q) {
  return q;
}

enum class ArithOp { add, sub, mul };

// p(x) / (1+x)^m with exact rational coefficients (ascending powers of x).
//
// Invariants after construction: trailing zero coefficients stripped;
// p(-1) != 0 unless m = 0; the zero function has no coefficients and m = 0.
class RatFunc {
 public:
  RatFunc() = default;
  explicit RatFunc(std::vector<BigRational> coeffs, unsigned pole_order = 0);

  static RatFunc constant(const BigRational& c);
  // x^power
  static RatFunc monomial(unsigned power, const BigRational& c = 1);
  // c / (1+x)^m
  static RatFunc inverse_power(unsigned m, const BigRational& c = 1);

  const std::vector<BigRational>& coeffs() const noexcept { return coeffs_; }
  unsigned pole_order() const noexcept { return pole_order_; }
  // -1 for the zero function.
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept { return coeffs_.empty(); }

  BigRational operator()(const BigRational& x) const;

  // Horner in the requested scalar. Throws PoleError at x = -1.
  template <typename Scalar>
  Scalar evaluate(Scalar x) const {
    if (x == Scalar(-1)) throw PoleError("RatFunc evaluated at x = -1");
    Scalar acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
      acc = acc * x + rational_cast<Scalar>(*it);
    Scalar den(1);
    const Scalar base = Scalar(1) + x;
    for (unsigned i = 0; i < pole_order_; ++i) den *= base;
    return acc / den;
  }

  double operator()(double x) const { return evaluate<double>(x); }

  // Evaluates exactly at the binary value of x and rounds once.
  double evaluate_exact(double x) const;

  RatFunc derivative() const;

  RatFunc& operator+=(const RatFunc& rhs);
  RatFunc& operator-=(const RatFunc& rhs);
  RatFunc& operator*=(const RatFunc& rhs);
  RatFunc& operator*=(const BigRational& c);
  RatFunc& operator/=(const BigRational& c);

  friend RatFunc operator+(RatFunc lhs, const RatFunc& rhs) { return lhs += rhs; }
  friend RatFunc operator-(RatFunc lhs, const RatFunc& rhs) { return lhs -= rhs; }
  friend RatFunc operator*(RatFunc lhs, const RatFunc& rhs) { return lhs *= rhs; }
  friend RatFunc operator*(RatFunc lhs, const BigRational& c) { return lhs *= c; }
  friend RatFunc operator*(const BigRational& c, RatFunc rhs) { return rhs *= c; }
  friend RatFunc operator/(RatFunc lhs, const BigRational& c) { return lhs /= c; }
  RatFunc operator-() const;

  friend bool operator==(const RatFunc& lhs, const RatFunc& rhs) {
    return lhs.pole_order_ == rhs.pole_order_ && lhs.coeffs_ == rhs.coeffs_;
  }

  nlohmann::json to_json() const;
  static RatFunc from_json(const nlohmann::json& j);

 private:
  void normalize();

  std::vector<BigRational> coeffs_;
  unsigned pole_order_ = 0;
};

RatFunc rf_arith(const RatFunc& lhs, const RatFunc& rhs, ArithOp op);
RatFunc rf_derive(const RatFunc& f);

// f / d(x) for a polynomial divisor d. Only divisors of the form c*(1+x)^j
// keep the result inside the family; anything else throws DivisionNotExact.
RatFunc divide_exact(const RatFunc& f, std::span<const BigRational> divisor);

// Human-readable form, e.g. "(1/2 + x^2)/(1+x)^3".
std::string to_display(const RatFunc& f);

struct LeadingOrder {
  double exponent = 0.0;          // last successive estimate
  std::vector<double> exponents;  // one per consecutive pair of n
  std::vector<double> ratios;     // |f_{n_i}| / |f_{n_{i+1}}|
};

// |f_n(x0)| ~ C n^{-s}: successive estimates s_i = log(f_i/f_{i+1}) / log(n_{i+1}/n_i).
LeadingOrder leading_order(std::span<const std::pair<long, double>> values);
LeadingOrder rf_leading_order(std::span<const std::pair<long, RatFunc>> seq, double x0);

}  // namespace bko
