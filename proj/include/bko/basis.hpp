#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "bko/rational.hpp"

namespace bko {

// The pair (n, a) of K_n^a; n >= 1, a >= 0.
struct OperatorParams {
  long n = 1;
  double a = 0.0;

  void validate() const;
};

// (n, a) instantiated as exact rationals for the moment engine. n need not
// be an integer there: the recurrences are identities in n.
struct ExactParams {
  BigRational n = 1;
  BigRational a = 0;

  static ExactParams from(const OperatorParams& p);
  friend bool operator==(const ExactParams&, const ExactParams&) = default;
};

struct TruncationPolicy {
  double tail_mass_tol = 1e-14;
  std::optional<std::size_t> max_terms;  // default: max(1000, ceil(10 (n+1)(x+1)))

  std::size_t resolved_max_terms(long n, double x) const;
  void validate() const;
};

// W_{n,k}^a(x) for k = 0..K plus a certified bound on the omitted tail.
struct WeightRow {
  double x = 0.0;
  Eigen::VectorXd values;
  double tail_mass = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  double mass() const { return values.sum(); }
  void write_csv(std::ostream& os) const;
};

// (v)_i = v (v+1) ... (v+i-1), (v)_0 = 1
BigRational rising_factorial(const BigRational& v, unsigned i);

// P_k(n,a) = sum_i C(k,i) (n)_i a^{k-i}
BigRational pk_direct(unsigned k, const ExactParams& p);

// P_0..P_{k_max} via P_{k+1} = (a+n+k) P_k - a k P_{k-1}.
std::vector<BigRational> pk_recurrence(unsigned k_max, const ExactParams& p);

// Single weight, evaluated in log space (log-sum-exp over the defining sum
// for a > 0, log-binomial closed form for a = 0).
double weight(long k, const OperatorParams& p, double x);

// Weight row by forward ratios. Throws TruncationFailure when the tail
// certificate is not reached within policy.max_terms. With growth > 0 the
// row also runs until sum_{k>K} W_k (1 + ((k+1)/(n+1))^growth) is below
// tol * (1 + x^growth), which is what a function of that growth needs.
WeightRow weight_row(const OperatorParams& p, double x, const TruncationPolicy& policy = {},
                     double growth = 0.0);

// |x(1+x)^2 W' - ((k - n x)(1+x) - a x) W| with W' from Richardson-extrapolated
// central differences.
double weight_log_derivative_residual(long k, const OperatorParams& p, double x);

}  // namespace bko
