#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bko/basis.hpp"
#include "bko/functions.hpp"

namespace bko {

struct BVBoundParams {
  double lambda = 2.0;
  long n = 1;
  double x = 1.0;

  void validate() const;
};

// Scalar function that is monotone between consecutive split points. At a
// split point it may jump; limits(s) gives (g(s-), g(s+)).
struct PiecewiseMonotone {
  std::function<double(double)> value;
  std::function<std::vector<double>(double, double)> splits;  // split points inside (c, d), sorted
  std::function<std::pair<double, double>(double)> limits;
  std::function<double(double, double)> hint;  // exact variation on [c, d], optional
};

// f' as a piecewise-monotone signal. Throws UnknownMonotonicity when f lacks
// f' or turning-point data.
PiecewiseMonotone derivative_signal(const FunctionSpec& f);

// Variation on [c, d] with g(c+) and g(d-) as endpoint values. With a hint
// the hint is returned after checking that a refinement sum does not exceed it.
double total_variation(const PiecewiseMonotone& g, double c, double d);
// sum |g(t_{i+1}) - g(t_i)| over a uniform partition (endpoints as above)
double refinement_variation(const PiecewiseMonotone& g, double c, double d, int pieces = 2000);

// f minus its one-sided limits at x (0 at x itself).
struct FxSignal {
  FunctionSpec base;
  double x = 0.0;
  double value_minus = 0.0;
  double value_plus = 0.0;
  double fprime_minus = 0.0;
  double fprime_plus = 0.0;

  double operator()(double t) const;
};

FxSignal build_fx(const FunctionSpec& f, double x);

// Smallest n such that u_{n,2}(x) <= lambda x (1+x)/(n+1) holds for every
// n' >= n, decided in exact arithmetic.
long validity_threshold(double a, double x, double lambda);
bool validity_holds(const OperatorParams& p, double x, double lambda);

struct BVBoundTerms {
  double shift = 0.0;        // |u_{n,1}| |f'(x+) + f'(x-)|/2
  double jump = 0.0;         // sqrt(lambda x(1+x)/(n+1)) |f'(x+) - f'(x-)|/2
  double left_sum = 0.0;     // k = 1..[sqrt n] over [x - x/k, x]
  double left_tail = 0.0;    // x/sqrt(n) times variation on [x - x/sqrt(n), x]
  double right_sum = 0.0;    // k = 1..[sqrt n] over [x, x + x/k]
  double right_k0 = 0.0;     // k = 0 term read as the interval [x, 2x]
  double right_tail = 0.0;   // x/sqrt(n) times variation on [x, x + x/sqrt(n)]
  long threshold = 0;        // n0 for this (a, x, lambda)

  double without_k0() const;
  double with_k0() const;
};

// Throws BelowValidityThreshold (carrying n0) when n < n0.
BVBoundTerms bv_bound(const FunctionSpec& f, const OperatorParams& p, const BVBoundParams& bp);

struct BVRecord {
  std::string function;
  long n = 0;
  double a = 0.0;
  double x = 0.0;
  double lambda = 0.0;
  long threshold = 0;
  double lhs = 0.0;
  double bound_without_k0 = 0.0;
  double bound_with_k0 = 0.0;
  double roundoff = 0.0;  // evaluation error estimate for lhs

  bool violated() const;  // either convention
};

BVRecord bv_check(const FunctionSpec& f, const OperatorParams& p, const BVBoundParams& bp,
                  const TruncationPolicy& policy = {});

// The two kernel tail inequalities: alpha(x, y) <= lambda x(1+x)/((x-y)^2 (n+1))
// for 0 <= y < x, and 1 - alpha(x, z) <= lambda x(1+x)/((z-x)^2 (n+1)) for z > x.
struct KernelTailCheck {
  bool left = true;  // y-side (cdf) or z-side (survival)
  double point = 0.0;
  double value = 0.0;
  double bound = 0.0;

  bool holds() const { return value <= bound; }
};

std::vector<KernelTailCheck> kernel_tail_checks(const OperatorParams& p, const BVBoundParams& bp,
                                                const std::vector<double>& points,
                                                const TruncationPolicy& policy = {});

}  // namespace bko
