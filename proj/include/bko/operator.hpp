#pragma once

#include <cstddef>

#include "bko/basis.hpp"
#include "bko/functions.hpp"
#include "bko/quadrature.hpp"

namespace bko {

// integral of f over [k/(n+1), (k+1)/(n+1)], split at f's breakpoints so no
// Gauss node straddles a kink. n = 0 is allowed here (cell [k, k+1]).
double cell_integral(const FunctionSpec& f, long k, long n, const QuadratureRule& rule = default_rule());

struct OperatorValue {
  double value = 0.0;
  double tail_mass = 0.0;  // weight mass left out of the sum
  std::size_t terms = 0;
};

// K_n^a(f; x) = (n+1) sum_k W_{n,k}^a(x) int_{cell k} f
OperatorValue kantorovich_eval(const FunctionSpec& f, const OperatorParams& p, double x,
                               const TruncationPolicy& policy = {},
                               const QuadratureRule& rule = default_rule());

// Same sum over an already computed row.
double kantorovich_on_row(const FunctionSpec& f, long n, const WeightRow& row,
                          const QuadratureRule& rule = default_rule());

inline double kantorovich(const FunctionSpec& f, const OperatorParams& p, double x,
                          const TruncationPolicy& policy = {}) {
  return kantorovich_eval(f, p, x, policy).value;
}

// B*_{n,a}(f; x) = sum_k W_{n,k}^a(x) f(k/(n+1))
OperatorValue baskakov_eval(const FunctionSpec& f, const OperatorParams& p, double x,
                            const TruncationPolicy& policy = {});

// (n x + a x/(1+x) + 1/2) / (n+1), the image of t under K_n^a
double kantorovich_mean(const OperatorParams& p, double x);

// K_n^a(f; x) - f(kantorovich_mean) + f(x)
double auxiliary_eval(const FunctionSpec& f, const OperatorParams& p, double x,
                      const TruncationPolicy& policy = {});

// J_n^a(x, t) = (n+1) W_{n, floor(t(n+1))}^a(x)
double kernel_density(const OperatorParams& p, double x, double t);

// alpha_n^a(x, y) = int_0^y J_n^a(x, t) dt
double kernel_cdf(const OperatorParams& p, double x, double y, const TruncationPolicy& policy = {});
double kernel_cdf_on_row(long n, const WeightRow& row, double y);

// Upper estimate of 1 - alpha_n^a(x, z), summed from the right and including
// the certified tail mass.
double kernel_survival(const OperatorParams& p, double x, double z, const TruncationPolicy& policy = {});
double kernel_survival_on_row(long n, const WeightRow& row, double z);

struct DerivativeEstimate {
  double value = 0.0;
  double error = 0.0;  // |last two Richardson levels|
  double step = 0.0;   // initial step h0
};

// d^r/dx^r K_n^a(f; x), r in 1..3, by central differences with two
// Richardson levels starting from h0 = max(x,1) eps^{1/(r+2)}.
DerivativeEstimate operator_derivative(const FunctionSpec& f, const OperatorParams& p, double x, int r,
                                       const TruncationPolicy& policy = {});

}  // namespace bko
