#include "bko/bv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bko/moments.hpp"
#include "bko/operator.hpp"

namespace bko {

void BVBoundParams::validate() const {
  if (!(lambda > 1.0)) throw ConfigError("lambda must be > 1");
  if (n < 1) throw ConfigError("n must be >= 1");
  if (!(x > 0.0)) throw ConfigError("BV bound needs x > 0");
}

PiecewiseMonotone derivative_signal(const FunctionSpec& f) {
  if (!f.has_derivative(1) || !f.derivative_turning_points)
    throw UnknownMonotonicity("function '" + f.id + "' has no monotonicity data for f'");
  PiecewiseMonotone g;
  g.value = f.derivatives[0];
  g.splits = [f](double c, double d) {
    std::vector<double> out = f.derivative_turning_points(c, d);
    for (double b : f.breakpoints)
      if (b > c && b < d) out.push_back(b);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  g.limits = [f](double t) {
    const OneSided lim = f.limits(t);
    return std::pair{lim.deriv_minus, lim.deriv_plus};
  };
  g.hint = f.derivative_tv_hint;
  return g;
}

namespace {

std::pair<double, double> side_values(const PiecewiseMonotone& g, double t) {
  if (g.limits) return g.limits(t);
  const double v = g.value(t);
  return {v, v};
}

}  // namespace

double refinement_variation(const PiecewiseMonotone& g, double c, double d, int pieces) {
  if (!(c <= d)) throw ConfigError("variation needs c <= d");
  if (c == d) return 0.0;
  double prev = side_values(g, c).second;
  double tv = 0.0;
  for (int i = 1; i <= pieces; ++i) {
    const double cur = i == pieces ? side_values(g, d).first : g.value(c + (d - c) * i / pieces);
    tv += std::fabs(cur - prev);
    prev = cur;
  }
  return tv;
}

double total_variation(const PiecewiseMonotone& g, double c, double d) {
  if (!(c <= d)) throw ConfigError("variation needs c <= d");
  if (c == d) return 0.0;
  if (g.hint) {
    const double hint = g.hint(c, d);
    const double refined = refinement_variation(g, c, d);
    if (refined > hint + 1e-9)
      throw NumericalError("variation hint " + std::to_string(hint) + " is below the refinement sum " +
                           std::to_string(refined));
    return hint;
  }
  if (!g.splits) throw UnknownMonotonicity("signal has no split points");
  double tv = 0.0;
  double left = side_values(g, c).second;
  for (double s : g.splits(c, d)) {
    const auto [minus, plus] = side_values(g, s);
    tv += std::fabs(minus - left) + std::fabs(plus - minus);
    left = plus;
  }
  return tv + std::fabs(side_values(g, d).first - left);
}

double FxSignal::operator()(double t) const {
  if (t < x) return base(t) - value_minus;
  if (t > x) return base(t) - value_plus;
  return 0.0;
}

FxSignal build_fx(const FunctionSpec& f, double x) {
  if (!(x > 0.0)) throw ConfigError("f_x needs x > 0");
  const OneSided lim = f.limits(x);
  return {f, x, lim.value_minus, lim.value_plus, lim.deriv_minus, lim.deriv_plus};
}

bool validity_holds(const OperatorParams& p, double x, double lambda) {
  const auto table = moment_cache().get(MomentFamily::u, 2, ExactParams::from(p));
  const BigRational X = exact_rational(x);
  const BigRational rhs = exact_rational(lambda) * X * (1 + X) / BigRational(p.n + 1);
  return (*table)[2](X) <= rhs;
}

long validity_threshold(double a, double x, double lambda) {
  if (!(lambda > 1.0)) throw ConfigError("lambda must be > 1");
  if (!(x > 0.0)) throw ConfigError("threshold needs x > 0");
  // (n+1)^2 u_{n,2} is affine in n with slope x(1+x), so the inequality is
  // monotone in n and bisection is exact.
  auto ok = [&](long n) { return validity_holds(OperatorParams{n, a}, x, lambda); };
  if (ok(1)) return 1;
  long hi = 2;
  while (!ok(hi)) {
    if (hi > (1L << 40)) throw NumericalError("no valid n found below 2^40");
    hi *= 2;
  }
  long lo = hi / 2;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

double BVBoundTerms::without_k0() const { return shift + jump + left_sum + left_tail + right_sum + right_tail; }
double BVBoundTerms::with_k0() const { return without_k0() + right_k0; }

BVBoundTerms bv_bound(const FunctionSpec& f, const OperatorParams& p, const BVBoundParams& bp) {
  bp.validate();
  p.validate();
  if (bp.n != p.n) throw ConfigError("BV bound parameters disagree on n");
  const double x = bp.x;
  BVBoundTerms out;
  out.threshold = validity_threshold(p.a, x, bp.lambda);
  if (p.n < out.threshold)
    throw BelowValidityThreshold("second central moment bound needs n >= " + std::to_string(out.threshold),
                            out.threshold);

  const FxSignal fx = build_fx(f, x);
  const PiecewiseMonotone g = derivative_signal(f);
  const double m = static_cast<double>(p.n + 1);
  const double root_n = std::sqrt(static_cast<double>(p.n));
  long top = static_cast<long>(std::floor(root_n));
  while ((top + 1) * (top + 1) <= p.n) ++top;
  while (top * top > p.n) --top;

  out.shift = std::fabs(-x + p.a * x / (1.0 + x) + 0.5) / m * std::fabs(fx.fprime_plus + fx.fprime_minus) / 2.0;
  out.jump = std::sqrt(bp.lambda * x * (1.0 + x) / m) * std::fabs(fx.fprime_plus - fx.fprime_minus) / 2.0;

  const double weight = bp.lambda * (1.0 + x) / m;
  double left = 0.0;
  double right = 0.0;
  for (long k = 1; k <= top; ++k) {
    const double width = x / static_cast<double>(k);
    left += total_variation(g, x - width, x);
    right += total_variation(g, x, x + width);
  }
  out.left_sum = weight * left;
  out.right_sum = weight * right;
  out.right_k0 = weight * total_variation(g, x, 2.0 * x);
  out.left_tail = x / root_n * total_variation(g, x - x / root_n, x);
  out.right_tail = x / root_n * total_variation(g, x, x + x / root_n);
  return out;
}

bool BVRecord::violated() const {
  const double bound = std::min(bound_without_k0, bound_with_k0);
  return lhs > bound + std::max(1e-12 * std::max(1.0, bound), roundoff);
}

BVRecord bv_check(const FunctionSpec& f, const OperatorParams& p, const BVBoundParams& bp,
                  const TruncationPolicy& policy) {
  const BVBoundTerms terms = bv_bound(f, p, bp);
  const OperatorValue k = kantorovich_eval(f, p, bp.x, policy);
  const double fx = f(bp.x);
  // forward-ratio weights carry relative error up to (index) * eps
  const double roundoff = static_cast<double>(k.terms) * std::numeric_limits<double>::epsilon() *
                          (std::fabs(k.value) + std::fabs(fx));
  return {f.id, p.n, p.a, bp.x, bp.lambda, terms.threshold, std::fabs(k.value - fx),
          terms.without_k0(), terms.with_k0(), roundoff};
}

std::vector<KernelTailCheck> kernel_tail_checks(const OperatorParams& p, const BVBoundParams& bp,
                                                const std::vector<double>& points,
                                                const TruncationPolicy& policy) {
  bp.validate();
  const double x = bp.x;
  if (!validity_holds(p, x, bp.lambda))
    throw BelowValidityThreshold("kernel tail bounds need n >= " + std::to_string(validity_threshold(p.a, x, bp.lambda)),
                            validity_threshold(p.a, x, bp.lambda));
  const WeightRow row = weight_row(p, x, policy);
  const double scale = bp.lambda * x * (1.0 + x) / static_cast<double>(p.n + 1);
  std::vector<KernelTailCheck> out;
  for (double t : points) {
    if (t == x || t < 0.0) continue;
    const double gap = (t - x) * (t - x);
    if (t < x)
      out.push_back({true, t, kernel_cdf_on_row(p.n, row, t), scale / gap});
    else
      out.push_back({false, t, kernel_survival_on_row(p.n, row, t), scale / gap});
  }
  return out;
}

}  // namespace bko
