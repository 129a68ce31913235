#include "bko/operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace bko {

double cell_integral(const FunctionSpec& f, long k, long n, const QuadratureRule& rule) {
  if (k < 0) throw ConfigError("cell index must be >= 0");
  if (n < 0) throw ConfigError("cell_integral requires n >= 0");
  const double width = 1.0 / static_cast<double>(n + 1);
  const double lo = static_cast<double>(k) * width;
  const double hi = static_cast<double>(k + 1) * width;
  const auto& bps = f.breakpoints;
  auto it = std::upper_bound(bps.begin(), bps.end(), lo);
  if (it == bps.end() || *it >= hi) return rule.integrate(f.value, lo, hi);
  double acc = 0.0;
  double left = lo;
  for (; it != bps.end() && *it < hi; ++it) {
    acc += rule.integrate(f.value, left, *it);
    left = *it;
  }
  return acc + rule.integrate(f.value, left, hi);
}

double kantorovich_on_row(const FunctionSpec& f, long n, const WeightRow& row, const QuadratureRule& rule) {
  Eigen::VectorXd means(row.values.size());
  const double scale = static_cast<double>(n + 1);
  for (Eigen::Index k = 0; k < row.values.size(); ++k)
    means[k] = row.values[k] == 0.0 ? 0.0 : scale * cell_integral(f, static_cast<long>(k), n, rule);
  return row.values.dot(means);
}

OperatorValue kantorovich_eval(const FunctionSpec& f, const OperatorParams& p, double x,
                               const TruncationPolicy& policy, const QuadratureRule& rule) {
  const WeightRow row = weight_row(p, x, policy, f.growth_gamma);
  return {kantorovich_on_row(f, p.n, row, rule), row.tail_mass, row.size()};
}

OperatorValue baskakov_eval(const FunctionSpec& f, const OperatorParams& p, double x,
                            const TruncationPolicy& policy) {
  const WeightRow row = weight_row(p, x, policy, f.growth_gamma);
  Eigen::VectorXd samples(row.values.size());
  const double width = 1.0 / static_cast<double>(p.n + 1);
  for (Eigen::Index k = 0; k < samples.size(); ++k) samples[k] = f(static_cast<double>(k) * width);
  return {row.values.dot(samples), row.tail_mass, row.size()};
}

double kantorovich_mean(const OperatorParams& p, double x) {
  const double n = static_cast<double>(p.n);
  return (n * x + p.a * x / (1.0 + x) + 0.5) / (n + 1.0);
}

double auxiliary_eval(const FunctionSpec& f, const OperatorParams& p, double x, const TruncationPolicy& policy) {
  return kantorovich(f, p, x, policy) - f(kantorovich_mean(p, x)) + f(x);
}

double kernel_density(const OperatorParams& p, double x, double t) {
  if (t < 0.0) return 0.0;
  const long k = static_cast<long>(std::floor(t * static_cast<double>(p.n + 1)));
  return static_cast<double>(p.n + 1) * weight(k, p, x);
}

namespace {

// (cell index, fraction of that cell below y)
std::pair<long, double> locate(long n, double y) {
  const double s = y * static_cast<double>(n + 1);
  const double cell = std::floor(s);
  return {static_cast<long>(cell), s - cell};
}

}  // namespace

double kernel_cdf_on_row(long n, const WeightRow& row, double y) {
  if (y <= 0.0) return 0.0;
  const auto [j, frac] = locate(n, y);
  const long size = static_cast<long>(row.values.size());
  if (j >= size) return row.mass();
  return row.values.head(j).sum() + frac * row.values[j];
}

double kernel_cdf(const OperatorParams& p, double x, double y, const TruncationPolicy& policy) {
  return kernel_cdf_on_row(p.n, weight_row(p, x, policy), y);
}

double kernel_survival_on_row(long n, const WeightRow& row, double z) {
  if (z <= 0.0) return 1.0;
  const auto [j, frac] = locate(n, z);
  const long size = static_cast<long>(row.values.size());
  if (j >= size) return row.tail_mass;
  return (1.0 - frac) * row.values[j] + row.values.tail(size - j - 1).sum() + row.tail_mass;
}

double kernel_survival(const OperatorParams& p, double x, double z, const TruncationPolicy& policy) {
  return kernel_survival_on_row(p.n, weight_row(p, x, policy), z);
}

DerivativeEstimate operator_derivative(const FunctionSpec& f, const OperatorParams& p, double x, int r,
                                       const TruncationPolicy& policy) {
  if (r < 1 || r > 3) throw ConfigError("operator_derivative supports r in 1..3");
  if (!(x > 0.0)) throw ConfigError("operator_derivative requires x > 0");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(x, 1.0);
  const int reach = r == 3 ? 2 : 1;
  double h0 = scale * std::pow(eps, 1.0 / (r + 2));
  // keep the widest stencil inside (0, inf)
  h0 = std::min(h0, x / (1.5 * reach));
  if (h0 / 4.0 < 1e-6 * scale)
    throw StepUnderflow("derivative step below 1e-6*max(x,1) at x = " + std::to_string(x));

  // Tighter tail so truncation jumps between stencil points stay below roundoff.
  TruncationPolicy tight = policy;
  tight.tail_mass_tol = std::max(policy.tail_mass_tol * 1e-4, 1e-300);
  auto K = [&](double at) { return kantorovich(f, p, at, tight); };

  const double center = r == 2 ? K(x) : 0.0;
  auto difference = [&](double h) {
    switch (r) {
      case 1:
        return (K(x + h) - K(x - h)) / (2.0 * h);
      case 2:
        return (K(x + h) - 2.0 * center + K(x - h)) / (h * h);
      default:
        return (K(x + 2.0 * h) - 2.0 * K(x + h) + 2.0 * K(x - h) - K(x - 2.0 * h)) / (2.0 * h * h * h);
    }
  };

  std::array<double, 3> t{difference(h0), difference(h0 / 2.0), difference(h0 / 4.0)};
  std::array<double, 2> level1{(4.0 * t[1] - t[0]) / 3.0, (4.0 * t[2] - t[1]) / 3.0};
  const double level2 = (16.0 * level1[1] - level1[0]) / 15.0;
  return {level2, std::fabs(level2 - level1[1]), h0};
}

}  // namespace bko
