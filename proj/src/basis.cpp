#include "bko/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bko {

void OperatorParams::validate() const {
  if (n < 1) throw ConfigError("operator parameter n must be >= 1, got " + std::to_string(n));
  if (!(a >= 0.0) || !std::isfinite(a))
    throw ConfigError("operator parameter a must be finite and >= 0");
}

ExactParams ExactParams::from(const OperatorParams& p) {
  p.validate();
  return {BigRational(p.n), exact_rational(p.a)};
}

std::size_t TruncationPolicy::resolved_max_terms(long n, double x) const {
  if (max_terms) return *max_terms;
  const double guess = std::ceil(10.0 * (static_cast<double>(n) + 1.0) * (x + 1.0));
  return std::max<std::size_t>(1000, static_cast<std::size_t>(guess));
}

void TruncationPolicy::validate() const {
  if (!(tail_mass_tol > 0.0 && tail_mass_tol < 1.0))
    throw ConfigError("tail_mass_tol must lie in (0, 1)");
  if (max_terms && *max_terms < 1) throw ConfigError("max_terms must be >= 1");
}

void WeightRow::write_csv(std::ostream& os) const {
  char buf[64];
  os << "k,weight\r\n";
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g\r\n", static_cast<long>(k), values[k]);
    os << buf;
  }
}

BigRational rising_factorial(const BigRational& v, unsigned i) {
  BigRational out = 1;
  for (unsigned j = 0; j < i; ++j) out *= v + j;
  return out;
}

BigRational pk_direct(unsigned k, const ExactParams& p) {
  BigRational sum = 0;
  BigInteger binom = 1;
  BigRational rising = 1;
  for (unsigned i = 0; i <= k; ++i) {
    if (i > 0) {
      binom = binom * (k - i + 1) / i;
      rising *= p.n + (i - 1);
    }
    BigRational apow = 1;
    for (unsigned j = 0; j < k - i; ++j) apow *= p.a;
    sum += BigRational(binom) * rising * apow;
  }
  return sum;
}

std::vector<BigRational> pk_recurrence(unsigned k_max, const ExactParams& p) {
  std::vector<BigRational> out;
  out.reserve(k_max + 1);
  out.emplace_back(1);
  if (k_max == 0) return out;
  out.push_back(p.a + p.n);
  for (unsigned k = 1; k < k_max; ++k)
    out.push_back((p.a + p.n + k) * out[k] - p.a * k * out[k - 1]);
  return out;
}

double weight(long k, const OperatorParams& p, double x) {
  p.validate();
  if (k < 0 || x < 0.0) return 0.0;
  if (x == 0.0) return k == 0 ? 1.0 : 0.0;
  const double n = static_cast<double>(p.n);
  const double kd = static_cast<double>(k);
  const double lam = p.a * x / (1.0 + x);
  double log_pk_over_kfact;
  if (p.a == 0.0 || k == 0) {
    // P_k(n,0)/k! = (n)_k/k! = C(n+k-1, k)
    log_pk_over_kfact = std::lgamma(n + kd) - std::lgamma(n) - std::lgamma(kd + 1.0);
  } else {
    // P_k/k! = sum_i (n)_i/i! * a^{k-i}/(k-i)!
    const double loga = std::log(p.a);
    std::vector<double> terms(static_cast<std::size_t>(k) + 1);
    for (long i = 0; i <= k; ++i) {
      const double id = static_cast<double>(i);
      terms[i] = std::lgamma(n + id) - std::lgamma(n) - std::lgamma(id + 1.0) +
                 (kd - id) * loga - std::lgamma(kd - id + 1.0);
    }
    const double top = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - top);
    log_pk_over_kfact = top + std::log(acc);
  }
  return std::exp(-lam + log_pk_over_kfact + kd * std::log(x) - (n + kd) * std::log1p(x));
}

WeightRow weight_row(const OperatorParams& p, double x, const TruncationPolicy& policy, double growth) {
  p.validate();
  policy.validate();
  if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("weight_row requires finite x >= 0");
  if (!(growth >= 0.0)) throw ConfigError("weight_row growth exponent must be >= 0");
  WeightRow row;
  row.x = x;
  if (x == 0.0) {
    row.values = Eigen::VectorXd::Ones(1);
    return row;
  }

  const double n = static_cast<double>(p.n);
  const double a = p.a;
  const double q = x / (1.0 + x);
  const double log_w0 = -a * q - n * std::log1p(x);
  const std::size_t max_terms = policy.resolved_max_terms(p.n, x);
  // weighted tail is measured against the size of (1 + t^growth) near t = x
  const double growth_scale = 1.0 + std::pow(x, growth);

  // W_k = scaled * exp(log_w0 + log_shift); scaled is folded back into
  // log_shift whenever it leaves [1e-150, 1e150].
  double scaled = 1.0;
  double log_shift = 0.0;
  double factor = std::exp(log_w0);
  double rho = a + n;  // P_{k+1}/P_k at k = 0

  std::vector<double> values;
  values.reserve(std::min<std::size_t>(max_terms, 1u << 16));
  for (std::size_t k = 0;; ++k) {
    const double w = scaled * factor;
    values.push_back(w);
    const double kd = static_cast<double>(k);
    const double ratio = rho / (kd + 1.0) * q;  // W_{k+1}/W_k
    // The ratio is non-increasing in k, so past ratio < 1 the tail is
    // dominated by a geometric series.
    if (ratio < 1.0) {
      const double tail = w * ratio / (1.0 - ratio);
      // same argument for W_k (1 + ((k+1)/(n+1))^growth): the extra factor
      // has ratio <= ((k+2)/(k+1))^growth, also non-increasing
      const double grown = growth == 0.0 ? ratio : ratio * std::pow((kd + 2.0) / (kd + 1.0), growth);
      const double weighted =
          growth == 0.0 ? tail
          : grown < 1.0 ? w * (1.0 + std::pow((kd + 1.0) / (n + 1.0), growth)) * grown / (1.0 - grown)
                        : std::numeric_limits<double>::infinity();
      if (tail <= policy.tail_mass_tol && weighted <= policy.tail_mass_tol * growth_scale) {
        row.tail_mass = tail;
        break;
      }
    }
    if (values.size() >= max_terms) {
      const double tail = ratio < 1.0 ? w * ratio / (1.0 - ratio)
                                      : std::numeric_limits<double>::infinity();
      throw TruncationFailure("weight series not certified within " + std::to_string(max_terms) +
                                  " terms (n=" + std::to_string(p.n) + ", x=" + std::to_string(x) +
                                  ")",
                              values.size(), tail);
    }
    scaled *= ratio;
    if (scaled > 1e150 || scaled < 1e-150) {
      log_shift += std::log(scaled);
      scaled = 1.0;
      factor = std::exp(log_w0 + log_shift);
    }
    // rho_{k+1} = (a + n + k + 1) - a (k+1) / rho_k
    rho = (a + n + kd + 1.0) - a * (kd + 1.0) / rho;
  }
  row.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return row;
}

double weight_log_derivative_residual(long k, const OperatorParams& p, double x) {
  if (!(x > 0.0)) throw ConfigError("weight_log_derivative_residual requires x > 0");
  auto central = [&](double h) { return (weight(k, p, x + h) - weight(k, p, x - h)) / (2.0 * h); };
  // Richardson tableau with three halvings.
  double h = std::min(0.125 * x, 0.05);
  double t[4];
  for (int i = 0; i < 4; ++i, h *= 0.5) t[i] = central(h);
  for (int level = 1; level < 4; ++level) {
    const double f = std::pow(4.0, level);
    for (int i = 3; i >= level; --i) t[i] = (f * t[i] - t[i - 1]) / (f - 1.0);
  }
  const double dw = t[3];
  const double w = weight(k, p, x);
  const double n = static_cast<double>(p.n);
  const double lhs = x * (1.0 + x) * (1.0 + x) * dw;
  const double rhs = ((static_cast<double>(k) - n * x) * (1.0 + x) - p.a * x) * w;
  return std::fabs(lhs - rhs);
}

}  // namespace bko
