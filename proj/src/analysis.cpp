#include "bko/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace bko {

void GridSpec::validate() const {
  if (!(x_min >= 0.0)) throw ConfigError("grid x_min must be >= 0");
  if (!(x_max >= x_min)) throw ConfigError("grid x_max must be >= x_min");
  if (points < 2) throw ConfigError("grid needs at least 2 points");
  if (spacing == Spacing::log && !(x_min > 0.0)) throw ConfigError("log grid needs x_min > 0");
}

Eigen::ArrayXd GridSpec::nodes() const {
  validate();
  if (spacing == Spacing::uniform) return Eigen::ArrayXd::LinSpaced(points, x_min, x_max);
  Eigen::ArrayXd out = Eigen::ArrayXd::LinSpaced(points, std::log(x_min), std::log(x_max)).exp();
  out[0] = x_min;
  out[points - 1] = x_max;
  return out;
}

namespace {

double default_lattice(double delta, double x_max) { return std::max(delta / 8.0, x_max / 1e5); }

std::vector<double> step_sizes(double delta, double lattice) {
  std::vector<double> hs;
  for (long j = 1;; ++j) {
    const double h = static_cast<double>(j) * lattice;
    if (h > delta * (1.0 + 1e-12)) break;
    hs.push_back(std::min(h, delta));
  }
  if (hs.empty() || hs.back() < delta) hs.push_back(delta);
  return hs;
}

double difference(const FunctionSpec& f, double x, double h, ModulusOrder order) {
  switch (order) {
    case ModulusOrder::first:
      return std::fabs(f(x + h) - f(x));
    case ModulusOrder::second:
      return std::fabs(f(x + 2.0 * h) - 2.0 * f(x + h) + f(x));
    case ModulusOrder::weighted: {
      const double t = x + h;
      return std::fabs(f(t) - f(x)) / (1.0 + t * t);
    }
  }
  return 0.0;
}

}  // namespace

double modulus(const FunctionSpec& f, double delta, ModulusOrder order, const ModulusOptions& opt) {
  if (!(delta > 0.0)) throw ConfigError("modulus requires delta > 0");
  if (!(opt.x_max > 0.0)) throw ConfigError("modulus requires x_max > 0");
  const double lattice = opt.lattice > 0.0 ? opt.lattice : default_lattice(delta, opt.x_max);
  const long steps = static_cast<long>(std::floor(opt.x_max / lattice));
  const int reach = order == ModulusOrder::second ? 2 : 1;
  double best = 0.0;
  for (double h : step_sizes(delta, lattice)) {
    for (long i = 0; i <= steps; ++i) best = std::max(best, difference(f, static_cast<double>(i) * lattice, h, order));
    for (double c : f.breakpoints) {
      if (c > opt.x_max) break;
      for (int m = 0; m <= reach; ++m) {
        const double x = c - m * h;
        if (x >= 0.0) best = std::max(best, difference(f, x, h, order));
      }
    }
  }
  return best;
}

ModulusReport modulus_report(const FunctionSpec& f, double delta, const ModulusOptions& opt) {
  return {delta, modulus(f, delta, ModulusOrder::first, opt), modulus(f, delta, ModulusOrder::second, opt),
          modulus(f, delta, ModulusOrder::weighted, opt)};
}

double modulus_on_interval(const FunctionSpec& f, double delta, double b, double lattice) {
  if (!(delta > 0.0)) throw ConfigError("modulus requires delta > 0");
  if (!(b > 0.0)) throw ConfigError("modulus_on_interval requires b > 0");
  if (lattice <= 0.0) lattice = default_lattice(delta, b);
  const long steps = static_cast<long>(std::floor(b / lattice));
  double best = 0.0;
  for (double h : step_sizes(std::min(delta, b), lattice)) {
    for (long i = 0; i <= steps; ++i) {
      const double x = static_cast<double>(i) * lattice;
      if (x + h > b) break;
      best = std::max(best, std::fabs(f(x + h) - f(x)));
    }
    for (double c : f.breakpoints) {
      if (c > b) break;
      if (c - h >= 0.0) best = std::max(best, std::fabs(f(c) - f(c - h)));
      if (c + h <= b) best = std::max(best, std::fabs(f(c + h) - f(c)));
    }
  }
  return best;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& errors) {
  if (errors.size() < 3) throw ConfigError("rate_fit needs at least 3 points");
  const Eigen::Index m = static_cast<Eigen::Index>(errors.size());
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto [n, e] = errors[static_cast<std::size_t>(i)];
    if (!(n > 0.0)) throw ConfigError("rate_fit requires n > 0");
    if (!(e > 0.0) || !std::isfinite(e))
      throw NonPositiveError("rate_fit: non-positive error " + std::to_string(e) + " at n = " + std::to_string(n));
    A(i, 0) = 1.0;
    A(i, 1) = std::log(n);
    y[i] = std::log(e);
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  return {-c[1], std::exp(c[0]), (A * c - y).cwiseAbs().maxCoeff()};
}

double sup_error(const FunctionSpec& f, const OperatorParams& p, const GridSpec& grid,
                 const TruncationPolicy& policy) {
  double best = 0.0;
  for (double x : grid.nodes()) best = std::max(best, std::fabs(kantorovich(f, p, x, policy) - f(x)));
  return best;
}

bool BoundRecord::violated() const {
  // roundoff allowance only; inequalities that are equalities in exact
  // arithmetic (f = t) must not flip
  return actual > bound + 1e-12 * std::max(1.0, std::fabs(bound));
}

namespace {

double central_moment(const OperatorParams& p, unsigned r, double x) {
  const auto table = moment_cache().get(MomentFamily::u, r, ExactParams::from(p));
  return (*table)[r].evaluate_exact(x);
}

double first_shift(const OperatorParams& p, double x) {
  return std::fabs(-x + p.a * x / (1.0 + x) + 0.5) / static_cast<double>(p.n + 1);
}

}  // namespace

LocalDirectTerms local_direct_terms(const FunctionSpec& f, const OperatorParams& p, double x,
                                    const TruncationPolicy& policy, const ModulusOptions& opt) {
  LocalDirectTerms t;
  t.actual = std::fabs(kantorovich(f, p, x, policy) - f(x));
  const double gamma = gamma_sym(ExactParams::from(p)).evaluate_exact(x);
  t.omega2_term = modulus(f, std::sqrt(gamma), ModulusOrder::second, opt);
  const double shift = first_shift(p, x);
  t.omega_term = shift > 0.0 ? modulus(f, shift, ModulusOrder::first, opt) : 0.0;
  return t;
}

BoundRecord check_local_direct(const FunctionSpec& f, const OperatorParams& p, double x, double C,
                               const TruncationPolicy& policy, const ModulusOptions& opt) {
  const LocalDirectTerms t = local_direct_terms(f, p, x, policy, opt);
  return {"local_direct", f.id, p.n, p.a, x, t.actual, C * t.omega2_term + t.omega_term};
}

double fit_local_direct_constant(const std::vector<LocalDirectTerms>& calibration) {
  double C = 0.0;
  for (const auto& t : calibration) {
    const double excess = t.actual - t.omega_term;
    if (excess <= 0.0) continue;
    if (!(t.omega2_term > 0.0))
      throw NumericalError("local direct estimate cannot hold: error exceeds the first-order term with omega_2 = 0");
    C = std::max(C, excess / t.omega2_term);
  }
  return C;
}

namespace {

std::vector<double> probe_points(double x, double t_max) {
  std::vector<double> ts;
  const int uniform = 4000;
  for (int i = 0; i <= uniform; ++i) ts.push_back(t_max * i / uniform);
  const double scale = std::max(x, 1.0);
  for (int j = 1; j <= 8; ++j) {
    const double d = scale * std::pow(10.0, -j);
    ts.push_back(x + d);
    if (x - d >= 0.0) ts.push_back(x - d);
  }
  return ts;
}

}  // namespace

LipschitzData certify_lipschitz(const FunctionSpec& f, double alpha, double a1, double a2,
                                const std::vector<double>& xs, double t_max) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("Lipschitz order must lie in (0, 1]");
  if (!(a1 > 0.0 && a2 > 0.0)) throw ConfigError("Lipschitz parameters a1, a2 must be > 0");
  LipschitzData out{alpha, a1, a2, 0.0};
  for (double x : xs) {
    const double fx = f(x);
    const double base = a1 * x * x + a2 * x;
    for (double t : probe_points(x, t_max)) {
      if (t == x) continue;
      const double ratio = std::fabs(f(t) - fx) * std::pow(t + base, alpha / 2.0) / std::pow(std::fabs(t - x), alpha);
      out.M = std::max(out.M, ratio);
    }
  }
  return out;
}

double local_holder_quotient(const FunctionSpec& f, double x, double tau, double t_max) {
  const double fx = f(x);
  double best = 0.0;
  for (double t : probe_points(x, t_max)) {
    if (t == x) continue;
    best = std::max(best, std::fabs(f(t) - fx) / std::pow(std::fabs(t - x), tau));
  }
  return best;
}

std::pair<BoundRecord, BoundRecord> check_lipschitz(const FunctionSpec& f, const OperatorParams& p, double x,
                                                    const LipschitzData& lip, double t_max,
                                                    const TruncationPolicy& policy) {
  if (!(x > 0.0)) throw ConfigError("Lipschitz check requires x > 0");
  const double actual = std::fabs(kantorovich(f, p, x, policy) - f(x));
  const double u2 = central_moment(p, 2, x);
  const double two_param =
      lip.M * std::pow(u2 / (lip.a1 * x * x + lip.a2 * x), lip.alpha / 2.0);
  const double maximal = local_holder_quotient(f, x, lip.alpha, t_max) * std::pow(u2, lip.alpha / 2.0);
  return {BoundRecord{"lipschitz", f.id, p.n, p.a, x, actual, two_param},
          BoundRecord{"maximal", f.id, p.n, p.a, x, actual, maximal}};
}

void WeightedNormSpec::validate() const {
  if (!(rho_exponent >= 2.0)) throw ConfigError("rho_exponent must be >= 2");
  if (!(x_max_trunc > 0.0)) throw ConfigError("x_max_trunc must be > 0");
}

namespace {

RatFunc moment_error(int i, const OperatorParams& p) {
  if (i < 0 || i > 6) throw ConfigError("weighted moment norm supports e_0..e_6");
  const auto table = moment_cache().get(MomentFamily::T, static_cast<unsigned>(i), ExactParams::from(p));
  return (*table)[static_cast<unsigned>(i)] - RatFunc::monomial(static_cast<unsigned>(i));
}

double weighted_value(const RatFunc& g, double x, double rho_exponent) {
  const long double v = g.evaluate<long double>(x);
  return static_cast<double>(std::fabs(v) / (1.0L + std::pow(static_cast<long double>(x), rho_exponent)));
}

// sup over (lo, hi] on a log-spaced sample
double weighted_sup_log(const RatFunc& g, double lo, double hi, double rho_exponent, int samples) {
  double best = 0.0;
  const double ratio = std::log(hi / lo);
  for (int s = 1; s <= samples; ++s)
    best = std::max(best, weighted_value(g, lo * std::exp(ratio * s / samples), rho_exponent));
  return best;
}

}  // namespace

WeightedNorm weighted_moment_error_norm(int i, const OperatorParams& p, const WeightedNormSpec& spec,
                                        double stability) {
  spec.validate();
  const RatFunc g = moment_error(i, p);
  WeightedNorm out;
  if (g.is_zero()) return {0.0, spec.x_max_trunc, 0.0};
  // fine uniform start near 0, then log-spaced out to x_max_trunc
  const double knee = std::min(2.0, spec.x_max_trunc);
  for (int s = 0; s <= 400; ++s) out.norm = std::max(out.norm, weighted_value(g, knee * s / 400.0, spec.rho_exponent));
  if (spec.x_max_trunc > knee)
    out.norm = std::max(out.norm, weighted_sup_log(g, knee, spec.x_max_trunc, spec.rho_exponent, 400));
  out.x_max = spec.x_max_trunc;
  constexpr double x_ceiling = 1e15;
  while (true) {
    const double grown = std::max(out.norm, weighted_sup_log(g, out.x_max, 2.0 * out.x_max, spec.rho_exponent, 64));
    out.last_change = grown - out.norm;
    out.norm = grown;
    out.x_max *= 2.0;
    if (out.last_change < stability) return out;
    if (out.x_max > x_ceiling) throw NumericalError("weighted norm did not stabilize under truncation doubling");
  }
}

double weighted_moment_error_norm_series(int i, const OperatorParams& p, double rho_exponent, double x_max,
                                         const TruncationPolicy& policy) {
  const FunctionSpec e = make_monomial(i);
  const double knee = std::min(2.0, x_max);
  std::vector<double> xs;
  for (int s = 0; s <= 80; ++s) xs.push_back(knee * s / 80.0);
  if (x_max > knee)
    for (int s = 1; s <= 60; ++s) xs.push_back(knee * std::pow(x_max / knee, s / 60.0));
  double best = 0.0;
  for (double x : xs) {
    const double err = std::fabs(kantorovich(e, p, x, policy) - e(x));
    best = std::max(best, err / (1.0 + std::pow(x, rho_exponent)));
  }
  return best;
}

double weighted_majorant(int i, const OperatorParams& p) {
  const double m = static_cast<double>(p.n + 1);
  switch (i) {
    case 0:
      return 0.0;
    case 1:
      return (2.0 * p.a + 1.5) / m;
    case 2:
      return (2.0 * p.a + 3.0) / m + (p.a * p.a + 4.0 * p.a + 13.0 / 3.0) / (m * m);
    default:
      throw ConfigError("weighted majorant known for e_0, e_1, e_2 only");
  }
}

BoundRecord check_weighted_interval(const FunctionSpec& f, const OperatorParams& p, double x, double b,
                                    double M_f, const TruncationPolicy& policy) {
  if (!(x >= 0.0 && x <= b)) throw ConfigError("weighted interval check needs 0 <= x <= b");
  const double actual = std::fabs(kantorovich(f, p, x, policy) - f(x));
  const double u2 = central_moment(p, 2, x);
  const double bound = 4.0 * M_f * (1.0 + b * b) * u2 + 2.0 * modulus_on_interval(f, std::sqrt(u2), b + 1.0);
  return {"weighted_interval", f.id, p.n, p.a, x, actual, bound};
}

double certify_growth_constant(const FunctionSpec& f, double x_max) {
  double best = 0.0;
  const int samples = 20000;
  for (int s = 0; s <= samples; ++s) {
    const double x = x_max * s / samples;
    best = std::max(best, std::fabs(f(x)) / (1.0 + x * x));
  }
  return best;
}

WeightedModulusTerms weighted_modulus_terms(const FunctionSpec& f, const OperatorParams& p, const GridSpec& grid,
                                            const TruncationPolicy& policy) {
  WeightedModulusTerms out;
  for (double x : grid.nodes()) {
    const double err = std::fabs(kantorovich(f, p, x, policy) - f(x)) / std::pow(1.0 + x * x, 2.5);
    if (err > out.lhs) {
      out.lhs = err;
      out.x_at_max = x;
    }
  }
  ModulusOptions opt;
  opt.x_max = std::max(50.0, grid.x_max);
  out.omega = modulus(f, 1.0 / std::sqrt(static_cast<double>(p.n)), ModulusOrder::weighted, opt);
  return out;
}

std::vector<double> stat_density(const std::vector<double>& b, double eps) {
  if (!(eps > 0.0)) throw ConfigError("stat_density requires epsilon > 0");
  std::vector<double> out;
  out.reserve(b.size());
  long count = 0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (b[k] >= eps) ++count;
    out.push_back(static_cast<double>(count) / static_cast<double>(k + 1));
  }
  return out;
}

long majorant_threshold(int i, double a, double eps) {
  if (!(eps > 0.0)) throw ConfigError("majorant_threshold requires epsilon > 0");
  if (i == 0) return 0;
  auto at = [&](long k) { return weighted_majorant(i, OperatorParams{k, a}); };
  // majorant is decreasing in k; find the last k with majorant >= eps
  long hi = 1;
  while (at(hi) >= eps) hi *= 2;
  long lo = hi / 2;  // at(lo) >= eps or lo == 0
  if (lo == 0) return 0;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (at(mid) >= eps ? lo : hi) = mid;
  }
  return lo;
}

double VoronovskajaRow::gap() const { return std::fabs(scaled - limit); }

namespace {

double need(const FunctionSpec& f, int order, double x) {
  if (!f.has_derivative(order))
    throw ConfigError("function '" + f.id + "' lacks derivative of order " + std::to_string(order));
  return f.derivative(order, x);
}

}  // namespace

double voronovskaja_limit(const FunctionSpec& f, double a, double x, int r) {
  if (f.is_breakpoint(x))
    throw ConfigError("function '" + f.id + "' is not smooth at x = " + std::to_string(x));
  const double q = x / (1.0 + x);
  if (r == 0) return (a * q + 0.5 - x) * need(f, 1, x) + (x + x * x) * need(f, 2, x) / 2.0;
  if (r == 1)
    return (-1.0 + a / ((1.0 + x) * (1.0 + x))) * need(f, 1, x) + (1.0 + a * q) * need(f, 2, x) +
           x * (1.0 + x) * need(f, 3, x) / 2.0;
  throw ConfigError("Voronovskaja check supports r in {0, 1}");
}

std::vector<VoronovskajaRow> voronovskaja_check(const FunctionSpec& f, double a, double x, int r,
                                                const std::vector<long>& ns, const TruncationPolicy& policy) {
  if (!(x > 0.0)) throw ConfigError("Voronovskaja check requires x > 0");
  const double limit = voronovskaja_limit(f, a, x, r);
  std::vector<VoronovskajaRow> rows;
  for (long n : ns) {
    const OperatorParams p{n, a};
    p.validate();
    const double dn = static_cast<double>(n);
    double scaled = 0.0;
    if (r == 0)
      scaled = dn * (kantorovich(f, p, x, policy) - f(x));
    else
      scaled = dn * (operator_derivative(f, p, x, 1, policy).value - need(f, 1, x));
    rows.push_back({n, scaled, limit});
  }
  return rows;
}

VoronovskajaSymbolic voronovskaja_symbolic(int power, const BigRational& a) {
  if (power < 1 || power > 6) throw ConfigError("symbolic Voronovskaja check supports t^1..t^6");
  const unsigned j = static_cast<unsigned>(power);
  // G(n) = (n+1)^j (T_{n,j} - x^j) is a polynomial in n of degree j-1.
  auto G = [&](long n) {
    const ExactParams p{BigRational(n), a};
    RatFunc g = kantorovich_moment_sym(j, p)[j] - RatFunc::monomial(j);
    BigRational scale = 1;
    for (unsigned i = 0; i < j; ++i) scale *= BigRational(n + 1);
    return g * scale;
  };
  std::vector<long> nodes;
  std::vector<RatFunc> values;
  for (unsigned i = 0; i <= j; ++i) {
    nodes.push_back(static_cast<long>(i) + 1);
    values.push_back(G(nodes.back()));
  }
  // Lagrange basis over the first j nodes
  auto interpolate = [&](const BigRational& n, bool leading) {
    RatFunc acc;
    for (unsigned i = 0; i < j; ++i) {
      BigRational w = 1;
      for (unsigned k = 0; k < j; ++k) {
        if (k == i) continue;
        w /= BigRational(nodes[i] - nodes[k]);
        if (!leading) w *= n - BigRational(nodes[k]);
      }
      acc += w * values[i];
    }
    return acc;
  };
  VoronovskajaSymbolic out;
  out.limit = interpolate(0, true);
  out.structure_ok = interpolate(BigRational(nodes[j]), false) == values[j];

  const RatFunc x = RatFunc::monomial(1);
  const RatFunc drift = a * RatFunc({0, 1}, 1) + RatFunc::constant(BigRational(1, 2)) - x;
  const RatFunc d1 = RatFunc::monomial(j - 1, BigRational(j));
  const RatFunc d2 = j >= 2 ? RatFunc::monomial(j - 2, BigRational(j * (j - 1))) : RatFunc();
  out.formula = drift * d1 + (x + x * x) * d2 / BigRational(2);
  return out;
}

}  // namespace bko
