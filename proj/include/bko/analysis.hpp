#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bko/basis.hpp"
#include "bko/functions.hpp"
#include "bko/moments.hpp"
#include "bko/operator.hpp"

namespace bko {

enum class Spacing { uniform, log };

struct GridSpec {
  double x_min = 0.0;
  double x_max = 1.0;
  int points = 2;
  Spacing spacing = Spacing::uniform;

  void validate() const;
  Eigen::ArrayXd nodes() const;
};

struct ModulusReport {
  double delta = 0.0;
  double omega = 0.0;           // sup_{0<h<=delta} |f(x+h) - f(x)|
  double omega2 = 0.0;          // sup_{0<h<=delta} |f(x+2h) - 2f(x+h) + f(x)|
  double omega_weighted = 0.0;  // sup_{0<h<=delta} |f(x+h) - f(x)| / (1 + (x+h)^2)
};

enum class ModulusOrder { first, second, weighted };

// Grid-sup moduli. x runs over a lattice of [0, x_max] with spacing
// `lattice` (default delta/8, floored at x_max/2e5) plus f's breakpoints;
// h runs over lattice multiples in (0, delta] plus delta itself. With a fixed
// lattice the estimates are monotone in delta.
struct ModulusOptions {
  double x_max = 20.0;
  double lattice = 0.0;  // 0 selects the default
};

double modulus(const FunctionSpec& f, double delta, ModulusOrder order, const ModulusOptions& opt = {});
ModulusReport modulus_report(const FunctionSpec& f, double delta, const ModulusOptions& opt = {});
// omega_b(f; delta): sup over x, t in [0, b] with |t - x| <= delta
double modulus_on_interval(const FunctionSpec& f, double delta, double b, double lattice = 0.0);

struct RateFit {
  double exponent = 0.0;  // e ~ C n^{-exponent}
  double constant = 0.0;
  double residual = 0.0;  // max |log e - fitted| over the points
};

// Least-squares fit of log e = log C - s log n. Needs >= 3 points, e > 0.
RateFit rate_fit(const std::vector<std::pair<double, double>>& errors);

// max over grid of |K_n^a(f;x) - f(x)|
double sup_error(const FunctionSpec& f, const OperatorParams& p, const GridSpec& grid,
                 const TruncationPolicy& policy = {});

// One inequality evaluated at one point.
struct BoundRecord {
  std::string check;
  std::string function;
  long n = 0;
  double a = 0.0;
  double x = 0.0;
  double actual = 0.0;
  double bound = 0.0;
  double slack() const { return bound - actual; }
  bool violated() const;
};

// Local estimate |K f - f| <= C omega_2 + omega; the record keeps both modulus terms so
// the constant C can be fitted afterwards.
struct LocalDirectTerms {
  double actual = 0.0;
  double omega2_term = 0.0;  // omega_2(f, sqrt(gamma_n^a(x)))
  double omega_term = 0.0;   // omega(f, |u_{n,1}^a(x)|)
};

LocalDirectTerms local_direct_terms(const FunctionSpec& f, const OperatorParams& p, double x,
                                    const TruncationPolicy& policy = {}, const ModulusOptions& opt = {});
BoundRecord check_local_direct(const FunctionSpec& f, const OperatorParams& p, double x, double C,
                               const TruncationPolicy& policy = {}, const ModulusOptions& opt = {});
// Smallest C that covers every record: max (actual - omega_term) / omega2_term.
double fit_local_direct_constant(const std::vector<LocalDirectTerms>& calibration);

// Lipschitz-type data certified on a sample grid.
struct LipschitzData {
  double alpha = 1.0;
  double a1 = 1.0;
  double a2 = 1.0;
  double M = 0.0;  // sup |f(t)-f(x)| (t + a1 x^2 + a2 x)^{alpha/2} / |t-x|^alpha
};

LipschitzData certify_lipschitz(const FunctionSpec& f, double alpha, double a1, double a2,
                                const std::vector<double>& xs, double t_max);
// sup_{t != x} |f(t) - f(x)| / |t - x|^tau over a sample grid of [0, t_max]
double local_holder_quotient(const FunctionSpec& f, double x, double tau, double t_max);

// Two records: the two-parameter Lipschitz bound M (u2/(a1 x^2 + a2 x))^{alpha/2}
// and the maximal-function bound omega~_alpha(f,x) u2^{alpha/2}.
std::pair<BoundRecord, BoundRecord> check_lipschitz(const FunctionSpec& f, const OperatorParams& p, double x,
                                                    const LipschitzData& lip, double t_max,
                                                    const TruncationPolicy& policy = {});

struct WeightedNormSpec {
  double rho_exponent = 2.0;  // rho(x) = 1 + x^rho_exponent
  double x_max_trunc = 50.0;

  void validate() const;
};

// sup_x |g(x)| / rho(x) for g = K e_i - e_i, evaluated from the exact moment
// table. x_max starts at spec.x_max_trunc and doubles until the sup changes
// by less than `stability`.
struct WeightedNorm {
  double norm = 0.0;
  double x_max = 0.0;        // truncation actually used
  double last_change = 0.0;  // change of the sup under the final doubling
};

WeightedNorm weighted_moment_error_norm(int i, const OperatorParams& p, const WeightedNormSpec& spec,
                                        double stability = 1e-6);
// Same norm from the series evaluator on [0, x_max] (no doubling).
double weighted_moment_error_norm_series(int i, const OperatorParams& p, double rho_exponent, double x_max,
                                         const TruncationPolicy& policy = {});

// (2a + 3/2)/(n+1) for e_1; (2a+3)/(n+1) + (a^2+4a+13/3)/(n+1)^2 for e_2; 0 for e_0
double weighted_majorant(int i, const OperatorParams& p);

// |K f - f| <= 4 M_f (1 + b^2) u2 + 2 omega_{b+1}(f, sqrt(u2)) at x in [0, b].
BoundRecord check_weighted_interval(const FunctionSpec& f, const OperatorParams& p, double x, double b,
                                    double M_f, const TruncationPolicy& policy = {});
// sup |f(x)| / (1 + x^2) on a grid of [0, x_max]
double certify_growth_constant(const FunctionSpec& f, double x_max);

// Weighted modulus estimate: left side sup_x |K f - f| / (1+x^2)^{5/2} on a grid, and
// Omega(f, n^{-1/2}).
struct WeightedModulusTerms {
  double lhs = 0.0;
  double x_at_max = 0.0;
  double omega = 0.0;
};
WeightedModulusTerms weighted_modulus_terms(const FunctionSpec& f, const OperatorParams& p,
                                            const GridSpec& grid, const TruncationPolicy& policy = {});

// C_1 density (1/n) #{k <= n : b_k >= eps}, for n = 1..size (b[0] is b_1).
std::vector<double> stat_density(const std::vector<double>& b, double eps);
// First k past which the majorant of K e_i - e_i stays below eps.
long majorant_threshold(int i, double a, double eps);

struct VoronovskajaRow {
  long n = 0;
  double scaled = 0.0;  // L_n = n (d^r K f - f^(r))
  double limit = 0.0;
  double gap() const;
};

double voronovskaja_limit(const FunctionSpec& f, double a, double x, int r);
std::vector<VoronovskajaRow> voronovskaja_check(const FunctionSpec& f, double a, double x, int r,
                                                const std::vector<long>& ns,
                                                const TruncationPolicy& policy = {});

// Exact version for monomials t^power (power in {1, 2}): lim n (T_{n,power} - x^power)
// extracted from the moment tables, and the asymptotic formula applied to t^power.
struct VoronovskajaSymbolic {
  RatFunc limit;      // from the moment tables
  RatFunc formula;    // (ax/(1+x) + 1/2 - x) f' + (x + x^2) f''/2
  bool structure_ok;  // (n+1)^p (T - x^p) is a polynomial of degree p-1 in n
};
VoronovskajaSymbolic voronovskaja_symbolic(int power, const BigRational& a);

}  // namespace bko
