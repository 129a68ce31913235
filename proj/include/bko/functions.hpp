#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bko {

// One-sided limits of f and f' at a point.
struct OneSided {
  double value_minus = 0.0;
  double value_plus = 0.0;
  double deriv_minus = 0.0;
  double deriv_plus = 0.0;
};

// A test function together with the analytic metadata the checks need and
// cannot infer from samples.
struct FunctionSpec {
  std::string id;
  std::function<double(double)> value;
  // f', f'', f''' where known (empty otherwise). At a breakpoint the
  // derivative callbacks return the right-hand value.
  std::array<std::function<double(double)>, 3> derivatives;
  // Sorted points where f or f' jumps.
  std::vector<double> breakpoints;
  // Limits at any t > 0; filled from value/derivatives when not given.
  std::function<OneSided(double)> one_sided;
  // |f(t)| <= M (1 + t^gamma)
  double growth_gamma = 0.0;
  // Points of (c, d) where f' turns (changes monotonicity). Jumps of f' are
  // taken from breakpoints.
  std::function<std::vector<double>(double, double)> derivative_turning_points;
  // Exact total variation of f' on [c, d], when available.
  std::function<double(double, double)> derivative_tv_hint;
  bool bounded = false;

  double operator()(double t) const { return value(t); }
  bool has_derivative(int order) const;
  double derivative(int order, double t) const;
  OneSided limits(double t) const;
  bool is_breakpoint(double t) const;
};

// Result of sampling the catalog contract.
struct FunctionCheck {
  double growth_constant = 0.0;  // sup |f| / (1 + t^gamma) on the grid
  bool one_sided_consistent = true;
};

// Samples the growth bound on [0, 1000] and the one-sided data at breakpoints.
FunctionCheck validate_function(const FunctionSpec& f);

FunctionSpec make_monomial(int power);
FunctionSpec make_exp_neg();
FunctionSpec make_sin();
FunctionSpec make_sqrt();
FunctionSpec make_inv1p();
FunctionSpec make_abs(double center);
// Continuous piecewise-linear f through knots (t_0 = 0 < t_1 < ...), extended
// with slope_right past the last knot.
FunctionSpec make_piecewise_linear(std::string id, std::vector<std::pair<double, double>> knots,
                                   double slope_right);

// Catalog of built-in functions, optionally extended by user definitions.
class FunctionCatalog {
 public:
  FunctionCatalog();  // built-ins: t0..t6, exp_neg, sin, sqrt, inv1p, abs1, multikink

  const FunctionSpec& get(std::string_view id) const;
  bool contains(std::string_view id) const;
  std::vector<std::string> ids() const;
  void add(FunctionSpec f);

  // Reads user functions from key = value pairs of the form
  //   function.<id>.kind = monomial | abs | piecewise_linear | exp_neg
  //   function.<id>.power = 3                (monomial)
  //   function.<id>.center = 2.5             (abs)
  //   function.<id>.knots = 0:0, 1:1, 2:0    (piecewise_linear)
  //   function.<id>.slope_right = 0          (piecewise_linear)
  void add_from_config(const std::map<std::string, std::string>& kv);

 private:
  std::map<std::string, FunctionSpec, std::less<>> functions_;
};

const FunctionCatalog& builtin_catalog();

}  // namespace bko
