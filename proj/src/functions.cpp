#include "bko/functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bko/errors.hpp"

namespace bko {

bool FunctionSpec::has_derivative(int order) const {
  return order >= 1 && order <= 3 && static_cast<bool>(derivatives[order - 1]);
}

double FunctionSpec::derivative(int order, double t) const {
  if (order == 0) return value(t);
  if (!has_derivative(order))
    throw ConfigError("function '" + id + "' has no derivative of order " + std::to_string(order));
  return derivatives[order - 1](t);
}

OneSided FunctionSpec::limits(double t) const {
  if (one_sided) return one_sided(t);
  if (!has_derivative(1))
    throw MissingOneSidedData("function '" + id + "' carries no one-sided data");
  const double v = value(t);
  const double d = derivatives[0](t);
  return {v, v, d, d};
}

bool FunctionSpec::is_breakpoint(double t) const {
  return std::binary_search(breakpoints.begin(), breakpoints.end(), t);
}

FunctionCheck validate_function(const FunctionSpec& f) {
  FunctionCheck out;
  for (int i = 0; i <= 4000; ++i) {
    const double t = 1000.0 * std::pow(i / 4000.0, 2.0);
    const double ratio = std::fabs(f(t)) / (1.0 + std::pow(t, f.growth_gamma));
    if (!std::isfinite(ratio)) throw ConfigError("function '" + f.id + "' is not finite on [0, 1000]");
    out.growth_constant = std::max(out.growth_constant, ratio);
  }
  for (double b : f.breakpoints) {
    const OneSided lim = f.limits(b);
    const double h = 1e-7 * std::max(1.0, b);
    const double scale = 1.0 + std::fabs(lim.value_minus) + std::fabs(lim.value_plus);
    const bool values_ok = std::fabs(f(b - h) - lim.value_minus) < 1e-5 * scale &&
                           std::fabs(f(b + h) - lim.value_plus) < 1e-5 * scale;
    const double dl = (f(b - h) - f(b - 2.0 * h)) / h;
    const double dr = (f(b + 2.0 * h) - f(b + h)) / h;
    const double dscale = 1.0 + std::fabs(lim.deriv_minus) + std::fabs(lim.deriv_plus);
    const bool derivs_ok = std::fabs(dl - lim.deriv_minus) < 1e-3 * dscale &&
                           std::fabs(dr - lim.deriv_plus) < 1e-3 * dscale;
    out.one_sided_consistent = out.one_sided_consistent && values_ok && derivs_ok;
  }
  return out;
}

namespace {

double ipow(double t, int r) {
  double out = 1.0;
  for (int i = 0; i < r; ++i) out *= t;
  return out;
}

double falling(int r, int j) {
  double out = 1.0;
  for (int i = 0; i < j; ++i) out *= r - i;
  return out;
}

auto monotone_derivative_hint(std::function<double(double)> d1) {
  return [d1 = std::move(d1)](double c, double d) { return std::fabs(d1(d) - d1(c)); };
}

auto no_turning_points() {
  return [](double, double) { return std::vector<double>{}; };
}

}  // namespace

FunctionSpec make_monomial(int power) {
  if (power < 0) throw ConfigError("monomial power must be >= 0");
  FunctionSpec f;
  f.id = "t" + std::to_string(power);
  f.value = [power](double t) { return ipow(t, power); };
  for (int j = 1; j <= 3; ++j)
    f.derivatives[j - 1] = [power, j](double t) {
      return power < j ? 0.0 : falling(power, j) * ipow(t, power - j);
    };
  f.growth_gamma = power;
  f.derivative_turning_points = no_turning_points();
  f.derivative_tv_hint = monotone_derivative_hint(f.derivatives[0]);
  f.bounded = power == 0;
  return f;
}

FunctionSpec make_exp_neg() {
  FunctionSpec f;
  f.id = "exp_neg";
  f.value = [](double t) { return std::exp(-t); };
  f.derivatives = {[](double t) { return -std::exp(-t); }, [](double t) { return std::exp(-t); },
                   [](double t) { return -std::exp(-t); }};
  f.growth_gamma = 0.0;
  f.derivative_turning_points = no_turning_points();
  f.derivative_tv_hint = monotone_derivative_hint(f.derivatives[0]);
  f.bounded = true;
  return f;
}

FunctionSpec make_sin() {
  FunctionSpec f;
  f.id = "sin";
  f.value = [](double t) { return std::sin(t); };
  f.derivatives = {[](double t) { return std::cos(t); }, [](double t) { return -std::sin(t); },
                   [](double t) { return -std::cos(t); }};
  f.growth_gamma = 0.0;
  // cos turns at multiples of pi
  f.derivative_turning_points = [](double c, double d) {
    std::vector<double> out;
    for (double k = std::floor(c / std::numbers::pi) + 1.0; k * std::numbers::pi < d; k += 1.0)
      if (k * std::numbers::pi > c) out.push_back(k * std::numbers::pi);
    return out;
  };
  f.bounded = true;
  return f;
}

FunctionSpec make_sqrt() {
  FunctionSpec f;
  f.id = "sqrt";
  f.value = [](double t) { return std::sqrt(std::max(t, 0.0)); };
  f.derivatives = {[](double t) { return 0.5 / std::sqrt(t); },
                   [](double t) { return -0.25 * std::pow(t, -1.5); },
                   [](double t) { return 0.375 * std::pow(t, -2.5); }};
  f.growth_gamma = 0.5;
  f.derivative_turning_points = no_turning_points();
  f.derivative_tv_hint = monotone_derivative_hint(f.derivatives[0]);
  return f;
}

FunctionSpec make_inv1p() {
  FunctionSpec f;
  f.id = "inv1p";
  f.value = [](double t) { return 1.0 / (1.0 + t); };
  f.derivatives = {[](double t) { return -1.0 / ((1.0 + t) * (1.0 + t)); },
                   [](double t) { return 2.0 / std::pow(1.0 + t, 3); },
                   [](double t) { return -6.0 / std::pow(1.0 + t, 4); }};
  f.growth_gamma = 0.0;
  f.derivative_turning_points = no_turning_points();
  f.derivative_tv_hint = monotone_derivative_hint(f.derivatives[0]);
  f.bounded = true;
  return f;
}

FunctionSpec make_abs(double center) {
  if (!(center > 0.0)) throw ConfigError("abs center must be > 0");
  std::ostringstream os;
  os << "abs" << center;
  return make_piecewise_linear(os.str(), {{0.0, center}, {center, 0.0}}, 1.0);
}

FunctionSpec make_piecewise_linear(std::string id, std::vector<std::pair<double, double>> knots,
                                   double slope_right) {
  if (knots.empty() || knots.front().first != 0.0)
    throw ConfigError("piecewise_linear '" + id + "' must start with a knot at t = 0");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i].first > knots[i - 1].first))
      throw ConfigError("piecewise_linear '" + id + "' knots must be strictly increasing");

  std::vector<double> ts;
  std::vector<double> ys;
  std::vector<double> slopes;  // slopes[i] on [t_i, t_{i+1}); last entry past the last knot
  for (const auto& [t, y] : knots) {
    ts.push_back(t);
    ys.push_back(y);
  }
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    slopes.push_back((ys[i + 1] - ys[i]) / (ts[i + 1] - ts[i]));
  slopes.push_back(slope_right);

  // index of the piece containing t (right-continuous)
  auto piece = [ts](double t) {
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - ts.begin()) - 1));
  };

  FunctionSpec f;
  f.id = std::move(id);
  f.value = [ts, ys, slopes, piece](double t) {
    const std::size_t i = piece(t);
    return ys[i] + slopes[i] * (t - ts[i]);
  };
  f.derivatives[0] = [slopes, piece](double t) { return slopes[piece(t)]; };
  f.derivatives[1] = [](double) { return 0.0; };
  f.derivatives[2] = [](double) { return 0.0; };
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (slopes[i] != slopes[i - 1]) f.breakpoints.push_back(ts[i]);
  f.one_sided = [ts, ys, slopes, piece](double t) {
    const std::size_t i = piece(t);
    const double v = ys[i] + slopes[i] * (t - ts[i]);
    const bool at_knot = i > 0 && t == ts[i];
    return OneSided{v, v, at_knot ? slopes[i - 1] : slopes[i], slopes[i]};
  };
  f.growth_gamma = slope_right == 0.0 ? 0.0 : 1.0;
  f.derivative_turning_points = no_turning_points();
  f.derivative_tv_hint = [slopes, ts](double c, double d) {
    // sum of slope jumps at knots strictly inside (c, d)
    double tv = 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i)
      if (ts[i] > c && ts[i] < d) tv += std::fabs(slopes[i] - slopes[i - 1]);
    return tv;
  };
  f.bounded = slope_right == 0.0;
  return f;
}

FunctionCatalog::FunctionCatalog() {
  for (int r = 0; r <= 6; ++r) add(make_monomial(r));
  add(make_exp_neg());
  add(make_sin());
  add(make_sqrt());
  add(make_inv1p());
  add(make_abs(1.0));
  add(make_piecewise_linear("multikink", {{0.0, 0.0}, {0.5, 0.5}, {1.5, -0.5}, {2.5, 0.0}}, 0.0));
}

const FunctionSpec& FunctionCatalog::get(std::string_view id) const {
  const auto it = functions_.find(id);
  if (it == functions_.end()) throw ConfigError("unknown function id '" + std::string(id) + "'");
  return it->second;
}

bool FunctionCatalog::contains(std::string_view id) const { return functions_.find(id) != functions_.end(); }

std::vector<std::string> FunctionCatalog::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, f] : functions_) out.push_back(id);
  return out;
}

void FunctionCatalog::add(FunctionSpec f) {
  std::string id = f.id;
  functions_.insert_or_assign(std::move(id), std::move(f));
}

namespace {

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (text.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number for '" + key + "': '" + text + "'");
  }
}

}  // namespace

void FunctionCatalog::add_from_config(const std::map<std::string, std::string>& kv) {
  std::map<std::string, std::map<std::string, std::string>> defs;
  for (const auto& [key, value] : kv) {
    if (key.rfind("function.", 0) != 0) continue;
    const std::string rest = key.substr(9);
    const auto dot = rest.find('.');
    if (dot == std::string::npos || dot == 0) throw ConfigError("bad function key '" + key + "'");
    defs[rest.substr(0, dot)][rest.substr(dot + 1)] = value;
  }
  for (const auto& [id, props] : defs) {
    auto prop = [&, id = id](const std::string& name) -> const std::string& {
      const auto it = props.find(name);
      if (it == props.end()) throw ConfigError("function '" + id + "' lacks '" + name + "'");
      return it->second;
    };
    const std::string& kind = prop("kind");
    FunctionSpec f;
    if (kind == "monomial") {
      f = make_monomial(static_cast<int>(parse_double("power", prop("power"))));
    } else if (kind == "abs") {
      f = make_abs(parse_double("center", prop("center")));
    } else if (kind == "exp_neg") {
      f = make_exp_neg();
    } else if (kind == "piecewise_linear") {
      std::vector<std::pair<double, double>> knots;
      std::stringstream ss(prop("knots"));
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("knot '" + item + "' is not t:y");
        knots.emplace_back(parse_double("knots", item.substr(0, colon)),
                           parse_double("knots", item.substr(colon + 1)));
      }
      const auto it = props.find("slope_right");
      const double slope = it == props.end() ? 0.0 : parse_double("slope_right", it->second);
      f = make_piecewise_linear(id, std::move(knots), slope);
    } else {
      throw ConfigError("function '" + id + "' has unknown kind '" + kind + "'");
    }
    f.id = id;
    add(std::move(f));
  }
}

const FunctionCatalog& builtin_catalog() {
  static const FunctionCatalog catalog;
  return catalog;
}

}  // namespace bko
