#include "bko/suite.hpp"

#include <algorithm>
#include <cmath>

namespace bko {

SweepGrid default_calibration_grid() { return {{8, 32, 128, 512}, {0.5, 2.0, 4.0}, {0.25, 0.75, 1.5, 3.0, 7.0, 12.0}}; }

SweepGrid default_validation_grid() { return {{16, 64, 256, 1024}, {0.0, 1.0, 3.0}, {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}}; }

namespace {

nlohmann::json grid_json(const SweepGrid& g) { return {{"n", g.ns}, {"a", g.as}, {"x", g.xs}}; }

double interval_for(double x) {
  for (double b : {1.0, 2.0, 5.0, 10.0})
    if (x <= b) return b;
  return std::ceil(x);
}

GridSpec sup_grid(const BoundSuiteConfig& cfg, const SweepGrid& g) {
  const double top = g.xs.empty() ? 1.0 : *std::max_element(g.xs.begin(), g.xs.end());
  return GridSpec{0.0, top, cfg.sup_points, Spacing::uniform};
}

}  // namespace

nlohmann::json BoundSuiteConfig::to_json() const {
  nlohmann::json lip = nlohmann::json::array();
  for (const auto& [id, alpha] : lipschitz_functions) lip.push_back({{"f", id}, {"alpha", alpha}});
  return {{"calibration", grid_json(calibration)},
          {"validation", grid_json(validation)},
          {"local_functions", local_functions},
          {"lipschitz_functions", lip},
          {"a1", a1},
          {"a2", a2},
          {"interval_functions", interval_functions},
          {"weighted_functions", weighted_functions},
          {"rho_exponent", norm.rho_exponent},
          {"x_max_trunc", norm.x_max_trunc},
          {"tail_tol", policy.tail_mass_tol},
          {"sup_points", sup_points}};
}

long BoundSuiteResult::violations() const {
  return static_cast<long>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.violated(); }));
}

Table BoundSuiteResult::table() const { return bound_table(records); }

Table bound_table(const std::vector<BoundRecord>& records) {
  Table t({"check", "f", "n", "a", "x", "actual", "bound", "slack", "violated"});
  for (const auto& r : records)
    t.add_row({r.check, r.function, r.n, r.a, r.x, r.actual, r.bound, r.slack(), r.violated()});
  return t;
}

FittedConstants calibrate(const BoundSuiteConfig& cfg, const FunctionCatalog& catalog) {
  FittedConstants out;
  std::vector<LocalDirectTerms> terms;
  for (const auto& id : cfg.local_functions) {
    const FunctionSpec& f = catalog.get(id);
    for (long n : cfg.calibration.ns)
      for (double a : cfg.calibration.as)
        for (double x : cfg.calibration.xs) terms.push_back(local_direct_terms(f, {n, a}, x, cfg.policy));
  }
  out.local_direct = fit_local_direct_constant(terms);

  const GridSpec grid = sup_grid(cfg, cfg.calibration);
  for (const auto& id : cfg.weighted_functions) {
    const FunctionSpec& f = catalog.get(id);
    for (long n : cfg.calibration.ns)
      for (double a : cfg.calibration.as) {
        const WeightedModulusTerms w = weighted_modulus_terms(f, {n, a}, grid, cfg.policy);
        if (w.omega > 0.0) out.weighted = std::max(out.weighted, w.lhs / w.omega);
      }
  }
  return out;
}

std::vector<BoundRecord> majorant_records(const std::vector<long>& ns, const std::vector<double>& as,
                                          const WeightedNormSpec& spec) {
  std::vector<BoundRecord> out;
  for (int i : {1, 2})
    for (long n : ns)
      for (double a : as) {
        const OperatorParams p{n, a};
        const WeightedNorm w = weighted_moment_error_norm(i, p, spec);
        out.push_back({"norm_e" + std::to_string(i), "t" + std::to_string(i), n, a, w.x_max, w.norm,
                       weighted_majorant(i, p)});
      }
  return out;
}

BoundSuiteResult run_bound_suite(const BoundSuiteConfig& cfg, const FunctionCatalog& catalog) {
  BoundSuiteResult out;
  out.constants = calibrate(cfg, catalog);
  const SweepGrid& v = cfg.validation;
  auto& rec = out.records;

  for (const auto& id : cfg.local_functions) {
    const FunctionSpec& f = catalog.get(id);
    for (long n : v.ns)
      for (double a : v.as)
        for (double x : v.xs) rec.push_back(check_local_direct(f, {n, a}, x, out.constants.local_direct, cfg.policy));
  }

  const double top = v.xs.empty() ? 1.0 : *std::max_element(v.xs.begin(), v.xs.end());
  const double t_max = 2.0 * top + 20.0;
  for (const auto& [id, alpha] : cfg.lipschitz_functions) {
    const FunctionSpec& f = catalog.get(id);
    const LipschitzData lip = certify_lipschitz(f, alpha, cfg.a1, cfg.a2, v.xs, t_max);
    for (long n : v.ns)
      for (double a : v.as)
        for (double x : v.xs) {
          auto [two_param, maximal] = check_lipschitz(f, {n, a}, x, lip, t_max, cfg.policy);
          rec.push_back(two_param);
          rec.push_back(maximal);
        }
  }

  for (const auto& id : cfg.interval_functions) {
    const FunctionSpec& f = catalog.get(id);
    const double M_f = certify_growth_constant(f, 1000.0);
    for (long n : v.ns)
      for (double a : v.as)
        for (double x : v.xs) rec.push_back(check_weighted_interval(f, {n, a}, x, interval_for(x), M_f, cfg.policy));
  }

  for (auto& r : majorant_records(v.ns, v.as, cfg.norm)) rec.push_back(std::move(r));

  const GridSpec grid = sup_grid(cfg, v);
  for (const auto& id : cfg.weighted_functions) {
    const FunctionSpec& f = catalog.get(id);
    for (long n : v.ns)
      for (double a : v.as) {
        const WeightedModulusTerms w = weighted_modulus_terms(f, {n, a}, grid, cfg.policy);
        rec.push_back({"weighted_modulus", f.id, n, a, w.x_at_max, w.lhs, out.constants.weighted * w.omega});
      }
  }
  return out;
}

}  // namespace bko
