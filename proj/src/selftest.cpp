#include "bko/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "bko/analysis.hpp"
#include "bko/bv.hpp"
#include "bko/moments.hpp"
#include "bko/operator.hpp"
#include "bko/suite.hpp"

namespace bko {

std::string CriterionResult::line() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.2f s)", seconds);
  return std::string(passed ? "[PASS] " : "[FAIL] ") + std::to_string(id) + " " + title + ": " + detail + buf;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

template <typename Body>
CriterionResult timed(int id, std::string title, double budget, Body&& body) {
  CriterionResult r{id, std::move(title), false, "", 0.0, budget};
  const auto start = Clock::now();
  try {
    r.passed = body(r.detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail += std::string(r.detail.empty() ? "" : "; ") + "error: " + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (budget > 0.0 && r.seconds >= budget) {
    r.passed = false;
    r.detail += "; over time budget " + sci(budget) + " s";
  }
  return r;
}

const std::vector<long> standard_n{1, 4, 16, 64, 256};
const std::vector<double> standard_a{0.0, 0.5, 1.0, 3.0};
const std::vector<double> standard_x{0.0, 0.1, 1.0, 5.0, 20.0};

}  // namespace

CriterionResult check_partition_of_unity() {
  return timed(1, "partition of unity", 5.0, [](std::string& detail) {
    double worst = 0.0;
    for (long n : standard_n)
      for (double a : standard_a)
        for (double x : standard_x) worst = std::max(worst, std::fabs(weight_row({n, a}, x).mass() - 1.0));
    detail = "max |sum W - 1| = " + sci(worst) + " over 100 points";
    return worst <= 1e-12;
  });
}

CriterionResult check_golden_symbolic() {
  return timed(2, "golden symbolic equalities", 2.0, [](std::string& detail) {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> num(1, 60);
    std::uniform_int_distribution<int> den(1, 9);
    std::uniform_int_distribution<int> anum(0, 40);
    int mismatches = 0;
    for (int trial = 0; trial < 5; ++trial) {
      ExactParams p{BigRational(num(rng), den(rng)), BigRational(anum(rng), den(rng))};
      p.n.canonicalize();
      p.a.canonicalize();
      const MomentTable ups = upsilon_sym(1, p);
      const MomentTable mu = mu_sym(1, p);
      const MomentTable T = kantorovich_moment_sym(2, p);
      const MomentTable u = kantorovich_central_sym(2, p);
      const bool ok = ups[1] == closed_form::upsilon1(p) && mu[1] == closed_form::mu1(p) &&
                      T[1] == closed_form::T1(p) && T[2] == closed_form::T2(p) && u[1] == closed_form::u1(p) &&
                      u[2] == closed_form::u2(p) && gamma_sym(p) == closed_form::gamma(p);
      if (!ok) {
        ++mismatches;
        detail += "mismatch at n=" + to_string(p.n) + " a=" + to_string(p.a) + "; ";
      }
    }
    detail += std::to_string(5 - mismatches) + "/5 parameter pairs match all 7 closed forms";
    return mismatches == 0;
  });
}

CriterionResult check_symbolic_numeric() {
  return timed(3, "symbolic-numeric agreement", 30.0, [](std::string& detail) {
    double worst = 0.0;
    std::vector<FunctionSpec> monos;
    for (int r = 0; r <= 6; ++r) monos.push_back(make_monomial(r));
    TruncationPolicy policy;
    policy.max_terms = 20000;
    for (long n : standard_n)
      for (double a : standard_a) {
        const OperatorParams p{n, a};
        const auto T = moment_cache().get(MomentFamily::T, 6, ExactParams::from(p));
        for (double x : standard_x) {
          const WeightRow row = weight_row(p, x, policy, 6.0);
          for (unsigned r = 0; r <= 6; ++r) {
            const double numeric = kantorovich_on_row(monos[r], n, row);
            const double exact = (*T)[r].evaluate_exact(x);
            worst = std::max(worst, std::fabs(numeric - exact) / std::fabs(exact));
          }
        }
      }
    detail = "max relative gap " + sci(worst) + " (r <= 6, 100 grid points)";
    return worst <= 1e-10;
  });
}

CriterionResult check_order_laws() {
  return timed(4, "order laws", 0.0, [](std::string& detail) {
    const std::vector<long> ns{256, 512, 1024, 2048};
    double worst = 0.0;
    std::string where;
    for (MomentFamily family : {MomentFamily::u, MomentFamily::mu, MomentFamily::mu_star})
      for (double a : {1.0, 3.0})
        for (unsigned r : {2u, 3u, 4u}) {
          std::vector<std::pair<long, RatFunc>> seq;
          for (long n : ns) seq.emplace_back(n, (*moment_cache().get(family, r, ExactParams::from({n, a})))[r]);
          const LeadingOrder lo = rf_leading_order(seq, 1.0);
          const double target = static_cast<double>((r + 1) / 2);
          for (double s : lo.exponents) {
            const double gap = std::fabs(s - target);
            if (gap > worst) {
              worst = gap;
              where = std::string(to_string(family)) + " r=" + std::to_string(r) + " a=" + sci(a);
            }
          }
        }
    detail = "max |s - [(r+1)/2]| = " + sci(worst) + " at " + where;
    return worst <= 0.05;
  });
}

CriterionResult check_voronovskaja() {
  return timed(5, "Voronovskaja asymptotics", 0.0, [](std::string& detail) {
    const FunctionSpec t2 = make_monomial(2);
    const std::vector<long> ns{64, 128, 256, 512, 1024, 2048, 4096};
    int failing_points = 0;
    double worst_scaled = 0.0;
    std::string where;
    for (double a : {0.0, 1.0})
      for (double x : {0.5, 1.0, 2.0}) {
        bool ok = true;
        for (const auto& row : voronovskaja_check(t2, a, x, 0, ns)) {
          const double scaled = row.gap() * static_cast<double>(row.n);
          if (scaled > worst_scaled) {
            worst_scaled = scaled;
            where = "a=" + sci(a) + " x=" + sci(x) + " n=" + std::to_string(row.n);
          }
          ok = ok && row.gap() <= 5.0 / static_cast<double>(row.n);
        }
        if (!ok) ++failing_points;
      }
    bool symbolic = true;
    for (int power : {1, 2})
      for (int a : {0, 1, 3}) {
        const VoronovskajaSymbolic s = voronovskaja_symbolic(power, a);
        symbolic = symbolic && s.structure_ok && s.limit == s.formula;
      }
    detail = "max n|L_n - limit| = " + sci(worst_scaled) + " at " + where + " (bound 5); " +
             std::to_string(6 - failing_points) + "/6 (a,x) points within 5/n; exact identity for t, t^2 " +
             (symbolic ? "holds" : "FAILS");
    return failing_points == 0 && symbolic;
  });
}

CriterionResult check_weighted_majorants() {
  return timed(6, "weighted-norm majorants", 0.0, [](std::string& detail) {
    const std::vector<long> ns{16, 32, 64, 128, 256, 512, 1024};
    const std::vector<double> as{0.0, 1.0, 3.0};
    const WeightedNormSpec spec;
    double worst_ratio = 0.0;
    double worst_change = 0.0;
    double big_truncation = 0.0;
    int violations = 0;
    for (const BoundRecord& r : majorant_records(ns, as, spec)) {
      worst_ratio = std::max(worst_ratio, r.actual / r.bound);
      big_truncation = std::max(big_truncation, r.x);
      if (r.violated()) ++violations;
    }
    for (int i : {1, 2})
      for (long n : ns)
        for (double a : as) worst_change = std::max(worst_change, weighted_moment_error_norm(i, {n, a}, spec).last_change);
    // the series evaluator must agree with the exact tables on [0, x_max_trunc]
    double series_ratio = 0.0;
    for (int i : {1, 2})
      for (long n : {16L, 256L})
        for (double a : as) {
          const OperatorParams p{n, a};
          const double s = weighted_moment_error_norm_series(i, p, spec.rho_exponent, spec.x_max_trunc);
          series_ratio = std::max(series_ratio, s / weighted_majorant(i, p));
          if (s > weighted_majorant(i, p)) ++violations;
        }
    detail = std::to_string(violations) + " violations; max norm/majorant = " + sci(worst_ratio) +
             " (series on [0,50]: " + sci(series_ratio) + "); last doubling change " + sci(worst_change) +
             ", truncation reached x = " + sci(big_truncation);
    return violations == 0 && worst_change < 1e-6;
  });
}

CriterionResult check_statistical_density() {
  return timed(7, "statistical density", 0.0, [](std::string& detail) {
    const double eps = 0.01;
    const double a = 1.0;
    const WeightedNormSpec spec;
    bool ok = true;
    std::ostringstream os;
    for (int i : {1, 2}) {
      const long threshold = majorant_threshold(i, a, eps);
      const long last = 2 * threshold + 100;
      std::vector<double> b;
      for (long k = 1; k <= last; ++k) b.push_back(weighted_moment_error_norm(i, {k, a}, spec).norm);
      const std::vector<double> density = stat_density(b, eps);
      long late = 0;
      for (long k = threshold + 1; k <= last; ++k)
        if (b[static_cast<std::size_t>(k - 1)] >= eps) ++late;
      // after the threshold the count is frozen, so the density decays like count/n
      const double frozen = density[static_cast<std::size_t>(threshold - 1)] * static_cast<double>(threshold);
      bool decays = true;
      for (long n = threshold + 1; n <= last; ++n)
        decays = decays && std::fabs(density[static_cast<std::size_t>(n - 1)] * static_cast<double>(n) - frozen) < 0.5;
      ok = ok && late == 0 && decays && (i != 1 || threshold == 349);
      os << "e" << i << ": threshold " << threshold << ", exceedances past it " << late << ", density("
         << last << ") = " << sci(density.back()) << "; ";
    }
    detail = os.str();
    detail.resize(detail.size() - 2);
    return ok;
  });
}

CriterionResult check_bv_estimate() {
  return timed(8, "BV estimate", 0.0, [](std::string& detail) {
    const FunctionCatalog& cat = builtin_catalog();
    int checks = 0;
    int violations = 0;
    int skipped = 0;
    int tail_failures = 0;
    long max_threshold = 0;
    double worst = 0.0;
    for (double a : {0.0, 1.0})
      for (double x : {0.5, 1.0, 2.0}) {
        const long n0 = validity_threshold(a, x, 2.0);
        max_threshold = std::max(max_threshold, n0);
        for (long n : {256L, 1024L, 4096L}) {
          if (n < n0) {
            ++skipped;
            continue;
          }
          const BVBoundParams bp{2.0, n, x};
          for (const char* id : {"abs1", "multikink", "t1"}) {
            const BVRecord r = bv_check(cat.get(id), {n, a}, bp);
            ++checks;
            if (r.violated()) ++violations;
            if (r.bound_without_k0 > 0.0) worst = std::max(worst, r.lhs / r.bound_without_k0);
          }
          const std::vector<double> pts{0.0, 0.25 * x, 0.5 * x, 0.9 * x, 1.1 * x, 1.5 * x, 2.0 * x, 3.0 * x};
          for (const auto& t : kernel_tail_checks({n, a}, bp, pts))
            if (!t.holds()) ++tail_failures;
        }
      }
    detail = std::to_string(checks) + " checks, " + std::to_string(violations) +
             " violations (both k=0 conventions), max lhs/bound = " + sci(worst) + "; kernel tail failures " +
             std::to_string(tail_failures) + "; largest n0 = " + std::to_string(max_threshold) +
             (skipped ? ", " + std::to_string(skipped) + " (n,x,a) below n0 skipped" : "");
    return violations == 0 && tail_failures == 0 && skipped == 0;
  });
}

CriterionResult check_rate_fits() {
  return timed(9, "rate fits", 0.0, [](std::string& detail) {
    const std::vector<long> ns{64, 128, 256, 512, 1024};
    const FunctionSpec e = make_exp_neg();
    const FunctionSpec t3 = make_monomial(3);
    const GridSpec grid{0.25, 4.0, 40, Spacing::uniform};
    std::vector<std::pair<double, double>> sup, deriv;
    for (long n : ns) {
      const OperatorParams p{n, 0.0};
      sup.emplace_back(static_cast<double>(n), sup_error(e, p, grid));
      deriv.emplace_back(static_cast<double>(n), std::fabs(operator_derivative(t3, p, 1.0, 1).value - 3.0));
    }
    const RateFit fs = rate_fit(sup);
    const RateFit fd = rate_fit(deriv);
    detail = "sup-error rate " + sci(fs.exponent) + ", derivative rate " + sci(fd.exponent);
    return std::fabs(fs.exponent - 1.0) <= 0.1 && std::fabs(fd.exponent - 1.0) <= 0.15;
  });
}

CriterionResult check_bound_suite() {
  return timed(10, "bound suite", 0.0, [](std::string& detail) {
    const BoundSuiteConfig cfg;
    const BoundSuiteResult res = run_bound_suite(cfg, builtin_catalog());
    detail = std::to_string(res.violations()) + " violations in " + std::to_string(res.records.size()) +
             " records (fitted C = " + sci(res.constants.local_direct) + ", M1 = " + sci(res.constants.weighted) +
             ")";
    return res.violations() == 0;
  });
}

const std::vector<AcceptanceCriterion>& acceptance_criteria() {
  static const std::vector<AcceptanceCriterion> all{
      {1, check_partition_of_unity}, {2, check_golden_symbolic},     {3, check_symbolic_numeric},
      {4, check_order_laws},         {5, check_voronovskaja},        {6, check_weighted_majorants},
      {7, check_statistical_density}, {8, check_bv_estimate},         {9, check_rate_fits},
      {10, check_bound_suite}};
  return all;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids,
                                            const std::function<void(const CriterionResult&)>& sink) {
  std::vector<CriterionResult> out;
  const auto start = Clock::now();
  for (const auto& c : acceptance_criteria()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    CriterionResult r = c.run();
    if (c.id == 10) {
      const double total = std::chrono::duration<double>(Clock::now() - start).count();
      r.detail += "; selftest total " + sci(total) + " s (limit 300)";
      if (total >= 300.0) r.passed = false;
    }
    if (sink) sink(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace bko
