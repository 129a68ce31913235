#pragma once

#include <string>
#include <vector>

#include "bko/analysis.hpp"
#include "bko/report.hpp"

namespace bko {

struct SweepGrid {
  std::vector<long> ns;
  std::vector<double> as;
  std::vector<double> xs;
};

SweepGrid default_calibration_grid();
SweepGrid default_validation_grid();

struct BoundSuiteConfig {
  SweepGrid calibration = default_calibration_grid();
  SweepGrid validation = default_validation_grid();
  std::vector<std::string> local_functions{"exp_neg", "sin", "inv1p"};
  // (id, alpha) pairs for the Lipschitz-type checks
  std::vector<std::pair<std::string, double>> lipschitz_functions{{"exp_neg", 1.0}, {"sin", 1.0}, {"sqrt", 0.5}};
  double a1 = 1.0;
  double a2 = 1.0;
  std::vector<std::string> interval_functions{"exp_neg", "sin", "t2", "sqrt", "abs1"};
  std::vector<std::string> weighted_functions{"exp_neg", "sin", "t1", "t2", "sqrt"};
  WeightedNormSpec norm;
  TruncationPolicy policy;
  int sup_points = 41;  // x-grid for the weighted-modulus sup, on [0, max x]

  nlohmann::json to_json() const;
};

struct FittedConstants {
  double local_direct = 0.0;  // C
  double weighted = 0.0;      // M_1
};

struct BoundSuiteResult {
  FittedConstants constants;
  std::vector<BoundRecord> records;
  long violations() const;
  Table table() const;
};

FittedConstants calibrate(const BoundSuiteConfig& cfg, const FunctionCatalog& catalog);
BoundSuiteResult run_bound_suite(const BoundSuiteConfig& cfg, const FunctionCatalog& catalog);

// Norm-majorant records for e_1, e_2 over the grid's (n, a) pairs.
std::vector<BoundRecord> majorant_records(const std::vector<long>& ns, const std::vector<double>& as,
                                          const WeightedNormSpec& spec);

Table bound_table(const std::vector<BoundRecord>& records);

}  // namespace bko
