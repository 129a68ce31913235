#include <algorithm>
#include <iostream>

#include "bko/selftest.hpp"

int main() {
  const auto results = bko::run_acceptance({}, [](const bko::CriterionResult& c) { std::cout << c.line() << std::endl; });
  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& c) { return !c.passed; });
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
