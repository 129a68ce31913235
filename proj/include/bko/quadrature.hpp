#pragma once

#include <Eigen/Core>

namespace bko {

// Gauss-Legendre nodes and weights on [-1, 1].
struct QuadratureRule {
  int order = 0;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  static QuadratureRule gauss_legendre(int order);

  template <typename F>
  double integrate(F&& f, double lo, double hi) const {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double acc = 0.0;
    for (int i = 0; i < order; ++i) acc += weights[i] * f(mid + half * nodes[i]);
    return acc * half;
  }
};

// Shared order-16 rule.
const QuadratureRule& default_rule();

}  // namespace bko
