#pragma once

#include <vector>

namespace holofg {

/// Nodes and weights on [-1, 1].
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre rule with n points; n must be one of 4, 8, 10, 12, 16, 20, 24,
/// 32, 40, 48, 64.
const QuadRule& gauss_legendre(int n);

/// Maps a rule on [-1, 1] to [a, b].
QuadRule mapped(const QuadRule& r, double a, double b);

}  // namespace holofg
