#pragma once

// Gauss-Legendre rules on [-1,1] (Newton iteration on the Legendre
// recurrence) plus composite panel integration of a scalar callable.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "wavebox/errors.hpp"

namespace wavebox {

struct GaussRule {
  std::vector<double> x;  // nodes in (-1, 1)
  std::vector<double> w;  // positive weights summing to 2
};

inline GaussRule make_gauss_rule(int n) {
  if (n < 1) throw validation_error("gauss rule order must be >= 1");
  GaussRule rule;
  rule.x.resize(static_cast<std::size_t>(n));
  rule.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[static_cast<std::size_t>(i)] = x;
    rule.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

inline const GaussRule& gauss_rule(int n) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_rule(n)).first;
  return it->second;
}

// Composite Gauss-Legendre over [a, b] split into `panels` equal panels.
template <typename F>
double integrate_gl(F&& f, double a, double b, int panels, int order) {
  const GaussRule& rule = gauss_rule(order);
  double total = 0.0;
  double width = (b - a) / static_cast<double>(panels);
  for (int p = 0; p < panels; ++p) {
    double lo = a + width * static_cast<double>(p);
    double mid = lo + 0.5 * width;
    double half = 0.5 * width;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      total += rule.w[i] * half * f(mid + half * rule.x[i]);
    }
  }
  return total;
}

}  // namespace wavebox
