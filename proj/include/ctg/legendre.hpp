#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace ctg {

/// Legendre values P_0(x) .. P_n(x) on [-1,1] by the three-term recurrence.
inline std::vector<double> legendre_values(int n, double x) {
  std::vector<double> p(static_cast<std::size_t>(n) + 1);
  p[0] = 1.0;
  if (n >= 1) p[1] = x;
  for (int k = 2; k <= n; ++k)
    p[static_cast<std::size_t>(k)] =
        ((2.0 * k - 1.0) * x * p[static_cast<std::size_t>(k - 1)] - (k - 1.0) * p[static_cast<std::size_t>(k - 2)]) / k;
  return p;
}

/// Shifted basis values L~_0(t) .. L~_n(t) on [t0, t1].
inline std::vector<double> shifted_legendre_values(int n, double t, double t0, double t1) {
  const double xi = (2.0 * t - t0 - t1) / (t1 - t0);
  return legendre_values(n, xi);
}

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum = 2
};

/// Gauss-Legendre rule with q points, exact for polynomials of degree
/// 2q - 1. Nodes are Newton-refined roots of P_q; rules are cached.
inline const GaussRule& gauss_legendre(int q) {
  if (q < 1) throw std::invalid_argument("gauss_legendre: q >= 1 required");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(q));
  rule.weights.resize(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    for (int it2 = 0; it2 < 100; ++it2) {
      std::vector<double> p = legendre_values(q, x);
      const double pq = p[static_cast<std::size_t>(q)];
      const double dpq = q * (x * p[static_cast<std::size_t>(q)] - p[static_cast<std::size_t>(q - 1)]) / (x * x - 1.0);
      const double dx = pq / dpq;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    std::vector<double> p = legendre_values(q, x);
    const double dpq = q * (x * p[static_cast<std::size_t>(q)] - p[static_cast<std::size_t>(q - 1)]) / (x * x - 1.0);
    rule.nodes[static_cast<std::size_t>(q - 1 - i)] = -x;  // ascending
    rule.weights[static_cast<std::size_t>(q - 1 - i)] = 2.0 / ((1.0 - x * x) * dpq * dpq);
  }
  return cache.emplace(q, std::move(rule)).first->second;
}

}  // namespace ctg
