#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ctg/polynomial.hpp"

namespace ctg {

namespace detail {

template <class F>
std::complex<F> horner(const std::vector<double>& ascending, std::complex<F> z) {
  std::complex<F> acc(static_cast<F>(ascending.back()), F(0));
  for (auto it = ascending.rbegin() + 1; it != ascending.rend(); ++it)
    acc = acc * z + std::complex<F>(static_cast<F>(*it), F(0));
  return acc;
}

}  // namespace detail

/// Zeros of a real polynomial: companion-matrix eigenvalues of the monic
/// rescaling, polished by Newton iteration in extended precision.
/// Throws std::runtime_error if a Newton polish fails to reach the residual
/// target within max_iters.
inline std::vector<std::complex<double>> polynomial_roots(const RealPolynomial& p,
                                                          double residual_target = 1e-13,
                                                          int max_iters = 50) {
  const int n = p.degree();
  if (p.is_zero()) throw std::invalid_argument("polynomial_roots: zero polynomial");
  if (n == 0) return {};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  const double lead = p.coeff(n);
  for (int k = 0; k < n; ++k) companion(k, n - 1) = -p.coeff(k) / lead;
  for (int k = 1; k < n; ++k) companion(k, k - 1) = 1.0;

  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw std::runtime_error("polynomial_roots: eigensolver failed");

  const std::vector<double>& c = p.coeffs();
  std::vector<double> dc(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) dc[static_cast<std::size_t>(k - 1)] = k * c[static_cast<std::size_t>(k)];

  std::vector<std::complex<double>> roots(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    std::complex<long double> z(es.eigenvalues()(j).real(), es.eigenvalues()(j).imag());
    bool converged = false;
    for (int it = 0; it < max_iters; ++it) {
      std::complex<long double> f = detail::horner<long double>(c, z);
      if (std::abs(f) <= static_cast<long double>(residual_target)) {
        converged = true;
        break;
      }
      std::complex<long double> df = detail::horner<long double>(dc, z);
      if (df == std::complex<long double>(0, 0)) break;
      z -= f / df;
    }
    if (!converged && std::abs(detail::horner<long double>(c, z)) > static_cast<long double>(residual_target))
      throw std::runtime_error("polynomial_roots: Newton polish did not converge");
    roots[static_cast<std::size_t>(j)] =
        std::complex<double>(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }

  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

}  // namespace ctg
