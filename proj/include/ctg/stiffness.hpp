#pragma once

#include <stdexcept>
#include <vector>

#include "ctg/pade.hpp"
#include "ctg/polynomial.hpp"

namespace ctg {

/// Scalar stiffness symbol E_{r+1}(lambda): the (r+1)x(r+1) polynomial matrix
/// whose blockwise substitution lambda -> tau*D yields the CTG step matrix.
/// Entry rules (1-based):
///   rows k = 1..r:  a_k = (lambda/2)/(2k-1) on the diagonal, -1 on the
///                   superdiagonal, b_k = -(lambda/2)/(2k+3) at offset +2
///                   (rows k <= r-2 only)
///   row r+1:        c_i = (-1)^{i+1}
struct StiffnessSymbol {
  int order;

  explicit StiffnessSymbol(int r) : order(r) { check_order(r); }

  static Rational a_coeff(int k) { return rational(1, 2 * (2LL * k - 1)); }
  static Rational b_coeff(int k) { return rational(-1, 2 * (2LL * k + 3)); }
  static int c(int k) { return (k % 2 == 1) ? 1 : -1; }

  static RationalPoly a(int k) { return RationalPoly::monomial(a_coeff(k), 1); }
  static RationalPoly b(int k) { return RationalPoly::monomial(b_coeff(k), 1); }

  /// E_{r+1}(lambda) entry at (k,i), 1-based.
  RationalPoly entry(int k, int i) const {
    const int r = order;
    if (k < 1 || k > r + 1 || i < 1 || i > r + 1) throw std::out_of_range("StiffnessSymbol::entry");
    if (k == r + 1) return RationalPoly::constant(Rational(c(i)));
    if (i == k) return a(k);
    if (i == k + 1) return RationalPoly::constant(Rational(-1));
    if (i == k + 2 && k <= r - 2) return b(k);
    return RationalPoly();
  }

  std::vector<std::vector<RationalPoly>> materialize() const {
    std::vector<std::vector<RationalPoly>> m(static_cast<std::size_t>(order + 1));
    for (int k = 1; k <= order + 1; ++k) {
      m[static_cast<std::size_t>(k - 1)].resize(static_cast<std::size_t>(order + 1));
      for (int i = 1; i <= order + 1; ++i) m[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)] = entry(k, i);
    }
    return m;
  }
};

}  // namespace ctg
