#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "ctg/minors.hpp"

namespace ctg {

namespace detail {

/// Fraction-free (Bareiss) determinant over Q[lambda] with row pivoting.
/// Every division is exact by the Bareiss identity; a non-exact division
/// would indicate a programming error and throws.
inline RationalPoly bareiss_det(PolyMatrix m) {
  const int n = static_cast<int>(m.size());
  if (n == 0) return RationalPoly::constant(Rational(1));
  int sgn = 1;
  RationalPoly prev = RationalPoly::constant(Rational(1));
  for (int k = 0; k + 1 < n; ++k) {
    int p = k;
    while (p < n && m[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)].is_zero()) ++p;
    if (p == n) return RationalPoly();
    if (p != k) {
      std::swap(m[static_cast<std::size_t>(p)], m[static_cast<std::size_t>(k)]);
      sgn = -sgn;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        auto& mij = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        mij = RationalPoly::exact_div(
            m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] * mij -
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * m[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)],
            prev);
      }
    prev = m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
  }
  RationalPoly det = m.back().back();
  return sgn < 0 ? -det : det;
}

}  // namespace detail

/// Verification oracle for build_minor_table: every minor computed by direct
/// fraction-free elimination of the materialized submatrix. Only intended
/// for tests; quadratic in the number of minors.
inline MinorTable minor_oracle(int r) {
  if (r < 1 || r > 8) throw std::invalid_argument("minor_oracle supports 1 <= r <= 8");
  MinorTable t;
  t.order = r;
  detail::PolyMatrix e = StiffnessSymbol(r).materialize();
  t.phi_exact.assign(static_cast<std::size_t>(r + 1), std::vector<RationalPoly>(static_cast<std::size_t>(r + 1)));
  for (int k = 1; k <= r + 1; ++k)
    for (int i = 1; i <= r + 1; ++i)
      t.phi_exact[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)] =
          detail::bareiss_det(detail::remove_row_col(e, k, i));
  t.varphi_exact = detail::bareiss_det(e);
  t.det_g_exact.resize(static_cast<std::size_t>(r));
  for (int m = 1; m <= r; ++m) {
    detail::PolyMatrix em = StiffnessSymbol(m).materialize();
    t.det_g_exact[static_cast<std::size_t>(m - 1)] = detail::bareiss_det(detail::remove_row_col(em, m, m + 1));
  }
  t.finalize_views();
  return t;
}

}  // namespace ctg
