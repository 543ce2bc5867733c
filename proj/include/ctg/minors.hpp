#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ctg/stiffness.hpp"

namespace ctg {

/// Table of minor polynomials of the stiffness symbol:
///   phi[k][i] = det[ E_{r+1}(lambda)_{k,i} ]   (row k and column i removed),
/// the determinant varphi_r = det E_{r+1}, and det G_m for m = 1..r, where
/// G_m = E_{m+1}(lambda)_{m,m+1}. Everything is exact; double-precision
/// views are derived once at construction.
struct MinorTable {
  int order = 0;

  std::vector<std::vector<RationalPoly>> phi_exact;  // (r+1) x (r+1), phi_exact[k-1][i-1]
  RationalPoly varphi_exact;
  std::vector<RationalPoly> det_g_exact;  // det G_m at index m-1

  std::vector<std::vector<RealPolynomial>> phi;
  RealPolynomial varphi;
  std::vector<RealPolynomial> det_g;

  const RationalPoly& minor_exact(int k, int i) const {
    return phi_exact[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)];
  }
  const RealPolynomial& minor(int k, int i) const {
    return phi[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)];
  }

  void finalize_views() {
    phi.assign(phi_exact.size(), {});
    for (std::size_t k = 0; k < phi_exact.size(); ++k) {
      phi[k].resize(phi_exact[k].size());
      for (std::size_t i = 0; i < phi_exact[k].size(); ++i) phi[k][i] = to_real(phi_exact[k][i]);
    }
    varphi = to_real(varphi_exact);
    det_g.resize(det_g_exact.size());
    for (std::size_t m = 0; m < det_g_exact.size(); ++m) det_g[m] = to_real(det_g_exact[m]);
  }
};

namespace detail {

using PolyMatrix = std::vector<std::vector<RationalPoly>>;

inline PolyMatrix remove_row_col(const PolyMatrix& m, int row, int col) {
  PolyMatrix out;
  out.reserve(m.size() - 1);
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (static_cast<int>(k) == row - 1) continue;
    std::vector<RationalPoly> r;
    r.reserve(m.size() - 1);
    for (std::size_t i = 0; i < m[k].size(); ++i) {
      if (static_cast<int>(i) == col - 1) continue;
      r.push_back(m[k][i]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Cofactor-expansion determinant; used only for the hard-coded base levels.
inline RationalPoly det_cofactor(const PolyMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return RationalPoly::constant(Rational(1));
  if (n == 1) return m[0][0];
  RationalPoly det;
  for (std::size_t k = 0; k < n; ++k) {
    if (m[k][0].is_zero()) continue;
    RationalPoly sub = m[k][0] * det_cofactor(remove_row_col(m, static_cast<int>(k) + 1, 1));
    det = (k % 2 == 0) ? det + sub : det - sub;
  }
  return det;
}

struct Level {
  PolyMatrix phi;             // minors of E_{m+1}
  RationalPoly varphi;        // det E_{m+1}
  RationalPoly det_g;         // det G_m
  std::vector<RationalPoly> gm;  // gm[j-1] = det[ G_m(lambda)_{m-1,j} ], j = 1..m
};

inline Level direct_level(int m) {
  StiffnessSymbol sym(m);
  PolyMatrix e = sym.materialize();
  Level lv;
  lv.phi.assign(static_cast<std::size_t>(m + 1), std::vector<RationalPoly>(static_cast<std::size_t>(m + 1)));
  for (int k = 1; k <= m + 1; ++k)
    for (int i = 1; i <= m + 1; ++i)
      lv.phi[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)] = det_cofactor(remove_row_col(e, k, i));
  lv.varphi = det_cofactor(e);
  PolyMatrix g = remove_row_col(e, m, m + 1);
  lv.det_g = det_cofactor(g);
  if (m >= 2) {
    lv.gm.resize(static_cast<std::size_t>(m));
    for (int j = 1; j <= m; ++j)
      lv.gm[static_cast<std::size_t>(j - 1)] = det_cofactor(remove_row_col(g, m - 1, j));
  }
  return lv;
}

/// One recurrence step: minors of E_{r+1} from the two previous levels.
/// Implements Theorem-style case splits on the removed row (i) with the
/// G-minor row recursion folded in; levels r <= 3 never reach here.
inline Level recurrence_level(int r, const std::vector<Level>& lower) {
  const Level& l1 = lower[static_cast<std::size_t>(r - 2)];  // level r-1
  const Level& l2 = lower[static_cast<std::size_t>(r - 3)];  // level r-2

  const RationalPoly ar = StiffnessSymbol::a(r);
  const RationalPoly ar1 = StiffnessSymbol::a(r - 1);
  const RationalPoly br2 = StiffnessSymbol::b(r - 2);
  const Rational crp1 = Rational(StiffnessSymbol::c(r + 1));
  const Rational cr = Rational(StiffnessSymbol::c(r));

  // Prefix products aprod[j] = a_1 ... a_j (aprod[0] = 1).
  std::vector<RationalPoly> aprod(static_cast<std::size_t>(r + 1));
  aprod[0] = RationalPoly::constant(Rational(1));
  for (int k = 1; k <= r; ++k) aprod[static_cast<std::size_t>(k)] = aprod[static_cast<std::size_t>(k - 1)] * StiffnessSymbol::a(k);
  auto aprod_range = [&](int from, int to) {  // a_from * ... * a_to, empty -> 1
    if (from > to) return RationalPoly::constant(Rational(1));
    return RationalPoly::exact_div(aprod[static_cast<std::size_t>(to)], aprod[static_cast<std::size_t>(from - 1)]);
  };
  auto sign = [](int p) { return (p % 2 == 0) ? Rational(1) : Rational(-1); };

  Level lv;
  lv.varphi = l1.varphi + ar * ar1 * l2.varphi;
  lv.det_g = l1.det_g - ar1 * br2 * l2.det_g + RationalPoly::constant(cr) * aprod[static_cast<std::size_t>(r - 1)];

  lv.gm.resize(static_cast<std::size_t>(r));
  for (int j = 1; j <= r - 1; ++j)
    lv.gm[static_cast<std::size_t>(j - 1)] =
        l1.phi[static_cast<std::size_t>(r - 2)][static_cast<std::size_t>(j - 1)] - br2 * l1.gm[static_cast<std::size_t>(j - 1)];
  lv.gm[static_cast<std::size_t>(r - 1)] = l1.det_g;

  lv.phi.assign(static_cast<std::size_t>(r + 1), std::vector<RationalPoly>(static_cast<std::size_t>(r + 1)));
  auto set = [&](int i, int j, RationalPoly v) {
    lv.phi[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = std::move(v);
  };
  auto det_g_at = [&](int i) -> const RationalPoly& {
    return lower[static_cast<std::size_t>(i - 1)].det_g;
  };

  for (int i = 1; i <= r - 2; ++i) {
    for (int j = 1; j <= r - 2; ++j)
      set(i, j,
          l1.phi[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] +
              ar * ar1 * l2.phi[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]);
    for (int j = r - 1; j <= r + 1; ++j)
      set(i, j, sign(j - i - 1) * aprod_range(i + 1, j - 1) * det_g_at(i));
  }

  {  // removed row i = r-1
    const int i = r - 1;
    for (int j = 1; j <= r - 1; ++j)
      set(i, j,
          RationalPoly::constant(-crp1) * ar * l1.phi[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(j - 1)] +
              lv.gm[static_cast<std::size_t>(j - 1)]);
    set(i, r, det_g_at(r - 1));
    set(i, r + 1, -(ar * det_g_at(r - 1)));
  }

  {  // removed row i = r
    for (int j = 1; j <= r - 2; ++j)
      set(r, j,
          l1.phi[static_cast<std::size_t>(r - 2)][static_cast<std::size_t>(j - 1)] -
              ar1 * br2 * l2.phi[static_cast<std::size_t>(r - 3)][static_cast<std::size_t>(j - 1)]);
    for (int j = r - 1; j <= r; ++j)
      set(r, j, RationalPoly::constant(crp1) * sign(r - j) * aprod[static_cast<std::size_t>(j - 1)]);
    set(r, r + 1, lv.det_g);
  }

  {  // removed row i = r+1
    for (int j = 1; j <= r - 2; ++j)
      set(r + 1, j,
          -l1.phi[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(j - 1)] -
              ar1 * br2 * l2.phi[static_cast<std::size_t>(r - 2)][static_cast<std::size_t>(j - 1)]);
    for (int j = r - 1; j <= r + 1; ++j)
      set(r + 1, j, sign(r + 1 - j) * aprod[static_cast<std::size_t>(j - 1)]);
  }

  return lv;
}

}  // namespace detail

/// All minors of E_{r+1}(lambda) in exact rational arithmetic. Levels 1..3
/// come from direct cofactor expansion; higher levels use the recurrences.
inline MinorTable build_minor_table(int r) {
  check_order(r);
  std::vector<detail::Level> levels;
  levels.reserve(static_cast<std::size_t>(r));
  for (int m = 1; m <= std::min(r, 3); ++m) levels.push_back(detail::direct_level(m));
  for (int m = 4; m <= r; ++m) levels.push_back(detail::recurrence_level(m, levels));

  MinorTable t;
  t.order = r;
  t.phi_exact = levels.back().phi;
  t.varphi_exact = levels.back().varphi;
  t.det_g_exact.resize(static_cast<std::size_t>(r));
  for (int m = 1; m <= r; ++m) t.det_g_exact[static_cast<std::size_t>(m - 1)] = levels[static_cast<std::size_t>(m - 1)].det_g;
  t.finalize_views();
  return t;
}

/// chi_{r+1,j} = (-1)^{r+1} det[ E_{r+1}(lambda)_{r+1,j} ], j = 1..r+1.
inline std::vector<RationalPoly> chi_row_exact(const MinorTable& t) {
  const Rational s = (t.order + 1) % 2 == 0 ? Rational(1) : Rational(-1);
  std::vector<RationalPoly> chi(static_cast<std::size_t>(t.order + 1));
  for (int j = 1; j <= t.order + 1; ++j) chi[static_cast<std::size_t>(j - 1)] = RationalPoly::constant(s) * t.minor_exact(t.order + 1, j);
  return chi;
}

inline std::vector<RealPolynomial> chi_row(const MinorTable& t) {
  std::vector<RealPolynomial> out;
  for (const auto& p : chi_row_exact(t)) out.push_back(to_real(p));
  return out;
}

/// psi_r = (-1)^r det[ E_{r+1}(lambda)_{r+1,1} ]; its roots lie on the
/// imaginary axis, the invertibility argument behind the dissipative solver.
inline RationalPoly psi_polynomial_exact(const MinorTable& t) {
  const Rational s = t.order % 2 == 0 ? Rational(1) : Rational(-1);
  return RationalPoly::constant(s) * t.minor_exact(t.order + 1, 1);
}

}  // namespace ctg
