#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ctg/polynomial.hpp"
#include "ctg/roots.hpp"

namespace ctg {

/// Largest supported expansion order. Classical nodal order 2r = 24 already
/// exceeds what double precision can resolve in a convergence study.
#ifndef CTG_MAX_ORDER
#define CTG_MAX_ORDER 12
#endif
inline constexpr int kMaxOrder = CTG_MAX_ORDER;

inline void check_order(int r) {
  if (r < 1 || r > kMaxOrder) throw std::invalid_argument("order r must satisfy 1 <= r <= " + std::to_string(kMaxOrder));
}

/// Diagonal Pade numerator P_r for e^z in exact rational arithmetic, built
/// from the three-term recurrence
///   P_m = P_{m-1} + z^2 / (4(2m-1)(2m-3)) P_{m-2}.
inline RationalPoly pade_numerator_exact(int r) {
  check_order(r);
  RationalPoly prev2 = RationalPoly::constant(Rational(1));                       // P_0
  RationalPoly prev1(std::vector<Rational>{Rational(1), rational(1, 2)});         // P_1
  if (r == 1) return prev1;
  for (int m = 2; m <= r; ++m) {
    RationalPoly z2 = RationalPoly::monomial(rational(1, 4 * (2LL * m - 1) * (2LL * m - 3)), 2);
    RationalPoly cur = prev1 + z2 * prev2;
    prev2 = std::move(prev1);
    prev1 = std::move(cur);
  }
  return prev1;
}

inline RealPolynomial pade_numerator(int r) { return to_real(pade_numerator_exact(r)); }

/// Zeros of P_r with derivative values and conjugate-pair structure.
/// Representative of each complex pair is the zero with negative imaginary
/// part; `partner` is -1 for real zeros.
struct PadeSpectrum {
  struct Group {
    int representative;  // index into zeros; Im < 0 when complex
    int partner;         // conjugate index, or -1 for a real zero
  };

  int order = 0;
  std::vector<std::complex<double>> zeros;
  std::vector<std::complex<double>> dP;  // P_r'(zeta_j)
  std::vector<Group> pairs;
};

inline PadeSpectrum pade_spectrum(int r) {
  check_order(r);
  const RealPolynomial p = pade_numerator(r);
  std::vector<std::complex<double>> zeros = polynomial_roots(p, 1e-13, 50);

  // Snap near-real zeros onto the axis and re-polish there; enforce exact
  // conjugate symmetry within a pair.
  const std::vector<double>& c = p.coeffs();
  std::vector<double> dc(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) dc[k - 1] = static_cast<double>(k) * c[k];
  for (auto& z : zeros) {
    if (std::abs(z.imag()) < 1e-8 * std::max(1.0, std::abs(z))) {
      long double x = z.real();
      for (int it = 0; it < 50; ++it) {
        long double f = detail::horner<long double>(c, std::complex<long double>(x, 0)).real();
        if (std::abs(f) <= 1e-13L) break;
        long double df = detail::horner<long double>(dc, std::complex<long double>(x, 0)).real();
        x -= f / df;
      }
      z = std::complex<double>(static_cast<double>(x), 0.0);
    }
  }

  PadeSpectrum s;
  s.order = r;
  std::vector<bool> used(zeros.size(), false);
  for (std::size_t j = 0; j < zeros.size(); ++j) {
    if (used[j]) continue;
    used[j] = true;
    if (zeros[j].imag() == 0.0) {
      s.pairs.push_back({static_cast<int>(s.zeros.size()), -1});
      s.zeros.push_back(zeros[j]);
      continue;
    }
    std::size_t mate = zeros.size();
    double best = 1e300;
    for (std::size_t k = j + 1; k < zeros.size(); ++k) {
      if (used[k]) continue;
      double d = std::abs(zeros[k] - std::conj(zeros[j]));
      if (d < best) {
        best = d;
        mate = k;
      }
    }
    if (mate == zeros.size() || best > 1e-8)
      throw std::runtime_error("pade_spectrum: unpaired complex zero");
    used[mate] = true;
    std::complex<double> rep = zeros[j].imag() < 0 ? zeros[j] : zeros[mate];
    if (rep.imag() >= 0) rep = std::conj(rep);
    int ri = static_cast<int>(s.zeros.size());
    s.zeros.push_back(rep);
    s.zeros.push_back(std::conj(rep));
    s.pairs.push_back({ri, ri + 1});
  }

  RealPolynomial dp = p.derivative();
  s.dP.resize(s.zeros.size());
  for (std::size_t j = 0; j < s.zeros.size(); ++j) s.dP[j] = dp(s.zeros[j]);

  // Lemma-level invariants; violations indicate an internal error.
  double maxc = 0;
  for (double v : p.coeffs()) maxc = std::max(maxc, std::abs(v));
  for (std::size_t j = 0; j < s.zeros.size(); ++j) {
    if (s.zeros[j].real() > -2.0 + 1e-9)
      throw std::runtime_error("pade_spectrum: zero escapes the half-plane Re <= -2");
    if (std::abs(p(s.zeros[j])) > 1e-12 * maxc)
      throw std::runtime_error("pade_spectrum: residual too large after polish");
    for (std::size_t k = j + 1; k < s.zeros.size(); ++k)
      if (std::abs(s.zeros[j] - s.zeros[k]) <= 1e-8)
        throw std::runtime_error("pade_spectrum: zeros not simple");
  }
  return s;
}

/// Partial-fraction weights w_j = -F(-zeta_j) / P_r'(zeta_j), so that for
/// deg F <= r-1
///   F(z) / P_r(-z) = sum_j w_j / (z + zeta_j).
/// deg F = r is accepted; the caller then owns the constant term.
inline std::vector<std::complex<double>> partial_fraction_weights(const RealPolynomial& F,
                                                                  const PadeSpectrum& spectrum) {
  if (F.degree() > spectrum.order && !F.is_zero())
    throw std::invalid_argument("partial_fraction_weights: deg F exceeds r");
  std::vector<std::complex<double>> w(spectrum.zeros.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = -F(-spectrum.zeros[j]) / spectrum.dP[j];
  return w;
}

}  // namespace ctg
