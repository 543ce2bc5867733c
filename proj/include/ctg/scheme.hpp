#pragma once

#include <complex>
#include <vector>

#include "ctg/minors.hpp"
#include "ctg/pade.hpp"

namespace ctg {

/// Order-r CTG scheme data: minor table, Pade spectrum, and the cached
/// scalar weight table
///   weight(i,k,j) = (-1)^{i+k+1} phi_{ki}(-zeta_j) / P_r'(zeta_j),
/// computed once per order, shared read-only across steps and threads.
/// Weights are evaluated in extended precision: the nodal update sums stage
/// contributions with cancellation, and plain double Horner evaluation of
/// the minors would cap the achievable step accuracy near 1e-12.
class CtgScheme {
 public:
  explicit CtgScheme(int r)
      : order_(r), table_(build_minor_table(r)), spectrum_(pade_spectrum(r)) {
    using CL = std::complex<long double>;
    const int n = r + 1;

    auto to_ld = [](const RationalPoly& p) {
      std::vector<long double> c(p.coeffs().size());
      for (std::size_t k = 0; k < c.size(); ++k) c[k] = p.coeffs()[k].template convert_to<long double>();
      return c;
    };
    auto horner = [](const std::vector<long double>& c, CL z) {
      CL acc(c.back(), 0.0L);
      for (auto it = c.rbegin() + 1; it != c.rend(); ++it) acc = acc * z + CL(*it, 0.0L);
      return acc;
    };

    const std::vector<long double> p = to_ld(pade_numerator_exact(r));
    std::vector<long double> dp(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) dp[k - 1] = static_cast<long double>(k) * p[k];

    std::vector<std::vector<std::vector<long double>>> minors(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
      minors[static_cast<std::size_t>(k - 1)].resize(static_cast<std::size_t>(n));
      for (int i = 1; i <= n; ++i)
        minors[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)] = to_ld(table_.minor_exact(k, i));
    }

    weights_.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * static_cast<std::size_t>(r));
    for (int j = 1; j <= r; ++j) {
      // Re-polish the zero in extended precision so the residues match it.
      CL z(spectrum_.zeros[static_cast<std::size_t>(j - 1)].real(),
           spectrum_.zeros[static_cast<std::size_t>(j - 1)].imag());
      for (int it = 0; it < 4; ++it) {
        CL f = horner(p, z);
        CL df = horner(dp, z);
        if (df == CL(0, 0)) break;
        z -= f / df;
      }
      const CL dpz = horner(dp, z);
      for (int k = 1; k <= n; ++k)
        for (int i = 1; i <= n; ++i) {
          CL w = horner(minors[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)], -z) / dpz;
          if ((i + k + 1) % 2 != 0) w = -w;
          weights_[index(i, k, j)] =
              std::complex<double>(static_cast<double>(w.real()), static_cast<double>(w.imag()));
        }
    }
  }

  int order() const { return order_; }
  const MinorTable& table() const { return table_; }
  const PadeSpectrum& spectrum() const { return spectrum_; }

  std::complex<double> weight(int i, int k, int j) const { return weights_[index(i, k, j)]; }

 private:
  std::size_t index(int i, int k, int j) const {
    const int n = order_ + 1;
    return (static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(n) + static_cast<std::size_t>(k - 1)) *
               static_cast<std::size_t>(n) +
           static_cast<std::size_t>(i - 1);
  }

  int order_;
  MinorTable table_;
  PadeSpectrum spectrum_;
  std::vector<std::complex<double>> weights_;
};

}  // namespace ctg
