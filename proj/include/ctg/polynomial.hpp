#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ctg/rational.hpp"

namespace ctg {

/// Dense univariate polynomial with ascending coefficients. Trailing zeros
/// are trimmed on construction; the zero polynomial is stored as {0}.
template <class T>
class Polynomial {
 public:
  Polynomial() : coeffs_{T(0)} {}

  explicit Polynomial(std::vector<T> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(T(0));
    trim();
  }

  static Polynomial constant(T c) { return Polynomial(std::vector<T>{std::move(c)}); }

  static Polynomial monomial(T c, int k) {
    std::vector<T> v(static_cast<std::size_t>(k) + 1, T(0));
    v.back() = std::move(c);
    return Polynomial(std::move(v));
  }

  const std::vector<T>& coeffs() const { return coeffs_; }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == T(0); }

  /// Coefficient of x^k; zero beyond the stored degree.
  T coeff(int k) const {
    if (k < 0 || k > degree()) return T(0);
    return coeffs_[static_cast<std::size_t>(k)];
  }

  /// Horner evaluation. The argument type may differ from the coefficient
  /// type as long as X supports x*y+c with c convertible to X.
  template <class X>
  X operator()(const X& x) const {
    X acc = X(coeffs_.back());
    for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * x + X(*it);
    return acc;
  }

  Polynomial derivative() const {
    if (degree() == 0) return Polynomial();
    std::vector<T> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * T(static_cast<int>(k));
    return Polynomial(std::move(d));
  }

  /// p(-x): negate odd coefficients.
  Polynomial reflected() const {
    std::vector<T> c = coeffs_;
    for (std::size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
    return Polynomial(std::move(c));
  }

  Polynomial operator-() const {
    std::vector<T> c = coeffs_;
    for (auto& e : c) e = -e;
    return Polynomial(std::move(c));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<T> c(std::max(a.coeffs_.size(), b.coeffs_.size()), T(0));
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) c[k] += a.coeffs_[k];
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[k] += b.coeffs_[k];
    return Polynomial(std::move(c));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial();
    std::vector<T> c(a.coeffs_.size() + b.coeffs_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(c));
  }

  friend Polynomial operator*(const T& s, const Polynomial& p) {
    std::vector<T> c = p.coeffs_;
    for (auto& e : c) e = s * e;
    return Polynomial(std::move(c));
  }

  friend Polynomial operator*(const Polynomial& p, const T& s) { return s * p; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  /// Euclidean division, valid over a field (T = Rational).
  static std::pair<Polynomial, Polynomial> divmod(const Polynomial& num, const Polynomial& den) {
    if (den.is_zero()) throw std::invalid_argument("polynomial division by zero");
    if (num.degree() < den.degree() || num.is_zero()) return {Polynomial(), num};
    std::vector<T> rem = num.coeffs_;
    std::vector<T> quo(static_cast<std::size_t>(num.degree() - den.degree()) + 1, T(0));
    const T& lead = den.coeffs_.back();
    for (int k = num.degree() - den.degree(); k >= 0; --k) {
      T q = rem[static_cast<std::size_t>(k + den.degree())] / lead;
      quo[static_cast<std::size_t>(k)] = q;
      if (q == T(0)) continue;
      for (int j = 0; j <= den.degree(); ++j)
        rem[static_cast<std::size_t>(k + j)] -= q * den.coeffs_[static_cast<std::size_t>(j)];
    }
    return {Polynomial(std::move(quo)), Polynomial(std::move(rem))};
  }

  /// Exact quotient; throws if the division leaves a remainder.
  static Polynomial exact_div(const Polynomial& num, const Polynomial& den) {
    auto [q, r] = divmod(num, den);
    if (!r.is_zero()) throw std::logic_error("polynomial division is not exact");
    return q;
  }

 private:
  void trim() {
    while (coeffs_.size() > 1 && coeffs_.back() == T(0)) coeffs_.pop_back();
  }

  std::vector<T> coeffs_;
};

using RationalPoly = Polynomial<Rational>;

/// Ascending real coefficients; the double-precision boundary type.
using RealPolynomial = Polynomial<double>;

inline RealPolynomial to_real(const RationalPoly& p) {
  std::vector<double> c(p.coeffs().size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = to_double(p.coeffs()[k]);
  return RealPolynomial(std::move(c));
}

}  // namespace ctg
