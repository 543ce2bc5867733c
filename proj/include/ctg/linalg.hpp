#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctg/pade.hpp"
#include "ctg/stiffness.hpp"

namespace ctg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double rcond) : std::runtime_error(what), rcond_(rcond) {}
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

/// Fallback signal of the block-tridiagonal path: a pivot block became too
/// ill-conditioned, reroute through the partial-fraction reconstruction.
class PivotBreakdown : public std::runtime_error {
 public:
  PivotBreakdown(int block, double rcond)
      : std::runtime_error("block pivot " + std::to_string(block) + " ill-conditioned (rcond " +
                           std::to_string(rcond) + ")"),
        block_(block),
        rcond_(rcond) {}
  int block() const { return block_; }
  double rcond() const { return rcond_; }

 private:
  int block_;
  double rcond_;
};

inline constexpr double kPivotRcondFloor = 1e-12;  // condition estimate 1e12

/// System operator for Y' = D Y + R, or M Y' = D Y + R with an SPD mass
/// matrix. Implementations must keep apply/solve callable concurrently once
/// constructed; factorization caches sit behind internal synchronization.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual int dim() const = 0;
  virtual Vec apply_d(const Vec& x) const = 0;
  virtual Vec apply_mass(const Vec& x) const { return x; }
  virtual Vec solve_mass(const Vec& x) const { return x; }
  virtual bool has_mass() const { return false; }

  /// w with (tau*D + zeta*M) w = v; M = I unless has_mass().
  virtual CVec shifted_solve(double tau, Complex zeta, const CVec& v) const = 0;

  virtual const Mat* dense_d() const { return nullptr; }
  virtual const Mat* dense_mass() const { return nullptr; }
};

/// LU solve of (tau*D + zeta*M) w = v with a singularity guard.
inline CVec dense_shifted_solve(const Mat& D, const Mat& M, double tau, Complex zeta, const CVec& v) {
  CMat A = tau * D.cast<Complex>() + zeta * M.cast<Complex>();
  Eigen::PartialPivLU<CMat> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 1e-14))
    throw SolverError("shifted system singular to working precision", rc);
  return lu.solve(v);
}

inline CVec dense_shifted_solve(const Mat& D, double tau, Complex zeta, const CVec& v) {
  return dense_shifted_solve(D, Mat(Mat::Identity(D.rows(), D.cols())), tau, zeta, v);
}

enum class RealSolveMode { direct, iterative };

namespace detail {

/// Minimal full-orthogonalization GMRES, preconditioned from the left.
/// Only used as the iterative reference for the 2Mx2M real form, where the
/// preconditioned operator has condition number <= sqrt(2).
template <class ApplyA, class ApplyP>
Vec gmres(const ApplyA& A, const ApplyP& Pinv, const Vec& b, double tol, int max_iters) {
  const auto n = b.size();
  Vec x = Vec::Zero(n);
  Vec r = Pinv(b);
  const double beta0 = r.norm();
  if (beta0 == 0.0) return x;

  std::vector<Vec> basis;
  basis.push_back(r / beta0);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(max_iters + 1, max_iters);
  Vec g = Vec::Zero(max_iters + 1);
  g(0) = beta0;
  std::vector<double> cs(max_iters), sn(max_iters);

  int k = 0;
  for (; k < max_iters; ++k) {
    Vec w = Pinv(A(basis[static_cast<std::size_t>(k)]));
    for (int i = 0; i <= k; ++i) {
      h(i, k) = w.dot(basis[static_cast<std::size_t>(i)]);
      w -= h(i, k) * basis[static_cast<std::size_t>(i)];
    }
    h(k + 1, k) = w.norm();
    if (h(k + 1, k) > 0) basis.push_back(w / h(k + 1, k));

    for (int i = 0; i < k; ++i) {
      const double t = cs[static_cast<std::size_t>(i)] * h(i, k) + sn[static_cast<std::size_t>(i)] * h(i + 1, k);
      h(i + 1, k) = -sn[static_cast<std::size_t>(i)] * h(i, k) + cs[static_cast<std::size_t>(i)] * h(i + 1, k);
      h(i, k) = t;
    }
    const double denom = std::hypot(h(k, k), h(k + 1, k));
    cs[static_cast<std::size_t>(k)] = h(k, k) / denom;
    sn[static_cast<std::size_t>(k)] = h(k + 1, k) / denom;
    h(k, k) = denom;
    h(k + 1, k) = 0;
    g(k + 1) = -sn[static_cast<std::size_t>(k)] * g(k);
    g(k) = cs[static_cast<std::size_t>(k)] * g(k);
    if (std::abs(g(k + 1)) <= tol * beta0) {
      ++k;
      break;
    }
    if (h(k + 1, k) == 0 && basis.size() == static_cast<std::size_t>(k) + 1) {
      ++k;
      break;
    }
  }

  Vec y = Vec::Zero(k);
  for (int i = k - 1; i >= 0; --i) {
    double s = g(i);
    for (int j = i + 1; j < k; ++j) s -= h(i, j) * y(j);
    y(i) = s / h(i, i);
  }
  for (int i = 0; i < k; ++i) x += y(i) * basis[static_cast<std::size_t>(i)];
  return x;
}

}  // namespace detail

/// Complex shifted solve via the equivalent 2Mx2M real system
///   [ tau*D + a*I    -b*I        ] [w1]   [ v1]
///   [    -b*I     -(tau*D + a*I) ] [w2] = [-v2],   zeta = a + i b, b < 0.
/// The iterative mode runs GMRES preconditioned by
/// diag(tau*D + (a+b) I, tau*D + (a+b) I).
inline CVec real_equivalent_solve(const Mat& D, double tau, Complex zeta, const CVec& v,
                                  RealSolveMode mode = RealSolveMode::direct) {
  if (!(zeta.imag() < 0))
    throw std::invalid_argument("real_equivalent_solve expects the pair representative with Im(zeta) < 0");
  const auto m = D.rows();
  const double a = zeta.real();
  const double b = zeta.imag();
  Mat S = tau * D + a * Mat::Identity(m, m);

  Vec rhs(2 * m);
  rhs.head(m) = v.real();
  rhs.tail(m) = -v.imag();

  Vec w;
  if (mode == RealSolveMode::direct) {
    Mat A(2 * m, 2 * m);
    A.topLeftCorner(m, m) = S;
    A.topRightCorner(m, m) = -b * Mat::Identity(m, m);
    A.bottomLeftCorner(m, m) = -b * Mat::Identity(m, m);
    A.bottomRightCorner(m, m) = -S;
    Eigen::PartialPivLU<Mat> lu(A);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) throw SolverError("real equivalent system singular to working precision", rc);
    w = lu.solve(rhs);
  } else {
    Mat F = tau * D + (a + b) * Mat::Identity(m, m);
    Eigen::PartialPivLU<Mat> flu(F);
    const double rc = flu.rcond();
    if (!(rc > 1e-14)) throw SolverError("preconditioner singular to working precision", rc);
    auto apply = [&](const Vec& x) {
      Vec y(2 * m);
      y.head(m) = S * x.head(m) - b * x.tail(m);
      y.tail(m) = -b * x.head(m) - S * x.tail(m);
      return y;
    };
    auto prec = [&](const Vec& x) {
      Vec y(2 * m);
      y.head(m) = flu.solve(x.head(m));
      y.tail(m) = flu.solve(x.tail(m));
      return y;
    };
    w = detail::gmres(apply, prec, rhs, 1e-13, static_cast<int>(2 * m) + 20);
  }

  CVec out(m);
  out.real() = w.head(m);
  out.imag() = w.tail(m);
  return out;
}

/// Dense operator with per-(tau, zeta) factorization reuse. Concurrent
/// shifted_solve calls with distinct shifts block each other only for the
/// duration of a cache-map lookup.
class DenseOperator : public LinearOperator {
 public:
  explicit DenseOperator(Mat D) : d_(std::move(D)) {
    if (d_.rows() != d_.cols()) throw std::invalid_argument("D must be square");
  }

  DenseOperator(Mat D, Mat M) : d_(std::move(D)), mass_(std::move(M)), has_mass_(true) {
    if (d_.rows() != d_.cols() || mass_.rows() != mass_.cols() || mass_.rows() != d_.rows())
      throw std::invalid_argument("dimension mismatch between D and M");
    if ((mass_ - mass_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * mass_.cwiseAbs().maxCoeff())
      throw std::invalid_argument("mass matrix must be symmetric positive definite");
    mass_llt_.compute(mass_);
    if (mass_llt_.info() != Eigen::Success)
      throw std::invalid_argument("mass matrix must be symmetric positive definite");
  }

  int dim() const override { return static_cast<int>(d_.rows()); }
  Vec apply_d(const Vec& x) const override { return d_ * x; }
  Vec apply_mass(const Vec& x) const override { return has_mass_ ? Vec(mass_ * x) : x; }
  Vec solve_mass(const Vec& x) const override { return has_mass_ ? Vec(mass_llt_.solve(x)) : x; }
  bool has_mass() const override { return has_mass_; }
  const Mat* dense_d() const override { return &d_; }
  const Mat* dense_mass() const override { return has_mass_ ? &mass_ : nullptr; }

  CVec shifted_solve(double tau, Complex zeta, const CVec& v) const override {
    return factorization(tau, zeta).lu.solve(v);
  }

  /// Largest eigenvalue of D + D^T, the semi-negative-definiteness certificate.
  double max_symmetric_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(d_ + d_.transpose());
    return es.eigenvalues().maxCoeff();
  }

 private:
  struct Entry {
    std::once_flag once;
    Eigen::PartialPivLU<CMat> lu;
  };

  Entry& factorization(double tau, Complex zeta) const {
    const auto key = std::make_tuple(tau, zeta.real(), zeta.imag());
    std::shared_ptr<Entry> e;
    {
      std::lock_guard<std::mutex> lock(cache_mutex_);
      auto& slot = cache_[key];
      if (!slot) slot = std::make_shared<Entry>();
      e = slot;
    }
    std::call_once(e->once, [&] {
      CMat A = tau * d_.cast<Complex>() + (has_mass_ ? CMat(zeta * mass_.cast<Complex>())
                                                     : CMat(zeta * CMat::Identity(d_.rows(), d_.cols())));
      e->lu.compute(A);
      const double rc = e->lu.rcond();
      if (!(rc > 1e-14)) throw SolverError("shifted system singular to working precision", rc);
    });
    return *e;
  }

  Mat d_;
  Mat mass_;
  bool has_mass_ = false;
  Eigen::LLT<Mat> mass_llt_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::tuple<double, double, double>, std::shared_ptr<Entry>> cache_;
};

/// The interior system of the dissipative path: r block rows with diagonal
/// -I, subdiagonal a_k(tau D) and superdiagonal b_k(tau D).
struct BlockTridiagonalSystem {
  int order = 0;    // r
  double tau = 0;
  std::vector<Vec> rhs;  // b~_1 .. b~_r
};

/// Factorized block LU ("chasing") for the dissipative interior system;
/// pivot factorizations are reused across right-hand sides.
class BlockTridiagonalLU {
 public:
  BlockTridiagonalLU(const Mat& D, double tau, int r) : r_(r), m_(static_cast<int>(D.rows())) {
    check_order(r);
    Mat taud = tau * D;
    sub_.resize(static_cast<std::size_t>(r) + 1);
    sup_.resize(static_cast<std::size_t>(r) + 1);
    for (int k = 2; k <= r; ++k) sub_[static_cast<std::size_t>(k)] = taud / (2.0 * (2 * k - 1));
    for (int k = 1; k <= r - 2; ++k) sup_[static_cast<std::size_t>(k)] = -taud / (2.0 * (2 * k + 3));

    // Forward block elimination: Delta_1 = -I, Delta_k = -I - L_k * sup_{k-1}.
    pivots_.resize(static_cast<std::size_t>(r) + 1);
    lower_.resize(static_cast<std::size_t>(r) + 1);
    Mat delta = -Mat::Identity(m_, m_);
    factor_pivot(1, delta);
    for (int k = 2; k <= r; ++k) {
      // L_k = A_{k,k-1} Delta_{k-1}^{-1}
      lower_[static_cast<std::size_t>(k)] =
          sub_[static_cast<std::size_t>(k)] * pivots_[static_cast<std::size_t>(k - 1)].inverse();
      delta = -Mat::Identity(m_, m_);
      if (k - 1 <= r - 2) delta -= lower_[static_cast<std::size_t>(k)] * sup_[static_cast<std::size_t>(k - 1)];
      factor_pivot(k, delta);
    }
  }

  /// Solve for a_1..a_r given b~_1..b~_r.
  std::vector<Vec> solve(const std::vector<Vec>& rhs) const {
    if (static_cast<int>(rhs.size()) != r_) throw std::invalid_argument("block rhs count != r");
    std::vector<Vec> y(rhs.begin(), rhs.end());
    for (int k = 2; k <= r_; ++k)
      y[static_cast<std::size_t>(k - 1)] -= lower_[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k - 2)];
    std::vector<Vec> x(static_cast<std::size_t>(r_));
    x[static_cast<std::size_t>(r_ - 1)] = pivots_[static_cast<std::size_t>(r_)].solve(y[static_cast<std::size_t>(r_ - 1)]);
    for (int k = r_ - 1; k >= 1; --k) {
      Vec t = y[static_cast<std::size_t>(k - 1)];
      if (k <= r_ - 2) t -= sup_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
      x[static_cast<std::size_t>(k - 1)] = pivots_[static_cast<std::size_t>(k)].solve(t);
    }
    return x;
  }

 private:
  void factor_pivot(int k, const Mat& delta) {
    pivots_[static_cast<std::size_t>(k)].compute(delta);
    const double rc = pivots_[static_cast<std::size_t>(k)].rcond();
    if (!(rc > kPivotRcondFloor)) throw PivotBreakdown(k, rc);
  }

  int r_;
  int m_;
  std::vector<Mat> sub_, sup_;
  std::vector<Mat> lower_;
  std::vector<Eigen::PartialPivLU<Mat>> pivots_;
};

/// One-shot chasing solve of the block tridiagonal system. The backend must
/// expose a dense D; pivot breakdown propagates as PivotBreakdown.
inline std::vector<Vec> block_tridiagonal_solve(const BlockTridiagonalSystem& sys, const LinearOperator& backend) {
  const Mat* D = backend.dense_d();
  if (D == nullptr) throw std::invalid_argument("block_tridiagonal_solve requires a dense operator");
  if (static_cast<int>(sys.rhs.size()) != sys.order) throw std::invalid_argument("rhs block count != r");
  for (const Vec& b : sys.rhs)
    if (b.size() != D->rows()) throw std::invalid_argument("rhs block dimension mismatch");
  return BlockTridiagonalLU(*D, sys.tau, sys.order).solve(sys.rhs);
}

/// Assemble E_{r+1}(tau D) blockwise and solve the full (r+1)M system by
/// dense LU. The master oracle every decoupled algorithm is tested against.
inline std::vector<Vec> dense_full_system_solve(const Mat& D, double tau, const std::vector<Vec>& B) {
  const int r = static_cast<int>(B.size()) - 1;
  check_order(r);
  const auto m = D.rows();
  if ((r + 1) * m > 4000) throw std::invalid_argument("dense_full_system_solve: system too large for the oracle");
  StiffnessSymbol sym(r);

  Mat A = Mat::Zero((r + 1) * m, (r + 1) * m);
  for (int k = 1; k <= r + 1; ++k)
    for (int i = 1; i <= r + 1; ++i) {
      const RationalPoly& e = sym.entry(k, i);
      if (e.is_zero()) continue;
      Mat block = to_double(e.coeff(0)) * Mat::Identity(m, m);
      if (e.degree() >= 1) block += to_double(e.coeff(1)) * tau * D;
      A.block((k - 1) * m, (i - 1) * m, m, m) = block;
    }

  Vec rhs((r + 1) * m);
  for (int k = 0; k <= r; ++k) {
    if (B[static_cast<std::size_t>(k)].size() != m) throw std::invalid_argument("rhs block dimension mismatch");
    rhs.segment(k * m, m) = B[static_cast<std::size_t>(k)];
  }

  Eigen::PartialPivLU<Mat> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) throw SolverError("full CTG system singular to working precision", rc);
  Vec x = lu.solve(rhs);

  std::vector<Vec> out(static_cast<std::size_t>(r) + 1);
  for (int k = 0; k <= r; ++k) out[static_cast<std::size_t>(k)] = x.segment(k * m, m);
  return out;
}

}  // namespace ctg
