#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ctg/legendre.hpp"
#include "ctg/linalg.hpp"
#include "ctg/parallel.hpp"
#include "ctg/scheme.hpp"

namespace ctg {

struct TimeGrid {
  std::vector<double> nodes;

  TimeGrid() = default;

  explicit TimeGrid(std::vector<double> ns) : nodes(std::move(ns)) {
    if (nodes.size() < 2) throw std::invalid_argument("time grid needs at least two nodes");
    for (std::size_t n = 1; n < nodes.size(); ++n)
      if (!(nodes[n] > nodes[n - 1])) throw std::invalid_argument("time grid must be strictly increasing");
  }

  static TimeGrid uniform(double t_begin, double t_end, int intervals) {
    if (intervals < 1) throw std::invalid_argument("N >= 1 required");
    if (!(t_end > t_begin)) throw std::invalid_argument("empty time interval");
    std::vector<double> ns(static_cast<std::size_t>(intervals) + 1);
    for (int n = 0; n <= intervals; ++n)
      ns[static_cast<std::size_t>(n)] = t_begin + (t_end - t_begin) * (static_cast<double>(n) / intervals);
    ns.back() = t_end;
    return TimeGrid(std::move(ns));
  }

  int intervals() const { return static_cast<int>(nodes.size()) - 1; }
  double step(int n) const { return nodes[static_cast<std::size_t>(n + 1)] - nodes[static_cast<std::size_t>(n)]; }
};

using SourceFn = std::function<Vec(double)>;

/// Legendre modes R_0..R_{r-1} of the local L^2 projection of the source on
/// one interval.
struct SourceProjection {
  std::vector<Vec> modes;
};

/// R_j = ((2j+1)/tau) * int_I R(t) L~_j(t) dt by q-point Gauss quadrature,
/// exact for polynomial integrands of degree <= 2q-1.
inline SourceProjection project_source(const SourceFn& source, double t0, double t1, int r, int q) {
  if (q < r + 1) throw std::invalid_argument("project_source: q >= r+1 required");
  const GaussRule& rule = gauss_legendre(q);
  SourceProjection proj;
  proj.modes.resize(static_cast<std::size_t>(r));
  bool init = false;
  for (int i = 0; i < q; ++i) {
    const double xi = rule.nodes[static_cast<std::size_t>(i)];
    const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * xi;
    const Vec value = source(t);
    const std::vector<double> leg = legendre_values(r - 1, xi);
    if (!init) {
      for (auto& m : proj.modes) m = Vec::Zero(value.size());
      init = true;
    }
    for (int j = 0; j < r; ++j)
      proj.modes[static_cast<std::size_t>(j)] +=
          (0.5 * (2 * j + 1) * rule.weights[static_cast<std::size_t>(i)] * leg[static_cast<std::size_t>(j)]) * value;
  }
  return proj;
}

/// Right-hand-side blocks of the full CTG system: source blocks b_0..b_{r-1}
/// plus the nodal block b_r = Y(t_n). r0 keeps the first source mode for the
/// nodal update.
struct RhsBlocks {
  std::vector<Vec> b;
  Vec r0;

  const Vec& nodal() const { return b.back(); }
};

inline RhsBlocks assemble_rhs(const SourceProjection& proj, const Vec& yn, double tau, int r) {
  if (static_cast<int>(proj.modes.size()) != r) throw std::invalid_argument("assemble_rhs: expected r source modes");
  RhsBlocks rhs;
  rhs.b.resize(static_cast<std::size_t>(r) + 1);
  for (int k = 1; k <= r; ++k) {
    Vec bk = proj.modes[static_cast<std::size_t>(k - 1)] / (2.0 * k - 1.0);
    if (k <= r - 2) bk -= proj.modes[static_cast<std::size_t>(k + 1)] / (2.0 * k + 3.0);
    rhs.b[static_cast<std::size_t>(k - 1)] = (-0.5 * tau) * bk;
  }
  rhs.b[static_cast<std::size_t>(r)] = yn;
  rhs.r0 = proj.modes[0];
  return rhs;
}

namespace detail {

/// Sum of stage contributions sum_j w_j with conjugate-pair reduction:
/// only the representative (Im zeta < 0) of each pair is solved and its
/// contribution doubled in the real part. Stage solves can run in parallel;
/// the reduction is sequential in group order.
template <class StageRhs>
Vec stage_sum(const LinearOperator& op, const CtgScheme& scheme, double tau, const StageRhs& v_for,
              int threads) {
  const auto& groups = scheme.spectrum().pairs;
  std::vector<Vec> slot(groups.size());
  parallel_for(static_cast<int>(groups.size()), threads, [&](int g) {
    const auto& group = groups[static_cast<std::size_t>(g)];
    const int j = group.representative + 1;  // 1-based stage index
    const Complex zeta = scheme.spectrum().zeros[static_cast<std::size_t>(group.representative)];
    const CVec w = op.shifted_solve(tau, zeta, v_for(j));
    slot[static_cast<std::size_t>(g)] = group.partner < 0 ? Vec(w.real()) : Vec(2.0 * w.real());
  });
  Vec acc = Vec::Zero(op.dim());
  for (const Vec& s : slot) acc += s;
  return acc;
}

/// Nodal update kernel shared by the identity-mass and mass-matrix paths:
///   v_j = sum_k (-1)^k (phi_{k1}(-zeta_j)/P_r'(zeta_j)) (tau D) M^{-1} b_{k-1},
/// with the nodal block entering as M Y^n so that M^{-1} b_r = Y^n, then
///   Y^{n+1} = Y^n + sum_j w_j + tau M^{-1} R_0.
inline Vec nodal_step_impl(const LinearOperator& op, const CtgScheme& scheme, const RhsBlocks& rhs, double tau,
                           int threads) {
  const int r = scheme.order();
  if (static_cast<int>(rhs.b.size()) != r + 1) throw std::invalid_argument("rhs block count != r+1");

  std::vector<Vec> s(static_cast<std::size_t>(r) + 1);
  for (int k = 1; k <= r; ++k)
    s[static_cast<std::size_t>(k - 1)] = tau * op.apply_d(op.solve_mass(rhs.b[static_cast<std::size_t>(k - 1)]));
  s[static_cast<std::size_t>(r)] = tau * op.apply_d(rhs.nodal());

  auto v_for = [&](int j) {
    CVec v = CVec::Zero(op.dim());
    for (int k = 1; k <= r + 1; ++k) v += scheme.weight(1, k, j) * s[static_cast<std::size_t>(k - 1)].cast<Complex>();
    return v;
  };
  Vec y = rhs.nodal() + stage_sum(op, scheme, tau, v_for, threads);
  y += tau * op.solve_mass(rhs.r0);
  return y;
}

}  // namespace detail

/// One step of the nodal sweep (partial-fraction form). Requires an
/// identity-mass operator; mass-matrix systems go through
/// mass_matrix_nodal_step.
inline Vec nodal_step(const LinearOperator& op, const CtgScheme& scheme, const RhsBlocks& rhs, double tau,
                      int threads = 1) {
  if (op.has_mass()) throw std::invalid_argument("nodal_step expects identity mass; use mass_matrix_nodal_step");
  return detail::nodal_step_impl(op, scheme, rhs, tau, threads);
}

/// Nodal step for M Y' = D Y + R with SPD mass matrix (shifted solves use
/// tau D + zeta M). With M = I this coincides with nodal_step.
inline Vec mass_matrix_nodal_step(const LinearOperator& op, const CtgScheme& scheme, const RhsBlocks& rhs,
                                  double tau, int threads = 1) {
  return detail::nodal_step_impl(op, scheme, rhs, tau, threads);
}

/// All interval coefficients a_0..a_r from the partial-fraction solution
/// formula; the (i,j) solves are independent and run on the stage axis.
inline std::vector<Vec> interior_coefficients(const LinearOperator& op, const CtgScheme& scheme,
                                              const RhsBlocks& rhs, double tau, int threads = 1) {
  const int r = scheme.order();
  if (static_cast<int>(rhs.b.size()) != r + 1) throw std::invalid_argument("rhs block count != r+1");

  std::vector<Vec> c(static_cast<std::size_t>(r) + 1);
  for (int k = 1; k <= r; ++k) c[static_cast<std::size_t>(k - 1)] = rhs.b[static_cast<std::size_t>(k - 1)];
  c[static_cast<std::size_t>(r)] = op.apply_mass(rhs.nodal());

  const auto& groups = scheme.spectrum().pairs;
  const int tasks = (r + 1) * static_cast<int>(groups.size());
  std::vector<Vec> slot(static_cast<std::size_t>(tasks));
  parallel_for(tasks, threads, [&](int t) {
    const int i = t / static_cast<int>(groups.size()) + 1;
    const auto& group = groups[static_cast<std::size_t>(t % static_cast<int>(groups.size()))];
    const int j = group.representative + 1;
    const Complex zeta = scheme.spectrum().zeros[static_cast<std::size_t>(group.representative)];
    CVec v = CVec::Zero(op.dim());
    for (int k = 1; k <= r + 1; ++k) v += scheme.weight(i, k, j) * c[static_cast<std::size_t>(k - 1)].cast<Complex>();
    const CVec w = op.shifted_solve(tau, zeta, v);
    slot[static_cast<std::size_t>(t)] = group.partner < 0 ? Vec(w.real()) : Vec(2.0 * w.real());
  });

  std::vector<Vec> a(static_cast<std::size_t>(r) + 1);
  for (int i = 1; i <= r + 1; ++i) {
    Vec acc = Vec::Zero(op.dim());
    for (std::size_t g = 0; g < groups.size(); ++g)
      acc += slot[static_cast<std::size_t>(i - 1) * groups.size() + g];
    if (i == r + 1) acc += (r % 2 == 0 ? 1.0 : -1.0) * rhs.nodal();
    a[static_cast<std::size_t>(i - 1)] = acc;
  }
  return a;
}

/// Interior coefficients a_1..a_r for dissipative systems through the block
/// tridiagonal solve of the reduced system, given a_0 from the nodal sweep.
/// Pivot breakdown propagates as PivotBreakdown; callers reroute to
/// interior_coefficients.
inline std::vector<Vec> interior_coefficients_dissipative(const LinearOperator& op, const RhsBlocks& rhs,
                                                          const Vec& a0, double tau) {
  if (op.has_mass())
    throw std::invalid_argument("block tridiagonal interior solve expects identity mass");
  const int r = static_cast<int>(rhs.b.size()) - 1;
  BlockTridiagonalSystem sys;
  sys.order = r;
  sys.tau = tau;
  sys.rhs.resize(static_cast<std::size_t>(r));
  sys.rhs[0] = rhs.b[0] - 0.5 * tau * op.apply_d(a0);
  for (int k = 2; k <= r; ++k) sys.rhs[static_cast<std::size_t>(k - 1)] = rhs.b[static_cast<std::size_t>(k - 1)];
  return block_tridiagonal_solve(sys, op);
}

/// Nodal step by the generalized Pade form,
///   Y^{n+1} = P_r(tau D)/P_r(-tau D) Y^n
///             + sum_k (-1)^{k+1} (tau D) phi_{k1}(tau D)/P_r(-tau D) b_{k-1}
///             + tau R_0,
/// with matrix polynomials evaluated by Horner on the dense D.
inline Vec nodal_step_pade_form(const LinearOperator& op, const CtgScheme& scheme, const RhsBlocks& rhs,
                                double tau) {
  if (op.has_mass()) throw std::invalid_argument("pade-form step expects identity mass");
  const Mat* dptr = op.dense_d();
  if (dptr == nullptr) throw std::invalid_argument("pade-form step requires a dense operator");
  const int r = scheme.order();
  const Mat taud = tau * (*dptr);

  auto poly_apply = [&](const RealPolynomial& p, const Vec& x) {
    Vec acc = p.coeff(p.degree()) * x;
    for (int k = p.degree() - 1; k >= 0; --k) acc = taud * acc + p.coeff(k) * x;
    return acc;
  };

  const RealPolynomial pr = pade_numerator(r);
  Vec num = poly_apply(pr, rhs.nodal());
  for (int k = 1; k <= r; ++k) {
    Vec u = taud * poly_apply(scheme.table().minor(k, 1), rhs.b[static_cast<std::size_t>(k - 1)]);
    num += (k % 2 == 1 ? 1.0 : -1.0) * u;
  }

  Mat denom = pr.coeff(r) * Mat::Identity(taud.rows(), taud.cols());
  for (int k = r - 1; k >= 0; --k)
    denom = denom * (-taud) + pr.coeff(k) * Mat::Identity(taud.rows(), taud.cols());
  Eigen::PartialPivLU<Mat> lu(denom);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) throw SolverError("P_r(-tau D) singular to working precision", rc);
  return lu.solve(num) + tau * rhs.r0;
}

enum class StepMode { spectral, dissipative, pade_form };

struct IntegrateOptions {
  StepMode mode = StepMode::spectral;
  bool want_interior = false;
  int threads = 1;      // stage / interval parallel axes
  int quad_points = 0;  // 0: max(r+2, 6)
};

/// Piecewise-polynomial solution: nodal values always, interval Legendre
/// coefficients when interior reconstruction was requested. Immutable once
/// returned.
struct CtgTrajectory {
  TimeGrid grid;
  int order = 0;
  int dim = 0;
  std::vector<Vec> nodal;                // N+1 values
  std::vector<std::vector<Vec>> coeffs;  // N x (r+1) when has_interior
  bool has_interior = false;

  /// Value of Y_r at t; intervals are right-closed at nodes.
  Vec evaluate(double t) const {
    if (!has_interior) throw std::logic_error("trajectory has no interior coefficients");
    if (t < grid.nodes.front() || t > grid.nodes.back())
      throw std::invalid_argument("evaluation time outside the grid");
    auto it = std::lower_bound(grid.nodes.begin(), grid.nodes.end(), t);
    int n = static_cast<int>(it - grid.nodes.begin()) - 1;
    if (n < 0) n = 0;
    const double t0 = grid.nodes[static_cast<std::size_t>(n)];
    const double t1 = grid.nodes[static_cast<std::size_t>(n) + 1];
    const std::vector<double> leg = shifted_legendre_values(order, t, t0, t1);
    Vec y = Vec::Zero(dim);
    for (int j = 0; j <= order; ++j)
      y += leg[static_cast<std::size_t>(j)] * coeffs[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)];
    return y;
  }
};

inline Vec evaluate(const CtgTrajectory& traj, double t) { return traj.evaluate(t); }

/// || Y_r ||_{L^2(t_0, t_N)} by per-interval Gauss quadrature of the stored
/// polynomial; exact for the trajectory when q > r.
inline double trajectory_l2_norm(const CtgTrajectory& traj, int q = 0) {
  if (!traj.has_interior) throw std::logic_error("trajectory has no interior coefficients");
  if (q <= 0) q = traj.order + 1;
  const GaussRule& rule = gauss_legendre(q);
  double acc = 0;
  for (int n = 0; n < traj.grid.intervals(); ++n) {
    const double t0 = traj.grid.nodes[static_cast<std::size_t>(n)];
    const double t1 = traj.grid.nodes[static_cast<std::size_t>(n) + 1];
    for (int i = 0; i < q; ++i) {
      const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * rule.nodes[static_cast<std::size_t>(i)];
      acc += 0.5 * (t1 - t0) * rule.weights[static_cast<std::size_t>(i)] * traj.evaluate(t).squaredNorm();
    }
  }
  return std::sqrt(acc);
}

/// Driver: sequential nodal sweep over the intervals, then (optionally)
/// parallel-in-time interior reconstruction. The dissipative mode falls back
/// to the partial-fraction reconstruction when a pivot block breaks down.
inline CtgTrajectory integrate(const LinearOperator& op, int r, const TimeGrid& grid, const Vec& y0,
                               const SourceFn& source, const IntegrateOptions& opts = {}) {
  check_order(r);
  if (y0.size() != op.dim()) throw std::invalid_argument("initial value dimension mismatch");
  const int intervals = grid.intervals();
  const int q = opts.quad_points > 0 ? opts.quad_points : std::max(r + 2, 6);
  if (q < r + 1) throw std::invalid_argument("quadrature must use at least r+1 points");
  if (op.has_mass() && opts.mode != StepMode::spectral)
    throw std::invalid_argument("mass-matrix systems support the spectral mode only");

  CtgScheme scheme(r);
  CtgTrajectory traj;
  traj.grid = grid;
  traj.order = r;
  traj.dim = op.dim();
  traj.nodal.resize(static_cast<std::size_t>(intervals) + 1);
  traj.nodal[0] = y0;

  SourceProjection zero_proj;
  zero_proj.modes.assign(static_cast<std::size_t>(r), Vec::Zero(op.dim()));

  std::vector<RhsBlocks> rhs_store(static_cast<std::size_t>(intervals));
  for (int n = 0; n < intervals; ++n) {
    const double tau = grid.step(n);
    SourceProjection proj =
        source ? project_source(source, grid.nodes[static_cast<std::size_t>(n)],
                                grid.nodes[static_cast<std::size_t>(n) + 1], r, q)
               : zero_proj;
    RhsBlocks rhs = assemble_rhs(proj, traj.nodal[static_cast<std::size_t>(n)], tau, r);
    Vec next;
    if (opts.mode == StepMode::pade_form)
      next = nodal_step_pade_form(op, scheme, rhs, tau);
    else if (op.has_mass())
      next = mass_matrix_nodal_step(op, scheme, rhs, tau, opts.threads);
    else
      next = nodal_step(op, scheme, rhs, tau, opts.threads);
    traj.nodal[static_cast<std::size_t>(n) + 1] = std::move(next);
    rhs_store[static_cast<std::size_t>(n)] = std::move(rhs);
  }

  if (opts.want_interior) {
    traj.coeffs.resize(static_cast<std::size_t>(intervals));

    bool use_block = opts.mode == StepMode::dissipative && !op.has_mass();
    std::map<double, std::shared_ptr<BlockTridiagonalLU>> block_lus;
    if (use_block) {
      try {
        for (int n = 0; n < intervals; ++n) {
          const double tau = grid.step(n);
          if (!block_lus.count(tau))
            block_lus[tau] = std::make_shared<BlockTridiagonalLU>(*op.dense_d(), tau, r);
        }
      } catch (const PivotBreakdown&) {
        use_block = false;  // reroute the whole reconstruction
      }
    }

    parallel_for(intervals, opts.threads, [&](int n) {
      const double tau = grid.step(n);
      const RhsBlocks& rhs = rhs_store[static_cast<std::size_t>(n)];
      if (use_block) {
        // a_0 from the solution formula (i = 1), then the chasing solve.
        std::vector<Vec> c(static_cast<std::size_t>(r) + 1);
        for (int k = 0; k <= r; ++k) c[static_cast<std::size_t>(k)] = rhs.b[static_cast<std::size_t>(k)];
        auto v_for = [&](int j) {
          CVec v = CVec::Zero(op.dim());
          for (int k = 1; k <= r + 1; ++k)
            v += scheme.weight(1, k, j) * c[static_cast<std::size_t>(k - 1)].cast<Complex>();
          return v;
        };
        Vec a0 = detail::stage_sum(op, scheme, tau, v_for, 1);
        std::vector<Vec> brhs(static_cast<std::size_t>(r));
        brhs[0] = rhs.b[0] - 0.5 * tau * op.apply_d(a0);
        for (int k = 2; k <= r; ++k) brhs[static_cast<std::size_t>(k - 1)] = rhs.b[static_cast<std::size_t>(k - 1)];
        std::vector<Vec> rest = block_lus.at(tau)->solve(brhs);
        std::vector<Vec> a(static_cast<std::size_t>(r) + 1);
        a[0] = std::move(a0);
        for (int k = 1; k <= r; ++k) a[static_cast<std::size_t>(k)] = std::move(rest[static_cast<std::size_t>(k - 1)]);
        traj.coeffs[static_cast<std::size_t>(n)] = std::move(a);
      } else {
        traj.coeffs[static_cast<std::size_t>(n)] = interior_coefficients(op, scheme, rhs, tau, 1);
      }
    });
    traj.has_interior = true;
  }
  return traj;
}

}  // namespace ctg
