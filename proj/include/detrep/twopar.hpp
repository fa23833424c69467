#pragma once

// Bivariate systems p(x,y) = q(x,y) = 0 through the two-parameter eigenvalue
// problem (A1 + x B1 + y C1) u = 0, (A2 + x B2 + y C2) v = 0 and its operator
// determinants Delta_0, Delta_1, Delta_2.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "detrep/detrep.hpp"
#include "detrep/error.hpp"
#include "detrep/polycore.hpp"

namespace detrep {

/// Kronecker product; entry ((i,k),(j,l)) at row i*m + k, column j*m + l
/// where m is the size of b.
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct TwoParProblem {
  int n1 = 0, n2 = 0;
  Eigen::MatrixXcd A1, B1, C1;  ///< det(A1 + x B1 + y C1) = p(x, y)
  Eigen::MatrixXcd A2, B2, C2;  ///< det(A2 + x B2 + y C2) = q(x, y)
  Eigen::MatrixXcd D0, D1, D2;
  AffinePoly p, q;  ///< used for polishing; may be left empty
};

/// Delta_0 = B1 (x) C2 - C1 (x) B2, Delta_1 = C1 (x) A2 - A1 (x) C2,
/// Delta_2 = A1 (x) B2 - B1 (x) A2.
inline TwoParProblem make_problem(const Eigen::MatrixXcd& A1, const Eigen::MatrixXcd& B1,
                                  const Eigen::MatrixXcd& C1, const Eigen::MatrixXcd& A2,
                                  const Eigen::MatrixXcd& B2, const Eigen::MatrixXcd& C2) {
  if (A1.rows() != A1.cols() || B1.rows() != A1.rows() || C1.rows() != A1.rows() ||
      A2.rows() != A2.cols() || B2.rows() != A2.rows() || C2.rows() != A2.rows())
    throw Error(Errc::DimensionMismatch, "affine triples must be square and of equal size");
  TwoParProblem pr;
  pr.n1 = static_cast<int>(A1.rows());
  pr.n2 = static_cast<int>(A2.rows());
  pr.A1 = A1; pr.B1 = B1; pr.C1 = C1;
  pr.A2 = A2; pr.B2 = B2; pr.C2 = C2;
  pr.D0 = kron(B1, C2) - kron(C1, B2);
  pr.D1 = kron(C1, A2) - kron(A1, C2);
  pr.D2 = kron(A1, B2) - kron(B1, A2);
  return pr;
}

inline TwoParProblem build_deltas(const DetRep& rep1, const DetRep& rep2) {
  const auto a = rep1.affine();
  const auto b = rep2.affine();
  TwoParProblem pr = make_problem(a.A1, a.B1, a.C1, b.A1, b.B1, b.C1);
  pr.p = dehomogenize(rep1.source);
  pr.q = dehomogenize(rep2.source);
  return pr;
}

enum class RootFlag { Simple, Clustered, Unreliable };

constexpr std::string_view to_string(RootFlag f) {
  switch (f) {
    case RootFlag::Simple: return "simple";
    case RootFlag::Clustered: return "clustered";
    case RootFlag::Unreliable: return "unreliable";
  }
  return "?";
}

struct Root {
  cplx x, y;
  double res_p = 0.0, res_q = 0.0;  ///< |p(x,y)|, |q(x,y)|
  double rel_res = 0.0;             ///< max of |p|/sum|p_ij||x|^i|y|^j and the same for q
  double cond = 0.0;                ///< ||J^-1||_2, infinite when J is singular
  RootFlag flag = RootFlag::Simple;
};

struct PhaseTimes {
  double build_ms = 0.0, assemble_ms = 0.0, eigensolve_ms = 0.0, polish_ms = 0.0;
  double total() const { return build_ms + assemble_ms + eigensolve_ms + polish_ms; }
};

struct RootSet {
  std::vector<Root> roots;
  int dropped = 0;  ///< eigenvalues rejected as spurious
  PhaseTimes times;
};

struct SolveOptions {
  BuildOptions build;
  double delta0_tol = 1e-10;   ///< sigma_min(Delta_0) <= delta0_tol * sigma_max is singular
  double cluster_tol = 1e-6;   ///< relative eigenvalue distance that counts as a cluster
  int newton_steps = 2;
  double spurious_tol = 1e-4;  ///< relative residual above which a root is dropped
  double singular_jacobian = 1e-14;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

inline Eigen::Matrix2cd jacobian(const AffinePoly& p, const AffinePoly& q, cplx x, cplx y) {
  const auto [px, py] = p.gradient(x, y);
  const auto [qx, qy] = q.gradient(x, y);
  Eigen::Matrix2cd J;
  J << px, py, qx, qy;
  return J;
}

inline double rel_residual(const AffinePoly& f, cplx x, cplx y) {
  const double mag = f.magnitude(x, y);
  const double r = std::abs(f.evaluate(x, y));
  return mag > 0.0 ? r / mag : r;
}

inline double root_rel_residual(const AffinePoly& p, const AffinePoly& q, cplx x, cplx y) {
  return std::max(rel_residual(p, x, y), rel_residual(q, x, y));
}

// Newton on (p, q); a step that does not decrease the residual is halved up
// to four times and otherwise skipped.
inline void polish(const AffinePoly& p, const AffinePoly& q, cplx& x, cplx& y, int steps) {
  auto res = [&](cplx a, cplx b) { return std::max(std::abs(p.evaluate(a, b)), std::abs(q.evaluate(a, b))); };
  double r0 = res(x, y);
  for (int s = 0; s < steps && r0 > 0.0; ++s) {
    const Eigen::Matrix2cd J = jacobian(p, q, x, y);
    const Eigen::Vector2cd f(p.evaluate(x, y), q.evaluate(x, y));
    const Eigen::Vector2cd d = J.fullPivLu().solve(f);
    if (!d.allFinite()) return;
    double lambda = 1.0;
    bool moved = false;
    for (int h = 0; h < 5; ++h, lambda *= 0.5) {
      const cplx xn = x - lambda * d(0), yn = y - lambda * d(1);
      const double r1 = res(xn, yn);
      if (r1 < r0) {
        x = xn;
        y = yn;
        r0 = r1;
        moved = true;
        break;
      }
    }
    if (!moved) return;
  }
}

// Orthonormal basis of the generalized eigenspace of M for a cluster of k
// eigenvalues centred at c: the k smallest right singular vectors of
// (M - cI)^k.
inline Eigen::MatrixXcd cluster_basis(const Eigen::MatrixXcd& M, cplx c, int k) {
  const Eigen::Index N = M.rows();
  const Eigen::MatrixXcd S = M - c * Eigen::MatrixXcd::Identity(N, N);
  Eigen::MatrixXcd P = S;
  for (int j = 1; j < k; ++j) P = P * S;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(k);
}

}  // namespace detail

/// Roots of the two-parameter problem.
///
/// x values are the eigenvalues of Delta_0^-1 Delta_1 (computed from an LU
/// factorization of Delta_0). For an isolated eigenvalue with eigenvector w,
/// y = w* Delta_0^-1 Delta_2 w / w* w. Eigenvalues closer than
/// cluster_tol * max(1, max|x|) form a cluster; both operators are
/// restricted to the cluster's invariant subspace and (x, y) pairs are read
/// off the eigenvectors of the restricted Delta_0^-1 Delta_2. When p and q
/// are present the roots are polished by damped Newton steps, residuals and
/// ||J^-1|| are recorded and spurious roots dropped.
inline RootSet solve_two_param(const TwoParProblem& pr, const SolveOptions& opts = {}) {
  using detail::Clock;
  RootSet out;
  auto t0 = Clock::now();
  const Eigen::Index N = pr.D0.rows();
  if (N == 0) return out;

  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(pr.D0).singularValues();
  if (!(sv(N - 1) > opts.delta0_tol * sv(0)))
    throw Error(Errc::SingularDelta0,
                "Delta_0 is numerically singular (sigma_min/sigma_max = " +
                    std::to_string(sv(0) > 0.0 ? sv(N - 1) / sv(0) : 0.0) +
                    "): the two-parameter problem is singular, e.g. the curves share a component; "
                    "staircase-type methods for singular problems are out of scope");

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(pr.D0);
  const Eigen::MatrixXcd M1 = lu.solve(pr.D1);
  const Eigen::MatrixXcd M2 = lu.solve(pr.D2);
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M1, true);
  if (es.info() != Eigen::Success)
    throw Error(Errc::ConstructionFailed, "eigenvalue iteration did not converge");
  const Eigen::VectorXcd lam = es.eigenvalues();

  double scale = 1.0;
  for (Eigen::Index i = 0; i < N; ++i) scale = std::max(scale, std::abs(lam(i)));
  const double ctol = opts.cluster_tol * scale;

  // Single-linkage clusters over the eigenvalues.
  std::vector<int> group(static_cast<std::size_t>(N), -1);
  int ngroups = 0;
  for (Eigen::Index i = 0; i < N; ++i) {
    if (group[i] >= 0) continue;
    group[i] = ngroups;
    std::vector<Eigen::Index> stack{i};
    while (!stack.empty()) {
      const Eigen::Index a = stack.back();
      stack.pop_back();
      for (Eigen::Index b = 0; b < N; ++b)
        if (group[b] < 0 && std::abs(lam(a) - lam(b)) < ctol) {
          group[b] = ngroups;
          stack.push_back(b);
        }
    }
    ++ngroups;
  }

  std::vector<Root> cands;
  for (int g = 0; g < ngroups; ++g) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < N; ++i)
      if (group[i] == g) members.push_back(i);
    const int k = static_cast<int>(members.size());
    if (k == 1) {
      const Eigen::VectorXcd w = es.eigenvectors().col(members[0]);
      Root r;
      r.x = lam(members[0]);
      r.y = w.dot(M2 * w) / w.squaredNorm();
      cands.push_back(r);
      continue;
    }
    cplx centre{0.0};
    for (auto i : members) centre += lam(i);
    centre /= static_cast<double>(k);
    const Eigen::MatrixXcd Q = detail::cluster_basis(M1, centre, k);
    const Eigen::MatrixXcd H1 = Q.adjoint() * M1 * Q;
    const Eigen::MatrixXcd H2 = Q.adjoint() * M2 * Q;
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> hs(H2, true);
    for (int j = 0; j < k; ++j) {
      const Eigen::VectorXcd v = hs.eigenvectors().col(j);
      Root r;
      r.y = hs.eigenvalues()(j);
      r.x = v.dot(H1 * v) / v.squaredNorm();
      r.flag = RootFlag::Clustered;
      cands.push_back(r);
    }
  }
  out.times.eigensolve_ms = detail::ms_since(t0);

  t0 = Clock::now();
  const bool have_polys = pr.p.degree() > 0 || pr.q.degree() > 0;
  for (Root& r : cands) {
    if (!std::isfinite(std::abs(r.x)) || !std::isfinite(std::abs(r.y))) {
      ++out.dropped;
      continue;
    }
    if (!have_polys) {
      out.roots.push_back(r);
      continue;
    }
    detail::polish(pr.p, pr.q, r.x, r.y, opts.newton_steps);
    r.res_p = std::abs(pr.p.evaluate(r.x, r.y));
    r.res_q = std::abs(pr.q.evaluate(r.x, r.y));
    r.rel_res = detail::root_rel_residual(pr.p, pr.q, r.x, r.y);
    if (r.rel_res > opts.spurious_tol) {
      ++out.dropped;
      continue;
    }
    const Eigen::Vector2d js = Eigen::JacobiSVD<Eigen::Matrix2cd>(detail::jacobian(pr.p, pr.q, r.x, r.y))
                                   .singularValues();
    if (!(js(1) > opts.singular_jacobian * js(0))) {
      r.cond = std::numeric_limits<double>::infinity();
      r.flag = RootFlag::Unreliable;
    } else {
      r.cond = 1.0 / js(1);
    }
    out.roots.push_back(r);
  }
  out.times.polish_ms = detail::ms_since(t0);
  return out;
}

/// ||(D0^-1 D1)(D0^-1 D2) - (D0^-1 D2)(D0^-1 D1)|| / (||D0^-1 D1|| ||D0^-1 D2||).
inline double commutator_defect(const TwoParProblem& pr) {
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(pr.D0);
  const Eigen::MatrixXcd M1 = lu.solve(pr.D1), M2 = lu.solve(pr.D2);
  const double den = M1.norm() * M2.norm();
  return den > 0.0 ? (M1 * M2 - M2 * M1).norm() / den : 0.0;
}

struct AccuracyMetric {
  double accuracy = 0.0;                ///< max_i max(|p|,|q|) * ||J^-1||^-1
  double forward_error_estimate = 0.0;  ///< max_i max(|p|,|q|) * ||J^-1||
  int counted = 0;
  int unreliable = 0;  ///< roots with singular Jacobian, excluded from both maxima
};

/// Both the residual-times-inverse-condition metric and the forward error
/// estimate, re-evaluated from p and q at the reported roots.
inline AccuracyMetric accuracy_metric(const AffinePoly& p, const AffinePoly& q, const RootSet& roots,
                                      double singular_jacobian = 1e-14) {
  if (roots.roots.empty()) throw Error(Errc::InvalidArgument, "accuracy_metric needs roots");
  AccuracyMetric m;
  for (const Root& r : roots.roots) {
    const double res = std::max(std::abs(p.evaluate(r.x, r.y)), std::abs(q.evaluate(r.x, r.y)));
    const Eigen::Vector2d js =
        Eigen::JacobiSVD<Eigen::Matrix2cd>(detail::jacobian(p, q, r.x, r.y)).singularValues();
    if (!(js(1) > singular_jacobian * js(0)) || !std::isfinite(res)) {
      ++m.unreliable;
      continue;
    }
    m.accuracy = std::max(m.accuracy, res * js(1));
    m.forward_error_estimate = std::max(m.forward_error_estimate, res / js(1));
    ++m.counted;
  }
  return m;
}

namespace detail {

inline DetRep build_any(const AffinePoly& f, const BuildOptions& opts) {
  const int d = f.effective_degree();
  if (d < 1 || d > 5)
    throw Error(Errc::UnsupportedDegree,
                "unsupported degree " + std::to_string(d) + " (systems need degrees 1..5)");
  return build(f, opts);
}

}  // namespace detail

/// Roots of p = q = 0 from determinantal representations of p and q.
inline RootSet solve_system(const AffinePoly& p, const AffinePoly& q, const SolveOptions& opts = {}) {
  using detail::Clock;
  auto t0 = Clock::now();
  BuildOptions bq = opts.build;
  bq.seed = mix_seed(opts.build.seed, 1);
  const DetRep r1 = balanced(detail::build_any(p, opts.build));
  const DetRep r2 = balanced(detail::build_any(q, bq));
  const double build_ms = detail::ms_since(t0);

  t0 = Clock::now();
  TwoParProblem pr = build_deltas(r1, r2);
  // Polish against the caller's coefficients, not the homogenized copies.
  pr.p = p;
  pr.q = q;
  const double assemble_ms = detail::ms_since(t0);

  RootSet rs = solve_two_param(pr, opts);
  rs.times.build_ms = build_ms;
  rs.times.assemble_ms = assemble_ms;
  return rs;
}

}  // namespace detrep
