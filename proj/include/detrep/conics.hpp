#pragma once

// Conics as symmetric 3x3 forms: factoring degenerate conics and analysing
// pencils s p2 + t q2.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "detrep/error.hpp"
#include "detrep/polycore.hpp"
#include "detrep/rootfind.hpp"

namespace detrep {

/// Symmetric M with p2(v) = v^T M v.
struct ConicForm {
  Eigen::Matrix3cd M;
  HomoPoly source;
  Eigen::Vector3d singular_values;  ///< descending

  /// Numerical rank with relative threshold tol.
  int rank(double tol = 1e-8) const {
    if (!(singular_values(0) > 0.0)) return 0;
    int r = 0;
    for (int k = 0; k < 3; ++k)
      if (singular_values(k) > tol * singular_values(0)) ++r;
    return r;
  }
};

inline Eigen::Matrix3cd conic_matrix_of(const HomoPoly& p2) {
  Eigen::Matrix3cd M;
  M << p2(2, 0), 0.5 * p2(1, 1), 0.5 * p2(1, 0),
       0.5 * p2(1, 1), p2(0, 2), 0.5 * p2(0, 1),
       0.5 * p2(1, 0), 0.5 * p2(0, 1), p2(0, 0);
  return M;
}

inline ConicForm conic_matrix(const HomoPoly& p2) {
  if (p2.degree() != 2) throw Error(Errc::InvalidArgument, "conic_matrix needs a degree-2 form");
  ConicForm f{conic_matrix_of(p2), p2, {}};
  f.singular_values = Eigen::JacobiSVD<Eigen::Matrix3cd>(f.M).singularValues();
  return f;
}

namespace detail {

inline ProjectiveTransform swap_vars(int a, int b) {
  Eigen::Matrix3cd P = Eigen::Matrix3cd::Identity();
  P.row(a).swap(P.row(b));
  return ProjectiveTransform(P);
}

// Branch (1): a20 != 0 after permutation. Pairs the beta roots with the
// alpha roots so the yz coefficient a20 (alpha1 beta2 + alpha2 beta1) matches.
inline std::pair<LinearForm, LinearForm> factor_with_x2(const HomoPoly& p) {
  const cplx a20 = p(2, 0);
  auto alpha = detail::quadratic_roots(a20, p(1, 1), p(0, 2));
  auto beta = detail::quadratic_roots(a20, p(1, 0), p(0, 0));
  const cplx a01 = p(0, 1);
  const double keep = std::abs(a01 - a20 * (alpha[0] * beta[1] + alpha[1] * beta[0]));
  const double swapped = std::abs(a01 - a20 * (alpha[0] * beta[0] + alpha[1] * beta[1]));
  if (swapped < keep) std::swap(beta[0], beta[1]);
  return {a20 * root_line(alpha[0], beta[0]), root_line(alpha[1], beta[1])};
}

inline double product_residual(const HomoPoly& p, const std::pair<LinearForm, LinearForm>& f) {
  return (f.first.to_poly() * f.second.to_poly() - p).norm();
}

}  // namespace detail

/// Splits a rank <= 2 conic into two linear forms (Algorithm-1 style):
/// a nonzero square coefficient is moved to x^2 and the roots of the two
/// coordinate-line restrictions are paired; a conic without square terms is
/// a10 xz + a01 yz + a11 xy with one mixed coefficient zero and factors as
/// y (a11 x + a01 z) once that coefficient sits in the xz slot.
inline std::pair<LinearForm, LinearForm> factor_degenerate_conic(const HomoPoly& p2,
                                                                 double rank_tol = 1e-8) {
  if (p2.degree() != 2) throw Error(Errc::InvalidArgument, "factor_degenerate_conic needs degree 2");
  const double scale = p2.norm();
  if (!(scale > 0.0)) throw Error(Errc::ZeroConic, "zero conic has no factorization");
  const ConicForm form = conic_matrix(p2);
  if (form.rank(rank_tol) == 3)
    throw Error(Errc::NotDecomposable, "conic matrix has full rank");

  std::vector<std::pair<LinearForm, LinearForm>> candidates;

  const std::array<double, 3> diag{std::abs(p2(2, 0)), std::abs(p2(0, 2)), std::abs(p2(0, 0))};
  const double diag_max = std::max({diag[0], diag[1], diag[2]});
  if (diag_max > 0.0) {
    ProjectiveTransform P;
    if (diag[1] == diag_max && diag[0] < diag_max) P = detail::swap_vars(0, 1);
    else if (diag[2] == diag_max && diag[0] < diag_max) P = detail::swap_vars(0, 2);
    const auto f = detail::factor_with_x2(apply_transform(p2, P));
    candidates.push_back({f.first.compose(P.inverse()), f.second.compose(P.inverse())});
  }
  if (diag_max <= 1e-6 * scale) {
    const std::array<double, 3> mixed{std::abs(p2(1, 1)), std::abs(p2(1, 0)), std::abs(p2(0, 1))};
    const double mixed_min = std::min({mixed[0], mixed[1], mixed[2]});
    ProjectiveTransform P;
    if (mixed[1] == mixed_min) P = ProjectiveTransform::identity();
    else if (mixed[0] == mixed_min) P = detail::swap_vars(1, 2);
    else P = detail::swap_vars(0, 1);
    const HomoPoly q = apply_transform(p2, P);
    const LinearForm l1{0.0, 1.0, 0.0};
    const LinearForm l2{q(1, 1), 0.0, q(0, 1)};
    candidates.push_back({l1.compose(P.inverse()), l2.compose(P.inverse())});
  }

  auto best = candidates.front();
  double best_res = detail::product_residual(p2, best);
  for (const auto& c : candidates) {
    const double r = detail::product_residual(p2, c);
    if (r < best_res) {
      best_res = r;
      best = c;
    }
  }
  return best;
}

namespace detail {

inline cplx det3(const Eigen::Matrix3cd& m) { return m.determinant(); }

// Sum over columns k of det(A with column k taken from B).
inline cplx mixed_det(const Eigen::Matrix3cd& A, const Eigen::Matrix3cd& B) {
  cplx s{0.0};
  for (int k = 0; k < 3; ++k) {
    Eigen::Matrix3cd m = A;
    m.col(k) = B.col(k);
    s += det3(m);
  }
  return s;
}

}  // namespace detail

/// Coefficients {s^3, s^2 t, s t^2, t^3} of det(s 2M_p + t 2M_q).
inline std::array<cplx, 4> pencil_degeneracy_cubic(const ConicForm& p2, const ConicForm& q2) {
  const Eigen::Matrix3cd A = 2.0 * p2.M;
  const Eigen::Matrix3cd B = 2.0 * q2.M;
  return {detail::det3(A), detail::mixed_det(A, B), detail::mixed_det(B, A), detail::det3(B)};
}

enum class PencilKind { ThreeDistinct, RepeatedDegenerate, SingleDegenerate, IdenticallyDegenerate };

constexpr std::string_view to_string(PencilKind k) {
  switch (k) {
    case PencilKind::ThreeDistinct: return "ThreeDistinct";
    case PencilKind::RepeatedDegenerate: return "RepeatedDegenerate";
    case PencilKind::SingleDegenerate: return "SingleDegenerate";
    case PencilKind::IdenticallyDegenerate: return "IdenticallyDegenerate";
  }
  return "?";
}

struct PencilClass {
  PencilKind kind;
  std::array<cplx, 4> degeneracy_cubic;
  std::vector<std::pair<cplx, cplx>> roots;  ///< (s, t) of degenerate members, unit norm
};

/// Classifies the pencil through the binary cubic of degenerate members.
///
/// Both matrices are normalized first so the result is scale invariant.
/// A cubic a s^3 + 3b s^2 t + 3c s t^2 + d t^3 is a perfect cube iff its
/// Hessian (ac - b^2, ad - bc, bd - c^2) vanishes, and has a repeated root
/// iff the Hessian's discriminant vanishes. The threshold 1e-12 on these
/// quadratic quantities matches a root separation of about 1e-6.
inline PencilClass classify_pencil(const ConicForm& p2, const ConicForm& q2, double tol = 1e-12) {
  const double np = p2.M.norm(), nq = q2.M.norm();
  ConicForm a = p2, b = q2;
  if (np > 0.0) a.M /= np;
  if (nq > 0.0) b.M /= nq;
  PencilClass out{PencilKind::IdenticallyDegenerate, pencil_degeneracy_cubic(p2, q2), {}};
  const auto c = pencil_degeneracy_cubic(a, b);
  double cmax = 0.0;
  for (const cplx& v : c) cmax = std::max(cmax, std::abs(v));
  if (np == 0.0 || nq == 0.0 || cmax <= 1e-10) return out;

  const cplx A = c[0] / cmax, B = c[1] / (3.0 * cmax), C = c[2] / (3.0 * cmax), D = c[3] / cmax;
  const cplx h0 = A * C - B * B, h1 = A * D - B * C, h2 = B * D - C * C;
  const double hmax = std::max({std::abs(h0), std::abs(h1), std::abs(h2)});
  if (hmax <= tol) {
    out.kind = PencilKind::SingleDegenerate;
  } else {
    const cplx disc = h1 * h1 - 4.0 * h0 * h2;
    out.kind = std::abs(disc) <= tol * hmax * hmax ? PencilKind::RepeatedDegenerate
                                                  : PencilKind::ThreeDistinct;
  }

  // Roots in tau = t/s; every degree lost to a vanishing t^3 coefficient is
  // a root at s = 0.
  const UnivarPoly u = UnivarPoly::trimmed({c[0], c[1], c[2], c[3]}, 1e-12);
  for (int k = u.degree(); k < 3; ++k) out.roots.emplace_back(cplx{0.0}, cplx{1.0});
  for (const cplx& tau : poly_roots(u)) {
    const double nrm = std::sqrt(1.0 + std::norm(tau));
    out.roots.emplace_back(cplx{1.0 / nrm}, tau / nrm);
  }
  return out;
}

/// Finite mu for which q2 - mu line1 line2 is decomposable.
///
/// det(2M_q - mu 2M_l) is a cubic in mu whose mu^3 coefficient det(2M_l)
/// vanishes because line1 line2 is itself degenerate; that root at infinity
/// is deflated by dropping the leading term. An empty result means
/// line1 line2 is the only degenerate member of the pencil.
inline std::vector<cplx> find_mu(const HomoPoly& q2, const LinearForm& line1,
                                 const LinearForm& line2) {
  if (q2.degree() != 2) throw Error(Errc::InvalidArgument, "find_mu needs a degree-2 form");
  const Eigen::Matrix3cd Mq = 2.0 * conic_matrix_of(q2);
  const Eigen::Matrix3cd Ml = 2.0 * conic_matrix_of(line1.to_poly() * line2.to_poly());
  const double nq = Mq.norm(), nl = Ml.norm();
  if (!(nl > 0.0)) throw Error(Errc::InvalidArgument, "find_mu needs nonzero lines");
  if (!(nq > 0.0)) return {cplx{0.0}};
  const Eigen::Matrix3cd A = Mq / nq, B = Ml / nl;
  // det(A - m B) = det A - m mixed(A,B) + m^2 mixed(B,A) - m^3 det B
  std::vector<cplx> coeffs{detail::det3(A), -detail::mixed_det(A, B), detail::mixed_det(B, A)};
  double cmax = 0.0;
  for (const cplx& v : coeffs) cmax = std::max(cmax, std::abs(v));
  if (cmax <= 1e-12) return {cplx{0.0}};
  const UnivarPoly u = UnivarPoly::trimmed(std::move(coeffs), 1e-10);
  std::vector<cplx> mus = poly_roots(u);
  for (cplx& m : mus) m *= nq / nl;
  return mus;
}

}  // namespace detrep
