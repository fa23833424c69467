#pragma once

// n x n determinantal representations det(xA + yB + zC) = p(x,y,z) for
// 2 <= n <= 5.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "detrep/conics.hpp"
#include "detrep/error.hpp"
#include "detrep/polycore.hpp"
#include "detrep/reduction.hpp"
#include "detrep/rng.hpp"

namespace detrep {

/// Sparsity pattern of the ansatz a representation was assembled from.
enum class Structure { Linear, Diagonal, Shape2, Shape3, Shape4, Shape5 };

constexpr std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::Linear: return "Linear";
    case Structure::Diagonal: return "Diagonal";
    case Structure::Shape2: return "Shape2";
    case Structure::Shape3: return "Shape3";
    case Structure::Shape4: return "Shape4";
    case Structure::Shape5: return "Shape5";
  }
  return "?";
}

/// Triple (A, B, C) of n x n matrices with det(xA + yB + zC) = source(x,y,z).
struct DetRep {
  int n = 0;
  Eigen::MatrixXcd A, B, C;
  /// Changes of coordinates used while building, already undone in A, B, C.
  std::vector<ProjectiveTransform> transform_trail;
  Structure structure = Structure::Diagonal;
  HomoPoly source;

  Eigen::MatrixXcd pencil(cplx x, cplx y, cplx z) const { return x * A + y * B + z * C; }

  cplx det_at(cplx x, cplx y, cplx z) const {
    if (n == 0) return 1.0;
    return pencil(x, y, z).determinant();
  }

  /// Triple with det(A1 + x B1 + y C1) = p(x, y, 1).
  struct Affine {
    Eigen::MatrixXcd A1, B1, C1;
  };
  Affine affine() const { return {C, A, B}; }
};

/// An n x n matrix of linear forms; the working representation while a
/// builder places entries.
class FormMatrix {
 public:
  explicit FormMatrix(int n) : n_(n), e_(static_cast<std::size_t>(n * n)) {}

  int size() const { return n_; }
  LinearForm& operator()(int i, int j) { return e_[static_cast<std::size_t>(i * n_ + j)]; }
  const LinearForm& operator()(int i, int j) const { return e_[static_cast<std::size_t>(i * n_ + j)]; }

  cplx det_at(cplx x, cplx y, cplx z) const {
    Eigen::MatrixXcd m(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j).evaluate(x, y, z);
    return m.determinant();
  }

  DetRep to_rep(Structure s, const HomoPoly& source) const {
    DetRep r;
    r.n = n_;
    r.A.resize(n_, n_);
    r.B.resize(n_, n_);
    r.C.resize(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        r.A(i, j) = (*this)(i, j).r;
        r.B(i, j) = (*this)(i, j).s;
        r.C(i, j) = (*this)(i, j).t;
      }
    r.structure = s;
    r.source = source;
    return r;
  }

 private:
  int n_;
  std::vector<LinearForm> e_;
};

namespace detail {

inline constexpr LinearForm kX{1.0, 0.0, 0.0};
inline constexpr LinearForm kY{0.0, 1.0, 0.0};
inline constexpr LinearForm kZ{0.0, 0.0, 1.0};

inline LinearForm as_form(const HomoPoly& p1) { return {p1(1, 0), p1(0, 1), p1(0, 0)}; }

// Fixed probe points for cheap identity checks inside the builders.
inline const std::array<Eigen::Vector3cd, 3>& probe_points() {
  static const std::array<Eigen::Vector3cd, 3> pts = [] {
    std::array<Eigen::Vector3cd, 3> a;
    a[0] = Eigen::Vector3cd(cplx(0.31, 0.12), cplx(-0.57, 0.24), cplx(0.43, -0.56));
    a[1] = Eigen::Vector3cd(cplx(-0.66, 0.05), cplx(0.18, -0.39), cplx(0.52, 0.31));
    a[2] = Eigen::Vector3cd(cplx(0.27, -0.48), cplx(0.61, 0.33), cplx(-0.14, 0.45));
    for (auto& v : a) v.normalize();
    return a;
  }();
  return pts;
}

inline double probe_residual(const FormMatrix& m, const HomoPoly& p) {
  double worst = 0.0;
  for (const auto& v : probe_points()) {
    const cplx pv = p.evaluate(v(0), v(1), v(2));
    worst = std::max(worst, std::abs(m.det_at(v(0), v(1), v(2)) - pv) / (1.0 + std::abs(pv)));
  }
  return worst;
}

// The q-carrying entries enter the determinant through y z times a block;
// negating `flip` reverses the sign of that block. Applied only when it
// reduces the probe residual.
inline void fix_q_sign(FormMatrix& m, const HomoPoly& p,
                       std::initializer_list<std::pair<int, int>> flip) {
  const double before = probe_residual(m, p);
  FormMatrix alt = m;
  for (auto [i, j] : flip) alt(i, j) = cplx{-1.0} * alt(i, j);
  if (probe_residual(alt, p) < before) m = alt;
}

}  // namespace detail

/// The 1x1 representation of a linear form.
inline DetRep build1(const HomoPoly& p1) {
  if (p1.degree() != 1) throw Error(Errc::InvalidArgument, "build1 needs degree 1");
  FormMatrix m(1);
  m(0, 0) = detail::as_form(p1);
  return m.to_rep(Structure::Linear, p1);
}

/// rho I, sigma I, tau I for p = (rho x + sigma y + tau z)^n.
inline DetRep diagonal_rep(const LinearForm& l, int n, const HomoPoly& source) {
  FormMatrix m(n);
  for (int k = 0; k < n; ++k) m(k, k) = l;
  return m.to_rep(Structure::Diagonal, source);
}

/// l1 l2 - x l3 = p2.
struct QuadXSplit {
  LinearForm l1, l2, l3;
};

namespace detail {

// p2 = lead * line0 * line1 + q0 * (product of the two non-leading variables)
// after moving variable `lead_var` into the x slot.
inline QuadXSplit split_via_leading(const HomoPoly& p2, int lead_var) {
  Eigen::Matrix3cd P = Eigen::Matrix3cd::Identity();
  if (lead_var != 0) P.row(0).swap(P.row(lead_var));
  const ProjectiveTransform T(P);
  const Reduction red = order_for_min_q0(apply_transform(p2, T));
  const LinearForm l1 = (red.leading * red.line(0)).compose(T.inverse());
  const LinearForm l2 = red.line(1).compose(T.inverse());
  // In permuted coordinates the residual is q0 y z; after undoing the swap it
  // is q0 x w with w the variable that did not move.
  const cplx q0 = red.q(0, 0);
  const LinearForm w = lead_var == 2 ? kY : kZ;
  return {l1, l2, cplx{-1.0} * q0 * w};
}

inline double split_residual(const HomoPoly& p2, const QuadXSplit& s) {
  const HomoPoly r = s.l1.to_poly() * s.l2.to_poly() - kX.to_poly() * s.l3.to_poly();
  return (r - p2).norm();
}

}  // namespace detail

/// Writes p2 = l1 l2 - x l3. With a_00 != 0 the roles of x and z are
/// exchanged in the standard reduction (residual q0 x y); with a_00 = 0 and
/// a_02 != 0 the roles of y and z (residual q0 x z); with a_00 = a_02 = 0,
/// p2 = y (a01 z + a11 x) + x (a20 x + a10 z). Among the applicable cases
/// the split with the smallest coefficient residual is returned.
inline QuadXSplit quad_with_x(const HomoPoly& p2) {
  if (p2.degree() != 2) throw Error(Errc::InvalidArgument, "quad_with_x needs degree 2");
  const double scale = p2.norm();
  std::vector<QuadXSplit> cands;
  if (std::abs(p2(0, 0)) > 1e-12 * scale) cands.push_back(detail::split_via_leading(p2, 2));
  if (std::abs(p2(0, 2)) > 1e-12 * scale) cands.push_back(detail::split_via_leading(p2, 1));
  if (std::abs(p2(0, 0)) <= 1e-8 * scale && std::abs(p2(0, 2)) <= 1e-8 * scale)
    cands.push_back({detail::kY, LinearForm{p2(1, 1), 0.0, p2(0, 1)},
                     LinearForm{-p2(2, 0), 0.0, -p2(1, 0)}});
  QuadXSplit best = cands.front();
  double best_res = detail::split_residual(p2, best);
  for (const auto& c : cands) {
    const double r = detail::split_residual(p2, c);
    if (r < best_res) {
      best_res = r;
      best = c;
    }
  }
  return best;
}

/// [[a20 (x - a1 y - b1 z), -q0 y], [z, x - a2 y - b2 z]] with the pairing
/// that minimizes |q0|.
inline DetRep build2(const HomoPoly& p2) {
  if (p2.degree() != 2) throw Error(Errc::InvalidArgument, "build2 needs degree 2");
  const Reduction red = order_for_min_q0(p2);
  FormMatrix m(2);
  m(0, 0) = red.leading * red.line(0);
  m(0, 1) = LinearForm{0.0, -red.q(0, 0), 0.0};
  m(1, 0) = detail::kZ;
  m(1, 1) = red.line(1);
  detail::fix_q_sign(m, p2, {{0, 1}});
  return m.to_rep(Structure::Shape2, p2);
}

/// [[lead, 0, q1], [y, l2, 0], [0, z, l3]] from a cubic reduction; lead is
/// a30 (x - a1 y - b1 z), or the tangent form for a tangent reduction.
inline FormMatrix assemble3_forms(const Reduction& red) {
  FormMatrix m(3);
  std::size_t next = 0;
  if (red.variant == ReductionVariant::Standard) {
    m(0, 0) = red.leading * red.line(0);
    next = 1;
  } else {
    m(0, 0) = red.tangent;
  }
  m(0, 2) = detail::as_form(red.q);
  m(1, 0) = detail::kY;
  m(1, 1) = red.line(next);
  m(2, 1) = detail::kZ;
  m(2, 2) = red.line(next + 1);
  return m;
}

inline DetRep assemble3(const HomoPoly& p3, const Reduction& red) {
  FormMatrix m = assemble3_forms(red);
  detail::fix_q_sign(m, p3, {{0, 2}});
  return m.to_rep(Structure::Shape3, p3);
}

inline DetRep build3(const HomoPoly& p3) {
  if (p3.degree() != 3) throw Error(Errc::InvalidArgument, "build3 needs degree 3");
  return assemble3(p3, order_for_decomposable_cubic(p3));
}

/// Which construction produced the off-diagonal block of a quartic.
enum class QuarticStrategy { ShiftedSplit, PencilY, PencilZ };

struct QuarticBuild {
  DetRep rep;
  QuarticStrategy strategy;
  int slot3_swapped_with = -1;  ///< diagonal slot exchanged with slot 3, or -1
};

namespace detail {

inline FormMatrix assemble4_forms(const Reduction& red, const LinearForm& f1, const LinearForm& f2,
                                  const LinearForm& f3) {
  FormMatrix m(4);
  m(0, 0) = red.leading * red.line(0);
  m(0, 1) = cplx{-1.0} * kY;
  m(1, 1) = red.line(1);
  m(1, 2) = f1;
  m(1, 3) = f3;
  m(2, 2) = red.line(2);
  m(2, 3) = f2;
  m(3, 0) = kZ;
  m(3, 3) = red.line(3);
  return m;
}

// q2 = f1 f2 - L3 f3 through the shift x = x~ + a3 y~ + b3 z~, which turns
// L3 into x~, followed by quad_with_x.
inline std::optional<FormMatrix> quartic_shifted(const Reduction& red) {
  Eigen::Matrix3cd S = Eigen::Matrix3cd::Identity();
  S(0, 1) = red.alpha[2];
  S(0, 2) = red.beta[2];
  const ProjectiveTransform T(S);
  const QuadXSplit s = quad_with_x(apply_transform(red.q, T));
  return assemble4_forms(red, s.l1.compose(T.inverse()), s.l2.compose(T.inverse()),
                         s.l3.compose(T.inverse()));
}

// q2 - mu rho L3 = f1 f2 for a degenerate member of the pencil spanned by q2
// and rho L3; then f3 = -mu rho.
inline std::optional<FormMatrix> quartic_pencil(const Reduction& red, const LinearForm& rho,
                                                double rank_tol) {
  const LinearForm L3 = red.line(2);
  const auto mus = find_mu(red.q, rho, L3);
  std::optional<FormMatrix> best;
  double best_res = 0.0;
  for (const cplx& mu : mus) {
    const HomoPoly m2 = red.q - mu * (rho.to_poly() * L3.to_poly());
    std::pair<LinearForm, LinearForm> f;
    if (m2.norm() == 0.0) {
      f = {LinearForm{}, LinearForm{}};
    } else {
      try {
        f = factor_degenerate_conic(m2, std::max(rank_tol, 1e-6));
      } catch (const Error&) {
        continue;
      }
    }
    FormMatrix m = assemble4_forms(red, f.first, f.second, cplx{-1.0} * mu * rho);
    const HomoPoly check = f.first.to_poly() * f.second.to_poly() + mu * (rho.to_poly() * L3.to_poly());
    const double res = (check - red.q).norm();
    if (!best || res < best_res) {
      best = m;
      best_res = res;
    }
  }
  return best;
}

// Orders roots so |alpha_3| and |beta_3| are the smallest; keeps the shift
// x = x~ + a3 y~ + b3 z~ well conditioned.
inline Reduction order_quartic(const HomoPoly& p4, const Reduction& red) {
  auto to_slot3 = [](std::vector<cplx> v) {
    const auto it = std::min_element(v.begin(), v.end(),
                                     [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    std::iter_swap(v.begin() + 2, it);
    return v;
  };
  return reduce_with_roots(p4, to_slot3(red.alpha), to_slot3(red.beta));
}

}  // namespace detail

/// Quartic construction reporting which strategy produced the result.
///
/// Both strategies are run when possible: the shifted Lemma-style split and
/// the pencil perturbation (rho = y, then rho = z, then exchanging slot 3
/// with another diagonal slot). The candidate with the smaller probe residual
/// is returned.
inline QuarticBuild build4_detailed(const HomoPoly& p4, double rank_tol = 1e-8) {
  if (p4.degree() != 4) throw Error(Errc::InvalidArgument, "build4 needs degree 4");
  const Reduction red = detail::order_quartic(p4, reduce(p4));

  std::optional<QuarticBuild> best;
  double best_res = 0.0;
  auto consider = [&](std::optional<FormMatrix> m, QuarticStrategy s, int swapped) {
    if (!m) return;
    detail::fix_q_sign(*m, p4, {{1, 2}, {1, 3}});
    const double res = detail::probe_residual(*m, p4);
    if (!best || res < best_res) {
      best = QuarticBuild{m->to_rep(Structure::Shape4, p4), s, swapped};
      best_res = res;
    }
  };

  consider(detail::quartic_shifted(red), QuarticStrategy::ShiftedSplit, -1);

  bool pencil_done = false;
  for (int swap_with : {-1, 0, 1, 3}) {
    Reduction r = red;
    if (swap_with >= 0) {
      std::swap(r.alpha[2], r.alpha[swap_with]);
      std::swap(r.beta[2], r.beta[swap_with]);
      if (r.alpha[2] == red.alpha[2] && r.beta[2] == red.beta[2]) continue;
      r = reduce_with_roots(p4, r.alpha, r.beta);
    }
    for (const auto& [rho, kind] : {std::pair{detail::kY, QuarticStrategy::PencilY},
                                    std::pair{detail::kZ, QuarticStrategy::PencilZ}}) {
      auto m = detail::quartic_pencil(r, rho, rank_tol);
      if (m) {
        consider(std::move(m), kind, swap_with);
        pencil_done = true;
        break;
      }
    }
    if (pencil_done) break;
  }

  if (!best) throw Error(Errc::ConstructionFailed, "no quartic strategy produced a representation");
  return *best;
}

inline DetRep build4(const HomoPoly& p4) { return build4_detailed(p4).rep; }

namespace detail {

// The change of variables whose rows are L3 ^ L4, L3 and L4; it sends L3 and
// L4 to y~ and z~ and their meeting point to (1,0,0).
inline Eigen::Matrix3cd quintic_change(const Reduction& red) {
  const cplx a3 = red.alpha[2], a4 = red.alpha[3], b3 = red.beta[2], b4 = red.beta[3];
  Eigen::Matrix3cd S;
  S << a3 * b4 - a4 * b3, b4 - b3, a3 - a4,
       1.0, -a3, -b3,
       1.0, -a4, -b4;
  return S;
}

inline FormMatrix assemble5_forms(const HomoPoly& p5, const Reduction& red,
                                  ReductionVariant inner) {
  const Eigen::Matrix3cd S = quintic_change(red);
  const ProjectiveTransform back(ProjectiveTransform(S).inverse());
  const HomoPoly q3t = apply_transform(red.q, back);
  const Reduction inner_red =
      inner == ReductionVariant::Standard ? order_for_decomposable_cubic(q3t) : reduce_tangent(q3t);
  FormMatrix sub = assemble3_forms(inner_red);
  fix_q_sign(sub, q3t, {{0, 2}});

  FormMatrix m(5);
  m(0, 0) = red.leading * red.line(0);
  m(0, 1) = kY;
  m(1, 1) = red.line(1);
  m(1, 2) = sub(0, 0).compose(S);
  m(1, 4) = sub(0, 2).compose(S);
  m(2, 2) = red.line(2);
  m(2, 3) = sub(1, 1).compose(S);
  m(3, 3) = red.line(3);
  m(3, 4) = sub(2, 2).compose(S);
  m(4, 0) = kZ;
  m(4, 4) = red.line(4);
  (void)p5;
  return m;
}

}  // namespace detail

/// Quintic representation for a reduction whose slots 3 and 4 are already
/// admissible (see choose_pair_34).
inline DetRep assemble5(const HomoPoly& p5, const Reduction& red,
                        ReductionVariant inner = ReductionVariant::Standard) {
  FormMatrix m = detail::assemble5_forms(p5, red, inner);
  detail::fix_q_sign(m, p5, {{1, 2}, {1, 4}});
  return m.to_rep(Structure::Shape5, p5);
}

/// Quintic construction. When no assignment of slots 3 and 4 puts their
/// meeting point off the curve, a point that is smooth with non-coordinate
/// tangent in the new variables is handled by the tangent reduction;
/// otherwise NeedsRotation is raised.
inline DetRep build5(const HomoPoly& p5) {
  if (p5.degree() != 5) throw Error(Errc::InvalidArgument, "build5 needs degree 5");
  const Reduction base = reduce(p5);
  try {
    return assemble5(p5, choose_pair_34(p5, base));
  } catch (const Error& e) {
    if (e.code() != Errc::NeedsRotation) throw;
  }
  for (const Pair34& c : pair34_candidates(p5, base)) {
    try {
      return assemble5(p5, apply_pair34(p5, base, c), ReductionVariant::Tangent);
    } catch (const Error&) {
    }
  }
  throw Error(Errc::NeedsRotation, "quintic slots 3 and 4 not admissible; rotate around x");
}

struct BuildOptions {
  std::uint64_t seed = 0;
  double line_tol = 1e-10;       ///< relative tolerance of the power-of-line test
  double rank_tol = 1e-8;        ///< relative singular-value threshold for conics
  int max_attempts = 20;         ///< rotation retries before RetriesExhausted
  int check_samples = 16;        ///< random points used to accept an attempt
  double accept_tol = 1e-10;     ///< stop retrying once an attempt is this good
  double fail_tol = 1e-7;        ///< best attempt above this raises
  double small_leading = 1e-3;   ///< rotate when |a_n0| < small_leading * max|a_ij|
};

/// max over seeded unit-sphere points v of |det(pencil(v)) - p(v)| / (1 + |p(v)|).
inline double verify(const HomoPoly& p, const DetRep& rep, int samples = 100,
                     std::uint64_t seed = 0) {
  if (rep.n != p.degree())
    throw Error(Errc::DimensionMismatch, "representation size differs from polynomial degree");
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Eigen::Vector3cd v(rng.complex_normal(), rng.complex_normal(), rng.complex_normal());
    v.normalize();
    const cplx pv = p.evaluate(v(0), v(1), v(2));
    worst = std::max(worst, std::abs(rep.det_at(v(0), v(1), v(2)) - pv) / (1.0 + std::abs(pv)));
  }
  return worst;
}

/// Rewrites a representation built for p~(w) = p(T w) so that it represents
/// p itself: with w = T^-1 v, the coefficient matrix of v_l is
/// sum_k (T^-1)_kl M~_k.
inline DetRep substitute_back(const DetRep& local, const ProjectiveTransform& T,
                              const HomoPoly& original) {
  const Eigen::Matrix3cd& Ti = T.inverse();
  const std::array<const Eigen::MatrixXcd*, 3> M{&local.A, &local.B, &local.C};
  DetRep out = local;
  out.A = Ti(0, 0) * *M[0] + Ti(1, 0) * *M[1] + Ti(2, 0) * *M[2];
  out.B = Ti(0, 1) * *M[0] + Ti(1, 1) * *M[1] + Ti(2, 1) * *M[2];
  out.C = Ti(0, 2) * *M[0] + Ti(1, 2) * *M[1] + Ti(2, 2) * *M[2];
  out.source = original;
  return out;
}

/// Degree-dispatched construction with rotation retries.
///
/// (1) p = l^n gives diagonal matrices. (2) A small |a_n0| triggers a random
/// orthogonal change of coordinates. (3)-(8) build2..build5 in the working
/// coordinates; a failed reduction, an inadmissible quintic ordering or an
/// inaccurate result triggers a new seeded rotation (around x for the
/// quintic ordering, a full orthogonal transform otherwise). (9) The
/// accumulated change of coordinates is undone on the matrices.
inline DetRep build(const HomoPoly& p, const BuildOptions& opts = {}) {
  const int n = p.degree();
  if (n < 2 || n > 5)
    throw Error(Errc::UnsupportedDegree,
                "unsupported degree " + std::to_string(n) + " (representations exist here for 2..5)");
  if (p.is_zero()) throw Error(Errc::DegenerateInput, "zero polynomial");

  if (auto line = is_power_of_line(p, opts.line_tol)) return diagonal_rep(*line, n, p);

  Rng rng(opts.seed);
  ProjectiveTransform total;
  std::vector<ProjectiveTransform> trail;
  HomoPoly work = p;
  auto rotate = [&](const ProjectiveTransform& R) {
    trail.push_back(R);
    total = total * R;
    work = apply_transform(p, total);
  };
  if (std::abs(p(n, 0)) < opts.small_leading * p.max_abs()) rotate(random_orthogonal(rng));

  std::optional<DetRep> best;
  double best_res = 0.0;
  std::string last_error = "no attempt succeeded";
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    if (attempt > 0 && std::abs(work(n, 0)) < opts.small_leading * work.max_abs())
      rotate(random_orthogonal(rng));
    try {
      DetRep local;
      switch (n) {
        case 2: local = build2(work); break;
        case 3: local = build3(work); break;
        case 4: local = build4_detailed(work, opts.rank_tol).rep; break;
        default: local = build5(work); break;
      }
      DetRep rep = substitute_back(local, total, p);
      rep.transform_trail = trail;
      const double res = verify(p, rep, opts.check_samples, mix_seed(opts.seed, 1000 + attempt));
      if (!best || res < best_res) {
        best = std::move(rep);
        best_res = res;
      }
      if (best_res <= opts.accept_tol) break;
      last_error = "residual " + std::to_string(res) + " above acceptance";
      rotate(random_orthogonal(rng));
    } catch (const Error& e) {
      last_error = e.what();
      switch (e.code()) {
        case Errc::NeedsRotation: rotate(random_rotation(Axis::X, rng.next_u64())); break;
        case Errc::NearZeroLeadingCoefficient:
        case Errc::ReductionResidual:
        case Errc::ConstructionFailed:
        case Errc::NotDecomposable:
        case Errc::TangentIsCoordinateLine:
        case Errc::SingularPoint:
        case Errc::ZeroPolynomial:
        case Errc::SingularTransform:
          rotate(random_orthogonal(rng));
          break;
        default: throw;
      }
    }
  }
  if (best && best_res <= opts.fail_tol) return *best;
  throw Error(Errc::RetriesExhausted,
              "no accurate representation after " + std::to_string(opts.max_attempts) +
                  " attempts: " + last_error);
}

/// Affine input: homogenized at its effective degree.
inline DetRep build(const AffinePoly& q, const BuildOptions& opts = {}) {
  if (q.is_zero()) throw Error(Errc::DegenerateInput, "zero polynomial");
  const int d = q.effective_degree();
  AffinePoly t(d);
  for (int i = 0; i <= d; ++i)
    for (int j = 0; i + j <= d; ++j) t(i, j) = q(i, j);
  if (d == 1) return build1(homogenize(t));
  if (d < 1) throw Error(Errc::UnsupportedDegree, "constant polynomial has no representation");
  return build(homogenize(t), opts);
}

/// An equivalent representation D1 (xA + yB + zC) D2 with power-of-two
/// diagonal D1, D2 that equalize the row and column norms, rescaled by
/// det(D1 D2)^(-1/n) so the determinant is unchanged. The ansatz pattern is
/// kept; the builders' larger entries otherwise make Delta_0 look singular.
inline DetRep balanced(DetRep rep, int sweeps = 20) {
  const int n = rep.n;
  double log2det = 0.0;
  auto norm2 = [&](bool row, int i) {
    return row ? rep.A.row(i).squaredNorm() + rep.B.row(i).squaredNorm() + rep.C.row(i).squaredNorm()
               : rep.A.col(i).squaredNorm() + rep.B.col(i).squaredNorm() + rep.C.col(i).squaredNorm();
  };
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool changed = false;
    for (bool row : {true, false})
      for (int i = 0; i < n; ++i) {
        const double s = norm2(row, i);
        if (!(s > 0.0)) continue;
        const int e = -static_cast<int>(std::lround(std::log2(s) / 2.0));
        if (e == 0) continue;
        const double f = std::ldexp(1.0, e);
        for (Eigen::MatrixXcd* M : {&rep.A, &rep.B, &rep.C}) {
          if (row)
            M->row(i) *= f;
          else
            M->col(i) *= f;
        }
        log2det += e;
        changed = true;
      }
    if (!changed) break;
  }
  if (n > 0 && log2det != 0.0) {
    const double g = std::exp2(-log2det / n);
    rep.A *= g;
    rep.B *= g;
    rep.C *= g;
  }
  return rep;
}

/// Whether entries outside the recorded ansatz pattern are exactly zero.
inline bool matches_structure(const DetRep& rep) {
  const int n = rep.n;
  auto allowed = [&](int i, int j) {
    switch (rep.structure) {
      case Structure::Linear:
      case Structure::Shape2: return true;
      case Structure::Diagonal: return i == j;
      case Structure::Shape3:
        return i == j || (i == 0 && j == 2) || (i == 1 && j == 0) || (i == 2 && j == 1);
      case Structure::Shape4:
        return i == j || (i == 0 && j == 1) || (i == 1 && j >= 2) || (i == 2 && j == 3) ||
               (i == 3 && j == 0);
      case Structure::Shape5:
        return i == j || (i == 0 && j == 1) || (i == 4 && j == 0) || (i == 1 && j == 2) ||
               (i == 2 && j == 3) || (i == 3 && j == 4) || (i == 1 && j == 4);
    }
    return false;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!allowed(i, j) &&
          (rep.A(i, j) != cplx{0.0} || rep.B(i, j) != cplx{0.0} || rep.C(i, j) != cplx{0.0}))
        return false;
  return true;
}

}  // namespace detrep
