#pragma once

// p_n - lead * prod_j (x - alpha_j y - beta_j z) = y z q_(n-2), its tangent
// variant, and the root orderings the determinantal constructions need.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <vector>

#include "detrep/error.hpp"
#include "detrep/polycore.hpp"
#include "detrep/rootfind.hpp"

namespace detrep {

enum class ReductionVariant { Standard, Tangent };

struct Reduction {
  std::vector<cplx> alpha;
  std::vector<cplx> beta;
  cplx leading{1.0};    ///< a_n0 (Standard)
  LinearForm tangent;   ///< a_(n-1,1) y + a_(n-1,0) z (Tangent)
  HomoPoly q;           ///< degree n-2
  ReductionVariant variant = ReductionVariant::Standard;

  std::size_t size() const { return alpha.size(); }

  LinearForm line(std::size_t j) const { return root_line(alpha[j], beta[j]); }

  /// lead * prod_j line(j), the part of p that is not divisible by yz.
  HomoPoly subtracted() const {
    HomoPoly acc(0);
    if (variant == ReductionVariant::Standard) acc(0, 0) = leading;
    else acc = tangent.to_poly();
    for (std::size_t j = 0; j < alpha.size(); ++j) acc = acc * line(j).to_poly();
    return acc;
  }
};

namespace detail {

// Strips one y and one z from p - subtracted after checking that every
// monomial free of y or free of z has (numerically) cancelled.
inline HomoPoly divide_by_yz(const HomoPoly& p, const HomoPoly& subtracted, double tol) {
  const int n = p.degree();
  const HomoPoly diff = p - subtracted;
  const double bound = tol * p.norm();
  for (int i = 0; i <= n; ++i) {
    if (std::abs(diff(i, 0)) > bound || std::abs(diff(i, n - i)) > bound)
      throw Error(Errc::ReductionResidual,
                  "difference is not divisible by yz (numerical breakdown in root computation)");
  }
  HomoPoly q(n - 2);
  for (int i = 0; i <= n - 2; ++i)
    for (int j = 0; i + j <= n - 2; ++j) q(i, j) = diff(i, j + 1);
  return q;
}

}  // namespace detail

/// Reduction with a prescribed pairing of alpha_j with beta_j. Any pairing of
/// the two root sets is valid; q depends on it.
inline Reduction reduce_with_roots(const HomoPoly& p, std::vector<cplx> alpha,
                                   std::vector<cplx> beta) {
  const int n = p.degree();
  if (n < 2) throw Error(Errc::InvalidArgument, "reduction needs degree >= 2");
  if (alpha.size() != static_cast<std::size_t>(n) || beta.size() != alpha.size())
    throw Error(Errc::InvalidArgument, "need n alpha and n beta roots");
  Reduction r;
  r.alpha = std::move(alpha);
  r.beta = std::move(beta);
  r.leading = p(n, 0);
  r.variant = ReductionVariant::Standard;
  r.q = detail::divide_by_yz(p, r.subtracted(), 1e-7);
  return r;
}

/// Reduction along the coordinate lines y = 0 and z = 0, which meet at
/// (1,0,0); requires (1,0,0) off the curve.
inline Reduction reduce(const HomoPoly& p) {
  auto roots = restriction_roots(p);
  return reduce_with_roots(p, std::move(roots.alpha), std::move(roots.beta));
}

/// Reduction when (1,0,0) is a smooth point of the curve whose tangent
/// a_(n-1,1) y + a_(n-1,0) z = 0 is neither coordinate line.
inline Reduction reduce_tangent(const HomoPoly& p, double tol = 1e-10) {
  const int n = p.degree();
  if (n < 2) throw Error(Errc::InvalidArgument, "reduction needs degree >= 2");
  const double scale = p.norm();
  if (std::abs(p(n, 0)) > tol * scale)
    throw Error(Errc::InvalidArgument, "reduce_tangent needs (1,0,0) on the curve");
  const cplx ty = p(n - 1, 1), tz = p(n - 1, 0);
  if (std::max(std::abs(ty), std::abs(tz)) <= tol * scale)
    throw Error(Errc::SingularPoint, "(1,0,0) is a singular point of the curve");
  if (std::abs(ty) <= tol * scale || std::abs(tz) <= tol * scale)
    throw Error(Errc::TangentIsCoordinateLine,
                "tangent at (1,0,0) is a coordinate line; rotate coordinates");
  std::vector<cplx> ca(n), cb(n);
  for (int i = 0; i < n; ++i) {
    ca[i] = p(i, n - i);
    cb[i] = p(i, 0);
  }
  Reduction r;
  r.alpha = poly_roots(UnivarPoly(std::move(ca)));
  r.beta = poly_roots(UnivarPoly(std::move(cb)));
  r.variant = ReductionVariant::Tangent;
  r.tangent = LinearForm{0.0, ty, tz};
  r.q = detail::divide_by_yz(p, r.subtracted(), 1e-7);
  return r;
}

/// Quadratic case: of the two pairings pick the one with the smaller |q_0|;
/// it vanishes for a product of two lines.
inline Reduction order_for_min_q0(const HomoPoly& p2) {
  if (p2.degree() != 2) throw Error(Errc::InvalidArgument, "order_for_min_q0 needs degree 2");
  Reduction a = reduce(p2);
  Reduction b = reduce_with_roots(p2, a.alpha, {a.beta[1], a.beta[0]});
  return std::abs(b.q(0, 0)) < std::abs(a.q(0, 0)) ? b : a;
}

/// Distinct orderings of `values`; entries closer than rel_tol (relative to
/// the largest modulus) count as equal, so repeated roots do not produce
/// duplicate candidates.
inline std::vector<std::vector<cplx>> distinct_permutations(std::span<const cplx> values,
                                                            double rel_tol = 1e-12) {
  double scale = 1.0;
  for (const cplx& v : values) scale = std::max(scale, std::abs(v));
  const double tol = rel_tol * scale;
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::vector<cplx>> out;
  do {
    std::vector<cplx> cand;
    for (int k : idx) cand.push_back(values[k]);
    const bool dup = std::any_of(out.begin(), out.end(), [&](const std::vector<cplx>& o) {
      for (std::size_t k = 0; k < o.size(); ++k)
        if (std::abs(o[k] - cand[k]) > tol) return false;
      return true;
    });
    if (!dup) out.push_back(std::move(cand));
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

/// Cubic case: alpha fixed, every ordering of beta tried; returns the one
/// with the smallest ||q_1||, which is zero for a product of three lines.
inline Reduction order_for_decomposable_cubic(const HomoPoly& p3) {
  if (p3.degree() != 3)
    throw Error(Errc::InvalidArgument, "order_for_decomposable_cubic needs degree 3");
  const Reduction base = reduce(p3);
  Reduction best = base;
  double best_norm = base.q.norm();
  for (const auto& beta : distinct_permutations(base.beta)) {
    Reduction r = reduce_with_roots(p3, base.alpha, beta);
    if (r.q.norm() < best_norm) {
      best_norm = r.q.norm();
      best = std::move(r);
    }
  }
  return best;
}

/// One way of filling slots 3 and 4 (0-based 2 and 3) of the quintic ansatz.
struct Pair34 {
  int alpha_i, alpha_j;  ///< alpha indices moved to slots 3, 4
  int beta_k, beta_l;    ///< beta indices moved to slots 3, 4
  double spread;         ///< |alpha_i - alpha_j| * |beta_k - beta_l|
  double off_curve;      ///< |p(L3 ^ L4)| / ||p|| at the unit-normalized intersection
  ProjectivePoint meet;  ///< (a3 b4 - a4 b3, b4 - b3, a3 - a4)
};

/// All slot assignments with distinct alphas and distinct betas, sorted by
/// decreasing spread.
inline std::vector<Pair34> pair34_candidates(const HomoPoly& p5, const Reduction& red) {
  const int n = static_cast<int>(red.size());
  double sa = 1.0, sb = 1.0;
  for (int k = 0; k < n; ++k) {
    sa = std::max(sa, std::abs(red.alpha[k]));
    sb = std::max(sb, std::abs(red.beta[k]));
  }
  const double scale = p5.norm();
  std::vector<Pair34> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double da = std::abs(red.alpha[i] - red.alpha[j]);
      if (da <= 1e-8 * sa) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          if (k == l) continue;
          const double db = std::abs(red.beta[k] - red.beta[l]);
          if (db <= 1e-8 * sb) continue;
          const cplx a3 = red.alpha[i], a4 = red.alpha[j], b3 = red.beta[k], b4 = red.beta[l];
          Eigen::Vector3cd v(a3 * b4 - a4 * b3, b4 - b3, a3 - a4);
          v.normalize();
          const ProjectivePoint meet{v(0), v(1), v(2)};
          out.push_back({i, j, k, l, da * db, std::abs(p5.evaluate(meet)) / scale, meet});
        }
    }
  std::stable_sort(out.begin(), out.end(),
                   [](const Pair34& a, const Pair34& b) { return a.spread > b.spread; });
  return out;
}

/// Moves the chosen roots into slots 3 and 4 and recomputes q.
inline Reduction apply_pair34(const HomoPoly& p5, const Reduction& red, const Pair34& c) {
  auto arrange = [](const std::vector<cplx>& v, int a, int b) {
    std::vector<cplx> rest;
    for (int k = 0; k < static_cast<int>(v.size()); ++k)
      if (k != a && k != b) rest.push_back(v[k]);
    return std::vector<cplx>{rest[0], rest[1], v[a], v[b], rest[2]};
  };
  return reduce_with_roots(p5, arrange(red.alpha, c.alpha_i, c.alpha_j),
                           arrange(red.beta, c.beta_k, c.beta_l));
}

/// Quintic case: reorders so that alpha_3 != alpha_4, beta_3 != beta_4 and
/// the meeting point of x - alpha_3 y - beta_3 z and x - alpha_4 y - beta_4 z
/// is off the curve. Among admissible assignments the widest spread wins;
/// one that is only barely off the curve is taken as a last resort.
inline Reduction choose_pair_34(const HomoPoly& p5, const Reduction& red) {
  if (p5.degree() != 5 || red.size() != 5)
    throw Error(Errc::InvalidArgument, "choose_pair_34 needs a quintic reduction");
  const auto cands = pair34_candidates(p5, red);
  const Pair34* fallback = nullptr;
  for (const Pair34& c : cands) {
    if (c.off_curve >= 1e-4) return apply_pair34(p5, red, c);
    if (c.off_curve >= 1e-10 && (!fallback || c.off_curve > fallback->off_curve)) fallback = &c;
  }
  if (fallback) return apply_pair34(p5, red, *fallback);
  throw Error(Errc::NeedsRotation, "no admissible choice of slots 3 and 4; rotate around x");
}

}  // namespace detrep
