#pragma once

// Roots of small univariate complex polynomials.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "detrep/error.hpp"
#include "detrep/polycore.hpp"

namespace detrep {

/// c_0 + c_1 t + ... + c_d t^d with c_d != 0 (exact zeros are trimmed).
class UnivarPoly {
 public:
  UnivarPoly() = default;

  explicit UnivarPoly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
    while (!c_.empty() && c_.back() == cplx{0.0}) c_.pop_back();
  }

  /// Also drops leading coefficients below rel_tol * max|c_k|.
  static UnivarPoly trimmed(std::vector<cplx> coeffs, double rel_tol) {
    double m = 0.0;
    for (const cplx& c : coeffs) m = std::max(m, std::abs(c));
    while (!coeffs.empty() && std::abs(coeffs.back()) <= rel_tol * m) coeffs.pop_back();
    return UnivarPoly(std::move(coeffs));
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<cplx>& coeffs() const { return c_; }

  double norm() const {
    double s = 0.0;
    for (const cplx& c : c_) s += std::norm(c);
    return std::sqrt(s);
  }

  cplx operator()(cplx t) const {
    cplx acc{0.0};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  cplx derivative(cplx t) const {
    cplx acc{0.0};
    for (int k = degree(); k >= 1; --k) acc = acc * t + static_cast<double>(k) * c_[k];
    return acc;
  }

 private:
  std::vector<cplx> c_;
};

namespace detail {

inline std::vector<cplx> quadratic_roots(cplx a, cplx b, cplx c) {
  const cplx disc = std::sqrt(b * b - 4.0 * a * c);
  // Pick the sign that avoids cancellation in b +- disc.
  const cplx q = -0.5 * ((std::real(std::conj(b) * disc) >= 0.0) ? b + disc : b - disc);
  if (q == cplx{0.0}) return {cplx{0.0}, cplx{0.0}};
  return {q / a, c / q};
}

// ||c_d prod (t - r_k) - c|| / ||c||
inline double backward_error(const UnivarPoly& u, const std::vector<cplx>& roots) {
  const auto& c = u.coeffs();
  std::vector<cplx> m{c.back()};
  for (const cplx& r : roots) {
    std::vector<cplx> n(m.size() + 1, 0.0);
    for (std::size_t k = 0; k < m.size(); ++k) {
      n[k + 1] += m[k];
      n[k] -= r * m[k];
    }
    m = std::move(n);
  }
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += std::norm(m[k] - c[k]);
  return std::sqrt(s) / u.norm();
}

// A k-fold root comes out of the eigensolver as a cluster of spread about
// eps^(1/k), while the cluster mean is accurate to about eps. Each cluster is
// replaced by its mean when the snapped roots still solve u to within
// snap_tol backward error; genuinely distinct close roots fail that test.
inline void snap_clusters(const UnivarPoly& u, std::vector<cplx>& roots, double snap_tol = 1e-13) {
  const std::size_t d = roots.size();
  std::vector<int> group(d, -1);
  int ng = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (group[i] >= 0) continue;
    group[i] = ng;
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t a = 0; a < d; ++a)
        if (group[a] == ng)
          for (std::size_t b = 0; b < d; ++b)
            if (group[b] < 0 &&
                std::abs(roots[a] - roots[b]) <= 1e-3 * std::max(1.0, std::abs(roots[a]))) {
              group[b] = ng;
              grew = true;
            }
    }
    ++ng;
  }
  for (int g = 0; g < ng; ++g) {
    cplx mean{0.0};
    int k = 0;
    for (std::size_t i = 0; i < d; ++i)
      if (group[i] == g) {
        mean += roots[i];
        ++k;
      }
    if (k < 2) continue;
    mean /= static_cast<double>(k);
    std::vector<cplx> trial = roots;
    for (std::size_t i = 0; i < d; ++i)
      if (group[i] == g) trial[i] = mean;
    if (backward_error(u, trial) <= std::max(snap_tol, backward_error(u, roots))) roots = std::move(trial);
  }
}

}  // namespace detail

/// All roots, with multiplicity, of u. Companion-matrix eigenvalues plus one
/// guarded Newton step each; degrees 1 and 2 use closed forms. Clusters
/// that behave like a multiple root are merged (see snap_clusters).
inline std::vector<cplx> poly_roots(const UnivarPoly& u) {
  if (u.is_zero()) throw Error(Errc::ZeroPolynomial, "roots of the zero polynomial");
  const int d = u.degree();
  const auto& c = u.coeffs();
  if (d == 0) return {};
  if (d == 1) return {-c[0] / c[1]};
  if (d == 2) {
    auto roots = detail::quadratic_roots(c[2], c[1], c[0]);
    detail::snap_clusters(u, roots);
    return roots;
  }

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 1; k < d; ++k) companion(k, k - 1) = 1.0;
  for (int k = 0; k < d; ++k) companion(k, d - 1) = -c[k] / c[d];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, /*computeEigenvectors=*/false);
  std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + d);

  detail::snap_clusters(u, roots);
  // Newton only for isolated roots: near a multiple root it pulls the members
  // of a cluster to the same side and spoils the backward error.
  const std::vector<cplx> eig = roots;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    bool isolated = true;
    for (std::size_t j = 0; j < eig.size(); ++j)
      if (j != i && std::abs(eig[i] - eig[j]) <= 1e-3 * std::max(1.0, std::abs(eig[i]))) isolated = false;
    if (!isolated) continue;
    cplx& z = roots[i];
    const cplx f = u(z);
    const cplx df = u.derivative(z);
    if (df == cplx{0.0}) continue;
    const cplx z1 = z - f / df;
    if (std::abs(u(z1)) < std::abs(f)) z = z1;
  }
  return roots;
}

/// p(alpha, 1, 0) and p(beta, 0, 1) as univariate polynomials.
inline std::pair<UnivarPoly, UnivarPoly> restrictions(const HomoPoly& p) {
  const int n = p.degree();
  std::vector<cplx> ca(n + 1), cb(n + 1);
  for (int i = 0; i <= n; ++i) {
    ca[i] = p(i, n - i);
    cb[i] = p(i, 0);
  }
  return {UnivarPoly(std::move(ca)), UnivarPoly(std::move(cb))};
}

struct RestrictionRoots {
  std::vector<cplx> alpha;  ///< roots of p(alpha, 1, 0)
  std::vector<cplx> beta;   ///< roots of p(beta, 0, 1)
};

/// Intersections of p with the lines z = 0 and y = 0. Requires a_n0 to be
/// clearly nonzero so both restrictions keep degree n.
inline RestrictionRoots restriction_roots(const HomoPoly& p) {
  const int n = p.degree();
  if (!(std::abs(p(n, 0)) > 1e-12 * p.norm()))
    throw Error(Errc::NearZeroLeadingCoefficient,
                "coefficient of x^n is (numerically) zero; rotate coordinates first");
  auto [ua, ub] = restrictions(p);
  return {poly_roots(ua), poly_roots(ub)};
}

}  // namespace detrep
