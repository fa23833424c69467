#pragma once

// Homogeneous and affine bivariate polynomials, linear forms, projective
// points and changes of coordinates.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "detrep/error.hpp"
#include "detrep/rng.hpp"

namespace detrep {

using cplx = std::complex<double>;

/// Number of coefficients of a degree-n form in three variables.
constexpr std::size_t coeff_count(int n) {
  return static_cast<std::size_t>((n + 1) * (n + 2) / 2);
}

/// Graded position of the monomial x^i y^j: grouped by i+j, then by j.
constexpr std::size_t coeff_index(int i, int j) {
  const int k = i + j;
  return static_cast<std::size_t>(k * (k + 1) / 2 + j);
}

struct ProjectivePoint;

/// Homogeneous polynomial p(x,y,z) = sum a_ij x^i y^j z^(n-i-j).
class HomoPoly {
 public:
  HomoPoly() : HomoPoly(0) {}

  explicit HomoPoly(int degree) : degree_(degree) {
    if (degree < 0) throw Error(Errc::InvalidArgument, "negative degree");
    coeffs_.assign(coeff_count(degree), cplx{0.0});
  }

  HomoPoly(int degree, std::vector<cplx> coeffs) : degree_(degree), coeffs_(std::move(coeffs)) {
    if (degree < 0) throw Error(Errc::InvalidArgument, "negative degree");
    if (coeffs_.size() != coeff_count(degree))
      throw Error(Errc::InvalidArgument, "coefficient count does not match degree");
  }

  int degree() const { return degree_; }

  cplx operator()(int i, int j) const { return coeffs_[coeff_index(i, j)]; }
  cplx& operator()(int i, int j) { return coeffs_[coeff_index(i, j)]; }

  std::span<const cplx> coeffs() const { return coeffs_; }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](cplx c) { return c == cplx{0.0}; });
  }

  /// True when every x^i y^(n-i) coefficient vanishes, i.e. z divides p and
  /// the affine slice has degree below n.
  bool is_deficient() const {
    for (int i = 0; i <= degree_; ++i)
      if ((*this)(i, degree_ - i) != cplx{0.0}) return false;
    return true;
  }

  double norm() const {
    double s = 0.0;
    for (const cplx& c : coeffs_) s += std::norm(c);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  /// Nested Horner scheme: x-levels hold binary forms in (y,z), each of
  /// which is itself evaluated by Horner in y with running powers of z.
  cplx evaluate(cplx x, cplx y, cplx z) const {
    const int n = degree_;
    auto binary = [&](int i) {
      const int m = n - i;
      cplx acc = (*this)(i, m);
      cplx zp{1.0};
      for (int j = m - 1; j >= 0; --j) {
        zp *= z;
        acc = acc * y + (*this)(i, j) * zp;
      }
      return acc;
    };
    cplx acc = binary(n);
    for (int i = n - 1; i >= 0; --i) acc = acc * x + binary(i);
    return acc;
  }

  cplx evaluate(const ProjectivePoint& v) const;

  HomoPoly& operator+=(const HomoPoly& o) {
    require_same_degree(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
  }

  HomoPoly& operator-=(const HomoPoly& o) {
    require_same_degree(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
    return *this;
  }

  HomoPoly& operator*=(cplx s) {
    for (cplx& c : coeffs_) c *= s;
    return *this;
  }

  friend HomoPoly operator+(HomoPoly a, const HomoPoly& b) { return a += b; }
  friend HomoPoly operator-(HomoPoly a, const HomoPoly& b) { return a -= b; }
  friend HomoPoly operator*(HomoPoly a, cplx s) { return a *= s; }
  friend HomoPoly operator*(cplx s, HomoPoly a) { return a *= s; }

  friend HomoPoly operator*(const HomoPoly& a, const HomoPoly& b) {
    HomoPoly r(a.degree_ + b.degree_);
    for (int i1 = 0; i1 <= a.degree_; ++i1)
      for (int j1 = 0; i1 + j1 <= a.degree_; ++j1) {
        const cplx ca = a(i1, j1);
        if (ca == cplx{0.0}) continue;
        for (int i2 = 0; i2 <= b.degree_; ++i2)
          for (int j2 = 0; i2 + j2 <= b.degree_; ++j2) r(i1 + i2, j1 + j2) += ca * b(i2, j2);
      }
    return r;
  }

 private:
  void require_same_degree(const HomoPoly& o) const {
    if (o.degree_ != degree_) throw Error(Errc::InvalidArgument, "degree mismatch");
  }

  int degree_;
  std::vector<cplx> coeffs_;
};

/// Coefficientwise distance relative to the norm of `ref`.
inline double relative_distance(const HomoPoly& a, const HomoPoly& ref) {
  const double scale = ref.norm();
  const double d = (a - ref).norm();
  return scale > 0.0 ? d / scale : d;
}

/// Affine polynomial q(x,y) = sum p_ij x^i y^j, i+j <= degree.
class AffinePoly {
 public:
  AffinePoly() : AffinePoly(0) {}

  explicit AffinePoly(int degree) : degree_(degree) {
    if (degree < 0) throw Error(Errc::InvalidArgument, "negative degree");
    coeffs_.assign(coeff_count(degree), cplx{0.0});
  }

  AffinePoly(int degree, std::vector<cplx> coeffs) : degree_(degree), coeffs_(std::move(coeffs)) {
    if (degree < 0) throw Error(Errc::InvalidArgument, "negative degree");
    if (coeffs_.size() != coeff_count(degree))
      throw Error(Errc::InvalidArgument, "coefficient count does not match degree");
  }

  int degree() const { return degree_; }
  cplx operator()(int i, int j) const { return coeffs_[coeff_index(i, j)]; }
  cplx& operator()(int i, int j) { return coeffs_[coeff_index(i, j)]; }
  std::span<const cplx> coeffs() const { return coeffs_; }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](cplx c) { return c == cplx{0.0}; });
  }

  double norm() const {
    double s = 0.0;
    for (const cplx& c : coeffs_) s += std::norm(c);
    return std::sqrt(s);
  }

  /// Largest i+j carrying a nonzero coefficient (0 for the zero polynomial).
  int effective_degree() const {
    for (int k = degree_; k > 0; --k)
      for (int i = 0; i <= k; ++i)
        if ((*this)(i, k - i) != cplx{0.0}) return k;
    return 0;
  }

  cplx evaluate(cplx x, cplx y) const {
    cplx acc{0.0};
    for (int i = degree_; i >= 0; --i) {
      cplx inner{0.0};
      for (int j = degree_ - i; j >= 0; --j) inner = inner * y + (*this)(i, j);
      acc = acc * x + inner;
    }
    return acc;
  }

  /// sum |p_ij| |x|^i |y|^j; the natural scale for relative residuals.
  double magnitude(cplx x, cplx y) const {
    const double ax = std::abs(x), ay = std::abs(y);
    double acc = 0.0;
    for (int i = degree_; i >= 0; --i) {
      double inner = 0.0;
      for (int j = degree_ - i; j >= 0; --j) inner = inner * ay + std::abs((*this)(i, j));
      acc = acc * ax + inner;
    }
    return acc;
  }

  /// (dq/dx, dq/dy) at (x,y).
  std::pair<cplx, cplx> gradient(cplx x, cplx y) const {
    std::vector<cplx> px(static_cast<std::size_t>(degree_ + 1), 1.0), py = px;
    for (int k = 1; k <= degree_; ++k) {
      px[k] = px[k - 1] * x;
      py[k] = py[k - 1] * y;
    }
    cplx gx{0.0}, gy{0.0};
    for (int i = 0; i <= degree_; ++i)
      for (int j = 0; i + j <= degree_; ++j) {
        const cplx c = (*this)(i, j);
        if (i > 0) gx += c * static_cast<double>(i) * px[i - 1] * py[j];
        if (j > 0) gy += c * static_cast<double>(j) * px[i] * py[j - 1];
      }
    return {gx, gy};
  }

 private:
  int degree_;
  std::vector<cplx> coeffs_;
};

/// z^n q(x/z, y/z) for the declared degree n of q.
inline HomoPoly homogenize(const AffinePoly& q) {
  if (q.degree() < 1) throw Error(Errc::InvalidArgument, "homogenize needs degree >= 1");
  if (q.is_zero()) throw Error(Errc::ZeroPolynomial, "cannot homogenize the zero polynomial");
  return HomoPoly(q.degree(), std::vector<cplx>(q.coeffs().begin(), q.coeffs().end()));
}

/// p(x, y, 1), keeping the degree of p.
inline AffinePoly dehomogenize(const HomoPoly& p) {
  return AffinePoly(p.degree(), std::vector<cplx>(p.coeffs().begin(), p.coeffs().end()));
}

/// r x + s y + t z.
struct LinearForm {
  cplx r{0.0}, s{0.0}, t{0.0};

  cplx evaluate(cplx x, cplx y, cplx z) const { return r * x + s * y + t * z; }

  bool is_zero() const { return r == cplx{0.0} && s == cplx{0.0} && t == cplx{0.0}; }

  HomoPoly to_poly() const {
    HomoPoly p(1);
    p(1, 0) = r;
    p(0, 1) = s;
    p(0, 0) = t;
    return p;
  }

  Eigen::RowVector3cd row() const { return {r, s, t}; }

  static LinearForm from_row(const Eigen::RowVector3cd& c) { return {c(0), c(1), c(2)}; }

  /// The form v -> this(M v).
  LinearForm compose(const Eigen::Matrix3cd& M) const { return from_row(row() * M); }

  double norm() const { return std::sqrt(std::norm(r) + std::norm(s) + std::norm(t)); }

  friend LinearForm operator*(cplx c, const LinearForm& l) { return {c * l.r, c * l.s, c * l.t}; }
  friend LinearForm operator+(const LinearForm& a, const LinearForm& b) {
    return {a.r + b.r, a.s + b.s, a.t + b.t};
  }
};

/// The line x - alpha y - beta z.
inline LinearForm root_line(cplx alpha, cplx beta) { return {1.0, -alpha, -beta}; }

inline HomoPoly product(std::span<const LinearForm> forms) {
  HomoPoly acc(0);
  acc(0, 0) = 1.0;
  for (const LinearForm& f : forms) acc = acc * f.to_poly();
  return acc;
}

/// A point of the complex projective plane; comparison is modulo scaling.
struct ProjectivePoint {
  cplx x{0.0}, y{0.0}, z{1.0};

  Eigen::Vector3cd vec() const { return {x, y, z}; }

  /// Scaled so the largest-modulus coordinate equals one.
  ProjectivePoint normalized() const {
    cplx pivot = x;
    if (std::abs(y) > std::abs(pivot)) pivot = y;
    if (std::abs(z) > std::abs(pivot)) pivot = z;
    if (pivot == cplx{0.0}) throw Error(Errc::InvalidArgument, "(0,0,0) is not a projective point");
    return {x / pivot, y / pivot, z / pivot};
  }

  bool approx_equal(const ProjectivePoint& o, double tol = 1e-9) const {
    // Normalizing both by the same coordinate slot keeps the comparison
    // meaningful when two coordinates tie in modulus.
    cplx pivot_a = x, pivot_b = o.x;
    double best = std::abs(x);
    if (std::abs(y) > best) { best = std::abs(y); pivot_a = y; pivot_b = o.y; }
    if (std::abs(z) > best) { pivot_a = z; pivot_b = o.z; }
    if (pivot_b == cplx{0.0}) return false;
    const Eigen::Vector3cd a = vec() / pivot_a;
    const Eigen::Vector3cd b = o.vec() / pivot_b;
    return (a - b).cwiseAbs().maxCoeff() <= tol;
  }

  friend bool operator==(const ProjectivePoint& a, const ProjectivePoint& b) {
    return a.approx_equal(b);
  }
};

inline cplx HomoPoly::evaluate(const ProjectivePoint& v) const { return evaluate(v.x, v.y, v.z); }

/// Invertible change of coordinates v = M w; the inverse is cached.
class ProjectiveTransform {
 public:
  ProjectiveTransform() : matrix_(Eigen::Matrix3cd::Identity()), inverse_(Eigen::Matrix3cd::Identity()) {}

  explicit ProjectiveTransform(const Eigen::Matrix3cd& m) : matrix_(m) {
    Eigen::JacobiSVD<Eigen::Matrix3cd> svd(m);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(2) <= 1e-14 * sv(0))
      throw Error(Errc::SingularTransform, "projective transform matrix is singular");
    inverse_ = m.fullPivLu().inverse();
  }

  static ProjectiveTransform identity() { return {}; }

  const Eigen::Matrix3cd& matrix() const { return matrix_; }
  const Eigen::Matrix3cd& inverse() const { return inverse_; }

  ProjectiveTransform inverted() const { return ProjectiveTransform(inverse_); }

  ProjectivePoint map(const ProjectivePoint& w) const {
    const Eigen::Vector3cd v = matrix_ * w.vec();
    return {v(0), v(1), v(2)};
  }

  /// Matrix product; apply_transform(p, a * b) == apply_transform(apply_transform(p, a), b).
  friend ProjectiveTransform operator*(const ProjectiveTransform& a, const ProjectiveTransform& b) {
    return ProjectiveTransform(a.matrix_ * b.matrix_);
  }

 private:
  Eigen::Matrix3cd matrix_;
  Eigen::Matrix3cd inverse_;
};

/// The polynomial w -> p(M w).
inline HomoPoly apply_transform(const HomoPoly& p, const ProjectiveTransform& T) {
  const int n = p.degree();
  const Eigen::Matrix3cd& M = T.matrix();
  std::vector<HomoPoly> px(n + 1), py(n + 1), pz(n + 1);
  const HomoPoly lx = LinearForm::from_row(M.row(0)).to_poly();
  const HomoPoly ly = LinearForm::from_row(M.row(1)).to_poly();
  const HomoPoly lz = LinearForm::from_row(M.row(2)).to_poly();
  HomoPoly one(0);
  one(0, 0) = 1.0;
  px[0] = py[0] = pz[0] = one;
  for (int k = 1; k <= n; ++k) {
    px[k] = px[k - 1] * lx;
    py[k] = py[k - 1] * ly;
    pz[k] = pz[k - 1] * lz;
  }
  HomoPoly r(n);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      const cplx a = p(i, j);
      if (a == cplx{0.0}) continue;
      r += a * (px[i] * py[j] * pz[n - i - j]);
    }
  return r;
}

enum class Axis { X, Z };

/// Rotation by phi of (x,y) around z, or of (y,z) around x:
///   around z: [[c, s, 0], [-s, c, 0], [0, 0, 1]]
///   around x: [[1, 0, 0], [0, c, s], [0, -s, c]]
inline ProjectiveTransform rotation(Axis axis, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Identity();
  if (axis == Axis::Z) {
    m(0, 0) = c; m(0, 1) = s;
    m(1, 0) = -s; m(1, 1) = c;
  } else {
    m(1, 1) = c; m(1, 2) = s;
    m(2, 1) = -s; m(2, 2) = c;
  }
  return ProjectiveTransform(m);
}

inline ProjectiveTransform random_rotation(Axis axis, std::uint64_t seed) {
  Rng rng(seed);
  return rotation(axis, rng.angle());
}

/// Real orthogonal matrix Rz(a) Rx(b) Rz(c) with seeded angles; with
/// probability one it moves every coordinate point off any fixed curve.
inline ProjectiveTransform random_orthogonal(Rng& rng) {
  const double a = rng.angle(), b = rng.angle(), c = rng.angle();
  return ProjectiveTransform(rotation(Axis::Z, a).matrix() * rotation(Axis::X, b).matrix() *
                             rotation(Axis::Z, c).matrix());
}

/// Returns l when p = l^n up to tol * ||p||.
///
/// l is assembled from n-th roots of a_n0, a_0n and a_00; the x branch is
/// fixed to the principal root (a common unit factor drops out of l^n) and
/// all n^2 branch pairs for y and z are tried.
inline std::optional<LinearForm> is_power_of_line(const HomoPoly& p, double tol = 1e-10) {
  const int n = p.degree();
  if (n < 1 || p.is_zero()) return std::nullopt;
  const double inv_n = 1.0 / n;
  const cplx rx = std::pow(p(n, 0), inv_n);
  const cplx ry = std::pow(p(0, n), inv_n);
  const cplx rz = std::pow(p(0, 0), inv_n);
  const double scale = p.norm();
  std::optional<LinearForm> best;
  double best_res = tol * scale;
  for (int ky = 0; ky < n; ++ky)
    for (int kz = 0; kz < n; ++kz) {
      const cplx wy = std::polar(1.0, 2.0 * std::numbers::pi * ky / n);
      const cplx wz = std::polar(1.0, 2.0 * std::numbers::pi * kz / n);
      const LinearForm l{rx, ry * wy, rz * wz};
      HomoPoly power(0);
      power(0, 0) = 1.0;
      const HomoPoly lp = l.to_poly();
      for (int k = 0; k < n; ++k) power = power * lp;
      const double res = (power - p).norm();
      if (res <= best_res) {
        best_res = res;
        best = l;
      }
    }
  return best;
}

}  // namespace detrep
