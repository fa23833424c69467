#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "detrep/error.hpp"
#include "detrep/twopar.hpp"
#include "oracles.hpp"

using namespace detrep;

namespace {

Eigen::MatrixXcd int_matrix(int n, Rng& rng) {
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = cplx(std::floor(rng.uniform(-9.0, 10.0)), std::floor(rng.uniform(-9.0, 10.0)));
  return m;
}

AffinePoly affine(int n, std::initializer_list<std::tuple<int, int, cplx>> terms) {
  AffinePoly p(n);
  for (const auto& [i, j, c] : terms) p(i, j) = c;
  return p;
}

// Nearest distance from (x, y) to the listed points.
double nearest(const Root& r, const std::vector<std::pair<cplx, cplx>>& pts) {
  double best = 1e300;
  for (const auto& [x, y] : pts) best = std::min(best, std::hypot(std::abs(r.x - x), std::abs(r.y - y)));
  return best;
}

}  // namespace

TEST(Kron, MatchesIndexFormulaExactly) {
  Rng rng(71);
  for (int n1 = 1; n1 <= 3; ++n1)
    for (int n2 = 1; n2 <= 3; ++n2) {
      Eigen::MatrixXcd M[6];
      for (int k = 0; k < 3; ++k) M[k] = int_matrix(n1, rng);
      for (int k = 3; k < 6; ++k) M[k] = int_matrix(n2, rng);
      const TwoParProblem pr = make_problem(M[0], M[1], M[2], M[3], M[4], M[5]);
      ASSERT_EQ(pr.D0.rows(), n1 * n2);
      for (Eigen::Index r = 0; r < n1 * n2; ++r)
        for (Eigen::Index c = 0; c < n1 * n2; ++c) {
          using oracle::kron_entry;
          EXPECT_EQ(pr.D0(r, c), kron_entry(M[1], M[5], r, c) - kron_entry(M[2], M[4], r, c));
          EXPECT_EQ(pr.D1(r, c), kron_entry(M[2], M[3], r, c) - kron_entry(M[0], M[5], r, c));
          EXPECT_EQ(pr.D2(r, c), kron_entry(M[0], M[4], r, c) - kron_entry(M[1], M[3], r, c));
        }
    }
}

TEST(Kron, SwappingEquationsNegatesUpToShuffle) {
  Rng rng(72);
  const int n1 = 2, n2 = 3;
  Eigen::MatrixXcd M[6];
  for (int k = 0; k < 3; ++k) M[k] = int_matrix(n1, rng);
  for (int k = 3; k < 6; ++k) M[k] = int_matrix(n2, rng);
  const TwoParProblem a = make_problem(M[0], M[1], M[2], M[3], M[4], M[5]);
  const TwoParProblem b = make_problem(M[3], M[4], M[5], M[0], M[1], M[2]);
  // (i, k) -> (k, i)
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n1 * n2, n1 * n2);
  for (int i = 0; i < n1; ++i)
    for (int k = 0; k < n2; ++k) P(k * n1 + i, i * n2 + k) = 1.0;
  EXPECT_EQ(b.D0, -(P * a.D0 * P.transpose()));
  EXPECT_EQ(b.D1, -(P * a.D1 * P.transpose()));
  EXPECT_EQ(b.D2, -(P * a.D2 * P.transpose()));
}

TEST(Kron, DimensionMismatch) {
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(2, 2), b = Eigen::MatrixXcd::Identity(3, 3);
  try {
    make_problem(a, a, b, a, a, a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

TEST(SolveTwoParam, ScalarCaseIsCramer) {
  Rng rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    cplx c[6];
    for (auto& v : c) v = rng.complex_normal();
    auto m = [](cplx v) { return Eigen::MatrixXcd::Constant(1, 1, v); };
    const TwoParProblem pr = make_problem(m(c[0]), m(c[1]), m(c[2]), m(c[3]), m(c[4]), m(c[5]));
    const RootSet rs = solve_two_param(pr);
    ASSERT_EQ(rs.roots.size(), 1u);
    // a1 + x b1 + y c1 = 0, a2 + x b2 + y c2 = 0
    const cplx det = c[1] * c[5] - c[2] * c[4];
    const cplx x = (c[2] * c[3] - c[0] * c[5]) / det, y = (c[0] * c[4] - c[1] * c[3]) / det;
    EXPECT_LE(std::abs(rs.roots[0].x - x), 1e-12 * (1.0 + std::abs(x)));
    EXPECT_LE(std::abs(rs.roots[0].y - y), 1e-12 * (1.0 + std::abs(y)));
  }
}

TEST(SolveSystem, CircleAndHyperbola) {
  const AffinePoly p = affine(2, {{2, 0, 1.0}, {0, 2, 1.0}, {0, 0, -5.0}});
  const AffinePoly q = affine(2, {{1, 1, 1.0}, {0, 0, -2.0}});
  const RootSet rs = solve_system(p, q);
  ASSERT_EQ(rs.roots.size(), 4u);
  EXPECT_EQ(rs.dropped, 0);
  const std::vector<std::pair<cplx, cplx>> want{{1.0, 2.0}, {2.0, 1.0}, {-1.0, -2.0}, {-2.0, -1.0}};
  for (const Root& r : rs.roots) {
    EXPECT_LE(nearest(r, want), 1e-8);
    EXPECT_EQ(r.flag, RootFlag::Simple);
  }
  for (const auto& w : want) {
    double best = 1e300;
    for (const Root& r : rs.roots) best = std::min(best, nearest(r, {w}));
    EXPECT_LE(best, 1e-8);
  }
}

TEST(SolveSystem, TwoLines) {
  const RootSet rs = solve_system(affine(1, {{1, 0, 1.0}, {0, 1, -1.0}}),
                                  affine(1, {{1, 0, 1.0}, {0, 1, 1.0}, {0, 0, -2.0}}));
  ASSERT_EQ(rs.roots.size(), 1u);
  EXPECT_LE(nearest(rs.roots[0], {{1.0, 1.0}}), 1e-13);
}

TEST(SolveSystem, CommonComponentIsSingular) {
  const AffinePoly p = affine(2, {{2, 0, 1.0}, {0, 2, 1.0}, {0, 0, -5.0}});
  try {
    solve_system(p, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SingularDelta0);
    EXPECT_NE(std::string(e.what()).find("out of scope"), std::string::npos);
  }
}

TEST(SolveSystem, TangentIntersectionIsFlagged) {
  // y = x^2 meets y = 0 twice at the origin.
  const RootSet rs = solve_system(affine(2, {{0, 1, 1.0}, {2, 0, -1.0}}), affine(1, {{0, 1, 1.0}}));
  ASSERT_EQ(rs.roots.size(), 2u);
  for (const Root& r : rs.roots) {
    EXPECT_LE(nearest(r, {{0.0, 0.0}}), 1e-6);
    EXPECT_NE(r.flag, RootFlag::Simple);
  }
}

TEST(SolveSystem, BezoutCountOnRandomSystems) {
  Rng rng(74);
  for (int n1 = 1; n1 <= 5; ++n1)
    for (int n2 = n1; n2 <= 5; ++n2) {
      int failures = 0;
      for (int trial = 0; trial < 20; ++trial) {
        const AffinePoly p = oracle::random_affine(n1, rng, true), q = oracle::random_affine(n2, rng, true);
        SolveOptions o;
        o.build.seed = static_cast<std::uint64_t>(trial);
        const RootSet rs = solve_system(p, q, o);
        bool ok = static_cast<int>(rs.roots.size()) == n1 * n2;
        for (const Root& r : rs.roots) {
          ok = ok && r.rel_res <= 1e-8;
          // Independent residual check.
          const double mag = [&] {
            double s = 0.0;
            for (int i = 0; i <= n1; ++i)
              for (int j = 0; i + j <= n1; ++j)
                s += std::abs(p(i, j)) * std::pow(std::abs(r.x), i) * std::pow(std::abs(r.y), j);
            return s;
          }();
          ok = ok && std::abs(oracle::eval_monomials(p, r.x, r.y)) <= 1e-8 * mag;
        }
        if (!ok) ++failures;
      }
      EXPECT_EQ(failures, 0) << n1 << "x" << n2;
    }
}

TEST(SolveSystem, CommutingOperators) {
  Rng rng(75);
  for (int trial = 0; trial < 10; ++trial) {
    const AffinePoly p = oracle::random_affine(3, rng, true), q = oracle::random_affine(3, rng, true);
    const TwoParProblem pr = build_deltas(build(p), build(q));
    EXPECT_LE(commutator_defect(pr), 1e-8);
  }
}

TEST(SolveSystem, UnsupportedDegree) {
  Rng rng(76);
  try {
    solve_system(oracle::random_affine(6, rng, true), oracle::random_affine(2, rng, true));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnsupportedDegree);
  }
}

TEST(AccuracyMetric, ExactAndPerturbedRoots) {
  const AffinePoly p = affine(2, {{2, 0, 1.0}, {0, 2, 1.0}, {0, 0, -5.0}});
  const AffinePoly q = affine(2, {{1, 1, 1.0}, {0, 0, -2.0}});
  RootSet exact;
  for (const auto& [x, y] : std::vector<std::pair<double, double>>{{1, 2}, {2, 1}, {-1, -2}, {-2, -1}})
    exact.roots.push_back(Root{x, y});
  const AccuracyMetric m0 = accuracy_metric(p, q, exact);
  EXPECT_EQ(m0.accuracy, 0.0);
  EXPECT_EQ(m0.counted, 4);

  const double eps = 1e-6;
  RootSet pert = exact;
  for (Root& r : pert.roots) {
    r.x += eps;
    r.y -= eps / 2;
  }
  const AccuracyMetric m1 = accuracy_metric(p, q, pert);
  const double actual = eps * std::sqrt(1.25);
  EXPECT_GE(m1.forward_error_estimate, actual / 10.0);
  EXPECT_LE(m1.forward_error_estimate, actual * 10.0);
  EXPECT_GT(m1.accuracy, 0.0);
  EXPECT_LE(m1.accuracy, m1.forward_error_estimate * 1e3);

  EXPECT_THROW(accuracy_metric(p, q, RootSet{}), Error);
}

TEST(AccuracyMetric, SingularJacobianExcluded) {
  const AffinePoly p = affine(2, {{0, 1, 1.0}, {2, 0, -1.0}}), q = affine(1, {{0, 1, 1.0}});
  RootSet rs;
  rs.roots.push_back(Root{0.0, 0.0});
  rs.roots.push_back(Root{1.0, 1.0});  // not a root, but the Jacobian is regular
  const AccuracyMetric m = accuracy_metric(p, q, rs);
  EXPECT_EQ(m.unreliable, 1);
  EXPECT_EQ(m.counted, 1);
}
