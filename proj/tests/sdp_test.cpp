#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "netnpa/factorisation.hpp"
#include "netnpa/sdp.hpp"

namespace netnpa {
namespace {

AffineSdp two_by_two(double diag_sign) {
  // [[1, z], [z, 1]] or [[z, 1], [1, -z]]
  AffineSdp s;
  s.dim = 2;
  if (diag_sign > 0) {
    s.constant = {{0, 0, 1.0}, {1, 1, 1.0}};
    s.basis = {{{0, 1, 1.0}}};
  } else {
    s.constant = {{0, 1, 1.0}};
    s.basis = {{{0, 0, 1.0}, {1, 1, -1.0}}};
  }
  s.objective = Eigen::VectorXd::Zero(1);
  return s;
}

TEST(Ipm, PhaseOneOnSmallLmis) {
  IpmResult a = solve_sdp(two_by_two(1));
  ASSERT_TRUE(a.converged);
  EXPECT_NEAR(a.t, 1.0, 1e-7);
  EXPECT_NEAR(a.z[0], 0.0, 1e-6);
  IpmResult b = solve_sdp(two_by_two(-1));
  ASSERT_TRUE(b.converged);
  EXPECT_NEAR(b.t, -1.0, 1e-7);
  EXPECT_NEAR(b.primal, -1.0, 1e-7);
}

TEST(Ipm, LinearObjective) {
  // maximize z subject to [[1, z], [z, 1]] >= 0
  AffineSdp s = two_by_two(1);
  s.mode = ObjectiveMode::maximize_linear;
  s.objective[0] = 1.0;
  IpmResult r = solve_sdp(s);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.dual, 1.0, 1e-7);
}

TEST(Compile, SharedRandomBitStandardIsFeasible) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  for (int n = 2; n <= 3; ++n) {
    MomentProblem p = pin_distribution(build_standard(sc, n), shared_random_bit());
    Compiled c = compile(p);
    ASSERT_TRUE(c.consistent);
    FeasibilityOutcome out = solve_feasibility(c);
    EXPECT_EQ(out.verdict, Verdict::feasible) << "n=" << n << " t=" << out.t_star;
    EXPECT_LE(out.residuals.max_linear(), 1e-9);
    EXPECT_GE(out.residuals.min_eigenvalue, -1e-7);
  }
}

TEST(Compile, ReducedIndexDropsLastOutcomes) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  MomentProblem p = build_standard(sc, 1);
  Compiled c = compile(p);
  EXPECT_EQ(p.size(), 7u);
  EXPECT_EQ(c.matrix_index.size(), 4u);
  MomentProblem q = build_standard(sc, 1, {OutcomeEncoding::full, false});
  EXPECT_EQ(compile(q).matrix_index.size(), 7u);
}

TEST(Compile, InconsistentRowsGiveMinusInfinity) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  MomentProblem p = pin_distribution(build_standard(sc, 2), shared_random_bit());
  const Alphabet& a = *p.alphabet;
  const int c = p.class_of(a.word({a.measurement(0, 0, 0), a.measurement(2, 0, 0)}));
  p.linear_rows.push_back({{{c, 1.0}}, 0.25});
  FeasibilityOutcome out = solve(p);
  EXPECT_EQ(out.verdict, Verdict::infeasible);
  EXPECT_TRUE(std::isinf(out.t_star) && out.t_star < 0);
  EXPECT_NEAR(out.linear_residual, 0.25, 1e-12);
}

TEST(Compile, PendingBilinearPairsThrow) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  MomentProblem p = build_factorisation_bilocal(sc, 1);
  EXPECT_THROW(compile(p), std::logic_error);
  CompileOptions relax;
  relax.relax_bilinear = true;
  EXPECT_NO_THROW(compile(p, relax));
}

TEST(Compile, OracleDistributionIsFeasible) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 2, 2);
  for (std::uint64_t seed : {3u, 4u}) {
    Distribution d = born_eval(random_strategy(sc, {2, 2, 2, 2}, seed));
    FeasibilityOutcome out = solve(pin_distribution(build_standard(sc, 2), d));
    EXPECT_EQ(out.verdict, Verdict::feasible) << seed << " t=" << out.t_star;
    EXPECT_LE(out.residuals.max_linear(), 1e-9);
  }
}

TEST(Compile, ChshReachesTsirelson) {
  Scenario sc = Scenario::uniform(Topology::bell2, 2, 2);
  MomentProblem p = build_standard(sc, 2);
  const Alphabet& a = *p.alphabet;
  CompileOptions co;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v) {
          const double sign = ((x * y + u + v) % 2) ? -1.0 : 1.0;
          co.objective.emplace_back(a.word({a.measurement(0, x, u), a.measurement(1, y, v)}), sign);
        }
  FeasibilityOutcome out = solve(p, {}, co);
  EXPECT_EQ(out.verdict, Verdict::feasible);
  EXPECT_NEAR(out.objective, 2 * std::sqrt(2.0), 1e-6);
}

TEST(Sdpa, RoundTripIsByteExact) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 2, 2);
  Distribution d = born_eval(random_strategy(sc, {2, 2, 2, 2}, 11));
  Compiled c = compile(pin_distribution(build_standard(sc, 2), d));
  const std::string text = to_sdpa(c.sdp);
  AffineSdp back = parse_sdpa(text);
  EXPECT_TRUE(back == c.sdp);
  EXPECT_EQ(to_sdpa(back), text);
}

TEST(Sdpa, MinimalFile) {
  AffineSdp s;
  s.dim = 1;
  s.constant = {{0, 0, 1.0}};
  s.objective = Eigen::VectorXd::Zero(0);
  EXPECT_EQ(to_sdpa(s), "0\n1\n1\n0 1 1 1 -1\n");
  EXPECT_TRUE(parse_sdpa(to_sdpa(s)) == s);
  EXPECT_THROW(parse_sdpa("1\n1\n2\n0\n0 1 3 1 1\n"), ParseError);
  EXPECT_THROW(parse_sdpa("1\n2\n"), ParseError);
}

TEST(Projection, ClampsNegativeEigenvalues) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 2, 1;
  Eigen::MatrixXd p = project_psd(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
  EXPECT_LE((project_psd(p) - p).norm(), 1e-12);
  EXPECT_NEAR(p(0, 0), 1.5, 1e-12);
  m(0, 1) = 3;
  EXPECT_THROW(project_psd(m), std::invalid_argument);
}

TEST(Projection, ClampsAndIsNonExpansive) {
  Eigen::MatrixXd d = Eigen::Vector2d(1, -1).asDiagonal();
  EXPECT_LE((project_psd(d) - Eigen::MatrixXd(Eigen::Vector2d(1, 0).asDiagonal())).norm(), 1e-15);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  auto sym = [&](int n) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
    return m;
  };
  for (int k = 0; k < 20; ++k) {
    Eigen::MatrixXd a = sym(6), b = sym(6);
    Eigen::MatrixXd psd = a * a.transpose();
    EXPECT_LE((project_psd(psd) - psd).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
    double neg = 0;
    for (double v : ev) neg += v < 0 ? v * v : 0.0;
    EXPECT_NEAR((a - project_psd(a)).squaredNorm(), neg, 1e-10);
    EXPECT_LE((project_psd(a) - project_psd(b)).norm(), (a - b).norm() + 1e-12);
  }
}

TEST(Compile, ScalarExtensionCompilesAndSolves) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  MomentProblem p = pin_distribution(build_scalar_extension(sc, 2), product_fixture());
  ASSERT_FALSE(p.identifications.empty());
  FeasibilityOutcome out = solve(p);
  EXPECT_EQ(out.verdict, Verdict::feasible);
  EXPECT_LE(out.residuals.scalar, 1e-9);
}

TEST(Solve, DeterministicAcrossRuns) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 2, 2);
  Distribution d = born_eval(random_strategy(sc, {2, 2, 2, 2}, 21));
  MomentProblem p = pin_distribution(build_standard(sc, 2), d);
  FeasibilityOutcome a = solve(p), b = solve(p);
  EXPECT_EQ(a.t_star, b.t_star);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_TRUE(a.witness == b.witness);
  EXPECT_EQ(to_sdpa(compile(p).sdp), to_sdpa(compile(p).sdp));
}

TEST(Solve, InfeasibilityIsMonotoneInLevel) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  for (int n = 2; n <= 4; ++n) {
    MomentProblem p = pin_linearize(pin_distribution(build_factorisation_bilocal(sc, n), shared_random_bit(Topology::bilocal)));
    CompileOptions co;
    co.relax_bilinear = true;
    FeasibilityOutcome o = solve(p, {}, co);
    EXPECT_EQ(o.verdict, Verdict::infeasible) << "n=" << n;
  }
}

TEST(Solve, FeasibleWitnessPassesCheck) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 2, 2);
  for (std::uint64_t seed : {30u, 31u}) {
    Distribution d = born_eval(random_strategy(sc, {2, 2, 2, 2}, seed));
    MomentProblem p = pin_distribution(build_standard(sc, 3), d);
    FeasibilityOutcome o = solve(p);
    ASSERT_EQ(o.verdict, Verdict::feasible);
    Residuals r = check_assignment(p, o.witness);
    EXPECT_LE(r.max_linear(), 1e-6);
    EXPECT_GE(r.min_eigenvalue, -1e-6);
  }
}

}  // namespace
}  // namespace netnpa
