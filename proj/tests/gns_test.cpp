#include <gtest/gtest.h>

#include "netnpa/gns.hpp"

namespace netnpa {
namespace {

struct Loop {
  MomentProblem p;
  Eigen::MatrixXd g;
};

Loop find_loop(const QuantumStrategy& s, OutcomeEncoding enc, int max_n = 5) {
  for (int n = 2; n <= max_n; ++n) {
    MomentProblem p = build_factorisation_bilocal(s.scenario, n, {enc, true, 20000});
    Eigen::MatrixXd g = oracle_assignment(p, s);
    if (rank_loop_check(p, g).loop) return {p, g};
  }
  throw std::runtime_error("no rank loop");
}

TEST(RankLoop, DeterministicIsRankOne) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  auto s = random_strategy(sc, {1, 1, 1, 1}, 3);
  for (int n = 4; n <= 5; ++n) {
    MomentProblem p = build_standard(sc, n, {OutcomeEncoding::drop_last});
    RankReport r = rank_loop_check(p, oracle_assignment(p, s));
    EXPECT_EQ(r.rank_prev, 1);
    EXPECT_EQ(r.rank_cur, 1);
    EXPECT_TRUE(r.loop);
  }
}

TEST(RankLoop, RejectsNonNestedMatrices) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2), b = 2 * Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(rank_loop_check(a, b), std::invalid_argument);
  EXPECT_THROW(rank_loop_check(b, a), std::invalid_argument);
}

TEST(RankLoop, RanksBoundedByDimension) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 2, 2);
  auto s = random_strategy(sc, {1, 2, 2, 1}, 5);
  Loop l = find_loop(s, OutcomeEncoding::drop_last);
  EXPECT_LE(rank_loop_check(l.p, l.g).rank_cur, 4);
}

TEST(Reconstruct, DeterministicIsOneDimensional) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  auto s = random_strategy(sc, {1, 1, 1, 1}, 3);
  MomentProblem p = build_factorisation_bilocal(sc, 4, {OutcomeEncoding::drop_last});
  GnsModel m = reconstruct(p, oracle_assignment(p, s));
  EXPECT_EQ(m.dim, 1);
  for (const auto& op : m.ops) {
    if (op.size()) EXPECT_TRUE(std::abs(op(0, 0)) < 1e-12 || std::abs(op(0, 0) - 1) < 1e-12);
  }
  EXPECT_NEAR(m.rho(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(m.sigma(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(m.tau(0, 0), 1.0, 1e-12);
  EXPECT_LE(evaluate(m).max_abs_diff(born_eval(s)), 1e-12);
}

TEST(Reconstruct, RoundTripOnRandomStrategies) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 2, 2);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto s = random_strategy(sc, {2, 2, 2, 2}, seed);
    Loop l = find_loop(s, OutcomeEncoding::drop_last);
    GnsModel m = reconstruct(l.p, l.g);
    EXPECT_LE(m.dim, 16);
    EXPECT_LE((m.phi.transpose() * m.phi - l.g).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(evaluate(m).max_abs_diff(born_eval(s)), 1e-6);
    ModelResiduals r = verify_model(m);
    EXPECT_LE(r.max(), 1e-7) << r.to_text();
    EXPECT_LE(r.orthogonality, 1e-8);
  }
}

TEST(Reconstruct, FullEncodingRoundTrip) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  auto s = random_strategy(sc, {2, 2, 2, 2}, 12);
  Loop l = find_loop(s, OutcomeEncoding::full);
  GnsModel m = reconstruct(l.p, l.g);
  EXPECT_LE(evaluate(m).max_abs_diff(born_eval(s)), 1e-6);
  EXPECT_LE(verify_model(m).max(), 1e-7);
}

TEST(Reconstruct, ClassicalMixture) {
  // uniform mixture of the eight deterministic strategies on one input
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  Distribution d(sc);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) d.at({a, b, c}, {0, 0, 0}) = 0.125;
  MomentProblem p = build_standard(sc, 4, {OutcomeEncoding::drop_last});
  const Alphabet& al = *p.alphabet;
  const auto n = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      // commuting projectors: a word is the product of its distinct letters
      Word w = al.pair(p.index[i], p.index[j]);
      g(i, j) = w.is_zero() ? 0.0 : std::pow(0.5, static_cast<double>(w.size()));
    }
  }
  GnsModel m = reconstruct(p, g);
  EXPECT_EQ(m.dim, 8);
  EXPECT_LE(evaluate(m).max_abs_diff(d), 1e-10);
}

TEST(Reconstruct, RejectsWithoutLoopOrPsd) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 2, 2);
  auto s = random_strategy(sc, {2, 2, 2, 2}, 0);
  MomentProblem p = build_factorisation_bilocal(sc, 2, {OutcomeEncoding::drop_last});
  Eigen::MatrixXd g = oracle_assignment(p, s);
  EXPECT_THROW(reconstruct(p, g), std::invalid_argument);
  Eigen::MatrixXd bad = g;
  bad(1, 1) -= 1.0;
  EXPECT_THROW(reconstruct(p, bad), std::invalid_argument);
}

TEST(Reconstruct, CounterexampleBreaksRhoSigma) {
  QuantumStrategy s = mixed_counterexample();
  Loop l = find_loop(s, OutcomeEncoding::full);
  const double c = factor_residual(l.p, l.g);
  EXPECT_NEAR(c, 0.25, 1e-12);
  GnsModel m = reconstruct(l.p, l.g);
  EXPECT_GE((m.rho * m.sigma - m.tau).cwiseAbs().maxCoeff(), c / 2);
}

TEST(VerifyModel, CounterexamplePurityAndPerturbation) {
  GnsModel m = model_from_strategy(mixed_counterexample());
  ModelResiduals r = verify_model(m);
  EXPECT_GT(r.purity, 0.1);
  EXPECT_LE(r.commutators, 1e-12);
  EXPECT_LE(r.rho_sigma, 1e-12);
  EXPECT_LE(r.rho_c, 1e-12);

  Scenario sc = Scenario::uniform(Topology::bilocal, 2, 2);
  auto s = random_strategy(sc, {2, 2, 2, 2}, 1);
  Loop l = find_loop(s, OutcomeEncoding::drop_last);
  GnsModel g = reconstruct(l.p, l.g);
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(g.dim, g.dim);
  const double t = 0.3;
  rot(0, 0) = rot(1, 1) = std::cos(t);
  rot(0, 1) = -std::sin(t);
  rot(1, 0) = std::sin(t);
  g.rho = rot * g.rho * rot.transpose();
  ModelResiduals q = verify_model(g);
  EXPECT_GT(q.rho_c, 1e-3);
  EXPECT_LE(q.sigma_a, 1e-7);
  EXPECT_LE(q.commutators, 1e-7);
  EXPECT_LE(q.projectivity, 1e-7);
}

TEST(Dump, ContainsResidualTable) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  auto s = random_strategy(sc, {1, 1, 1, 1}, 3);
  MomentProblem p = build_factorisation_bilocal(sc, 4, {OutcomeEncoding::drop_last});
  const std::string text = dump_model(reconstruct(p, oracle_assignment(p, s)));
  EXPECT_NE(text.find("dimension 1"), std::string::npos);
  EXPECT_NE(text.find("residuals"), std::string::npos);
  EXPECT_EQ(text, dump_model(reconstruct(p, oracle_assignment(p, s))));
}

}  // namespace
}  // namespace netnpa
