#include <gtest/gtest.h>

#include "netnpa/moment.hpp"
#include "oracles.hpp"

namespace netnpa {
namespace {

Word w(const MomentProblem& p, const std::string& s) { return p.alphabet->parse(s); }

TEST(Moment, StandardIndexAndClasses) {
  MomentProblem p = build_standard(Scenario::uniform(Topology::bell3, 1, 2), 1);
  EXPECT_EQ(p.size(), 7u);
  const std::size_t a0 = *p.position(w(p, "A[a=0|x=0]"));
  const std::size_t b0 = *p.position(w(p, "B[b=0|y=0]"));
  EXPECT_EQ(p.cls(a0, b0), p.class_of(w(p, "A[a=0|x=0] B[b=0|y=0]")));
  EXPECT_EQ(p.cls(0, 0), p.class_of(p.alphabet->one()));
  ASSERT_TRUE(p.pinned(p.cls(0, 0)));
  EXPECT_EQ(*p.pinned(p.cls(0, 0)), 1.0);
}

TEST(Moment, ClassesAreTransposeSymmetricAndExact) {
  MomentProblem p = build_standard(Scenario::uniform(Topology::bell3, 2, 2), 3);
  const Alphabet& a = *p.alphabet;
  for (std::size_t i = 0; i < p.size(); i += 7) {
    for (std::size_t j = 0; j < p.size(); j += 3) {
      EXPECT_EQ(p.cls(i, j), p.cls(j, i));
      EXPECT_EQ(p.classes[p.cls(i, j)], p.key(a.pair(p.index[i], p.index[j])));
    }
  }
}

TEST(Moment, LowerLevelIsSubProblem) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 2, 2);
  MomentProblem lo = build_standard(sc, 2), hi = build_standard(sc, 3);
  ASSERT_EQ(hi.prefix(2), lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    EXPECT_EQ(lo.index[i], hi.index[i]);
    for (std::size_t j = 0; j < lo.size(); ++j) {
      EXPECT_EQ(lo.classes[lo.cls(i, j)], hi.classes[hi.cls(i, j)]);
    }
  }
}

TEST(Moment, PinsFromSharedRandomBit) {
  MomentProblem p = pin_distribution(build_standard(Scenario::uniform(Topology::bilocal, 1, 2), 3), shared_random_bit());
  EXPECT_EQ(*p.pinned(p.class_of(w(p, "A[a=0|x=0]"))), 0.5);
  EXPECT_EQ(*p.pinned(p.class_of(w(p, "C[c=0|z=0]"))), 0.5);
  EXPECT_EQ(*p.pinned(p.class_of(w(p, "A[a=0|x=0] C[c=0|z=0]"))), 0.5);
  EXPECT_EQ(*p.pinned(p.class_of(w(p, "A[a=0|x=0] B[b=1|y=0] C[c=0|z=0]"))), 0.0);
}

TEST(Moment, PinsFromPointDistribution) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  Distribution d(sc);
  d.at({0, 0, 0}, {0, 0, 0}) = 1;
  MomentProblem p = pin_distribution(build_standard(sc, 3), d);
  EXPECT_EQ(*p.pinned(p.class_of(w(p, "A[a=0|x=0] B[b=0|y=0] C[c=0|z=0]"))), 1.0);
}

TEST(Moment, PinRejectsSignallingAndLowLevel) {
  Scenario sc = Scenario::make(Topology::bilocal, {1, 2, 1}, {2, 2, 1});
  Distribution d(sc);
  d.at({0, 0, 0}, {0, 0, 0}) = 1;
  d.at({1, 0, 0}, {0, 1, 0}) = 1;
  EXPECT_THROW(pin_distribution(build_standard(sc, 3), d), std::invalid_argument);
  EXPECT_THROW(pin_distribution(build_standard(Scenario::uniform(Topology::bilocal, 1, 2), 1), shared_random_bit()),
               std::invalid_argument);
  EXPECT_THROW(pin_distribution(build_standard(Scenario::uniform(Topology::bell3, 1, 2), 3), shared_random_bit()),
               ScenarioMismatch);
}

TEST(Moment, FactorPairsMatchEnumeration) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  MomentProblem p = build_factorisation_bilocal(sc, 3);
  // brute force: reduced A-words and C-words of length 1..3
  const Alphabet& a = *p.alphabet;
  auto count = [&](int party) {
    std::vector<LetterId> ls;
    for (LetterId l = 0; l < a.size(); ++l) {
      if (a.letter(l).party == party) ls.push_back(l);
    }
    std::set<std::vector<LetterId>> words;
    for (std::size_t len = 1; len <= 5; ++len) {
      for (auto& s : testing::all_sequences(ls.size(), len)) {
        std::vector<LetterId> t;
        for (auto v : s) t.push_back(ls[v]);
        auto c = testing::rewrite_closure_min(a, t);
        if (c.size() <= 3) words.insert(c);
      }
    }
    return words.size();
  };
  EXPECT_EQ(p.factor_pairs.size(), count(0) * count(2));
  EXPECT_EQ(p.factor_pairs.size(), 36u);
  for (const FactorPair& f : p.factor_pairs) {
    EXPECT_FALSE(p.index[f.row].empty());
    EXPECT_FALSE(p.index[f.col].empty());
    EXPECT_EQ(p.cls(f.row, f.col), p.cls(f.col, f.row));
  }
  EXPECT_THROW(build_factorisation_bilocal(Scenario::uniform(Topology::bell3, 1, 2), 3), ScenarioMismatch);
}

TEST(Moment, StarFamilies) {
  MomentProblem p = build_star_factorisation(Scenario::uniform(Topology::star4, 1, 2), 4,
                                             {OutcomeEncoding::drop_last});
  ASSERT_EQ(p.families, (std::vector<std::string>{"A-C", "A-D", "C-D", "AC-D"}));
  std::set<int> seen;
  for (const FactorPair& f : p.factor_pairs) {
    seen.insert(f.family);
    for (std::size_t k : {f.row, f.col}) {
      for (LetterId l : p.index[k].letters()) EXPECT_NE(p.alphabet->letter(l).party, 1);
    }
    if (f.family == 3) {
      EXPECT_TRUE(p.alphabet->is_party_word(p.index[f.col], 3));
    }
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(Moment, ScalarExtension) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  MomentProblem p = build_scalar_extension(sc, 3);
  const Alphabet& a = *p.alphabet;
  const int c1 = p.class_of(w(p, "A[a=0|x=0]")), c2 = p.class_of(w(p, "k{A[a=0|x=0]}"));
  bool found = false;
  for (auto [x, y] : p.identifications) found |= (x == c1 && y == c2) || (x == c2 && y == c1);
  EXPECT_TRUE(found);
  EXPECT_EQ(a.parse("k{A[a=0|x=0]} B[b=0|y=0]"), a.parse("B[b=0|y=0] k{A[a=0|x=0]}"));
  EXPECT_GT(p.size(), build_standard(sc, 3).size());
}

TEST(Moment, InflationOrbitsAndPins) {
  Scenario bl = Scenario::uniform(Topology::bilocal, 1, 2);
  MomentProblem p = build_inflation(bl, 2, 2);
  const int c00 = p.class_of(w(p, "A^{0}[a=0|x=0] C^{0}[c=0|z=0]"));
  const int c11 = p.class_of(w(p, "A^{1}[a=0|x=0] C^{1}[c=0|z=0]"));
  bool merged = false;
  for (const auto& o : p.orbits) {
    merged |= std::count(o.begin(), o.end(), c00) && std::count(o.begin(), o.end(), c11);
  }
  EXPECT_TRUE(merged);

  Scenario tri = Scenario::uniform(Topology::triangle, 1, 2);
  MomentProblem t = pin_distribution(build_inflation(tri, 2, 2), shared_random_bit(Topology::triangle));
  const int ab = t.class_of(w(t, "A^{0,0}[a=0|x=0] B^{0,0}[b=0|y=0]"));
  EXPECT_EQ(*t.pinned(ab), 0.5);
  const int bc01 = t.class_of(w(t, "B^{0,0}[b=0|y=0] C^{0,1}[c=0|z=0]"));
  const int bc00 = t.class_of(w(t, "B^{0,0}[b=0|y=0] C^{0,0}[c=0|z=0]"));
  bool chain = false;
  for (const auto& o : t.orbits) chain |= std::count(o.begin(), o.end(), bc01) && std::count(o.begin(), o.end(), bc00);
  EXPECT_TRUE(chain);
  const int ac = t.class_of(w(t, "A^{0,0}[a=0|x=0] C^{1,1}[c=0|z=0]"));
  EXPECT_EQ(*t.pinned(ac), 0.25);
  EXPECT_THROW(build_inflation(Scenario::uniform(Topology::star4, 1, 2), 2, 2), ScenarioMismatch);
  EXPECT_THROW(build_inflation(tri, 3, 3, {OutcomeEncoding::full, true, 100}), std::length_error);
}

TEST(Moment, OrbitsClosedUnderGroup) {
  for (int m : {2, 3}) {
    MomentProblem p = build_inflation(Scenario::uniform(Topology::bilocal, 1, 2), 2, m, {OutcomeEncoding::drop_last});
    std::vector<int> orbit_of(p.classes.size(), -1);
    for (std::size_t k = 0; k < p.orbits.size(); ++k) {
      for (int c : p.orbits[k]) orbit_of[c] = static_cast<int>(k);
    }
    for (const auto& g : source_permutations(2, m)) {
      for (std::size_t c = 0; c < p.classes.size(); ++c) {
        const int d = p.class_of(p.alphabet->act(p.classes[c], g));
        if (d != static_cast<int>(c)) EXPECT_EQ(orbit_of[c], orbit_of[d]);
      }
    }
  }
}

TEST(Moment, CheckAssignmentIdentity) {
  MomentProblem p = build_standard(Scenario::uniform(Topology::bell3, 1, 2), 1);
  Residuals r = check_assignment(p, Eigen::MatrixXd::Identity(7, 7));
  EXPECT_GT(r.hankel, 0.5);
  EXPECT_EQ(std::abs(Eigen::MatrixXd::Identity(7, 7)(0, 0) - 1.0), 0.0);
  EXPECT_GT(r.completeness, 0.5);
}

TEST(Moment, OracleSatisfiesEveryHierarchy) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 2, 2);
  auto s = random_strategy(sc, {2, 2, 2, 2}, 17);
  Distribution d = born_eval(s);
  for (auto p : {build_standard(sc, 2), build_factorisation_bilocal(sc, 2), build_scalar_extension(sc, 2),
                 build_inflation(sc, 2, 2)}) {
    MomentProblem q = pin_distribution(p, d);
    Residuals r = check_assignment(q, oracle_assignment(q, s));
    EXPECT_LE(r.max_linear(), 1e-9) << hierarchy_name(q.hierarchy) << "\n" << r.to_text();
    EXPECT_LE(r.factorisation, 1e-9);
    EXPECT_GE(r.min_eigenvalue, -1e-9);
  }
}

TEST(Moment, CounterexampleFactorResidual) {
  QuantumStrategy s = mixed_counterexample();
  MomentProblem p = pin_distribution(build_factorisation_bilocal(s.scenario, 3), born_eval(s));
  Eigen::MatrixXd x = oracle_assignment(p, s);
  Residuals r = check_assignment(p, x);
  EXPECT_LE(r.max_linear(), 1e-12);
  EXPECT_EQ(r.factorisation, 0.25);
  const std::size_t a0 = *p.position(w(p, "A[a=0|x=0]")), c0 = *p.position(w(p, "C[c=0|z=0]"));
  EXPECT_EQ(x(a0, c0) - x(a0, 0) * x(0, c0), 0.25);
}

TEST(Moment, InflationToScalarExtension) {
  Scenario sc = Scenario::uniform(Topology::bilocal, 1, 2);
  BuildOptions opt{OutcomeEncoding::drop_last};
  auto s = random_strategy(sc, {2, 2, 2, 2}, 4);
  Distribution d = born_eval(s);
  MomentProblem xi = pin_distribution(build_inflation(sc, 2, 3, opt), d);
  MomentProblem om = pin_distribution(build_scalar_extension(sc, 2, opt), d);
  Eigen::MatrixXd x = oracle_assignment(xi, s);
  Eigen::MatrixXd o = inflation_to_scalar_extension(xi, x, om);
  Residuals r = check_assignment(om, o);
  EXPECT_LE(r.max_linear(), 1e-9) << r.to_text();
  EXPECT_GE(r.min_eigenvalue, -1e-9);
  MomentProblem small = build_inflation(sc, 2, 2, opt);
  EXPECT_THROW(inflation_to_scalar_extension(small, oracle_assignment(small, s), om), std::invalid_argument);
}

}  // namespace
}  // namespace netnpa
