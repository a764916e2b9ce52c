#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "netnpa/scenario.hpp"
#include "netnpa/word.hpp"

namespace netnpa {

enum class Hierarchy { standard_npa, factorisation_bilocal, scalar_extension, inflation, factorisation_star };

inline std::string_view hierarchy_name(Hierarchy h) {
  switch (h) {
    case Hierarchy::standard_npa: return "standard";
    case Hierarchy::factorisation_bilocal: return "factorisation";
    case Hierarchy::scalar_extension: return "scalar-extension";
    case Hierarchy::inflation: return "inflation";
    case Hierarchy::factorisation_star: return "star";
  }
  return "?";
}

inline Hierarchy parse_hierarchy(std::string_view s) {
  for (Hierarchy h : {Hierarchy::standard_npa, Hierarchy::factorisation_bilocal, Hierarchy::scalar_extension,
                      Hierarchy::inflation, Hierarchy::factorisation_star}) {
    if (hierarchy_name(h) == s) return h;
  }
  throw ParseError("unknown hierarchy '" + std::string(s) + "'");
}

struct BuildOptions {
  OutcomeEncoding encoding = OutcomeEncoding::full;
  bool completeness = true;  // false: literal mode, no PVM completeness rows
  std::size_t index_cap = 5000;
};

struct Pin {
  int cls;
  double value;
};

// sum_k coeff_k L(class_k) = rhs
struct LinearRow {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0;
};

// Gamma_{row,col} = Gamma_{row,1} Gamma_{1,col}
struct FactorPair {
  std::size_t row;
  std::size_t col;
  int family;  // index into MomentProblem::families
  bool linearized = false;
};

class MomentProblem {
 public:
  Hierarchy hierarchy = Hierarchy::standard_npa;
  int level = 0;
  int inflation_order = 0;
  BuildOptions options;
  std::shared_ptr<const Alphabet> alphabet;
  std::vector<Word> index;
  std::vector<Word> classes;                      // class id -> key of omega^dagger nu
  std::vector<std::pair<std::size_t, std::size_t>> rep;  // class id -> first cell
  std::vector<int> cell;                          // row-major, -1 = zero word
  std::vector<Pin> pins;
  std::vector<LinearRow> completeness;
  std::vector<LinearRow> linear_rows;             // linearized or fixed-scalar factor rows
  std::vector<FactorPair> factor_pairs;
  std::vector<std::string> families;
  std::vector<std::vector<int>> orbits;           // inflation symmetry, classes per orbit
  std::vector<std::pair<int, int>> identifications;  // scalar extension: class = class

  const Scenario& scenario() const { return alphabet->scenario(); }
  std::size_t size() const { return index.size(); }
  int cls(std::size_t i, std::size_t j) const { return cell[i * index.size() + j]; }

  // Real moment matrices identify a word with its adjoint; the class key is
  // the smaller of the two.
  Word key(const Word& w) const {
    if (w.is_zero()) return w;
    Word d = alphabet->involute(w);
    return d < w ? d : w;
  }

  std::optional<int> find_class(const Word& w) const {
    auto it = lookup_.find(key(w));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  int class_of(const Word& w) const {
    auto c = find_class(w);
    if (!c) throw std::logic_error("word " + alphabet->render(w) + " has no moment class");
    return *c;
  }

  std::optional<std::size_t> position(const Word& w) const {
    auto it = pos_.find(w);
    if (it == pos_.end()) return std::nullopt;
    return it->second;
  }

  // Index positions of the words of length <= len.
  std::size_t prefix(int len) const {
    std::size_t k = 0;
    while (k < index.size() && static_cast<int>(index[k].size()) <= len) ++k;
    return k;
  }

  bool has_pin(int c) const {
    return std::any_of(pins.begin(), pins.end(), [&](const Pin& p) { return p.cls == c; });
  }

  std::optional<double> pinned(int c) const {
    for (const Pin& p : pins) {
      if (p.cls == c) return p.value;
    }
    return std::nullopt;
  }

  bool pending_bilinear() const {
    return std::any_of(factor_pairs.begin(), factor_pairs.end(), [](const FactorPair& f) { return !f.linearized; });
  }

  std::string dump() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "hierarchy " << hierarchy_name(hierarchy) << " level " << level;
    if (inflation_order) os << " copies " << inflation_order;
    os << "\nindex " << index.size() << "\n";
    for (std::size_t i = 0; i < index.size(); ++i) os << "  " << i << " " << alphabet->render(index[i]) << "\n";
    os << "classes " << classes.size() << "\n";
    for (std::size_t c = 0; c < classes.size(); ++c) {
      os << "  " << c << " " << alphabet->render(classes[c]) << "\n";
    }
    os << "pins " << pins.size() << "\n";
    for (const Pin& p : pins) os << "  " << p.cls << " = " << p.value << "\n";
    os << "completeness " << completeness.size() << "\n";
    os << "linear " << linear_rows.size() << "\n";
    os << "factor-pairs " << factor_pairs.size() << "\n";
    for (const FactorPair& f : factor_pairs) {
      os << "  " << families[f.family] << " (" << alphabet->render(index[f.row]) << ", "
         << alphabet->render(index[f.col]) << ")" << (f.linearized ? " linear" : "") << "\n";
    }
    os << "orbits " << orbits.size() << "\n";
    os << "identifications " << identifications.size() << "\n";
    return os.str();
  }

  // Internal: register index and classes.
  void build_cells() {
    const std::size_t n = index.size();
    pos_.clear();
    for (std::size_t i = 0; i < n; ++i) pos_.emplace(index[i], i);
    cell.assign(n * n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        Word w = key(alphabet->pair(index[i], index[j]));
        int c = -1;
        if (!w.is_zero()) {
          auto [it, fresh] = lookup_.try_emplace(w, static_cast<int>(classes.size()));
          if (fresh) {
            classes.push_back(w);
            rep.emplace_back(i, j);
          }
          c = it->second;
        }
        cell[i * n + j] = c;
        cell[j * n + i] = c;
      }
    }
  }

 private:
  std::unordered_map<Word, int, WordHash> lookup_;
  std::unordered_map<Word, std::size_t, WordHash> pos_;
};

namespace detail {

inline void add_completeness(MomentProblem& p) {
  const Alphabet& a = *p.alphabet;
  if (!p.options.completeness || a.projective()) return;
  std::set<std::vector<std::pair<int, double>>> seen;
  const std::size_t shorter = p.prefix(p.level - 1);
  for (int g = 0; g < a.num_groups(); ++g) {
    const auto& group = a.group_letters(g);
    for (std::size_t j = 0; j < shorter; ++j) {
      std::vector<std::size_t> targets;
      for (LetterId l : group) targets.push_back(*p.position(a.concat(a.word({l}), p.index[j])));
      for (std::size_t i = 0; i < p.size(); ++i) {
        std::map<int, double> acc;
        for (std::size_t t : targets) acc[p.cls(i, t)] += 1.0;
        acc[p.cls(i, j)] -= 1.0;
        std::vector<std::pair<int, double>> terms;
        for (auto [c, v] : acc) {
          if (v != 0.0) terms.emplace_back(c, v);
        }
        if (!terms.empty() && seen.insert(terms).second) p.completeness.push_back({terms, 0.0});
      }
    }
  }
}

inline MomentProblem make_core(Hierarchy h, std::shared_ptr<const Alphabet> a, int n, const BuildOptions& opt) {
  if (n < 1) throw std::invalid_argument("level must be >= 1");
  MomentProblem p;
  p.hierarchy = h;
  p.level = n;
  p.inflation_order = a->config().inflation_order;
  p.options = opt;
  p.alphabet = std::move(a);
  p.index = p.alphabet->enumerate(n, opt.index_cap);
  p.build_cells();
  p.pins.push_back({p.cls(0, 0), 1.0});
  detail::add_completeness(p);
  return p;
}

inline std::vector<std::size_t> party_words(const MomentProblem& p, int party) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.index[i].empty() && p.alphabet->is_party_word(p.index[i], party)) out.push_back(i);
  }
  return out;
}

inline void add_pairs(MomentProblem& p, int pa, int pb) {
  const int fam = static_cast<int>(p.families.size());
  p.families.push_back(std::string(1, party_char(pa)) + "-" + party_char(pb));
  for (std::size_t r : party_words(p, pa)) {
    for (std::size_t c : party_words(p, pb)) p.factor_pairs.push_back({r, c, fam});
  }
}

}  // namespace detail

inline MomentProblem build_standard(const Scenario& sc, int n, const BuildOptions& opt = {}) {
  auto a = std::make_shared<const Alphabet>(AlphabetConfig{sc, opt.encoding});
  return detail::make_core(Hierarchy::standard_npa, a, n, opt);
}

inline MomentProblem build_factorisation_bilocal(const Scenario& sc, int n, const BuildOptions& opt = {}) {
  if (sc.topology != Topology::bilocal) throw ScenarioMismatch("factorisation hierarchy needs the bilocal topology");
  auto a = std::make_shared<const Alphabet>(AlphabetConfig{sc, opt.encoding});
  MomentProblem p = detail::make_core(Hierarchy::factorisation_bilocal, a, n, opt);
  detail::add_pairs(p, 0, 2);
  return p;
}

inline MomentProblem build_star_factorisation(const Scenario& sc, int n, const BuildOptions& opt = {}) {
  if (sc.topology != Topology::star4) throw ScenarioMismatch("star hierarchy needs the star4 topology");
  auto a = std::make_shared<const Alphabet>(AlphabetConfig{sc, opt.encoding});
  MomentProblem p = detail::make_core(Hierarchy::factorisation_star, a, n, opt);
  detail::add_pairs(p, 0, 2);
  detail::add_pairs(p, 0, 3);
  detail::add_pairs(p, 2, 3);
  const int fam = static_cast<int>(p.families.size());
  p.families.push_back("AC-D");
  auto d_words = detail::party_words(p, 3);
  for (std::size_t r = 0; r < p.size(); ++r) {
    const Word& w = p.index[r];
    bool has_a = false, has_c = false, other = false;
    for (LetterId l : w.letters()) {
      const int party = a->letter(l).party;
      has_a |= party == 0;
      has_c |= party == 2;
      other |= party != 0 && party != 2;
    }
    if (!has_a || !has_c || other) continue;
    for (std::size_t c : d_words) p.factor_pairs.push_back({r, c, fam});
  }
  return p;
}

inline MomentProblem build_scalar_extension(const Scenario& sc, int n, const BuildOptions& opt = {}) {
  if (sc.topology != Topology::bilocal) throw ScenarioMismatch("scalar extension needs the bilocal topology");
  auto a = std::make_shared<const Alphabet>(AlphabetConfig{sc, opt.encoding, 0, n});
  MomentProblem p = detail::make_core(Hierarchy::scalar_extension, a, n, opt);
  std::vector<Word> gammas{a->one()};
  for (const Word& w : a->enumerate(n)) {
    if (!w.empty() && a->is_party_word(w, 2)) gammas.push_back(w);
  }
  for (LetterId k = 0; k < a->size(); ++k) {
    if (!a->is_scalar(k)) continue;
    const Word& alpha = a->letter(k).payload;
    for (const Word& g : gammas) {
      Word lhs = a->concat(alpha, g), rhs = a->concat(a->word({k}), g);
      if (lhs.is_zero()) continue;
      const int cl = p.class_of(lhs), cr = p.class_of(rhs);
      if (cl != cr) p.identifications.emplace_back(cl, cr);
    }
  }
  return p;
}

// Tuples of permutations, one of {0..m-1} per source.
inline std::vector<std::vector<std::vector<int>>> source_permutations(int sources, int m) {
  std::vector<std::vector<int>> sm;
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  do sm.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<std::vector<std::vector<int>>> out{{}};
  for (int s = 0; s < sources; ++s) {
    std::vector<std::vector<std::vector<int>>> grown;
    for (const auto& t : out) {
      for (const auto& q : sm) {
        auto u = t;
        u.push_back(q);
        grown.push_back(std::move(u));
      }
    }
    out = std::move(grown);
  }
  return out;
}

inline MomentProblem build_inflation(const Scenario& sc, int n, int m, const BuildOptions& opt = {}) {
  if (sc.topology != Topology::bilocal && sc.topology != Topology::triangle) {
    throw ScenarioMismatch("inflation supports the bilocal and triangle topologies");
  }
  if (n < 1 || m < 1) throw std::invalid_argument("inflation needs n >= 1 and m >= 1");
  auto a = std::make_shared<const Alphabet>(AlphabetConfig{sc, opt.encoding, m});
  MomentProblem p = detail::make_core(Hierarchy::inflation, a, n, opt);
  const auto group = source_permutations(a->network().sources, m);
  std::vector<int> parent(p.classes.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
  for (std::size_t c = 0; c < p.classes.size(); ++c) {
    for (const auto& g : group) {
      const int d = p.class_of(a->act(p.classes[c], g));
      const int rc = root(static_cast<int>(c)), rd = root(d);
      if (rc != rd) parent[std::max(rc, rd)] = std::min(rc, rd);
    }
  }
  std::map<int, std::vector<int>> members;
  for (std::size_t c = 0; c < p.classes.size(); ++c) members[root(static_cast<int>(c))].push_back(static_cast<int>(c));
  for (auto& [r, v] : members) {
    if (v.size() > 1) p.orbits.push_back(std::move(v));
  }
  return p;
}

// Pins every product of one letter per party in a subset, from the
// distribution and its marginals. For inflation, pins products of
// diagonal-copy letters with the product of the per-copy marginals.
inline MomentProblem pin_distribution(const MomentProblem& base, const Distribution& d) {
  if (!(d.scenario() == base.scenario())) throw ScenarioMismatch("distribution scenario does not match the problem");
  d.check_no_signalling();
  MomentProblem p = base;
  const Alphabet& a = *p.alphabet;
  const Scenario& sc = p.scenario();
  const int parties = sc.parties();

  // (subset mask, inputs, outputs) choices for one copy, with their marginal
  struct Piece {
    std::vector<int> party, input, output;
    double value;
  };
  std::vector<Piece> pieces;
  for (int mask = 1; mask < (1 << parties); ++mask) {
    std::vector<int> members;
    for (int q = 0; q < parties; ++q) {
      if ((mask >> q) & 1) members.push_back(q);
    }
    std::vector<int> radix;
    for (int q : members) radix.push_back(sc.inputs[q]);
    for (int q : members) radix.push_back(sc.outputs[q]);
    std::size_t total = 1;
    for (int r : radix) total *= r;
    for (std::size_t k = 0; k < total; ++k) {
      auto digits = Distribution::decode(k, radix);
      std::vector<bool> keep(parties, false);
      std::vector<int> ins(parties, 0), outs(parties, 0);
      Piece pc;
      for (std::size_t t = 0; t < members.size(); ++t) {
        keep[members[t]] = true;
        ins[members[t]] = digits[t];
        outs[members[t]] = digits[members.size() + t];
        pc.party.push_back(members[t]);
        pc.input.push_back(digits[t]);
        pc.output.push_back(digits[members.size() + t]);
      }
      pc.value = d.marginal(keep, outs, ins);
      pieces.push_back(std::move(pc));
    }
  }

  auto letter = [&](int party, int copy, int x, int o) -> std::optional<LetterId> {
    std::vector<int> copies;
    if (a.inflated()) copies.assign(a.network().legs[party].size(), copy);
    return a.find(party, copies, x, o);
  };

  if (!a.inflated()) {
    for (const Piece& pc : pieces) {
      std::vector<LetterId> seq;
      bool ok = true;
      for (std::size_t t = 0; t < pc.party.size(); ++t) {
        auto l = letter(pc.party[t], 0, pc.input[t], pc.output[t]);
        if (!l) ok = false;
        else seq.push_back(*l);
      }
      if (!ok) continue;
      auto c = p.find_class(a.canonical(seq));
      if (!c) {
        if (static_cast<int>(pc.party.size()) == parties) {
          throw std::invalid_argument("level too low: full correlator words are not moments");
        }
        continue;
      }
      p.pins.push_back({*c, pc.value});
    }
    return p;
  }

  // inflation: one optional piece per copy, total length <= 2n
  const int m = p.inflation_order;
  std::vector<int> choice(m, -1);
  std::function<void(int, std::size_t)> rec = [&](int copy, std::size_t len) {
    if (copy == m) {
      std::vector<LetterId> seq;
      double value = 1;
      for (int i = 0; i < m; ++i) {
        if (choice[i] < 0) continue;
        const Piece& pc = pieces[choice[i]];
        for (std::size_t t = 0; t < pc.party.size(); ++t) {
          auto l = letter(pc.party[t], i, pc.input[t], pc.output[t]);
          if (!l) return;
          seq.push_back(*l);
        }
        value *= pc.value;
      }
      if (seq.empty()) return;
      if (auto c = p.find_class(a.canonical(seq))) p.pins.push_back({*c, value});
      return;
    }
    choice[copy] = -1;
    rec(copy + 1, len);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      if (len + pieces[k].party.size() > static_cast<std::size_t>(2 * p.level)) continue;
      choice[copy] = static_cast<int>(k);
      rec(copy + 1, len + pieces[k].party.size());
    }
    choice[copy] = -1;
  };
  rec(0, 0);
  return p;
}

struct Residuals {
  double hankel = 0;
  double pins = 0;
  double completeness = 0;
  double symmetry = 0;
  double scalar = 0;
  double linear = 0;
  double factorisation = 0;
  double min_eigenvalue = 0;

  // Largest violation among the linear families.
  double max_linear() const { return std::max({hankel, pins, completeness, symmetry, scalar, linear}); }

  std::string to_text() const {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3);
    os << "  hankel         " << hankel << "\n"
       << "  pins           " << pins << "\n"
       << "  completeness   " << completeness << "\n"
       << "  symmetry       " << symmetry << "\n"
       << "  scalar         " << scalar << "\n"
       << "  linear rows    " << linear << "\n"
       << "  factorisation  " << factorisation << "\n"
       << "  min eigenvalue " << min_eigenvalue << "\n";
    return os.str();
  }
};

inline double class_value(const MomentProblem& p, const Eigen::MatrixXd& x, int c) {
  if (c < 0) return 0.0;
  return x(static_cast<Eigen::Index>(p.rep[c].first), static_cast<Eigen::Index>(p.rep[c].second));
}

inline double factor_residual(const MomentProblem& p, const Eigen::MatrixXd& x) {
  double r = 0;
  for (const FactorPair& f : p.factor_pairs) {
    const auto i = static_cast<Eigen::Index>(f.row), j = static_cast<Eigen::Index>(f.col);
    r = std::max(r, std::abs(x(i, j) - x(i, 0) * x(0, j)));
  }
  return r;
}

inline Residuals check_assignment(const MomentProblem& p, const Eigen::MatrixXd& x) {
  const auto n = static_cast<Eigen::Index>(p.size());
  if (x.rows() != n || x.cols() != n) throw std::invalid_argument("assignment dimension mismatch");
  Residuals r;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      r.hankel = std::max(r.hankel, std::abs(x(i, j) - class_value(p, x, p.cls(i, j))));
    }
  }
  for (const Pin& pin : p.pins) r.pins = std::max(r.pins, std::abs(class_value(p, x, pin.cls) - pin.value));
  auto row = [&](const LinearRow& lr) {
    double s = -lr.rhs;
    for (auto [c, v] : lr.terms) s += v * class_value(p, x, c);
    return std::abs(s);
  };
  for (const LinearRow& lr : p.completeness) r.completeness = std::max(r.completeness, row(lr));
  for (const LinearRow& lr : p.linear_rows) r.linear = std::max(r.linear, row(lr));
  for (const auto& orbit : p.orbits) {
    const double v0 = class_value(p, x, orbit.front());
    for (int c : orbit) r.symmetry = std::max(r.symmetry, std::abs(class_value(p, x, c) - v0));
  }
  for (auto [a, b] : p.identifications) {
    r.scalar = std::max(r.scalar, std::abs(class_value(p, x, a) - class_value(p, x, b)));
  }
  r.factorisation = factor_residual(p, x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (x + x.transpose()), Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  return r;
}

inline Eigen::MatrixXd oracle_assignment(const MomentProblem& p, const QuantumStrategy& s) {
  MomentOracle o(s, p.inflation_order);
  return o.gram(*p.alphabet, p.index);
}

// Omega from an inflation assignment: measurement letters go to the diagonal
// copy 0, k_alpha goes to alpha on its own copy of A.
inline Eigen::MatrixXd inflation_to_scalar_extension(const MomentProblem& xi, const Eigen::MatrixXd& x,
                                                     const MomentProblem& omega, double max_residual = 1e-8) {
  if (xi.hierarchy != Hierarchy::inflation || omega.hierarchy != Hierarchy::scalar_extension) {
    throw std::invalid_argument("expected an inflation problem and a scalar-extension problem");
  }
  if (!(xi.scenario() == omega.scenario()) || xi.scenario().topology != Topology::bilocal ||
      xi.alphabet->config().encoding != omega.alphabet->config().encoding) {
    throw ScenarioMismatch("inflation and scalar-extension problems describe different scenarios");
  }
  const Alphabet& xa = *xi.alphabet;
  const Alphabet& oa = *omega.alphabet;
  const int m = xi.inflation_order;
  const int n = omega.level;
  long d = 0;
  for (LetterId l = 0; l < oa.size(); ++l) {
    if (!oa.is_scalar(l) && oa.letter(l).party == 0) ++d;
  }
  long bound = 0, pw = 1;
  for (int i = 0; i <= n; ++i, pw *= d) bound += pw;
  long kappas = 0;
  for (LetterId l = 0; l < oa.size(); ++l) kappas += oa.is_scalar(l) ? 1 : 0;
  if (m < bound || m < kappas + 1) {
    throw std::invalid_argument("inflation order " + std::to_string(m) + " below the required " +
                                std::to_string(std::max(bound, kappas + 1)));
  }
  const Residuals in = check_assignment(xi, x);
  if (std::max(in.max_linear(), -in.min_eigenvalue) > max_residual) {
    throw std::invalid_argument("inflation assignment violates its constraints");
  }
  std::vector<std::vector<LetterId>> phi(oa.size());
  int next_copy = 1;
  for (LetterId l = 0; l < oa.size(); ++l) {
    const Letter& L = oa.letter(l);
    if (!L.is_scalar()) {
      phi[l].push_back(xa.inflated_letter(L.party, std::vector<int>(xa.network().legs[L.party].size(), 0),
                                          L.input, L.output));
      continue;
    }
    const int k = next_copy++;
    for (LetterId b : L.payload.letters()) {
      const Letter& B = oa.letter(b);
      phi[l].push_back(xa.inflated_letter(0, {k}, B.input, B.output));
    }
  }
  auto map_word = [&](const Word& w) {
    std::vector<LetterId> s;
    for (LetterId l : w.letters()) s.insert(s.end(), phi[l].begin(), phi[l].end());
    return s;
  };
  const auto N = static_cast<Eigen::Index>(omega.size());
  Eigen::MatrixXd out(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto wi = map_word(oa.involute(omega.index[i]));
    for (Eigen::Index j = i; j < N; ++j) {
      auto s = wi;
      const auto wj = map_word(omega.index[j]);
      s.insert(s.end(), wj.begin(), wj.end());
      Word w = xa.canonical(s);
      if (w.is_zero()) {
        out(i, j) = out(j, i) = 0;
        continue;
      }
      auto c = xi.find_class(w);
      if (!c) throw std::invalid_argument("word " + xa.render(w) + " lies outside the inflation index");
      out(i, j) = out(j, i) = class_value(xi, x, *c);
    }
  }
  return out;
}

}  // namespace netnpa
