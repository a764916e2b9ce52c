#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "netnpa/network.hpp"
#include "netnpa/word.hpp"

namespace netnpa {

// Conditional probability table q(outputs|inputs). Tuples are encoded
// row-major in party order.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(Scenario s) : sc_(std::move(s)) {
    sc_.validate();
    table_.assign(input_tuples() * output_tuples(), 0.0);
  }

  const Scenario& scenario() const { return sc_; }

  std::size_t input_tuples() const { return radix_size(sc_.inputs); }
  std::size_t output_tuples() const { return radix_size(sc_.outputs); }

  std::size_t encode(const std::vector<int>& digits, const std::vector<int>& radix) const {
    if (digits.size() != radix.size()) throw std::invalid_argument("tuple length mismatch");
    std::size_t k = 0;
    for (std::size_t i = 0; i < radix.size(); ++i) {
      if (digits[i] < 0 || digits[i] >= radix[i]) throw std::out_of_range("tuple entry out of range");
      k = k * radix[i] + digits[i];
    }
    return k;
  }

  static std::vector<int> decode(std::size_t k, const std::vector<int>& radix) {
    std::vector<int> d(radix.size());
    for (std::size_t i = radix.size(); i-- > 0;) {
      d[i] = static_cast<int>(k % radix[i]);
      k /= radix[i];
    }
    return d;
  }

  std::vector<int> inputs_at(std::size_t k) const { return decode(k, sc_.inputs); }
  std::vector<int> outputs_at(std::size_t k) const { return decode(k, sc_.outputs); }

  double& at(const std::vector<int>& outs, const std::vector<int>& ins) {
    return table_[encode(ins, sc_.inputs) * output_tuples() + encode(outs, sc_.outputs)];
  }
  double operator()(const std::vector<int>& outs, const std::vector<int>& ins) const {
    return table_[encode(ins, sc_.inputs) * output_tuples() + encode(outs, sc_.outputs)];
  }
  double entry(std::size_t in, std::size_t out) const { return table_[in * output_tuples() + out]; }
  double& entry(std::size_t in, std::size_t out) { return table_[in * output_tuples() + out]; }

  // Marginal of the parties flagged in `keep`; outs/ins are full-length
  // tuples, entries of dropped parties are ignored except ins, which
  // selects the context the marginal is read in.
  double marginal(const std::vector<bool>& keep, const std::vector<int>& outs,
                  const std::vector<int>& ins) const {
    const std::size_t in = encode(ins, sc_.inputs);
    double s = 0;
    for (std::size_t o = 0; o < output_tuples(); ++o) {
      auto d = outputs_at(o);
      bool match = true;
      for (std::size_t p = 0; p < keep.size(); ++p) {
        if (keep[p] && d[p] != outs[p]) match = false;
      }
      if (match) s += entry(in, o);
    }
    return s;
  }

  void check_normalized(double tol = 1e-12) const {
    for (std::size_t in = 0; in < input_tuples(); ++in) {
      double s = 0;
      for (std::size_t o = 0; o < output_tuples(); ++o) {
        const double v = entry(in, o);
        if (v < -tol) {
          throw ParseError("negative probability at inputs " + tuple_string(inputs_at(in)));
        }
        s += v;
      }
      if (std::abs(s - 1.0) > tol) {
        std::ostringstream os;
        os << "inputs " << tuple_string(inputs_at(in)) << ": outputs sum to "
           << std::setprecision(17) << s << " (expected 1)";
        throw ParseError(os.str());
      }
    }
  }

  // Every marginal must be independent of the inputs of the parties it
  // leaves out.
  void check_no_signalling(double tol = 1e-9) const {
    const int n = sc_.parties();
    for (int mask = 1; mask < (1 << n) - 1; ++mask) {
      std::vector<bool> keep(n);
      for (int p = 0; p < n; ++p) keep[p] = (mask >> p) & 1;
      for (std::size_t i = 0; i < input_tuples(); ++i) {
        auto ins = inputs_at(i);
        auto ref = ins;
        for (int p = 0; p < n; ++p) {
          if (!keep[p]) ref[p] = 0;
        }
        if (ref == ins) continue;
        for (std::size_t o = 0; o < output_tuples(); ++o) {
          auto outs = outputs_at(o);
          const double a = marginal(keep, outs, ref), b = marginal(keep, outs, ins);
          if (std::abs(a - b) > tol) {
            std::string who;
            for (int p = 0; p < n; ++p) {
              if (keep[p]) who += party_char(p);
            }
            throw std::invalid_argument("signalling: marginal of " + who + " differs between inputs " +
                                        tuple_string(ref) + " and " + tuple_string(ins));
          }
        }
      }
    }
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "scenario: " << topology_name(sc_.topology) << "\n";
    os << "inputs:";
    for (int v : sc_.inputs) os << " " << v;
    os << "\noutputs:";
    for (int v : sc_.outputs) os << " " << v;
    os << "\ntable:\n";
    os << std::setprecision(17);
    for (std::size_t in = 0; in < input_tuples(); ++in) {
      for (std::size_t o = 0; o < output_tuples(); ++o) {
        for (int v : inputs_at(in)) os << v << " ";
        os << "|";
        for (int v : outputs_at(o)) os << " " << v;
        os << " | " << entry(in, o) << "\n";
      }
    }
    return os.str();
  }

  static Distribution parse(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::optional<Topology> topo;
    std::vector<int> ins, outs;
    auto ints = [](const std::string& s) {
      std::istringstream ls(s);
      std::vector<int> v;
      int x;
      while (ls >> x) v.push_back(x);
      if (!ls.eof()) throw ParseError("expected integers in '" + s + "'");
      return v;
    };
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      auto colon = line.find(':');
      if (colon == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected key: value");
      std::string key = line.substr(0, colon), val = line.substr(colon + 1);
      if (key == "scenario") {
        std::istringstream vs(val);
        std::string name;
        vs >> name;
        topo = parse_topology(name);
      } else if (key == "inputs") {
        ins = ints(val);
      } else if (key == "outputs") {
        outs = ints(val);
      } else if (key == "table") {
        break;
      } else {
        throw ParseError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
    }
    if (!topo || ins.empty() || outs.empty()) throw ParseError("missing scenario header");
    Scenario sc{*topo, ins, outs};
    try {
      sc.validate();
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
    Distribution d(sc);
    std::vector<char> filled(d.table_.size(), 0);
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      auto b1 = line.find('|'), b2 = line.rfind('|');
      if (b1 == std::string::npos || b1 == b2) {
        throw ParseError("line " + std::to_string(lineno) + ": expected 'inputs | outputs | value'");
      }
      auto x = ints(line.substr(0, b1));
      auto a = ints(line.substr(b1 + 1, b2 - b1 - 1));
      double v;
      try {
        std::size_t used = 0;
        std::string vs = line.substr(b2 + 1);
        v = std::stod(vs, &used);
        if (vs.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(lineno) + ": bad probability");
      }
      std::size_t k;
      try {
        k = d.encode(x, sc.inputs) * d.output_tuples() + d.encode(a, sc.outputs);
      } catch (const std::exception& e) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
      }
      if (filled[k]) throw ParseError("line " + std::to_string(lineno) + ": duplicate entry");
      filled[k] = 1;
      d.table_[k] = v;
    }
    d.check_normalized(1e-12);
    for (double& v : d.table_) v = std::max(v, 0.0);
    return d;
  }

  static std::string tuple_string(const std::vector<int>& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
  }

  double max_abs_diff(const Distribution& o) const {
    if (!(sc_ == o.sc_)) throw ScenarioMismatch("distributions over different scenarios");
    double m = 0;
    for (std::size_t i = 0; i < table_.size(); ++i) m = std::max(m, std::abs(table_[i] - o.table_[i]));
    return m;
  }

 private:
  static std::size_t radix_size(const std::vector<int>& r) {
    std::size_t n = 1;
    for (int v : r) n *= static_cast<std::size_t>(v);
    return n;
  }

  Scenario sc_;
  std::vector<double> table_;
};

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class StrategyModel {
  tensor,      // independent pure sources, local operators on tensor factors
  commutator,  // one global space, commuting operators, global state tau
};

// Measurement operators pvm[party][input][output]. In the tensor model they
// act on the party's local space (tensor of its legs in Network::legs order);
// in the commutator model they are global matrices.
struct QuantumStrategy {
  StrategyModel model = StrategyModel::tensor;
  Scenario scenario;
  std::vector<std::vector<int>> leg_dims;  // tensor: leg_dims[party][k]
  std::vector<CVector> sources;            // tensor: pure state per source
  CMatrix tau, rho, sigma;                 // commutator model
  std::vector<std::vector<std::vector<CMatrix>>> pvm;

  int local_dim(int party) const {
    int d = 1;
    for (int v : leg_dims[party]) d *= v;
    return d;
  }

  // Dimension of the source's space: product of its legs in party order.
  int source_dim(int s) const {
    const Network net = scenario.network();
    int d = 1;
    for (int p = 0; p < net.parties; ++p) {
      for (std::size_t k = 0; k < net.legs[p].size(); ++k) {
        if (net.legs[p][k] == s) d *= leg_dims[p][k];
      }
    }
    return d;
  }

  int global_dim() const {
    if (model == StrategyModel::commutator) return static_cast<int>(tau.rows());
    int d = 1;
    for (int s = 0; s < scenario.network().sources; ++s) d *= source_dim(s);
    return d;
  }

  // Throws when the PVMs or states are malformed.
  void validate(double tol = 1e-10) const {
    scenario.validate();
    if (static_cast<int>(pvm.size()) != scenario.parties()) throw std::invalid_argument("pvm party count");
    for (int p = 0; p < scenario.parties(); ++p) {
      if (static_cast<int>(pvm[p].size()) != scenario.inputs[p]) throw std::invalid_argument("pvm input count");
      const int d = model == StrategyModel::tensor ? local_dim(p) : global_dim();
      for (const auto& x : pvm[p]) {
        if (static_cast<int>(x.size()) != scenario.outputs[p]) throw std::invalid_argument("pvm output count");
        CMatrix sum = CMatrix::Zero(d, d);
        for (const CMatrix& e : x) {
          if (e.rows() != d || e.cols() != d) throw std::invalid_argument("dimension mismatch");
          if ((e * e - e).norm() > tol || (e - e.adjoint()).norm() > tol) {
            throw std::invalid_argument("measurement element is not an orthogonal projector");
          }
          sum += e;
        }
        if ((sum - CMatrix::Identity(d, d)).norm() > tol) throw std::invalid_argument("PVM not complete");
      }
    }
    if (model == StrategyModel::tensor) {
      const Network net = scenario.network();
      if (static_cast<int>(sources.size()) != net.sources) throw std::invalid_argument("source count");
      for (int s = 0; s < net.sources; ++s) {
        if (sources[s].size() != source_dim(s)) throw std::invalid_argument("dimension mismatch");
        if (std::abs(sources[s].norm() - 1.0) > tol) throw std::invalid_argument("non-normalized state");
      }
    } else {
      if (std::abs(tau.trace().real() - 1.0) > tol) throw std::invalid_argument("non-normalized state");
      Eigen::SelfAdjointEigenSolver<CMatrix> es(tau);
      if (es.eigenvalues().minCoeff() < -tol) throw std::invalid_argument("state not positive");
    }
  }
};

// Positions of tensor legs inside a global state vector. A leg is one copy
// of one source's share held by one party.
class TensorLayout {
 public:
  TensorLayout() = default;
  explicit TensorLayout(std::vector<int> dims) : dims_(std::move(dims)) {
    stride_.assign(dims_.size(), 1);
    for (std::size_t i = dims_.size(); i-- > 1;) stride_[i - 1] = stride_[i] * dims_[i];
    total_ = 1;
    for (int d : dims_) total_ *= d;
  }

  std::size_t total() const { return total_; }

  struct Action {
    std::vector<std::size_t> local;  // offset of each local basis state
    std::vector<std::size_t> rest;   // offsets of the complementary configurations
  };

  Action action(const std::vector<int>& legs) const {
    Action a;
    a.local = {0};
    for (int leg : legs) {
      std::vector<std::size_t> grown;
      for (std::size_t base : a.local) {
        for (int v = 0; v < dims_[leg]; ++v) grown.push_back(base + v * stride_[leg]);
      }
      a.local = std::move(grown);
    }
    std::vector<char> mine(dims_.size(), 0);
    for (int leg : legs) mine[leg] = 1;
    a.rest = {0};
    for (std::size_t l = 0; l < dims_.size(); ++l) {
      if (mine[l]) continue;
      std::vector<std::size_t> grown;
      for (std::size_t base : a.rest) {
        for (int v = 0; v < dims_[l]; ++v) grown.push_back(base + v * stride_[l]);
      }
      a.rest = std::move(grown);
    }
    return a;
  }

  static void apply(const CMatrix& op, const Action& a, CVector& v) {
    CVector buf(a.local.size());
    for (std::size_t base : a.rest) {
      for (std::size_t i = 0; i < a.local.size(); ++i) buf[i] = v[base + a.local[i]];
      CVector out = op * buf;
      for (std::size_t i = 0; i < a.local.size(); ++i) v[base + a.local[i]] = out[i];
    }
  }

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> stride_;
  std::size_t total_ = 1;
};

// Evaluates Tr(tau w) for words over alphabets of the strategy's scenario.
// Inflated letters act on copies of the sources (tensor model only);
// scalar letters k_alpha act as Re Tr(tau alpha) times the identity.
class MomentOracle {
 public:
  explicit MomentOracle(const QuantumStrategy& s, int inflation_order = 0)
      : s_(s), m_(std::max(1, inflation_order)) {
    s_.validate();
    const Network net = s_.scenario.network();
    if (s_.model == StrategyModel::commutator) {
      if (inflation_order > 0) throw std::invalid_argument("inflation oracle needs a tensor strategy");
      Eigen::SelfAdjointEigenSolver<CMatrix> es(s_.tau);
      for (int k = 0; k < es.eigenvalues().size(); ++k) {
        const double lam = es.eigenvalues()[k];
        if (lam > 1e-14) components_.push_back(std::sqrt(lam) * es.eigenvectors().col(k));
      }
      return;
    }
    // Legs ordered by (source, copy, party, k).
    std::vector<int> dims;
    leg_of_.assign(net.parties, {});
    for (int p = 0; p < net.parties; ++p) {
      leg_of_[p].assign(net.legs[p].size(), std::vector<int>(m_, -1));
    }
    for (int src = 0; src < net.sources; ++src) {
      for (int c = 0; c < m_; ++c) {
        for (int p = 0; p < net.parties; ++p) {
          for (std::size_t k = 0; k < net.legs[p].size(); ++k) {
            if (net.legs[p][k] != src) continue;
            leg_of_[p][k][c] = static_cast<int>(dims.size());
            dims.push_back(s_.leg_dims[p][k]);
          }
        }
      }
    }
    layout_ = TensorLayout(dims);
    CVector psi = CVector::Ones(1);
    for (int src = 0; src < net.sources; ++src) {
      for (int c = 0; c < m_; ++c) {
        CVector next(psi.size() * s_.sources[src].size());
        for (Eigen::Index i = 0; i < psi.size(); ++i) {
          next.segment(i * s_.sources[src].size(), s_.sources[src].size()) = psi[i] * s_.sources[src];
        }
        psi = std::move(next);
      }
    }
    components_.push_back(psi);
  }

  std::size_t dim() const { return static_cast<std::size_t>(components_.front().size()); }

  // Stacked vectors w|psi_k> over all components of tau.
  CVector apply(const Alphabet& a, const Word& w) const {
    check(a);
    const std::size_t d = dim();
    CVector out(d * components_.size());
    if (w.is_zero()) return CVector::Zero(out.size());
    double scale = 1.0;
    for (LetterId id : w.letters()) {
      if (a.is_scalar(id)) scale *= value(a, a.letter(id).payload);
    }
    for (std::size_t k = 0; k < components_.size(); ++k) {
      CVector v = components_[k];
      for (std::size_t i = w.size(); i-- > 0;) {
        const LetterId id = w[i];
        if (!a.is_scalar(id)) apply_letter(a, id, v);
      }
      out.segment(k * d, d) = scale * v;
    }
    return out;
  }

  double value(const Alphabet& a, const Word& w) const {
    if (w.is_zero()) return 0.0;
    if (s_.model == StrategyModel::commutator) {
      // direct Tr(tau W), exact for the 0/1 fixtures
      check(a);
      return (s_.tau * word_matrix(a, w)).trace().real();
    }
    CVector v = apply(a, w);
    std::complex<double> s = 0;
    const std::size_t d = dim();
    for (std::size_t k = 0; k < components_.size(); ++k) {
      s += components_[k].dot(v.segment(k * d, d));
    }
    return s.real();
  }

  // Gamma_{ij} = Re <w_i psi | w_j psi>
  Eigen::MatrixXd gram(const Alphabet& a, const std::vector<Word>& index) const {
    if (s_.model == StrategyModel::commutator) {
      // Tr(tau W_i^* W_j) = <W_i, W_j tau>_F, no eigendecomposition
      check(a);
      const int D = s_.global_dim();
      CMatrix V(D * D, index.size()), U(D * D, index.size());
      for (std::size_t j = 0; j < index.size(); ++j) {
        CMatrix W = word_matrix(a, index[j]);
        V.col(j) = Eigen::Map<CVector>(W.data(), D * D);
        CMatrix Wt = W * s_.tau;
        U.col(j) = Eigen::Map<CVector>(Wt.data(), D * D);
      }
      Eigen::MatrixXd g = (V.adjoint() * U).real();
      return 0.5 * (g + g.transpose());
    }
    const std::size_t d = dim() * components_.size();
    CMatrix V(d, index.size());
    for (std::size_t j = 0; j < index.size(); ++j) V.col(j) = apply(a, index[j]);
    Eigen::MatrixXd g = (V.adjoint() * V).real();
    return 0.5 * (g + g.transpose());
  }

 private:
  // Commutator model: the global matrix of a word, scalars folded in.
  CMatrix word_matrix(const Alphabet& a, const Word& w) const {
    const int d = s_.global_dim();
    if (w.is_zero()) return CMatrix::Zero(d, d);
    CMatrix W = CMatrix::Identity(d, d);
    double scale = 1.0;
    for (LetterId id : w.letters()) {
      if (a.is_scalar(id)) {
        scale *= value(a, a.letter(id).payload);
      } else {
        const Letter& l = a.letter(id);
        W = W * s_.pvm[l.party][l.input][l.output];
      }
    }
    return scale * W;
  }

  void check(const Alphabet& a) const {
    if (!(a.scenario() == s_.scenario)) throw ScenarioMismatch("alphabet and strategy scenarios differ");
    if (a.inflated() && a.config().inflation_order > m_) {
      throw std::invalid_argument("oracle built with fewer copies than the alphabet uses");
    }
  }

  void apply_letter(const Alphabet& a, LetterId id, CVector& v) const {
    const Letter& l = a.letter(id);
    const CMatrix& op = letter_matrix(a, l);
    if (s_.model == StrategyModel::commutator) {
      v = op * v;
      return;
    }
    std::vector<int> legs;
    for (std::size_t k = 0; k < leg_of_[l.party].size(); ++k) {
      legs.push_back(leg_of_[l.party][k][l.copies.empty() ? 0 : l.copies[k]]);
    }
    auto key = std::make_pair(l.party, legs);
    auto it = actions_.find(key);
    if (it == actions_.end()) it = actions_.emplace(key, layout_.action(legs)).first;
    TensorLayout::apply(op, it->second, v);
  }

  const CMatrix& letter_matrix(const Alphabet&, const Letter& l) const {
    return s_.pvm[l.party][l.input][l.output];
  }

  QuantumStrategy s_;
  int m_;
  std::vector<CVector> components_;
  TensorLayout layout_;
  std::vector<std::vector<std::vector<int>>> leg_of_;
  mutable std::map<std::pair<int, std::vector<int>>, TensorLayout::Action> actions_;
};

inline Distribution born_eval(const QuantumStrategy& s) {
  Alphabet a({s.scenario});
  MomentOracle oracle(s);
  Distribution d(s.scenario);
  const int n = s.scenario.parties();
  for (std::size_t in = 0; in < d.input_tuples(); ++in) {
    auto x = d.inputs_at(in);
    for (std::size_t o = 0; o < d.output_tuples(); ++o) {
      auto out = d.outputs_at(o);
      std::vector<LetterId> seq;
      for (int p = 0; p < n; ++p) seq.push_back(a.measurement(p, x[p], out[p]));
      d.entry(in, o) = oracle.value(a, a.canonical(seq));
    }
  }
  return d;
}

inline Distribution shared_random_bit(Topology t = Topology::bilocal) {
  Scenario sc = Scenario::uniform(t, 1, 2);
  Distribution d(sc);
  const int n = sc.parties();
  d.at(std::vector<int>(n, 0), std::vector<int>(n, 0)) = 0.5;
  d.at(std::vector<int>(n, 1), std::vector<int>(n, 0)) = 0.5;
  return d;
}

// q(a,b,c) = pA(a) pB(b) pC(c) for binary outputs, one input each.
inline Distribution product_fixture(Topology t = Topology::bilocal) {
  Scenario sc = Scenario::uniform(t, 1, 2);
  const double p0[] = {0.7, 0.4, 0.2, 0.55};
  Distribution d(sc);
  const int n = sc.parties();
  for (std::size_t o = 0; o < d.output_tuples(); ++o) {
    auto out = d.outputs_at(o);
    double v = 1;
    for (int p = 0; p < n; ++p) v *= out[p] == 0 ? p0[p] : 1 - p0[p];
    d.entry(0, o) = v;
  }
  return d;
}

// Direct-sum commutator model of the shared random bit with a mixed global
// state: H = H_0 + H_1, each H_i three qubits A_i B_i C_i.
inline QuantumStrategy mixed_counterexample() {
  QuantumStrategy s;
  s.model = StrategyModel::commutator;
  s.scenario = Scenario::uniform(Topology::bilocal, 1, 2);
  const int D = 16;
  auto ket = [](int bit) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(bit, bit) = 1;
    return m;
  };
  Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
  auto kron3 = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b, const Eigen::Matrix2cd& c) {
    CMatrix out = CMatrix::Zero(8, 8);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        out(i, j) = a(i >> 2, j >> 2) * b((i >> 1) & 1, (j >> 1) & 1) * c(i & 1, j & 1);
      }
    }
    return out;
  };
  auto dsum = [&](const CMatrix& h0, const CMatrix& h1) {
    CMatrix out = CMatrix::Zero(D, D);
    out.topLeftCorner(8, 8) = h0;
    out.bottomRightCorner(8, 8) = h1;
    return out;
  };
  const double r = 1.0 / std::sqrt(2.0);
  s.tau = 0.5 * dsum(kron3(ket(0), ket(0), ket(0)), kron3(ket(1), ket(1), ket(1)));
  s.rho = r * dsum(kron3(ket(0), id2, id2), kron3(ket(1), id2, id2));
  s.sigma = r * dsum(kron3(id2, ket(0), ket(0)), kron3(id2, ket(1), ket(1)));
  s.pvm.assign(3, std::vector<std::vector<CMatrix>>(1));
  for (int a = 0; a < 2; ++a) {
    s.pvm[0][0].push_back(dsum(kron3(ket(a), id2, id2), kron3(ket(a), id2, id2)));
    s.pvm[1][0].push_back(dsum(kron3(id2, ket(a), id2), kron3(id2, ket(a), id2)));
    s.pvm[2][0].push_back(dsum(kron3(id2, id2, ket(a)), kron3(id2, id2, ket(a))));
  }
  return s;
}

enum class Field { real, complex };

namespace detail {

inline CMatrix haar_unitary(int d, std::mt19937_64& rng, Field f) {
  std::normal_distribution<double> g;
  CMatrix z(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      z(i, j) = f == Field::real ? std::complex<double>(g(rng), 0) : std::complex<double>(g(rng), g(rng));
    }
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const std::complex<double> di = r(i, i);
    const double n = std::abs(di);
    if (n > 0) q.col(i) *= di / n;
  }
  return q;
}

inline CVector random_state(int d, std::mt19937_64& rng, Field f) {
  std::normal_distribution<double> g;
  CVector v(d);
  for (int i = 0; i < d; ++i) {
    v[i] = f == Field::real ? std::complex<double>(g(rng), 0) : std::complex<double>(g(rng), g(rng));
  }
  return v / v.norm();
}

}  // namespace detail

// Tensor-model strategy with Haar pure sources and projective measurements
// of balanced ranks. leg_dims lists one dimension per leg, in party order
// then leg order (bilocal: A, B_L, B_R, C).
inline QuantumStrategy random_strategy(const Scenario& sc, const std::vector<int>& leg_dims,
                                       std::uint64_t seed, Field field = Field::real) {
  sc.validate();
  const Network net = sc.network();
  QuantumStrategy s;
  s.model = StrategyModel::tensor;
  s.scenario = sc;
  std::size_t k = 0;
  for (int p = 0; p < net.parties; ++p) {
    s.leg_dims.emplace_back();
    for (std::size_t l = 0; l < net.legs[p].size(); ++l) {
      if (k >= leg_dims.size()) throw std::invalid_argument("too few leg dimensions");
      if (leg_dims[k] < 1) throw std::invalid_argument("dimensions must be >= 1");
      s.leg_dims[p].push_back(leg_dims[k++]);
    }
  }
  if (k != leg_dims.size()) throw std::invalid_argument("too many leg dimensions");
  std::mt19937_64 rng(seed);
  for (int src = 0; src < net.sources; ++src) {
    s.sources.push_back(detail::random_state(s.source_dim(src), rng, field));
  }
  s.pvm.resize(net.parties);
  for (int p = 0; p < net.parties; ++p) {
    const int d = s.local_dim(p);
    for (int x = 0; x < sc.inputs[p]; ++x) {
      CMatrix u = detail::haar_unitary(d, rng, field);
      std::vector<CMatrix> elems;
      int start = 0;
      for (int a = 0; a < sc.outputs[p]; ++a) {
        const int rank = d / sc.outputs[p] + (a < d % sc.outputs[p] ? 1 : 0);
        CMatrix block = u.middleCols(start, rank);
        elems.push_back(block * block.adjoint());
        start += rank;
      }
      s.pvm[p].push_back(std::move(elems));
    }
  }
  return s;
}

}  // namespace netnpa
