#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "netnpa/moment.hpp"

namespace netnpa {

struct RankReport {
  int rank_prev = 0;
  int rank_cur = 0;
  Eigen::VectorXd spectrum_prev;
  Eigen::VectorXd spectrum_cur;
  bool loop = false;
};

inline int numerical_rank(const Eigen::VectorXd& spectrum, double rel_tol) {
  if (spectrum.size() == 0) return 0;
  const double cut = rel_tol * std::max(spectrum.maxCoeff(), 0.0);
  int r = 0;
  for (double v : spectrum) r += v > cut ? 1 : 0;
  return r;
}

inline RankReport rank_loop_check(const Eigen::MatrixXd& g_prev, const Eigen::MatrixXd& g_cur, double rel_tol = 1e-8) {
  const auto k = g_prev.rows();
  if (g_prev.cols() != k || g_cur.rows() != g_cur.cols() || g_cur.rows() < k) {
    throw std::invalid_argument("rank loop check: matrix shapes do not nest");
  }
  const double scale = std::max(1.0, g_cur.cwiseAbs().maxCoeff());
  if (k > 0 && (g_cur.topLeftCorner(k, k) - g_prev).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("rank loop check: previous matrix is not a principal submatrix");
  }
  RankReport r;
  r.spectrum_prev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g_prev, Eigen::EigenvaluesOnly).eigenvalues();
  r.spectrum_cur = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g_cur, Eigen::EigenvaluesOnly).eigenvalues();
  r.rank_prev = numerical_rank(r.spectrum_prev, rel_tol);
  r.rank_cur = numerical_rank(r.spectrum_cur, rel_tol);
  r.loop = r.rank_prev == r.rank_cur;
  return r;
}

inline RankReport rank_loop_check(const MomentProblem& p, const Eigen::MatrixXd& g, double rel_tol = 1e-8) {
  const auto k = static_cast<Eigen::Index>(p.prefix(p.level - 1));
  return rank_loop_check(g.topLeftCorner(k, k), g, rel_tol);
}

struct GnsModel {
  std::shared_ptr<const Alphabet> alphabet;
  int dim = 0;
  Eigen::MatrixXd phi;  // dim x |index|, or empty when not from a reconstruction
  std::vector<Word> index;
  std::vector<Eigen::MatrixXd> ops;  // by letter id
  Eigen::VectorXd state;             // may be empty for a mixed model
  Eigen::MatrixXd tau;
  bool has_projectors = false;
  Eigen::MatrixXd rho, sigma;
  Eigen::MatrixXd v_alpha, v_gamma;  // orthonormal columns; first is the state

  // Projector for (party, input, output); the last outcome is derived when
  // the alphabet drops it.
  Eigen::MatrixXd projector(int party, int input, int output) const {
    const Alphabet& a = *alphabet;
    if (auto l = a.find(party, {}, input, output)) return ops[*l];
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(dim, dim);
    for (int o = 0; o < a.scenario().outputs[party]; ++o) {
      if (o != output) p -= ops[*a.find(party, {}, input, o)];
    }
    return p;
  }
};

struct GnsOptions {
  double rel_tol = 1e-8;    // eigenvalue threshold for the rank
  double psd_tol = 1e-7;    // tolerated negative eigenvalue, relative
  double op_tol = 1e-6;     // least-squares residual of the letter operators
  double gs_tol = 1e-8;     // Gram-Schmidt drop threshold
};

namespace detail {

inline Eigen::MatrixXd gram_schmidt(const Eigen::MatrixXd& vs, double tol) {
  std::vector<Eigen::VectorXd> basis;
  for (Eigen::Index j = 0; j < vs.cols(); ++j) {
    Eigen::VectorXd v = vs.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) v -= b.dot(v) * b;
    }
    const double n = v.norm();
    if (n < tol) continue;
    basis.push_back(v / n);
  }
  Eigen::MatrixXd out(vs.rows(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = basis[k];
  return out;
}

}  // namespace detail

// GNS construction from a moment matrix with a rank loop at its level.
inline GnsModel reconstruct(const MomentProblem& p, const Eigen::MatrixXd& g, const GnsOptions& opt = {}) {
  const Alphabet& a = *p.alphabet;
  if (a.inflated() || p.hierarchy == Hierarchy::scalar_extension) {
    throw std::invalid_argument("reconstruction supports standard and factorisation problems only");
  }
  const auto n = static_cast<Eigen::Index>(p.size());
  if (g.rows() != n || g.cols() != n) throw std::invalid_argument("assignment dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double top = lam.maxCoeff();
  if (lam.minCoeff() < -opt.psd_tol * std::max(1.0, top)) {
    throw std::invalid_argument("assignment is not positive semidefinite (min eigenvalue " +
                                std::to_string(lam.minCoeff()) + ")");
  }
  RankReport rr = rank_loop_check(p, g, opt.rel_tol);
  if (!rr.loop) {
    throw std::invalid_argument("no rank loop: ranks " + std::to_string(rr.rank_prev) + " and " +
                                std::to_string(rr.rank_cur));
  }
  GnsModel m;
  m.alphabet = p.alphabet;
  m.index = p.index;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    if (lam[i] > opt.rel_tol * top) keep.push_back(i);
  }
  m.dim = static_cast<int>(keep.size());
  m.phi.resize(m.dim, n);
  for (int r = 0; r < m.dim; ++r) m.phi.row(r) = std::sqrt(lam[keep[r]]) * es.eigenvectors().col(keep[r]).transpose();

  const std::size_t shorter = p.prefix(p.level - 1);
  m.ops.assign(a.size(), Eigen::MatrixXd());
  for (LetterId l = 0; l < a.size(); ++l) {
    if (a.is_scalar(l)) continue;
    Eigen::MatrixXd src(m.dim, static_cast<Eigen::Index>(shorter)), dst(m.dim, static_cast<Eigen::Index>(shorter));
    for (std::size_t j = 0; j < shorter; ++j) {
      src.col(static_cast<Eigen::Index>(j)) = m.phi.col(static_cast<Eigen::Index>(j));
      Word w = a.concat(a.word({l}), p.index[j]);
      if (w.is_zero()) {
        dst.col(static_cast<Eigen::Index>(j)).setZero();
      } else {
        auto pos = p.position(w);
        if (!pos) throw std::logic_error("word " + a.render(w) + " missing from the index");
        dst.col(static_cast<Eigen::Index>(j)) = m.phi.col(static_cast<Eigen::Index>(*pos));
      }
    }
    // L = dst src^T (src src^T)^-1
    Eigen::MatrixXd gram = src * src.transpose();
    Eigen::MatrixXd L = gram.ldlt().solve(src * dst.transpose()).transpose();
    L = 0.5 * (L + L.transpose()).eval();
    const double res = (L * src - dst).cwiseAbs().maxCoeff();
    if (res > opt.op_tol) {
      throw std::invalid_argument("operator for " + a.render_letter(l) + " has least-squares residual " +
                                  std::to_string(res));
    }
    m.ops[l] = L;
  }
  m.state = m.phi.col(0);
  m.tau = m.state * m.state.transpose();

  if (p.hierarchy == Hierarchy::factorisation_bilocal) {
    m.has_projectors = true;
    auto span = [&](int party) {
      std::vector<Eigen::Index> cols{0};
      for (std::size_t i = 1; i < p.size(); ++i) {
        if (a.is_party_word(p.index[i], party)) cols.push_back(static_cast<Eigen::Index>(i));
      }
      Eigen::MatrixXd vs(m.dim, static_cast<Eigen::Index>(cols.size()));
      for (std::size_t k = 0; k < cols.size(); ++k) vs.col(static_cast<Eigen::Index>(k)) = m.phi.col(cols[k]);
      return detail::gram_schmidt(vs, opt.gs_tol);
    };
    m.v_alpha = span(0);
    m.v_gamma = span(2);
    m.sigma = m.v_alpha * m.v_alpha.transpose();
    m.rho = m.v_gamma * m.v_gamma.transpose();
  }
  return m;
}

struct ModelResiduals {
  double projectivity = 0;
  double self_adjoint = 0;
  double completeness = 0;
  double commutators = 0;
  double sigma_a = 0;     // [A, sigma]
  double rho_c = 0;       // [rho, C]
  double rho_sigma = 0;   // rho sigma - tau
  double sigma_rho = 0;   // sigma rho - rho sigma
  double projectors = 0;  // rho^2 - rho, sigma^2 - sigma
  double trace = 0;       // Tr tau - 1
  double purity = 0;      // tau^2 - tau
  double orthogonality = 0;  // max |<v^{i0}|v^{0j}>|, i,j != 0

  double max() const {
    return std::max({projectivity, self_adjoint, completeness, commutators, sigma_a, rho_c, rho_sigma, sigma_rho,
                     projectors, trace, purity});
  }

  std::string to_text() const {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3);
    os << "  projectivity    " << projectivity << "\n"
       << "  self-adjoint    " << self_adjoint << "\n"
       << "  completeness    " << completeness << "\n"
       << "  commutators     " << commutators << "\n"
       << "  [A,sigma]       " << sigma_a << "\n"
       << "  [rho,C]         " << rho_c << "\n"
       << "  rho sigma - tau " << rho_sigma << "\n"
       << "  sigma rho - rho sigma " << sigma_rho << "\n"
       << "  projectors      " << projectors << "\n"
       << "  trace           " << trace << "\n"
       << "  purity          " << purity << "\n"
       << "  orthogonality   " << orthogonality << "\n";
    return os.str();
  }
};

inline ModelResiduals verify_model(const GnsModel& m) {
  const Alphabet& a = *m.alphabet;
  const Scenario& sc = a.scenario();
  auto norm = [](const Eigen::MatrixXd& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; };
  ModelResiduals r;
  const int parties = sc.parties();
  std::vector<std::vector<std::vector<Eigen::MatrixXd>>> P(parties);
  for (int q = 0; q < parties; ++q) {
    P[q].resize(sc.inputs[q]);
    for (int x = 0; x < sc.inputs[q]; ++x) {
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m.dim, m.dim);
      for (int o = 0; o < sc.outputs[q]; ++o) {
        Eigen::MatrixXd e = m.projector(q, x, o);
        r.projectivity = std::max(r.projectivity, norm(e * e - e));
        r.self_adjoint = std::max(r.self_adjoint, norm(e - e.transpose()));
        sum += e;
        P[q][x].push_back(std::move(e));
      }
      r.completeness = std::max(r.completeness, norm(sum - Eigen::MatrixXd::Identity(m.dim, m.dim)));
    }
  }
  for (int q = 0; q < parties; ++q)
    for (int s = q + 1; s < parties; ++s)
      for (const auto& ex : P[q])
        for (const auto& e : ex)
          for (const auto& fx : P[s])
            for (const auto& f : fx) r.commutators = std::max(r.commutators, norm(e * f - f * e));
  r.trace = std::abs(m.tau.trace() - 1.0);
  r.purity = norm(m.tau * m.tau - m.tau);
  if (m.has_projectors) {
    for (const auto& ex : P[0])
      for (const auto& e : ex) r.sigma_a = std::max(r.sigma_a, norm(e * m.sigma - m.sigma * e));
    for (const auto& ex : P[parties - 1])
      for (const auto& e : ex) r.rho_c = std::max(r.rho_c, norm(m.rho * e - e * m.rho));
    r.rho_sigma = norm(m.rho * m.sigma - m.tau);
    r.sigma_rho = norm(m.sigma * m.rho - m.rho * m.sigma);
    r.projectors = std::max(norm(m.rho * m.rho - m.rho), norm(m.sigma * m.sigma - m.sigma));
    if (m.v_alpha.cols() > 1 && m.v_gamma.cols() > 1) {
      Eigen::MatrixXd cross = m.v_alpha.rightCols(m.v_alpha.cols() - 1).transpose() *
                              m.v_gamma.rightCols(m.v_gamma.cols() - 1);
      r.orthogonality = norm(cross);
    }
  }
  return r;
}

inline Distribution evaluate(const GnsModel& m) {
  const Scenario& sc = m.alphabet->scenario();
  Distribution d(sc);
  const int parties = sc.parties();
  std::vector<int> radix;
  for (int q = 0; q < parties; ++q) radix.push_back(sc.inputs[q]);
  for (int q = 0; q < parties; ++q) radix.push_back(sc.outputs[q]);
  std::size_t total = 1;
  for (int r : radix) total *= r;
  for (std::size_t k = 0; k < total; ++k) {
    auto digits = Distribution::decode(k, radix);
    std::vector<int> ins(digits.begin(), digits.begin() + parties), outs(digits.begin() + parties, digits.end());
    Eigen::MatrixXd op = Eigen::MatrixXd::Identity(m.dim, m.dim);
    for (int q = 0; q < parties; ++q) op = op * m.projector(q, ins[q], outs[q]);
    d.at(outs, ins) = (m.tau * op).trace();
  }
  return d;
}

// Wraps a real commutator-model strategy as a model, for checking it with
// the same residuals.
inline GnsModel model_from_strategy(const QuantumStrategy& s) {
  if (s.model != StrategyModel::commutator) throw std::invalid_argument("expected a commutator-model strategy");
  auto real = [](const CMatrix& x) {
    if (x.imag().cwiseAbs().maxCoeff() > 1e-14) throw std::invalid_argument("model matrices must be real");
    return Eigen::MatrixXd(x.real());
  };
  GnsModel m;
  m.alphabet = std::make_shared<const Alphabet>(AlphabetConfig{s.scenario});
  const Alphabet& a = *m.alphabet;
  m.dim = static_cast<int>(s.tau.rows());
  m.ops.assign(a.size(), Eigen::MatrixXd());
  for (LetterId l = 0; l < a.size(); ++l) {
    const Letter& L = a.letter(l);
    m.ops[l] = real(s.pvm[L.party][L.input][L.output]);
  }
  m.tau = real(s.tau);
  if (s.rho.size() && s.sigma.size()) {
    m.has_projectors = true;
    m.rho = real(s.rho);
    m.sigma = real(s.sigma);
  }
  return m;
}

inline std::string dump_model(const GnsModel& m) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(10);
  const Alphabet& a = *m.alphabet;
  os << "dimension " << m.dim << "\n";
  auto mat = [&](const std::string& name, const Eigen::MatrixXd& x) {
    os << name << "\n";
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      os << " ";
      for (Eigen::Index j = 0; j < x.cols(); ++j) os << " " << (std::abs(x(i, j)) < 5e-11 ? 0.0 : x(i, j));
      os << "\n";
    }
  };
  for (LetterId l = 0; l < a.size(); ++l) {
    if (m.ops[l].size()) mat(a.render_letter(l), m.ops[l]);
  }
  mat("tau", m.tau);
  if (m.has_projectors) {
    mat("rho", m.rho);
    mat("sigma", m.sigma);
  }
  os << "residuals\n" << verify_model(m).to_text();
  return os.str();
}

}  // namespace netnpa
