#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "netnpa/moment.hpp"

namespace netnpa {

struct SymEntry {
  int i;  // i <= j
  int j;
  double v;
  friend bool operator==(const SymEntry&, const SymEntry&) = default;
};

enum class ObjectiveMode { feasibility, maximize_min_eigenvalue, maximize_linear };

// X(z) = F0 + sum_k z_k F_k, with objective c.z to maximize (maximize_linear)
// or the smallest eigenvalue of X(z) (maximize_min_eigenvalue).
struct AffineSdp {
  int dim = 0;
  std::vector<SymEntry> constant;
  std::vector<std::vector<SymEntry>> basis;
  Eigen::VectorXd objective;
  ObjectiveMode mode = ObjectiveMode::maximize_min_eigenvalue;

  std::size_t vars() const { return basis.size(); }

  Eigen::MatrixXd matrix(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, dim);
    auto add = [&](const std::vector<SymEntry>& es, double s) {
      for (const SymEntry& e : es) {
        x(e.i, e.j) += s * e.v;
        if (e.i != e.j) x(e.j, e.i) += s * e.v;
      }
    };
    add(constant, 1.0);
    for (std::size_t k = 0; k < basis.size(); ++k) add(basis[k], z[static_cast<Eigen::Index>(k)]);
    return x;
  }

  friend bool operator==(const AffineSdp& a, const AffineSdp& b) {
    return a.dim == b.dim && a.constant == b.constant && a.basis == b.basis &&
           a.objective.size() == b.objective.size() && a.objective == b.objective;
  }
};

// Sparse affine expression c0 + sum coeff * var.
struct Expr {
  double c0 = 0;
  std::map<int, double> terms;
};

struct CompileOptions {
  bool relax_bilinear = false;  // drop unresolved factor pairs (a relaxation)
  std::vector<std::pair<Word, double>> objective;  // maximize sum coeff L(word)
  double consistency_tol = 1e-9;
};

// A compiled problem plus what is needed to lift a solution back to the
// full moment matrix.
struct Compiled {
  AffineSdp sdp;
  bool consistent = true;
  double linear_residual = 0;   // largest violated linear row, when inconsistent
  double objective_offset = 0;
  std::vector<Word> matrix_index;
  std::vector<Expr> class_expr;  // per moment class, over sdp variables
  const MomentProblem* problem = nullptr;

  Eigen::MatrixXd lift(const Eigen::VectorXd& z) const {
    std::vector<double> val(class_expr.size());
    for (std::size_t c = 0; c < class_expr.size(); ++c) {
      double v = class_expr[c].c0;
      for (auto [k, a] : class_expr[c].terms) v += a * z[k];
      val[c] = v;
    }
    const auto n = static_cast<Eigen::Index>(problem->size());
    Eigen::MatrixXd x(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const int c = problem->cls(i, j);
        x(i, j) = c < 0 ? 0.0 : val[c];
      }
    }
    return x;
  }
};

namespace detail {

// Rewrites words into the basis without last-outcome letters, using
// sum_a P_a = 1, with orthogonality of distinct outcomes.
class Expander {
 public:
  Expander(const Alphabet& a, bool reduce) : a_(a), reduce_(reduce) {}

  Word key(std::vector<LetterId> s) const {
    Word w = a_.canonical(s, reduce_ || a_.projective());
    if (w.is_zero()) return w;
    std::reverse(s.begin(), s.end());
    Word d = a_.canonical(s, reduce_ || a_.projective());
    return d < w ? d : w;
  }

  const std::map<Word, double>& expand(const Word& w) {
    auto it = memo_.find(w);
    if (it != memo_.end()) return it->second;
    std::map<Word, double> out;
    if (!w.is_zero()) {
      std::size_t pos = w.size();
      if (reduce_) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          if (a_.letter(w[i]).last_outcome) {
            pos = i;
            break;
          }
        }
      }
      if (pos == w.size()) {
        Word k = key(w.letters());
        if (!k.is_zero()) out[k] += 1.0;
      } else {
        std::vector<LetterId> s = w.letters();
        const LetterId last = s[pos];
        std::vector<LetterId> dropped = s;
        dropped.erase(dropped.begin() + static_cast<std::ptrdiff_t>(pos));
        for (auto& [k, v] : expand(a_.canonical(dropped, false))) out[k] += v;
        for (LetterId l : a_.group_letters(a_.group(last))) {
          if (l == last) continue;
          s[pos] = l;
          for (auto& [k, v] : expand(a_.canonical(s, false))) out[k] -= v;
        }
        for (auto i = out.begin(); i != out.end();) {
          i = i->second == 0.0 ? out.erase(i) : std::next(i);
        }
      }
    }
    return memo_.emplace(w, std::move(out)).first->second;
  }

 private:
  const Alphabet& a_;
  bool reduce_;
  std::map<Word, std::map<Word, double>> memo_;
};

// Gaussian elimination that keeps every eliminated variable as an affine
// expression in the remaining free ones.
class Eliminator {
 public:
  explicit Eliminator(int vars) : subst_(vars), eliminated_(vars, false) {}

  Expr resolve(const Expr& e) const {
    Expr out;
    out.c0 = e.c0;
    for (auto [v, a] : e.terms) {
      if (!eliminated_[v]) {
        out.terms[v] += a;
        continue;
      }
      out.c0 += a * subst_[v].c0;
      for (auto [u, b] : subst_[v].terms) out.terms[u] += a * b;
    }
    prune(out);
    return out;
  }

  // Adds sum terms = 0 (rhs folded into c0). Returns the inconsistency
  // when the row reduces to a nonzero constant.
  double add(const Expr& row) {
    Expr r = resolve(row);
    if (r.terms.empty()) return std::abs(r.c0);
    int piv = -1;
    double best = 0;
    for (auto [v, a] : r.terms) {
      if (std::abs(a) >= best) {
        best = std::abs(a);
        piv = v;
      }
    }
    Expr s;
    const double a = r.terms[piv];
    s.c0 = -r.c0 / a;
    for (auto [v, b] : r.terms) {
      if (v != piv) s.terms[v] = -b / a;
    }
    for (int v : order_) {
      auto it = subst_[v].terms.find(piv);
      if (it == subst_[v].terms.end()) continue;
      const double f = it->second;
      subst_[v].terms.erase(it);
      subst_[v].c0 += f * s.c0;
      for (auto [u, b] : s.terms) subst_[v].terms[u] += f * b;
      prune(subst_[v]);
    }
    subst_[piv] = std::move(s);
    eliminated_[piv] = true;
    order_.push_back(piv);
    return 0.0;
  }

  bool eliminated(int v) const { return eliminated_[v]; }

 private:
  static void prune(Expr& e) {
    for (auto i = e.terms.begin(); i != e.terms.end();) {
      i = std::abs(i->second) < 1e-13 ? e.terms.erase(i) : std::next(i);
    }
  }

  std::vector<Expr> subst_;
  std::vector<bool> eliminated_;
  std::vector<int> order_;
};

}  // namespace detail

inline Compiled compile(const MomentProblem& p, const CompileOptions& opt = {}) {
  if (p.pending_bilinear() && !opt.relax_bilinear) {
    throw std::logic_error("problem has bilinear factor pairs; linearize them or use the factorisation solver");
  }
  const Alphabet& a = *p.alphabet;
  const bool reduce = p.options.completeness && !a.projective();
  detail::Expander ex(a, reduce);

  std::unordered_map<Word, int, WordHash> var_of;
  std::vector<Word> vars;
  auto var = [&](const Word& w) {
    auto [it, fresh] = var_of.try_emplace(w, static_cast<int>(vars.size()));
    if (fresh) vars.push_back(w);
    return it->second;
  };
  auto expr_of_class = [&](int c) {
    Expr e;
    if (c < 0) return e;
    for (auto& [w, v] : ex.expand(p.classes[c])) e.terms[var(w)] += v;
    return e;
  };

  Compiled out;
  out.problem = &p;
  for (const Word& w : p.index) {
    if (!reduce || !a.has_last_outcome(w)) out.matrix_index.push_back(w);
  }
  const int n = static_cast<int>(out.matrix_index.size());
  std::vector<int> cell_var(static_cast<std::size_t>(n) * n, -1);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::vector<LetterId> s(out.matrix_index[i].letters().rbegin(), out.matrix_index[i].letters().rend());
      s.insert(s.end(), out.matrix_index[j].letters().begin(), out.matrix_index[j].letters().end());
      Word k = ex.key(s);
      cell_var[i * n + j] = k.is_zero() ? -1 : var(k);
    }
  }
  std::vector<Expr> cls(p.classes.size());
  for (std::size_t c = 0; c < p.classes.size(); ++c) cls[c] = expr_of_class(static_cast<int>(c));

  std::vector<Expr> rows;
  auto diff = [&](const Expr& x, const Expr& y) {
    Expr r = x;
    for (auto [v, b] : y.terms) r.terms[v] -= b;
    r.c0 -= y.c0;
    return r;
  };
  for (const Pin& pin : p.pins) {
    Expr r = cls[pin.cls];
    r.c0 -= pin.value;
    rows.push_back(std::move(r));
  }
  for (const auto& orbit : p.orbits) {
    for (std::size_t k = 1; k < orbit.size(); ++k) rows.push_back(diff(cls[orbit[k]], cls[orbit[0]]));
  }
  for (auto [x, y] : p.identifications) rows.push_back(diff(cls[x], cls[y]));
  auto linear = [&](const LinearRow& lr) {
    Expr r;
    r.c0 = -lr.rhs;
    for (auto [c, v] : lr.terms) {
      for (auto [u, b] : cls[c].terms) r.terms[u] += v * b;
    }
    return r;
  };
  for (const LinearRow& lr : p.linear_rows) rows.push_back(linear(lr));
  if (!reduce) {
    for (const LinearRow& lr : p.completeness) rows.push_back(linear(lr));
  }

  detail::Eliminator el(static_cast<int>(vars.size()));
  for (const Expr& r : rows) {
    const double bad = el.add(r);
    if (bad > opt.consistency_tol) {
      out.consistent = false;
      out.linear_residual = std::max(out.linear_residual, bad);
    }
  }

  // free variables that appear in the matrix become SDP variables
  std::vector<int> sdp_var(vars.size(), -1);
  std::vector<std::map<std::pair<int, int>, double>> acc;
  std::map<std::pair<int, int>, double> konst;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const int v = cell_var[i * n + j];
      if (v < 0) continue;
      Expr e;
      e.terms[v] = 1.0;
      e = el.resolve(e);
      if (e.c0 != 0.0) konst[{i, j}] += e.c0;
      for (auto [u, b] : e.terms) {
        if (sdp_var[u] < 0) {
          sdp_var[u] = static_cast<int>(acc.size());
          acc.emplace_back();
        }
        acc[sdp_var[u]][{i, j}] += b;
      }
    }
  }
  out.sdp.dim = n;
  for (auto [ij, v] : konst) {
    if (v != 0.0) out.sdp.constant.push_back({ij.first, ij.second, v});
  }
  for (auto& m : acc) {
    std::vector<SymEntry> es;
    for (auto [ij, v] : m) {
      if (v != 0.0) es.push_back({ij.first, ij.second, v});
    }
    out.sdp.basis.push_back(std::move(es));
  }
  auto to_sdp = [&](const Expr& e) {
    Expr r = el.resolve(e);
    Expr o;
    o.c0 = r.c0;
    for (auto [u, b] : r.terms) {
      if (sdp_var[u] >= 0) o.terms[sdp_var[u]] += b;
    }
    return o;
  };
  for (const Expr& e : cls) out.class_expr.push_back(to_sdp(e));
  out.sdp.objective = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.sdp.basis.size()));
  if (!opt.objective.empty()) {
    out.sdp.mode = ObjectiveMode::maximize_linear;
    for (const auto& [w, coeff] : opt.objective) {
      Expr e;
      for (auto& [k, v] : ex.expand(a.canonical(w.letters(), false))) e.terms[var(k)] += v;
      Expr o = to_sdp(e);
      out.objective_offset += coeff * o.c0;
      for (auto [u, b] : o.terms) out.sdp.objective[u] += coeff * b;
    }
  }
  return out;
}

enum class Verdict { feasible, infeasible, inconclusive };

inline std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::feasible: return "FEASIBLE";
    case Verdict::infeasible: return "INFEASIBLE";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

struct SolveOptions {
  double tol = 1e-7;
  int max_iter = 50000;
  double margin = 1e-4;
  double gap_tol = 1e-9;
  double accept_tol = 1e-6;  // accepted when progress stalls below this
};

struct IpmResult {
  bool converged = false;
  int iterations = 0;
  Eigen::VectorXd z;  // sdp variables
  double t = 0;       // phase-1 level (maximize_min_eigenvalue)
  double primal = 0;  // primal objective, an upper bound at convergence
  double dual = 0;    // dual objective, attained by z
  std::vector<double> gap_history;
};

namespace detail {

struct SparseSym {
  std::vector<int> r, c;
  std::vector<double> v;  // both triangles listed
};

inline SparseSym expand_sym(const std::vector<SymEntry>& es, double s) {
  SparseSym out;
  for (const SymEntry& e : es) {
    out.r.push_back(e.i);
    out.c.push_back(e.j);
    out.v.push_back(s * e.v);
    if (e.i != e.j) {
      out.r.push_back(e.j);
      out.c.push_back(e.i);
      out.v.push_back(s * e.v);
    }
  }
  return out;
}

inline double inner(const SparseSym& a, const Eigen::MatrixXd& m) {
  double s = 0;
  for (std::size_t k = 0; k < a.v.size(); ++k) s += a.v[k] * m(a.r[k], a.c[k]);
  return s;
}

inline void add_to(const SparseSym& a, double s, Eigen::MatrixXd& m) {
  for (std::size_t k = 0; k < a.v.size(); ++k) m(a.r[k], a.c[k]) += s * a.v[k];
}

// Largest step in [0, 1] keeping X + a dX positive definite, damped.
inline double step_length(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dx) {
  Eigen::LLT<Eigen::MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd t = llt.matrixL().solve(dx);
  t = llt.matrixL().solve(t.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0) return 1.0;
  return std::min(1.0, 0.95 * (-1.0 / lmin));
}

}  // namespace detail

// Primal-dual interior point (HKM direction, Mehrotra predictor-corrector)
// on the LMI form: maximize b.y subject to C - sum y_i A_i >= 0.
inline IpmResult solve_sdp(const AffineSdp& s, const SolveOptions& opt = {}) {
  const int n = s.dim;
  const bool phase1 = s.mode != ObjectiveMode::maximize_linear;
  const int k = static_cast<int>(s.vars()) + (phase1 ? 1 : 0);
  IpmResult res;
  res.z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.vars()));
  if (n == 0) {
    res.converged = true;
    return res;
  }
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  detail::add_to(detail::expand_sym(s.constant, 1.0), 1.0, C);
  std::vector<detail::SparseSym> A;
  for (const auto& f : s.basis) A.push_back(detail::expand_sym(f, -1.0));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  if (phase1) {
    std::vector<SymEntry> id;
    for (int i = 0; i < n; ++i) id.push_back({i, i, 1.0});
    A.push_back(detail::expand_sym(id, 1.0));
    b[k - 1] = 1.0;
  } else {
    b.head(static_cast<Eigen::Index>(s.vars())) = s.objective;
  }
  // column supports of each A_i
  std::vector<std::vector<int>> support(k);
  std::vector<Eigen::MatrixXd> sub(k);
  for (int i = 0; i < k; ++i) {
    std::vector<int> cols(A[i].r.begin(), A[i].r.end());
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    support[i] = cols;
    std::unordered_map<int, int> at;
    for (std::size_t q = 0; q < cols.size(); ++q) at[cols[q]] = static_cast<int>(q);
    sub[i] = Eigen::MatrixXd::Zero(cols.size(), cols.size());
    for (std::size_t e = 0; e < A[i].v.size(); ++e) sub[i](at[A[i].r[e]], at[A[i].c[e]]) += A[i].v[e];
  }
  auto Aop = [&](const Eigen::MatrixXd& m) {
    Eigen::VectorXd out(k);
    for (int i = 0; i < k; ++i) out[i] = detail::inner(A[i], m);
    return out;
  };
  auto Aadj = [&](const Eigen::VectorXd& y) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < k; ++i) {
      if (y[i] != 0.0) detail::add_to(A[i], y[i], m);
    }
    return m;
  };

  double scale = std::max({10.0, std::sqrt(static_cast<double>(n)), C.norm()});
  Eigen::MatrixXd X = scale * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Z = scale * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
  const double bnorm = b.norm(), cnorm = C.norm();
  const int cap = std::min(opt.max_iter, 300);
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;

  for (int it = 0; it < cap; ++it) {
    res.iterations = it;
    Eigen::VectorXd Rp = b - Aop(X);
    Eigen::MatrixXd Rd = C - Z - Aadj(y);
    const double mu = X.cwiseProduct(Z).sum() / n;
    const double pobj = C.cwiseProduct(X).sum(), dobj = b.dot(y);
    const double gap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    const double pinf = Rp.norm() / (1 + bnorm), dinf = Rd.norm() / (1 + cnorm);
    res.gap_history.push_back(gap);
    res.primal = pobj;
    res.dual = dobj;
    const double err = std::max({gap, pinf, dinf});
    if (err < opt.gap_tol) {
      res.converged = true;
      break;
    }
    if (err < 0.9 * best) {
      best = err;
      stalled = 0;
    } else if (++stalled >= 15) {
      res.converged = err < opt.accept_tol;
      break;
    }
    Eigen::LLT<Eigen::MatrixXd> zl(Z);
    if (zl.info() != Eigen::Success) {
      res.converged = err < opt.accept_tol;
      break;
    }
    Eigen::MatrixXd Zi = zl.solve(Eigen::MatrixXd::Identity(n, n));
    Zi = 0.5 * (Zi + Zi.transpose()).eval();

    // Schur complement M_ij = <A_j, Zi A_i X>
    Eigen::MatrixXd M(k, k);
    for (int i = 0; i < k; ++i) {
      const auto& cols = support[i];
      Eigen::MatrixXd zc(n, cols.size()), xr(cols.size(), n);
      for (std::size_t q = 0; q < cols.size(); ++q) {
        zc.col(q) = Zi.col(cols[q]);
        xr.row(q) = X.row(cols[q]);
      }
      Eigen::MatrixXd T = zc * (sub[i] * xr);
      for (int j = i; j < k; ++j) M(i, j) = M(j, i) = detail::inner(A[j], T);
    }
    const double reg = 1e-14 * std::max(1.0, M.diagonal().maxCoeff());
    M.diagonal().array() += reg;
    Eigen::LDLT<Eigen::MatrixXd> ml(M);

    Eigen::MatrixXd ZiRdX = Zi * Rd * X;
    Eigen::VectorXd base = b + Aop(ZiRdX);
    Eigen::VectorXd AZi = Aop(Zi);
    auto direction = [&](double sigma, const Eigen::MatrixXd* corr, Eigen::VectorXd& dy, Eigen::MatrixXd& dX,
                         Eigen::MatrixXd& dZ) {
      Eigen::VectorXd rhs = base - sigma * mu * AZi;
      if (corr) rhs += Aop(*corr);
      dy = ml.solve(rhs);
      dZ = Rd - Aadj(dy);
      dX = -X + sigma * mu * Zi - Zi * dZ * X;
      if (corr) dX -= *corr;
      dX = 0.5 * (dX + dX.transpose()).eval();
    };
    Eigen::VectorXd dya;
    Eigen::MatrixXd dXa, dZa;
    direction(0.0, nullptr, dya, dXa, dZa);
    const double ap = detail::step_length(X, dXa), ad = detail::step_length(Z, dZa);
    const double mua = (X + ap * dXa).cwiseProduct(Z + ad * dZa).sum() / n;
    double sigma = std::pow(std::max(0.0, mua / mu), 3);
    sigma = std::min(1.0, sigma);
    Eigen::MatrixXd corr = Zi * dZa * dXa;
    Eigen::VectorXd dy;
    Eigen::MatrixXd dX, dZ;
    direction(sigma, &corr, dy, dX, dZ);
    const double sp = detail::step_length(X, dX), sd = detail::step_length(Z, dZ);
    if (sp < 1e-12 && sd < 1e-12) {
      res.converged = err < opt.accept_tol;
      break;
    }
    X += sp * dX;
    y += sd * dy;
    Z += sd * dZ;
    X = 0.5 * (X + X.transpose()).eval();
    Z = 0.5 * (Z + Z.transpose()).eval();
  }
  res.z = y.head(static_cast<Eigen::Index>(s.vars()));
  if (phase1) res.t = y[k - 1];
  return res;
}

struct FeasibilityOutcome {
  Verdict verdict = Verdict::inconclusive;
  double t_star = 0;        // phase-1 value (-inf for inconsistent linear rows)
  double upper_bound = 0;   // primal bound on t_star
  double objective = 0;     // maximize_linear value
  double linear_residual = 0;
  Eigen::MatrixXd witness;  // full moment matrix, when feasible
  Residuals residuals;
  int iterations = 0;
  std::string note;
};

inline FeasibilityOutcome solve_feasibility(const Compiled& c, const SolveOptions& opt = {}) {
  FeasibilityOutcome out;
  if (!c.consistent) {
    out.verdict = Verdict::infeasible;
    out.t_star = -std::numeric_limits<double>::infinity();
    out.upper_bound = out.t_star;
    out.linear_residual = c.linear_residual;
    out.note = "linear constraints are inconsistent";
    return out;
  }
  IpmResult r = solve_sdp(c.sdp, opt);
  out.iterations = r.iterations;
  Eigen::MatrixXd x = c.sdp.matrix(r.z);
  double lmin = 0;
  if (c.sdp.dim > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x, Eigen::EigenvaluesOnly);
    lmin = es.eigenvalues().minCoeff();
  }
  out.witness = c.lift(r.z);
  out.residuals = check_assignment(*c.problem, out.witness);
  if (c.sdp.mode == ObjectiveMode::maximize_linear) {
    out.objective = c.sdp.objective.dot(r.z) + c.objective_offset;
    out.t_star = lmin;
    out.upper_bound = r.primal + c.objective_offset;
    out.verdict = r.converged && lmin >= -opt.tol ? Verdict::feasible : Verdict::inconclusive;
    if (!r.converged) out.note = "interior point did not converge";
    return out;
  }
  out.t_star = r.converged ? r.t : lmin;
  out.upper_bound = r.primal;
  if (lmin >= -opt.tol) {
    out.verdict = Verdict::feasible;
  } else if (r.converged && r.primal < -opt.margin) {
    out.verdict = Verdict::infeasible;
  } else {
    out.verdict = Verdict::inconclusive;
    out.note = r.converged ? "phase-1 value within the margin" : "interior point did not converge";
  }
  if (out.verdict != Verdict::feasible) out.witness.resize(0, 0);
  return out;
}

inline FeasibilityOutcome solve(const MomentProblem& p, const SolveOptions& opt = {}, const CompileOptions& co = {}) {
  Compiled c = compile(p, co);
  return solve_feasibility(c, opt);
}

inline Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// SDPA sparse format. SDPA's primal reads: minimize c.x subject to
// sum_k x_k F_k - F0 >= 0, so our F0 is written negated and the objective
// negated (we maximize).
inline std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_sdpa(const AffineSdp& s) {
  std::ostringstream os;
  os << s.vars() << "\n1\n" << s.dim << "\n";
  if (s.vars() > 0) {
    for (std::size_t k = 0; k < s.vars(); ++k) {
      os << (k ? " " : "") << format_double(s.objective.size() ? -s.objective[static_cast<Eigen::Index>(k)] : 0.0);
    }
    os << "\n";
  }
  auto block = [&](std::size_t mat, const std::vector<SymEntry>& es, double sign) {
    for (const SymEntry& e : es) {
      os << mat << " 1 " << e.i + 1 << " " << e.j + 1 << " " << format_double(sign * e.v) << "\n";
    }
  };
  block(0, s.constant, -1.0);
  for (std::size_t k = 0; k < s.vars(); ++k) block(k + 1, s.basis[k], 1.0);
  return os.str();
}

inline AffineSdp parse_sdpa(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '*' || line[0] == '"') continue;
    for (char& ch : line) {
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
    }
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) tokens.push_back(t);
  }
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw ParseError("truncated SDPA file");
    return tokens[pos++];
  };
  auto num = [&](const std::string& t) {
    try {
      std::size_t used = 0;
      double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ParseError("bad number '" + t + "' in SDPA file");
    }
  };
  AffineSdp s;
  const auto m = static_cast<std::size_t>(num(next()));
  if (num(next()) != 1) throw ParseError("only single-block SDPA files are supported");
  s.dim = static_cast<int>(num(next()));
  s.basis.resize(m);
  s.objective = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) s.objective[static_cast<Eigen::Index>(k)] = -num(next());
  for (auto& v : s.objective) {
    if (v == 0.0) v = 0.0;
  }
  bool any = false;
  for (std::size_t k = 0; k < m; ++k) any |= s.objective[static_cast<Eigen::Index>(k)] != 0.0;
  s.mode = any ? ObjectiveMode::maximize_linear : ObjectiveMode::maximize_min_eigenvalue;
  while (pos < tokens.size()) {
    const auto mat = static_cast<std::size_t>(num(next()));
    if (num(next()) != 1) throw ParseError("block index out of range");
    const int i = static_cast<int>(num(next())) - 1, j = static_cast<int>(num(next())) - 1;
    const double v = num(next());
    if (i < 0 || j < i || j >= s.dim || mat > m) throw ParseError("entry index out of range");
    if (mat == 0) s.constant.push_back({i, j, -v});
    else s.basis[mat - 1].push_back({i, j, v});
  }
  return s;
}

inline void export_sdpa(const AffineSdp& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << to_sdpa(s);
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace netnpa
