#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "netnpa/moment.hpp"
#include "netnpa/sdp.hpp"

namespace netnpa {

// Gamma_{r,c} = Gamma_{r,1} Gamma_{1,c} with both factors pinned becomes a
// linear row; the remaining pairs stay bilinear.
inline MomentProblem pin_linearize(const MomentProblem& base) {
  MomentProblem p = base;
  for (FactorPair& f : p.factor_pairs) {
    if (f.linearized) continue;
    const int rc = p.cls(f.row, f.col);
    const auto sr = p.pinned(p.cls(f.row, 0)), sc = p.pinned(p.cls(0, f.col));
    if (!sr || !sc) continue;
    LinearRow row;
    if (rc >= 0) row.terms.emplace_back(rc, 1.0);
    row.rhs = *sr * *sc;
    p.linear_rows.push_back(std::move(row));
    f.linearized = true;
  }
  return p;
}

struct SeesawOptions {
  SolveOptions solve;
  int max_rounds = 25;
  double drift_tol = 1e-8;
  double factor_tol = 1e-7;
  const Eigen::MatrixXd* init = nullptr;  // starting witness over the full index
};

struct SeesawOutcome {
  FeasibilityOutcome outcome;
  int rounds = 0;
  std::vector<double> history;  // factor residual per round
  bool exact = false;  // no bilinear pair was left after linearization
  double factor_residual = 0;
};

inline double verify_factorisation(const MomentProblem& p, const Eigen::MatrixXd& x) { return factor_residual(p, x); }

namespace detail {

// Fixes Gamma_{s,1} for the given side of every pending pair and adds the
// resulting linear rows.
inline MomentProblem fix_side(const MomentProblem& base, const Eigen::MatrixXd& x, bool rows) {
  MomentProblem p = base;
  std::vector<bool> pinned(p.size(), false);
  for (FactorPair& f : p.factor_pairs) {
    if (f.linearized) continue;
    const std::size_t fixed = rows ? f.row : f.col, other = rows ? f.col : f.row;
    const double s = x(static_cast<Eigen::Index>(fixed), 0);
    const int cf = p.cls(fixed, 0), co = p.cls(0, other), cc = p.cls(f.row, f.col);
    if (!pinned[fixed] && cf >= 0) {
      p.pins.push_back({cf, s});
      pinned[fixed] = true;
    }
    LinearRow row;
    if (cc >= 0) row.terms.emplace_back(cc, 1.0);
    if (co >= 0) row.terms.emplace_back(co, -s);
    p.linear_rows.push_back(std::move(row));
    f.linearized = true;
  }
  return p;
}

}  // namespace detail

// Relaxation first (sound for infeasibility), then alternating fixed-scalar
// solves; feasibility is only claimed for a witness satisfying every pair.
inline SeesawOutcome seesaw(const MomentProblem& base, const SeesawOptions& opt = {}) {
  SeesawOutcome out;
  MomentProblem p = pin_linearize(base);
  out.exact = !p.pending_bilinear();
  CompileOptions relax;
  relax.relax_bilinear = true;
  Compiled c = compile(p, relax);
  out.outcome = solve_feasibility(c, opt.solve);
  if (out.outcome.verdict == Verdict::infeasible) return out;
  if (out.exact) {
    if (out.outcome.verdict == Verdict::feasible) out.factor_residual = factor_residual(p, out.outcome.witness);
    return out;
  }
  if (out.outcome.verdict != Verdict::feasible) return out;

  Eigen::MatrixXd x = opt.init ? *opt.init : out.outcome.witness;
  if (x.rows() != static_cast<Eigen::Index>(p.size()) || x.cols() != x.rows()) {
    throw std::invalid_argument("seesaw start has the wrong dimension");
  }
  for (int round = 1; round <= opt.max_rounds; ++round) {
    out.rounds = round;
    Eigen::MatrixXd prev = x;
    for (bool rows : {true, false}) {
      MomentProblem q = detail::fix_side(p, x, rows);
      Compiled cq = compile(q);
      FeasibilityOutcome r = solve_feasibility(cq, opt.solve);
      if (r.verdict != Verdict::feasible) {
        out.outcome.verdict = Verdict::inconclusive;
        out.outcome.witness.resize(0, 0);
        out.outcome.note = "alternating solve lost feasibility in round " + std::to_string(round);
        return out;
      }
      x = r.witness;
      out.outcome.residuals = r.residuals;
      out.outcome.t_star = r.t_star;
      out.outcome.iterations += r.iterations;
    }
    const double fr = factor_residual(p, x);
    out.history.push_back(fr);
    const double drift = (x - prev).cwiseAbs().maxCoeff();
    if (fr <= opt.factor_tol || drift <= opt.drift_tol) {
      out.factor_residual = fr;
      out.outcome.residuals = check_assignment(p, x);
      if (fr <= opt.factor_tol && out.outcome.residuals.min_eigenvalue >= -opt.solve.tol &&
          out.outcome.residuals.max_linear() <= 10 * opt.solve.tol) {
        out.outcome.verdict = Verdict::feasible;
        out.outcome.witness = x;
        out.outcome.note.clear();
      } else {
        out.outcome.verdict = Verdict::inconclusive;
        out.outcome.witness.resize(0, 0);
        out.outcome.note = "alternation stalled with factor residual " + std::to_string(fr);
      }
      return out;
    }
  }
  out.factor_residual = factor_residual(p, x);
  out.outcome.verdict = Verdict::inconclusive;
  out.outcome.witness.resize(0, 0);
  out.outcome.note = "alternation did not converge in " + std::to_string(opt.max_rounds) + " rounds";
  return out;
}

}  // namespace netnpa
