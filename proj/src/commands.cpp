#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace netnpa::cli {

namespace {

OutcomeEncoding parse_encoding(const std::string& s) {
  if (s == "full") return OutcomeEncoding::full;
  if (s == "drop_last") return OutcomeEncoding::drop_last;
  throw ParseError("unknown encoding '" + s + "' (full or drop_last)");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string short_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

bool bilinear_hierarchy(const RunConfig& c) {
  const Hierarchy h = parse_hierarchy(c.hierarchy);
  return h == Hierarchy::factorisation_bilocal || h == Hierarchy::factorisation_star;
}

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.tol = c.tol;
  o.margin = c.margin;
  o.max_iter = c.max_iter;
  return o;
}

void problem_summary(const MomentProblem& p, std::ostream& out) {
  std::size_t linear = 0;
  for (const FactorPair& f : p.factor_pairs) linear += f.linearized ? 1 : 0;
  out << "problem\n"
      << "  index           " << p.size() << "\n"
      << "  classes         " << p.classes.size() << "\n"
      << "  pins            " << p.pins.size() << "\n"
      << "  completeness    " << p.completeness.size() << "\n"
      << "  linear rows     " << p.linear_rows.size() << "\n"
      << "  factor pairs    " << p.factor_pairs.size() << " (" << linear << " linear)\n"
      << "  orbits          " << p.orbits.size() << "\n"
      << "  identifications " << p.identifications.size() << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int exit_of(Verdict v) {
  switch (v) {
    case Verdict::feasible: return ExitCode::feasible;
    case Verdict::infeasible: return ExitCode::infeasible;
    case Verdict::inconclusive: return ExitCode::inconclusive;
  }
  return ExitCode::inconclusive;
}

}  // namespace

std::string config_text(const RunConfig& c) {
  std::ostringstream os;
  os << "config\n"
     << "  command     " << c.command << "\n"
     << "  scenario    " << c.scenario << "\n"
     << "  hierarchy   " << c.hierarchy << "\n"
     << "  level       " << c.n << "\n"
     << "  copies      " << c.m << "\n"
     << "  encoding    " << c.encoding << "\n"
     << "  completeness " << (c.literal ? "off (literal)" : "on") << "\n"
     << "  inputs      " << c.inputs << "\n"
     << "  outputs     " << c.outputs << "\n"
     << "  dims        ";
  if (c.dims.empty()) os << "default";
  for (std::size_t i = 0; i < c.dims.size(); ++i) os << (i ? "," : "") << c.dims[i];
  os << "\n"
     << "  tol         " << short_num(c.tol) << "\n"
     << "  margin      " << short_num(c.margin) << "\n"
     << "  max-iter    " << c.max_iter << "\n"
     << "  rounds      " << c.rounds << "\n"
     << "  seed        " << (c.seed_set ? std::to_string(c.seed) : "none") << "\n"
     << "  index-cap   " << c.index_cap << "\n"
     << "  input       " << (c.input.empty() ? "-" : c.input) << "\n"
     << "  output      " << (c.output.empty() ? "-" : c.output) << "\n";
  return os.str();
}

MomentProblem build_problem(const RunConfig& c, const Scenario& sc) {
  if (c.n < 1) throw ParseError("--n must be at least 1");
  BuildOptions bo{parse_encoding(c.encoding), !c.literal, c.index_cap};
  switch (parse_hierarchy(c.hierarchy)) {
    case Hierarchy::standard_npa: return build_standard(sc, c.n, bo);
    case Hierarchy::factorisation_bilocal: return build_factorisation_bilocal(sc, c.n, bo);
    case Hierarchy::scalar_extension: return build_scalar_extension(sc, c.n, bo);
    case Hierarchy::inflation: return build_inflation(sc, c.n, c.m, bo);
    case Hierarchy::factorisation_star: return build_star_factorisation(sc, c.n, bo);
  }
  throw std::logic_error("unhandled hierarchy");
}

Distribution load_distribution(const RunConfig& c) {
  const Topology t = parse_topology(c.scenario);
  if (c.input.empty()) throw ParseError("a distribution file or fixture name is required");
  if (c.input == "shared_random_bit") return shared_random_bit(t);
  if (c.input == "product") return product_fixture(t);
  Distribution d = Distribution::parse(read_file(c.input));
  if (d.scenario().topology != t) {
    throw ScenarioMismatch("distribution is for " + std::string(topology_name(d.scenario().topology)) +
                           ", expected " + c.scenario);
  }
  return d;
}

std::string assignment_to_text(const RunConfig& c, const MomentProblem& p, const Eigen::MatrixXd& x) {
  std::ostringstream os;
  os << "assignment\n"
     << "scenario: " << c.scenario << "\n"
     << "inputs: " << c.inputs << "\n"
     << "outputs: " << c.outputs << "\n"
     << "hierarchy: " << c.hierarchy << "\n"
     << "level: " << c.n << "\n"
     << "copies: " << c.m << "\n"
     << "encoding: " << c.encoding << "\n"
     << "completeness: " << (c.literal ? "off" : "on") << "\n"
     << "size: " << p.size() << "\n"
     << "matrix:\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) os << (j ? " " : "") << num(x(i, j));
    os << "\n";
  }
  return os.str();
}

std::pair<RunConfig, Eigen::MatrixXd> parse_assignment(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "assignment") throw ParseError("not an assignment file");
  RunConfig c;
  std::size_t size = 0;
  auto field = [&](const std::string& key) {
    if (!std::getline(is, line) || line.rfind(key + ": ", 0) != 0) throw ParseError("expected '" + key + ":'");
    return line.substr(key.size() + 2);
  };
  auto integer = [](const std::string& s) {
    try {
      std::size_t used = 0;
      const long v = std::stol(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError("bad integer '" + s + "'");
    }
  };
  c.scenario = field("scenario");
  c.inputs = static_cast<int>(integer(field("inputs")));
  c.outputs = static_cast<int>(integer(field("outputs")));
  c.hierarchy = field("hierarchy");
  c.n = static_cast<int>(integer(field("level")));
  c.m = static_cast<int>(integer(field("copies")));
  c.encoding = field("encoding");
  const std::string comp = field("completeness");
  if (comp != "on" && comp != "off") throw ParseError("completeness must be on or off");
  c.literal = comp == "off";
  size = static_cast<std::size_t>(integer(field("size")));
  if (!std::getline(is, line) || line != "matrix:") throw ParseError("expected 'matrix:'");
  const auto n = static_cast<Eigen::Index>(size);
  Eigen::MatrixXd x(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw ParseError("assignment matrix is truncated");
    std::istringstream ls(line);
    for (Eigen::Index j = 0; j < n; ++j) {
      std::string tok;
      if (!(ls >> tok)) throw ParseError("row " + std::to_string(i) + " is short");
      try {
        x(i, j) = std::stod(tok);
      } catch (const std::exception&) {
        throw ParseError("bad number '" + tok + "'");
      }
    }
  }
  return {c, x};
}

int cmd_test(const RunConfig& c, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  Distribution d = load_distribution(c);
  MomentProblem p = pin_distribution(build_problem(c, d.scenario()), d);
  FeasibilityOutcome o;
  out << config_text(c);
  if (bilinear_hierarchy(c)) {
    SeesawOptions so;
    so.solve = solve_options(c);
    so.max_rounds = c.rounds;
    SeesawOutcome s = seesaw(p, so);
    problem_summary(pin_linearize(p), out);
    o = s.outcome;
    out << "seesaw\n"
        << "  rounds          " << s.rounds << "\n"
        << "  exact           " << (s.exact ? "yes" : "no") << "\n"
        << "  factor residual " << num(s.factor_residual) << "\n";
    for (std::size_t k = 0; k < s.history.size(); ++k) out << "  round " << k + 1 << " " << num(s.history[k]) << "\n";
  } else {
    problem_summary(p, out);
    o = solve(p, solve_options(c));
  }
  out << "verdict " << verdict_name(o.verdict) << "\n"
      << "  t*              " << num(o.t_star) << "\n"
      << "  upper bound     " << num(o.upper_bound) << "\n"
      << "  iterations      " << o.iterations << "\n";
  if (o.linear_residual > 0) out << "  linear conflict " << num(o.linear_residual) << "\n";
  if (!o.note.empty()) out << "  note            " << o.note << "\n";
  switch (o.verdict) {
    case Verdict::feasible:
      out << "  meaning         no obstruction at level " << c.n << "\n";
      break;
    case Verdict::infeasible:
      out << "  meaning         not compatible: the level " << c.n << " relaxation has no solution\n";
      break;
    case Verdict::inconclusive:
      out << "  meaning         undecided at level " << c.n << "\n";
      break;
  }
  if (o.witness.size()) out << "residuals\n" << o.residuals.to_text();
  out << "time " << std::fixed << std::setprecision(3) << seconds_since(t0) << " s\n";
  return exit_of(o.verdict);
}

int cmd_export(const RunConfig& c, std::ostream& out) {
  if (c.output.empty()) throw ParseError("export needs --output");
  MomentProblem p;
  if (c.input.empty()) {
    p = build_problem(c, Scenario::uniform(parse_topology(c.scenario), c.inputs, c.outputs));
  } else {
    Distribution d = load_distribution(c);
    p = pin_distribution(build_problem(c, d.scenario()), d);
  }
  p = pin_linearize(p);
  std::size_t dropped = 0;
  for (const FactorPair& f : p.factor_pairs) dropped += f.linearized ? 0 : 1;
  CompileOptions co;
  co.relax_bilinear = true;
  Compiled comp = compile(p, co);
  export_sdpa(comp.sdp, c.output);
  out << config_text(c);
  out << "export\n"
      << "  file            " << c.output << "\n"
      << "  variables       " << comp.sdp.vars() << "\n"
      << "  block           " << comp.sdp.dim << "\n"
      << "  consistent      " << (comp.consistent ? "yes" : "no") << "\n";
  if (dropped) out << "  relaxed pairs   " << dropped << " bilinear factor pairs left out\n";
  return 0;
}

int cmd_gns(const RunConfig& c, std::ostream& out) {
  if (c.input.empty()) throw ParseError("gns needs an assignment file");
  auto [ac, x] = parse_assignment(read_file(c.input));
  ac.command = c.command;
  ac.input = c.input;
  ac.index_cap = c.index_cap;
  MomentProblem p = build_problem(ac, Scenario::uniform(parse_topology(ac.scenario), ac.inputs, ac.outputs));
  if (static_cast<Eigen::Index>(p.size()) != x.rows()) {
    throw ScenarioMismatch("assignment size " + std::to_string(x.rows()) + " does not match the index size " +
                           std::to_string(p.size()));
  }
  RankReport rr = rank_loop_check(p, x);
  out << config_text(ac);
  out << "rank\n"
      << "  level " << p.level - 1 << "       " << rr.rank_prev << "\n"
      << "  level " << p.level << "       " << rr.rank_cur << "\n"
      << "  loop          " << (rr.loop ? "yes" : "no") << "\n";
  GnsModel m = reconstruct(p, x);
  const ModelResiduals r = verify_model(m);
  out << "model\n" << dump_model(m);
  out << "distribution\n" << evaluate(m).to_text();
  return r.max() <= 1e-6 ? 0 : ExitCode::inconclusive;
}

int cmd_sample(const RunConfig& c, std::ostream& out) {
  if (!c.seed_set) throw ParseError("sample needs an explicit --seed");
  Scenario sc = Scenario::uniform(parse_topology(c.scenario), c.inputs, c.outputs);
  std::vector<int> dims = c.dims;
  if (dims.empty()) {
    for (const auto& legs : sc.network().legs) dims.insert(dims.end(), legs.size(), 2);
  }
  QuantumStrategy s = random_strategy(sc, dims, c.seed);
  const std::string text = born_eval(s).to_text();
  if (c.output.empty()) out << text;
  else write_file(c.output, text);
  if (!c.moments.empty()) {
    MomentProblem p = build_problem(c, sc);
    write_file(c.moments, assignment_to_text(c, p, oracle_assignment(p, s)));
  }
  return 0;
}

int cmd_info(const RunConfig& c, std::ostream& out) {
  Scenario sc = Scenario::uniform(parse_topology(c.scenario), c.inputs, c.outputs);
  MomentProblem p = build_problem(c, sc);
  out << config_text(c);
  problem_summary(p, out);
  const Alphabet& a = *p.alphabet;
  out << "alphabet\n  letters         " << a.size() << "\n";
  CompileOptions co;
  co.relax_bilinear = true;
  Compiled comp = compile(p, co);
  out << "sdp\n"
      << "  block           " << comp.sdp.dim << "\n"
      << "  variables       " << comp.sdp.vars() << "\n";
  return 0;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "test") return cmd_test(c, out);
    if (c.command == "export") return cmd_export(c, out);
    if (c.command == "gns") return cmd_gns(c, out);
    if (c.command == "sample") return cmd_sample(c, out);
    if (c.command == "info") return cmd_info(c, out);
    throw ParseError("unknown command '" + c.command + "'");
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage;
  } catch (const ScenarioMismatch& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::mismatch;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::failure;
  }
}

}  // namespace netnpa::cli
