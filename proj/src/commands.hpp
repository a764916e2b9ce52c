#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "netnpa/netnpa.hpp"

namespace netnpa::cli {

enum ExitCode : int { feasible = 0, infeasible = 1, inconclusive = 2, usage = 64, mismatch = 65, failure = 70 };

struct RunConfig {
  std::string command;
  std::string scenario = "bilocal";
  std::string hierarchy = "standard";
  std::string encoding = "full";
  int n = 2;
  int m = 2;
  int inputs = 1;
  int outputs = 2;
  std::vector<int> dims;
  double tol = 1e-7;
  double margin = 1e-4;
  int max_iter = 50000;
  int rounds = 25;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool literal = false;
  std::size_t index_cap = 5000;
  std::string input;   // distribution file or fixture name
  std::string output;  // file written by export/sample
  std::string moments; // moment assignment written by sample
};

std::string config_text(const RunConfig& c);

// Moment assignment file: problem header plus the dense matrix.
std::string assignment_to_text(const RunConfig& c, const MomentProblem& p, const Eigen::MatrixXd& x);
std::pair<RunConfig, Eigen::MatrixXd> parse_assignment(const std::string& text);

MomentProblem build_problem(const RunConfig& c, const Scenario& sc);
Distribution load_distribution(const RunConfig& c);

int cmd_test(const RunConfig& c, std::ostream& out);
int cmd_export(const RunConfig& c, std::ostream& out);
int cmd_gns(const RunConfig& c, std::ostream& out);
int cmd_sample(const RunConfig& c, std::ostream& out);
int cmd_info(const RunConfig& c, std::ostream& out);

// Dispatches on c.command and maps exceptions to exit codes.
int run(const RunConfig& c, std::ostream& out, std::ostream& err);

}  // namespace netnpa::cli
