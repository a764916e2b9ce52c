#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using netnpa::cli::RunConfig;

namespace {

void common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--scenario", c.scenario, "bell2, bell3, bilocal, triangle or star4")->capture_default_str();
  sub->add_option("--hierarchy", c.hierarchy, "standard, factorisation, scalar-extension, inflation or star")
      ->capture_default_str();
  sub->add_option("--n", c.n, "hierarchy level")->capture_default_str();
  sub->add_option("--m", c.m, "inflation copies")->capture_default_str();
  sub->add_option("--encoding", c.encoding, "full or drop_last")->capture_default_str();
  sub->add_flag("--literal", c.literal, "no PVM completeness rows");
  sub->add_option("--index-cap", c.index_cap, "largest moment index allowed")->capture_default_str();
}

void sizes(CLI::App* sub, RunConfig& c) {
  sub->add_option("--inputs", c.inputs, "inputs per party")->capture_default_str();
  sub->add_option("--outputs", c.outputs, "outputs per party")->capture_default_str();
}

void solver(CLI::App* sub, RunConfig& c) {
  sub->add_option("--tol", c.tol, "feasibility tolerance")->capture_default_str();
  sub->add_option("--margin", c.margin, "infeasibility margin")->capture_default_str();
  sub->add_option("--max-iter", c.max_iter, "iteration cap")->capture_default_str();
  sub->add_option("--rounds", c.rounds, "seesaw round cap")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-level compatibility tests for network correlations"};
  app.require_subcommand(1);
  RunConfig c;

  auto* test = app.add_subcommand("test", "decide a distribution at one hierarchy level");
  common(test, c);
  solver(test, c);
  test->add_option("distribution", c.input, "file, or the fixture shared_random_bit / product")->required();

  auto* exp = app.add_subcommand("export", "write the compiled SDP in SDPA sparse format");
  common(exp, c);
  sizes(exp, c);
  exp->add_option("distribution", c.input, "file or fixture to pin (optional)");
  exp->add_option("-o,--output", c.output, "SDPA file")->required();

  auto* gns = app.add_subcommand("gns", "reconstruct a model from a stored moment assignment");
  gns->add_option("assignment", c.input, "assignment file")->required();
  gns->add_option("--index-cap", c.index_cap, "largest moment index allowed")->capture_default_str();

  auto* sample = app.add_subcommand("sample", "distribution and moments of a random strategy");
  common(sample, c);
  sizes(sample, c);
  sample->add_option("--seed", c.seed, "random seed")->required();
  sample->add_option("--dims", c.dims, "local dimension per party leg")->delimiter(',');
  sample->add_option("-o,--output", c.output, "distribution file (default stdout)");
  sample->add_option("--moments", c.moments, "write the oracle moment assignment here");

  auto* info = app.add_subcommand("info", "index size and constraint counts");
  common(info, c);
  sizes(info, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return netnpa::cli::ExitCode::usage;
  }
  for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
  c.seed_set = sample->parsed();
  return netnpa::cli::run(c, std::cout, std::cerr);
}
